#pragma once

#include <gtest/gtest.h>

#include <initializer_list>

#include "flagfact/algebra.hpp"

namespace flagfact::testing {

inline Matrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (const auto& v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

inline Element dense(const InstancePtr& inst, const Matrix& m) { return Element(inst, {m}); }

inline Matrix unit(int n, int i, int j) {
  Matrix m = Matrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

inline void expect_near(const Element& x, const Element& y, double tol = 1e-12) {
  EXPECT_LE(distance(x, y), tol) << "got\n" << x.sample(0) << "\nexpected\n" << y.sample(0);
}

inline void expect_near(const Matrix& x, const Matrix& y, double tol = 1e-12) {
  EXPECT_LE((x - y).norm(), tol) << "got\n" << x << "\nexpected\n" << y;
}

}  // namespace flagfact::testing
