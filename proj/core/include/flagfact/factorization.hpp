#pragma once

// Flag-relative decompositions of invertible elements.
//
//   gauss_decompose      g = x d y        x in N(1-delta), d in D(delta)^x, y in N(delta)
//   nest_gram_factorize  s*s = b* d b     d positive block diagonal, b in N(delta)
//   uab_decompose        s = u a b        u unitary, a = d^{1/2}, b as above
//
// All three peel the last interior projection p_{n-1} off the flag and recurse
// into the corner algebra p_{n-1} A p_{n-1}.

#include <optional>
#include <string>
#include <vector>

#include "flagfact/algebra.hpp"
#include "flagfact/flags.hpp"

namespace flagfact {

struct GaussFactors {
  Element x;
  Element d;
  Element y;
  /// ||xdy - g|| / ||g||.
  double residual = 0.0;
  /// sigma_min of p_j g p_j in its corner relative to g, j = 1..n.
  std::vector<double> corner_conditions;
};

struct NestGramFactors {
  Element d;
  Element b;
  /// ||b*db - s*s|| / ||s||^2.
  double residual = 0.0;
  /// sigma_min of p_j s*s p_j in its corner relative to s*s, j = 1..n.
  std::vector<double> corner_conditions;
  SpectrumApprox d_spectrum;
  std::vector<std::string> warnings;
};

struct UABFactors {
  Element u;
  Element a;
  Element b;
  /// ||uab - s|| / ||s||.
  double residual = 0.0;
  /// ||u*u - 1|| / ||1||.
  double unitarity_residual = 0.0;
  std::vector<double> corner_conditions;
  std::vector<std::string> warnings;
};

/// sigma_min of p_j h p_j inside p_j A p_j over the largest singular value of
/// h, for j = 1..n.
std::vector<double> corner_conditions(const Element& h, const Flag& flag);

/// Throws CornerNotInvertible(j) for the first j with p_j g p_j singular in
/// its corner (j = n means g itself is singular).
GaussFactors gauss_decompose(const Element& g, const Flag& flag);

/// Requires a self-adjoint flag.  On instances without a definite involution
/// the run proceeds with a warning; a singular corner of s*s then surfaces as
/// CornerNotInvertible.  Throws NotInvertible when s is singular and
/// NotPositive when d fails the positivity check.
NestGramFactors nest_gram_factorize(const Element& s, const Flag& flag);

/// Blockwise positive square root of a positive element of D(delta).
Element positive_sqrt(const Element& d, const Flag& flag);

UABFactors uab_decompose(const Element& s, const Flag& flag);

struct FactorPathReport {
  std::size_t steps = 0;
  /// max over steps of ||delta factors|| / ||delta s||.
  double max_ratio = 0.0;
  std::vector<double> ratios;
  std::optional<std::size_t> failed_index;
  std::string failure;
};

/// Evaluates u(s), a(s), b(s) along a discretized path and reports the
/// step-to-step factor deviation relative to the input deviation.
FactorPathReport factor_maps_consistency(const std::vector<Element>& path, const Flag& flag);

}  // namespace flagfact
