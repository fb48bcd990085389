// Acceptance suite: one PASS/FAIL line per criterion.
//
//   flagfact_acceptance <path to flagfact cli> [scratch dir]
//
// Oracles (QR, Cholesky, SVD polar, eigenvalues) come straight from Eigen and
// never touch the factorization code under test.

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flagfact/factorization.hpp"
#include "flagfact/flags.hpp"
#include "flagfact/manifold.hpp"
#include "flagfact/sampling.hpp"

using namespace flagfact;

namespace {

struct Result {
  bool pass = true;
  double worst = 0.0;
  std::size_t samples = 0;
  std::size_t failures = 0;
  std::string detail;

  void record(double defect, double tol) {
    ++samples;
    worst = std::max(worst, defect);
    if (!(defect <= tol)) {
      pass = false;
      ++failures;
    }
  }
  void fail(const std::string& why) {
    ++samples;
    ++failures;
    pass = false;
    if (detail.empty()) detail = why;
  }
};

double rel(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / std::max(want.norm(), 1e-300);
}

const std::vector<int> kSizes{2, 4, 8, 16, 32};

Matrix gaussian(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng)) / std::sqrt(2.0);
  return m;
}

// Gaussian matrices are invertible almost surely; resample the rare bad draw.
Matrix invertible(std::mt19937_64& rng, int n) {
  for (;;) {
    Matrix m = gaussian(rng, n);
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv(n - 1) / sv(0) > 1e-6) return m;
  }
}

// Householder QR with R normalized to a positive diagonal.
void qr_positive(const Matrix& s, Matrix& q, Matrix& r) {
  Eigen::HouseholderQR<Matrix> qr(s);
  q = qr.householderQ() * Matrix::Identity(s.rows(), s.cols());
  r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    const Complex d = r(i, i);
    const Complex phase = std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0);
    r.row(i) /= phase;
    q.col(i) *= phase;
  }
}

Result criterion_qr() {
  Result res;
  std::mt19937_64 rng(101);
  for (int t = 0; t < 100; ++t) {
    const int n = kSizes[t % kSizes.size()];
    const auto inst = AlgebraInstance::dense(n);
    const Matrix s = invertible(rng, n);
    Matrix q, r;
    qr_positive(s, q, r);
    try {
      const auto f = uab_decompose(Element(inst, {s}), full_flag(inst));
      res.record(std::max(rel(f.u.matrix(), q), rel((f.a * f.b).matrix(), r)), 1e-8);
    } catch (const Error& e) {
      res.fail(e.what());
    }
  }
  return res;
}

Result criterion_cholesky() {
  Result res;
  std::mt19937_64 rng(102);
  for (int t = 0; t < 100; ++t) {
    const int n = kSizes[t % kSizes.size()];
    const auto inst = AlgebraInstance::dense(n);
    const Matrix s = invertible(rng, n);
    const Matrix gram = s.adjoint() * s;
    const Matrix upper = Eigen::LLT<Matrix>(gram).matrixU();
    try {
      const auto f = nest_gram_factorize(Element(inst, {s}), full_flag(inst));
      // Full flag: d is diagonal, so its root is entrywise.
      const Matrix d = f.d.matrix();
      Matrix root = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) root(i, i) = std::sqrt(d(i, i).real());
      res.record(rel(root * f.b.matrix(), upper), 1e-8);
    } catch (const Error& e) {
      res.fail(e.what());
    }
  }
  return res;
}

Result criterion_polar() {
  Result res;
  std::mt19937_64 rng(103);
  for (int t = 0; t < 100; ++t) {
    const int n = kSizes[t % kSizes.size()];
    const auto inst = AlgebraInstance::dense(n);
    const Matrix s = invertible(rng, n);
    Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Matrix u = svd.matrixU() * svd.matrixV().adjoint();
    const Matrix a = svd.matrixV() * svd.singularValues().cast<Complex>().asDiagonal() *
                     svd.matrixV().adjoint();
    try {
      const auto f = uab_decompose(Element(inst, {s}), Flag::trivial(inst));
      res.record(std::max({rel(f.u.matrix(), u), rel(f.a.matrix(), a),
                           rel(f.b.matrix(), Matrix::Identity(n, n))}),
                 1e-8);
    } catch (const Error& e) {
      res.fail(e.what());
    }
  }
  return res;
}

// 2..4 blocks of pairwise distinct sizes.
std::vector<int> unequal_cuts(std::mt19937_64& rng, int& n) {
  const int blocks = std::uniform_int_distribution<int>(2, 4)(rng);
  std::vector<int> sizes(5);
  std::iota(sizes.begin(), sizes.end(), 1);
  std::shuffle(sizes.begin(), sizes.end(), rng);
  sizes.resize(blocks);
  std::vector<int> cuts;
  n = 0;
  for (int b = 0; b < blocks; ++b) {
    n += sizes[b];
    if (b + 1 < blocks) cuts.push_back(n);
  }
  return cuts;
}

double factor_error(const Element& got, const Element& want) {
  return relative_difference(got, want);
}

Result criterion_roundtrip() {
  Result res;
  std::mt19937_64 rng(104);
  Sampler s(104);
  for (int t = 0; t < 100; ++t) {
    int n = 0;
    const auto cuts = unequal_cuts(rng, n);
    const auto inst = AlgebraInstance::dense(n);
    const auto flag = standard_flag(inst, cuts);
    try {
      const auto x = s.in_N_complement(flag, 0.5);
      const auto d = s.in_D_invertible(flag);
      const auto y = s.in_N(flag, 0.5);
      const auto f = gauss_decompose(x * d * y, flag);
      res.record(std::max({factor_error(f.x, x), factor_error(f.d, d), factor_error(f.y, y)}),
                 1e-7);
    } catch (const Error& e) {
      res.fail(std::string("gauss: ") + e.what());
    }
  }
  for (int t = 0; t < 100; ++t) {
    int n = 0;
    const auto cuts = unequal_cuts(rng, n);
    const auto inst = AlgebraInstance::dense(n);
    const auto flag = standard_flag(inst, cuts);
    try {
      const auto u = s.unitary(inst);
      const auto a = s.positive_diagonal(flag);
      const auto b = s.in_N(flag, 0.5);
      const auto f = uab_decompose(u * a * b, flag);
      res.record(std::max({factor_error(f.u, u), factor_error(f.a, a), factor_error(f.b, b)}),
                 1e-7);
    } catch (const Error& e) {
      res.fail(std::string("uab: ") + e.what());
    }
  }
  return res;
}

// The corner spectrum is read off the compressed block directly: with
// p = Q diag(1_r, 0) Q^H and x = Q diag(X, 0) Q^H it is eig(X).
Result criterion_corner_spectra() {
  Result res;
  std::mt19937_64 rng(105);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 7;
    const int r = std::uniform_int_distribution<int>(1, n - 1)(rng);
    const auto inst = AlgebraInstance::dense(n);
    Matrix q = Eigen::HouseholderQR<Matrix>(gaussian(rng, n)).householderQ();
    Matrix block = Matrix::Zero(n, n);
    block.topLeftCorner(r, r) = gaussian(rng, r);
    Matrix e = Matrix::Zero(n, n);
    e.topLeftCorner(r, r).setIdentity();
    const Element p(inst, {q * e * q.adjoint()});
    const Element x(inst, {q * block * q.adjoint()});
    const Eigen::VectorXcd eig = Eigen::ComplexEigenSolver<Matrix>(block.topLeftCorner(r, r))
                                     .eigenvalues();
    std::vector<Complex> with0(eig.data(), eig.data() + r);
    std::vector<Complex> with1 = with0;
    with0.emplace_back(0.0);
    with1.emplace_back(1.0);
    try {
      const Corner corner(p);
      const auto s0 = spectrum(corner_embed_iota0(x, corner));
      const auto s1 = spectrum(corner_embed_iota1(x, corner));
      const double scale = std::max(1.0, eig.cwiseAbs().maxCoeff());
      res.record(std::max(hausdorff_distance(s0.points, with0),
                          hausdorff_distance(s1.points, with1)) /
                     scale,
                 1e-8);
    } catch (const Error& ex) {
      res.fail(ex.what());
    }
  }
  return res;
}

Result criterion_transitivity() {
  Result res;
  Sampler s(106);
  const std::vector<std::pair<InstancePtr, std::vector<int>>> cases{
      {AlgebraInstance::dense(4), {}},
      {AlgebraInstance::block(2, AlgebraInstance::loop(2, 64)), {1}}};
  for (const auto& [inst, fixed] : cases) {
    for (int t = 0; t < 100; ++t) {
      std::vector<int> cuts = fixed;
      if (cuts.empty()) cuts = (t % 3 == 0) ? std::vector<int>{1, 2, 3}
                               : (t % 3 == 1) ? std::vector<int>{2}
                                              : std::vector<int>{1, 3};
      try {
        const auto flag = s.random_selfadjoint_flag(inst, cuts);
        const auto g = s.invertible(inst);
        const auto w = unitary_transitivity_witness(g, flag);
        const double defect = std::max(w.unitarity_residual, w.stabilizer_defect);
        if (!w.certified) {
          res.fail("certificate rejected");
          res.worst = std::max(res.worst, defect);
        } else {
          res.record(defect, 1e-8);
        }
      } catch (const Error& e) {
        res.fail(e.what());
      }
    }
  }
  return res;
}

Result criterion_counterexample() {
  Result res;
  const auto a = default_indefinite_witness();
  const auto& inner = a.instance_ptr();
  try {
    const auto c = counterexample_char(inner, a);
    if (!c.obstructed || c.failing_corner != std::optional<std::size_t>(1))
      res.fail("char model did not stop at corner 1");
    res.record(c.one_plus_a_squared, 1e-12);
  } catch (const Error& e) {
    res.fail(std::string("char: ") + e.what());
  }
  try {
    const auto dense2 = AlgebraInstance::dense(2);
    Matrix h(2, 2);
    h << 0.0, 1.0, 1.0, 0.0;
    const auto control = gshape_nestgram(dense2, Element(dense2, {h}));
    if (control.obstructed) res.fail("hermitian control was obstructed: " + control.failure);
  } catch (const Error& e) {
    res.fail(std::string("control: ") + e.what());
  }
  try {
    const auto u = u11_counterexample(inner, a);
    if (!u.obstructed) res.fail("u11 model did not hit a singular g_11");
    res.record(u.identity_residual, 1e-12);
    res.record(u.g11_condition, 1e-12);
  } catch (const Error& e) {
    res.fail(std::string("u11: ") + e.what());
  }
  return res;
}

Result criterion_idempotents() {
  Result res;
  std::mt19937_64 rng(108);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 7;
    const int r = std::uniform_int_distribution<int>(1, n - 1)(rng);
    const auto inst = AlgebraInstance::dense(n);
    const Matrix v = invertible(rng, n);
    Matrix pattern = Matrix::Zero(n, n);
    pattern.topLeftCorner(r, r).setIdentity();
    const Matrix em = v * pattern * v.inverse();
    try {
      const Idempotent e(Element(inst, {em}));
      const auto p = selfadjointify(e);
      const auto& pe = p.element();
      const auto& ee = e.element();
      const double scale = std::max(1.0, ee.norm());
      double defect = std::max({distance(pe, adjoint(pe)), distance(pe * pe, pe),
                                distance(ee * pe, pe), distance(pe * ee, ee)}) /
                      scale;
      const auto s = similarity(p, e);
      defect = std::max(defect, distance(s * ee * invert(s), pe) / scale);
      const auto again = selfadjointify(p);
      defect = std::max(defect, distance(again.element(), pe));
      res.record(defect, 1e-8);
    } catch (const Error& ex) {
      res.fail(ex.what());
    }
  }
  return res;
}

Result criterion_truncation() {
  Result res;
  Sampler s(109);
  std::mt19937_64 rng(109);
  for (int t = 0; t < 200; ++t) {
    InstancePtr inst;
    std::vector<int> cuts;
    if (t % 4 == 3) {
      inst = AlgebraInstance::block(3, AlgebraInstance::loop(2, 64));
      cuts = {1, 2};
    } else {
      int n = 0;
      cuts = unequal_cuts(rng, n);
      inst = AlgebraInstance::dense(n);
    }
    try {
      const auto flag = t % 2 == 0 ? standard_flag(inst, cuts)
                                   : s.random_selfadjoint_flag(inst, cuts);
      const auto x = s.in_Delta(flag);
      const auto y = s.in_Delta(flag);
      const auto px = diagonal_truncation(x, flag);
      const auto py = diagonal_truncation(y, flag);
      const double idem = distance(diagonal_truncation(px, flag), px) / std::max(1.0, x.norm());
      const double mult = distance(diagonal_truncation(x * y, flag), px * py) /
                          std::max(1.0, x.norm() * y.norm());
      res.record(std::max(idem, mult), 1e-9);
    } catch (const Error& e) {
      res.fail(e.what());
    }
  }
  return res;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

Result criterion_determinism(const std::string& cli, const std::filesystem::path& scratch) {
  Result res;
  std::vector<std::string> bodies;
  for (int run = 0; run < 2; ++run) {
    const auto out = scratch / ("propsweep_" + std::to_string(run) + ".json");
    std::filesystem::remove(out);
    const std::string cmd = quote(cli) + " propsweep --seed 2024 --trials 20 --out " +
                            quote(out.string()) + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
      res.fail("propsweep run " + std::to_string(run) + " exited with status " +
               std::to_string(rc));
      return res;
    }
    try {
      const auto doc = nlohmann::json::parse(slurp(out));
      bodies.push_back(doc.at("report").dump());
      if (doc.at("report_sha256").get<std::string>().empty()) res.fail("empty digest");
    } catch (const std::exception& e) {
      res.fail(std::string("unreadable report: ") + e.what());
      return res;
    }
  }
  if (bodies[0] != bodies[1]) res.fail("report bodies differ");
  else ++res.samples;
  return res;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: flagfact_acceptance <flagfact cli> [scratch dir]\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::filesystem::path scratch =
      argc > 2 ? std::filesystem::path(argv[2]) : std::filesystem::temp_directory_path();
  std::filesystem::create_directories(scratch);

  struct Criterion {
    int id;
    std::string name;
    double tol;
    std::function<Result()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "qr_oracle", 1e-8, criterion_qr},
      {2, "cholesky_oracle", 1e-8, criterion_cholesky},
      {3, "polar_oracle", 1e-8, criterion_polar},
      {4, "uniqueness_roundtrips", 1e-7, criterion_roundtrip},
      {5, "corner_spectra", 1e-8, criterion_corner_spectra},
      {6, "unitary_transitivity", 1e-8, criterion_transitivity},
      {7, "indefinite_counterexample", 1e-12, criterion_counterexample},
      {8, "idempotent_constructions", 1e-8, criterion_idempotents},
      {9, "truncation_algebra", 1e-9, criterion_truncation},
      {10, "propsweep_determinism", 0.0, [&] { return criterion_determinism(cli, scratch); }},
  };

  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const Result r = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d %-26s samples=%-4zu failures=%-3zu worst=%.3e tol=%.0e %.2fs%s%s\n",
                r.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), r.samples, r.failures, r.worst,
                c.tol, secs, r.detail.empty() ? "" : "  first: ", r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%s %zu/%zu criteria passed in %.2fs\n", failed == 0 ? "PASS" : "FAIL",
              criteria.size() - failed, criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
