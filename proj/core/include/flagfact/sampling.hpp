#pragma once

// Seeded random element generators used by the invariant suites, the
// hermitian witness and the tests.  A fixed seed reproduces every draw.

#include <cstdint>
#include <random>
#include <vector>

#include "flagfact/algebra.hpp"

namespace flagfact {

class Flag;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() noexcept { return rng_; }

  Complex complex_normal();
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);
  Matrix gaussian_matrix(int rows, int cols);

  /// Entries i.i.d. complex standard normal.  Loop elements are band-limited
  /// trigonometric polynomials of degree `bandwidth` with decaying
  /// coefficients so that they stay smooth on the grid.
  Element gaussian(const InstancePtr& instance, int bandwidth = 3);
  Element self_adjoint(const InstancePtr& instance);
  /// Gaussian sample, shifted by a multiple of 1 when its relative sigma_min
  /// does not clear 10 x inv_threshold.
  Element invertible(const InstancePtr& instance);
  /// exp(i h) for a self-adjoint sample h; unitary for the instance involution.
  Element unitary(const InstancePtr& instance);
  /// Self-adjoint idempotent of the given pointwise rank (standard involution).
  Element projection(const InstancePtr& instance, int rank);
  /// v E v^{-1} with E a coordinate projection of the given rank and v
  /// random invertible; generally not self-adjoint.
  Element idempotent(const InstancePtr& instance, int rank);

  // Flag-relative samples.

  /// Block upper triangular: sum_{j <= k} q_j y q_k.
  Element in_Delta(const Flag& flag);
  /// Phi(y) for a Gaussian y.
  Element in_D(const Flag& flag);
  /// Invertible block diagonal element with each block shifted away from 0.
  Element in_D_invertible(const Flag& flag);
  /// Block diagonal with spectrum in [lo, hi] (standard involution).
  Element positive_diagonal(const Flag& flag, double lo = 0.5, double hi = 2.0);
  /// 1 + strictly upper blocks scaled by `scale`.
  Element in_N(const Flag& flag, double scale = 1.0);
  /// 1 + strictly lower blocks scaled by `scale`.
  Element in_N_complement(const Flag& flag, double scale = 1.0);

  /// Random self-adjoint flag of the given block sizes: a standard flag
  /// conjugated by a random unitary.
  Flag random_selfadjoint_flag(const InstancePtr& instance, const std::vector<int>& cuts);

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace flagfact
