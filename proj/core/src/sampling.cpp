#include "flagfact/sampling.hpp"

#include <cmath>
#include <numbers>

#include "flagfact/flags.hpp"

namespace flagfact {

Complex Sampler::complex_normal() {
  const double re = normal_(rng_);
  const double im = normal_(rng_);
  return {re, im};
}

double Sampler::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

int Sampler::uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng_);
}

Matrix Sampler::gaussian_matrix(int rows, int cols) {
  Matrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = complex_normal();
  return m;
}

Element Sampler::gaussian(const InstancePtr& instance, int bandwidth) {
  const int n = instance->dim();
  const int m = instance->gridsize();
  if (m == 1) return Element(instance, {gaussian_matrix(n, n)});
  std::vector<Matrix> coeffs;
  for (int f = -bandwidth; f <= bandwidth; ++f) {
    const double decay = 1.0 / ((1.0 + std::abs(f)) * (1.0 + std::abs(f)));
    coeffs.push_back(decay * gaussian_matrix(n, n));
  }
  std::vector<Matrix> samples;
  samples.reserve(m);
  for (int g = 0; g < m; ++g) {
    const double theta = 2.0 * std::numbers::pi * g / m;
    Matrix s = Matrix::Zero(n, n);
    for (int f = -bandwidth; f <= bandwidth; ++f)
      s += std::polar(1.0, f * theta) * coeffs[f + bandwidth];
    samples.push_back(std::move(s));
  }
  return Element(instance, std::move(samples));
}

Element Sampler::self_adjoint(const InstancePtr& instance) {
  const auto x = gaussian(instance);
  return scale(0.5, x + adjoint(x));
}

Element Sampler::invertible(const InstancePtr& instance) {
  const auto x = gaussian(instance);
  const double needed = 10.0 * instance->tolerances().inv_threshold;
  if (conditioning(x).relative_sigma_min >= needed) return x;
  return x + Element::scalar(instance, 2.0 * x.norm() + 1.0);
}

Element Sampler::unitary(const InstancePtr& instance) {
  // exp(i h) with h self-adjoint is unitary for the instance's involution.
  const auto h = self_adjoint(instance);
  return exponential(scale(Complex(0.0, 1.0), h));
}

Element Sampler::projection(const InstancePtr& instance, int rank) {
  const int n = instance->dim();
  Matrix e = Matrix::Zero(n, n);
  for (int i = 0; i < rank; ++i) e(i, i) = 1.0;
  const auto u = unitary(instance);
  return u * Element::constant(instance, e) * adjoint(u);
}

Element Sampler::idempotent(const InstancePtr& instance, int rank) {
  const int n = instance->dim();
  Matrix e = Matrix::Zero(n, n);
  for (int i = 0; i < rank; ++i) e(i, i) = 1.0;
  for (;;) {
    const auto v = gaussian(instance);
    if (conditioning(v).relative_sigma_min < 1e-3) continue;
    return v * Element::constant(instance, e) * invert(v);
  }
}

Element Sampler::in_Delta(const Flag& flag) {
  const auto y = gaussian(flag.instance_ptr());
  auto out = Element::zero(flag.instance_ptr());
  for (std::size_t j = 1; j <= flag.blocks(); ++j)
    for (std::size_t k = j; k <= flag.blocks(); ++k)
      out = out + flag.block(j).projection() * y * flag.block(k).projection();
  return out;
}

Element Sampler::in_D(const Flag& flag) {
  return diagonal_truncation(gaussian(flag.instance_ptr()), flag);
}

Element Sampler::in_D_invertible(const Flag& flag) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    const auto d = in_D(flag);
    bool ok = true;
    for (std::size_t k = 1; k <= flag.blocks() && ok; ++k)
      ok = flag.block(k).conditioning(d).relative_sigma_min >= 1e-2;
    if (ok) return d;
  }
  const auto d = in_D(flag);
  return d + Element::scalar(flag.instance_ptr(), 2.0 * d.norm() + 1.0);
}

Element Sampler::positive_diagonal(const Flag& flag, double lo, double hi) {
  const auto h = diagonal_truncation(self_adjoint(flag.instance_ptr()), flag);
  const double half_width = 0.5 * std::log(hi / lo);
  const double hn = h.norm();
  const auto scaled = hn > 0.0 ? scale(half_width / hn, h) : h;
  return scale(std::sqrt(lo * hi), exponential(scaled));
}

Element Sampler::in_N(const Flag& flag, double scale_factor) {
  const auto y = gaussian(flag.instance_ptr());
  auto out = Element::identity(flag.instance_ptr());
  for (std::size_t j = 1; j <= flag.blocks(); ++j)
    for (std::size_t k = j + 1; k <= flag.blocks(); ++k)
      out = out + scale(scale_factor,
                        flag.block(j).projection() * y * flag.block(k).projection());
  return out;
}

Element Sampler::in_N_complement(const Flag& flag, double scale_factor) {
  const auto y = gaussian(flag.instance_ptr());
  auto out = Element::identity(flag.instance_ptr());
  for (std::size_t j = 1; j <= flag.blocks(); ++j)
    for (std::size_t k = 1; k < j; ++k)
      out = out + scale(scale_factor,
                        flag.block(j).projection() * y * flag.block(k).projection());
  return out;
}

Flag Sampler::random_selfadjoint_flag(const InstancePtr& instance,
                                      const std::vector<int>& cuts) {
  const auto base = standard_flag(instance, cuts);
  const auto u = unitary(instance);
  const auto us = adjoint(u);
  std::vector<Idempotent> chain;
  for (const auto& p : base.chain()) {
    // Symmetrize away rounding so the self-adjoint certificate holds.
    const auto q = u * p.element() * us;
    chain.emplace_back(scale(0.5, q + adjoint(q)));
  }
  return Flag(instance, std::move(chain));
}

}  // namespace flagfact
