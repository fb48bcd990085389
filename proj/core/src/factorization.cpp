#include "flagfact/factorization.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace flagfact {

namespace {

struct GaussPartial {
  Element x, d, y;
};

struct NestGramPartial {
  Element d, b;
};

// Inverse of h inside the corner of p_j, reporting failure as a corner error.
Element corner_inverse(const Flag& flag, std::size_t j, const Element& h) {
  try {
    return flag.corner(j).inverse(h);
  } catch (const NotInvertible& e) {
    throw CornerNotInvertible(j, e.sigma_min());
  }
}

// h lives in the corner of p_k; factor it against p_1 < ... < p_k.
GaussPartial gauss_recurse(const Element& h, const Flag& flag, std::size_t k) {
  if (k == 1) return {flag.projection(1), h, flag.projection(1)};
  const auto& p = flag.projection(k - 1);
  const auto& q = flag.block(k).projection();
  const auto php = p * h * p;
  const auto php_inv = corner_inverse(flag, k - 1, php);
  const auto phq = p * h * q;
  const auto lower = q * h * p * php_inv;   // x_{k-1}
  const auto upper = php_inv * phq;         // y_1
  const auto schur = q * h * q - lower * phq;
  auto inner = gauss_recurse(php, flag, k - 1);
  return {inner.x + q + lower * inner.x, inner.d + schur, inner.y + inner.y * upper + q};
}

NestGramPartial nest_gram_recurse(const Element& h, const Flag& flag, std::size_t k) {
  if (k == 1) return {h, flag.projection(1)};
  const auto& p = flag.projection(k - 1);
  const auto& q = flag.block(k).projection();
  const auto php = p * h * p;
  auto inner = nest_gram_recurse(php, flag, k - 1);
  const auto php_inv = corner_inverse(flag, k - 1, php);
  const auto d_inv = corner_inverse(flag, k - 1, inner.d);
  const auto bs_inv = corner_inverse(flag, k - 1, adjoint(inner.b));
  const auto t = d_inv * bs_inv * p * h * q;
  // Closed form of the Schur complement of p h p.
  const auto d_last = q * (h - h * p * php_inv * p * h) * q;
  return {inner.d + d_last, inner.b + t + q};
}

bool positive_point(const Complex& z, double margin) {
  return z.real() > margin && std::abs(z.imag()) <= margin;
}

}  // namespace

std::vector<double> corner_conditions(const Element& h, const Flag& flag) {
  std::vector<double> out;
  out.reserve(flag.blocks());
  for (std::size_t j = 1; j <= flag.blocks(); ++j) {
    const auto& p = flag.projection(j);
    out.push_back(flag.corner(j).conditioning(p * h * p, h).relative_sigma_min);
  }
  return out;
}

GaussFactors gauss_decompose(const Element& g, const Flag& flag) {
  require_same_instance(g, flag.projection(0));
  const double threshold = g.instance().tolerances().inv_threshold;
  auto conds = corner_conditions(g, flag);
  for (std::size_t j = 0; j < conds.size(); ++j)
    if (conds[j] < threshold) throw CornerNotInvertible(j + 1, conds[j]);

  auto parts = gauss_recurse(g, flag, flag.blocks());
  const double residual = distance(parts.x * parts.d * parts.y, g) / std::max(g.norm(), 1e-300);
  return {std::move(parts.x), std::move(parts.d), std::move(parts.y), residual, std::move(conds)};
}

NestGramFactors nest_gram_factorize(const Element& s, const Flag& flag) {
  require_same_instance(s, flag.projection(0));
  if (!flag.selfadjoint()) throw Error("nest-Gram factorization needs a self-adjoint flag");
  const auto& tol = s.instance().tolerances();

  NestGramFactors out{s, s, 0.0, {}, {}, {}};
  if (!s.instance().known_hermitian())
    out.warnings.push_back("instance " + s.instance().describe() +
                           " has an indefinite involution; hermitian hypothesis not met");

  const auto sc = conditioning(s);
  if (sc.relative_sigma_min < tol.inv_threshold)
    throw NotInvertible("nest-Gram factorization needs an invertible element",
                        sc.relative_sigma_min,
                        s.gridsize() > 1 ? std::optional<std::size_t>(sc.worst_sample)
                                         : std::nullopt);

  const auto gram = adjoint(s) * s;
  out.corner_conditions = corner_conditions(gram, flag);
  for (std::size_t j = 0; j + 1 < out.corner_conditions.size(); ++j)
    if (out.corner_conditions[j] < tol.inv_threshold)
      throw CornerNotInvertible(j + 1, out.corner_conditions[j]);

  auto parts = nest_gram_recurse(gram, flag, flag.blocks());
  const double sn = s.norm();
  out.residual = distance(adjoint(parts.b) * parts.d * parts.b, gram) / std::max(sn * sn, 1e-300);
  out.d_spectrum = spectrum(parts.d);
  const double margin = tol.spec_margin * std::max(1.0, out.d_spectrum.max_abs());
  std::vector<Complex> offending;
  for (const auto& z : out.d_spectrum.points)
    if (!positive_point(z, margin)) offending.push_back(z);
  if (!offending.empty())
    throw NotPositive("block diagonal factor d is not positive", std::move(offending));
  out.d = std::move(parts.d);
  out.b = std::move(parts.b);
  return out;
}

Element positive_sqrt(const Element& d, const Flag& flag) {
  require_same_instance(d, flag.projection(0));
  if (!in_D(d, flag) || !is_self_adjoint(d))
    throw Error("positive_sqrt needs a self-adjoint element of D(delta)");
  const auto& inst = d.instance();
  const bool hermitian_blocks = inst.standard_involution() && flag.selfadjoint();

  // Eigen-data of every compressed block, then a global positivity check.
  std::vector<std::vector<Matrix>> roots(flag.blocks() + 1);
  std::vector<Complex> points;
  for (std::size_t k = 1; k <= flag.blocks(); ++k) {
    const auto blocks = flag.block(k).compress(d);
    for (const auto& b : blocks) {
      if (hermitian_blocks) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (b + b.adjoint()));
        const Eigen::VectorXd lam = es.eigenvalues();
        for (Eigen::Index i = 0; i < lam.size(); ++i) points.emplace_back(lam(i), 0.0);
        roots[k].push_back(es.eigenvectors() *
                           lam.cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal() *
                           es.eigenvectors().adjoint());
      } else {
        Eigen::ComplexEigenSolver<Matrix> es(b, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
          points.push_back(es.eigenvalues()(i));
        roots[k].push_back(b.sqrt());
      }
    }
  }
  double radius = 0.0;
  for (const auto& z : points) radius = std::max(radius, std::abs(z));
  const double margin = inst.tolerances().spec_margin * std::max(1.0, radius);
  std::vector<Complex> offending;
  for (const auto& z : points)
    if (!positive_point(z, margin)) offending.push_back(z);
  if (!offending.empty())
    throw NotPositive("element is not positive", std::move(offending));

  auto out = Element::zero(d.instance_ptr());
  for (std::size_t k = 1; k <= flag.blocks(); ++k) out = out + flag.block(k).expand(roots[k]);
  return out;
}

UABFactors uab_decompose(const Element& s, const Flag& flag) {
  auto ng = nest_gram_factorize(s, flag);
  auto a = positive_sqrt(ng.d, flag);
  const auto ab = a * ng.b;
  auto u = s * invert(ab);
  const auto one = Element::identity(s.instance_ptr());
  UABFactors out{std::move(u), std::move(a), std::move(ng.b), 0.0, 0.0,
                 std::move(ng.corner_conditions), std::move(ng.warnings)};
  out.residual = distance(out.u * out.a * out.b, s) / std::max(s.norm(), 1e-300);
  out.unitarity_residual = distance(adjoint(out.u) * out.u, one) / one.norm();
  return out;
}

FactorPathReport factor_maps_consistency(const std::vector<Element>& path, const Flag& flag) {
  FactorPathReport report;
  std::optional<UABFactors> previous;
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::optional<UABFactors> current;
    try {
      current = uab_decompose(path[i], flag);
    } catch (const Error& e) {
      report.failed_index = i;
      report.failure = e.what();
      break;
    }
    if (previous) {
      const double ds = distance(path[i], path[i - 1]);
      const double df = std::max({distance(current->u, previous->u),
                                  distance(current->a, previous->a),
                                  distance(current->b, previous->b)});
      const double ratio = ds > 0.0 ? df / ds : (df > 0.0 ? INFINITY : 0.0);
      report.ratios.push_back(ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
    }
    previous = std::move(current);
    ++report.steps;
  }
  return report;
}

}  // namespace flagfact
