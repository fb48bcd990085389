#include "flagfact/properties.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "flagfact/factorization.hpp"
#include "flagfact/flags.hpp"
#include "flagfact/manifold.hpp"

namespace flagfact {

int TrialContext::dense_size() const {
  return config.dense_sizes.at(trial % config.dense_sizes.size());
}

int TrialContext::loop_matdim() const {
  return config.loop_matdims.at(trial % config.loop_matdims.size());
}

int TrialContext::loop_grid() const {
  const std::size_t k = config.loop_matdims.size();
  return config.loop_grids.at((trial / k) % config.loop_grids.size());
}

namespace {

double rel(double num, double scale) { return num / std::max(1.0, scale); }

Outcome check(double defect, double threshold, std::string note = {}) {
  return {std::isfinite(defect) && defect <= threshold, defect, std::move(note)};
}

// Hermitian instances, cycling dense / loop / M_2(dense) / M_2(loop).
InstancePtr hermitian_instance(const TrialContext& ctx, bool allow_blocks = true) {
  const std::size_t variants = allow_blocks ? 4 : 2;
  switch (ctx.trial % variants) {
    case 0:
      return AlgebraInstance::dense(ctx.dense_size());
    case 1:
      return AlgebraInstance::loop(ctx.loop_matdim(), ctx.loop_grid());
    case 2:
      return AlgebraInstance::block(2, AlgebraInstance::dense(1 + ctx.trial % 3));
    default:
      return AlgebraInstance::block(2, AlgebraInstance::loop(ctx.loop_matdim(), 64));
  }
}

// Strictly increasing cut positions in (0, extent) giving between lo and hi blocks.
std::vector<int> random_cuts(Sampler& s, int extent, int lo, int hi) {
  hi = std::min(hi, extent);
  lo = std::min(lo, hi);
  const int blocks = s.uniform_int(lo, hi);
  std::vector<int> pool;
  for (int c = 1; c < extent; ++c) pool.push_back(c);
  std::vector<int> cuts;
  for (int i = 1; i < blocks; ++i) {
    const int at = s.uniform_int(0, static_cast<int>(pool.size()) - 1);
    cuts.push_back(pool[at]);
    pool.erase(pool.begin() + at);
  }
  std::sort(cuts.begin(), cuts.end());
  return cuts;
}

// 1 + c y / ||y||: invertible with condition number at most (1 + c) / (1 - c).
Element near_identity(Sampler& s, const InstancePtr& inst, double c) {
  const auto y = s.gaussian(inst);
  return Element::identity(inst) + scale(c / std::max(y.norm(), 1e-300), y);
}

// Standard, unitarily rotated or obliquely conjugated flag with 2-4 blocks.
Flag random_flag(Sampler& s, const InstancePtr& inst, bool selfadjoint_only) {
  const auto cuts = random_cuts(s, partition_extent(*inst), 2, 4);
  const int variant = s.uniform_int(0, selfadjoint_only ? 1 : 2);
  if (variant == 0 || (variant == 1 && !inst->standard_involution()))
    return standard_flag(inst, cuts);
  if (variant == 1) return s.random_selfadjoint_flag(inst, cuts);
  const auto base = standard_flag(inst, cuts);
  const auto g = near_identity(s, inst, 0.5);
  const auto g_inv = invert(g);
  std::vector<Idempotent> chain;
  for (const auto& p : base.chain()) chain.emplace_back(g * p.element() * g_inv);
  return Flag(inst, std::move(chain));
}

// Random J-self-adjoint a with i in its spectrum: [[0, 1], [-1, 0]] on a
// (+, -) coordinate pair plus a random J-self-adjoint rest, conjugated by a
// random J-unitary.
Element random_indefinite_witness(Sampler& s) {
  const int n = s.uniform_int(2, 4);
  std::vector<int> sig(n, 1);
  const int negatives = s.uniform_int(1, n - 1);
  for (int i = 0; i < negatives; ++i) sig[n - 1 - i] = -1;
  const auto inst = AlgebraInstance::indefinite(sig);
  Matrix m = s.self_adjoint(inst).matrix();
  m.row(0).setZero();
  m.col(0).setZero();
  m.row(n - 1).setZero();
  m.col(n - 1).setZero();
  m(0, n - 1) = 1.0;
  m(n - 1, 0) = -1.0;
  const auto y = s.gaussian(inst);
  const auto v = exponential(scale(0.25 / y.norm(), y - adjoint(y)));
  const auto a = v * Element::constant(inst, m) * invert(v);
  return scale(0.5, a + adjoint(a));
}

// Every non-empty property outcome below reports a relative defect.

std::vector<Property> algebra_properties() {
  std::vector<Property> out;

  out.push_back({"algebra", "involution_axioms", 1e-9, [](TrialContext& ctx) {
    InstancePtr inst;
    switch (ctx.trial % 4) {
      case 0: inst = AlgebraInstance::dense(ctx.dense_size()); break;
      case 1: {
        const int n = ctx.dense_size();
        std::vector<int> sig(n, 1);
        for (int i = n / 2; i < n; ++i) sig[i] = -1;
        inst = AlgebraInstance::indefinite(sig);
        break;
      }
      case 2: inst = AlgebraInstance::loop(ctx.loop_matdim(), ctx.loop_grid()); break;
      default: inst = AlgebraInstance::block(2, AlgebraInstance::dense(2));
    }
    auto& s = ctx.sampler;
    const auto x = s.gaussian(inst);
    const auto y = s.gaussian(inst);
    const Complex lambda = s.complex_normal();
    const auto one = Element::identity(inst);
    const double nx = x.norm();
    const double ny = y.norm();
    double d = rel(distance(adjoint(x * y), adjoint(y) * adjoint(x)), nx * ny);
    d = std::max(d, rel(distance(adjoint(adjoint(x)), x), nx));
    d = std::max(d, rel(distance(adjoint(scale(lambda, x)), scale(std::conj(lambda), adjoint(x))),
                        std::abs(lambda) * nx));
    d = std::max(d, rel(distance(adjoint(x + y), adjoint(x) + adjoint(y)), nx + ny));
    d = std::max(d, rel(distance(one * x, x), nx));
    d = std::max(d, rel(distance(x * one, x), nx));
    d = std::max(d, rel(distance(Element::zero(inst) + x, x), nx));
    d = std::max(d, distance(adjoint(one), one));
    return check(d, 1e-9);
  }});

  out.push_back({"algebra", "spectral_inclusion", 1e-8, [](TrialContext& ctx) {
    const auto inst = ctx.trial % 2 == 0
                          ? AlgebraInstance::dense(ctx.dense_size())
                          : AlgebraInstance::loop(ctx.loop_matdim(), ctx.loop_grid());
    const auto x = ctx.sampler.gaussian(inst);
    const auto sx = spectrum(x);
    const auto sxx = spectrum(x * x);
    std::vector<Complex> squares;
    for (const auto& z : sx.points) squares.push_back(z * z);
    const double r = sx.max_abs();
    return check(rel(one_sided_distance(squares, sxx.points), r * r), 1e-8);
  }});

  out.push_back({"algebra", "corner_spectra", 1e-8, [](TrialContext& ctx) {
    const int n = std::max(2, ctx.dense_size());
    const auto inst = AlgebraInstance::dense(n);
    auto& s = ctx.sampler;
    const int rank = s.uniform_int(1, n - 1);
    const Corner corner(s.projection(inst, rank));
    const auto& p = corner.projection();
    const auto x = p * s.gaussian(inst) * p;
    const auto sc = corner_spectrum(x, corner);
    auto with0 = sc.points;
    with0.emplace_back(0.0, 0.0);
    auto with1 = sc.points;
    with1.emplace_back(1.0, 0.0);
    const auto s0 = spectrum(corner_embed_iota0(x, corner));
    const auto s1 = spectrum(corner_embed_iota1(x, corner));
    const double r = std::max(s0.max_abs(), s1.max_abs());
    return check(rel(std::max(hausdorff_distance(s0.points, with0),
                              hausdorff_distance(s1.points, with1)),
                     r),
                 1e-8);
  }});

  // The inverse residual of a Gram corner is measured against its own condition number.
  out.push_back({"algebra", "corner_gram_invertibility", 1e-10, [](TrialContext& ctx) {
    const auto inst = hermitian_instance(ctx, false);
    auto& s = ctx.sampler;
    const auto a = s.invertible(inst);
    const int dim = inst->dim();
    if (dim < 2) return Outcome{true, 0.0, "rank-one instance"};
    const Corner corner(s.projection(inst, s.uniform_int(1, dim - 1)));
    const auto& p = corner.projection();
    const auto h = p * adjoint(a) * a * p;
    const auto y = invert(corner_embed_iota1(h, corner));
    const auto inv = p * y * p;
    const double kappa = 1.0 / corner.conditioning(h).relative_sigma_min;
    const double res = std::max(distance(inv * h, p), distance(h * inv, p));
    return check(res / kappa, 1e-10);
  }});

  out.push_back({"algebra", "mn_stability", 1e-8, [](TrialContext& ctx) {
    const auto inner = ctx.trial % 2 == 0
                           ? AlgebraInstance::dense(1 + ctx.trial % 4)
                           : AlgebraInstance::loop(ctx.loop_matdim(), 64);
    const auto inst = AlgebraInstance::block(2 + ctx.trial % 3, inner);
    const auto sp = spectrum(ctx.sampler.self_adjoint(inst));
    return check(rel(sp.max_abs_imag(), sp.max_abs()), 1e-8);
  }});

  out.push_back({"algebra", "loop_smoothness", 1e-8, [](TrialContext& ctx) {
    const auto inst = AlgebraInstance::loop(ctx.loop_matdim(), ctx.loop_grid());
    auto& s = ctx.sampler;
    const auto x = s.gaussian(inst);
    const auto y = s.gaussian(inst);
    const double nx = x.norm();
    double worst = 0.0;
    for (const auto& z : {x + y, x * y, adjoint(x), invert(x + Element::scalar(inst, 8.0 * nx + 1.0)),
                          exponential(scale(0.5 / nx, x))})
      worst = std::max(worst, trailing_band_fraction(z));
    return check(worst, inst->tolerances().loop_smoothness);
  }});

  out.push_back({"algebra", "hermitian_witness", 0.5, [](TrialContext& ctx) {
    const std::uint64_t seed = ctx.sampler.engine()();
    if (ctx.trial % 4 == 3) {
      const auto inst = AlgebraInstance::indefinite({1, -1});
      const auto report = hermitian_witness(inst, 32, seed);
      return Outcome{report.violations > 0, report.violations > 0 ? 0.0 : 1.0,
                     "indefinite involution must be detected"};
    }
    const auto inst = hermitian_instance(ctx);
    const auto report = hermitian_witness(inst, 2, seed);
    return Outcome{report.hermitian(), static_cast<double>(report.violations),
                   inst->describe()};
  }});

  return out;
}

std::vector<Property> flags_properties() {
  std::vector<Property> out;

  out.push_back({"flags", "truncation_idempotent", 1e-9, [](TrialContext& ctx) {
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(ctx.sampler, inst, false);
    const auto x = ctx.sampler.gaussian(inst);
    const auto phi = diagonal_truncation(x, flag);
    return check(rel(distance(diagonal_truncation(phi, flag), phi), x.norm()), 1e-9);
  }});

  out.push_back({"flags", "truncation_multiplicative", 1e-9, [](TrialContext& ctx) {
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(ctx.sampler, inst, false);
    const auto x = ctx.sampler.in_Delta(flag);
    const auto y = ctx.sampler.in_Delta(flag);
    const double lhs = distance(diagonal_truncation(x * y, flag),
                                diagonal_truncation(x, flag) * diagonal_truncation(y, flag));
    return check(rel(lhs, x.norm() * y.norm()), 1e-9);
  }});

  out.push_back({"flags", "truncation_range", 1e-9, [](TrialContext& ctx) {
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(ctx.sampler, inst, false);
    const auto phi = diagonal_truncation(ctx.sampler.gaussian(inst), flag);
    const auto d = ctx.sampler.in_D(flag);
    return check(std::max(diagonal_defect(phi, flag),
                          rel(distance(diagonal_truncation(d, flag), d), d.norm())),
                 1e-9);
  }});

  out.push_back({"flags", "N_group", 1e-9, [](TrialContext& ctx) {
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(ctx.sampler, inst, false);
    const auto x = ctx.sampler.in_N(flag, 0.5);
    const auto y = ctx.sampler.in_N(flag, 0.5);
    const auto one = Element::identity(inst);
    double worst = 0.0;
    for (const auto& z : {x * y, invert(x)}) {
      worst = std::max(worst, delta_defect(z, flag));
      worst = std::max(worst, rel(distance(diagonal_truncation(z, flag), one), z.norm()));
    }
    return check(worst, 1e-9);
  }});

  out.push_back({"flags", "selfadjointify", 1e-8, [](TrialContext& ctx) {
    const int n = std::max(2, ctx.dense_size());
    const auto inst = AlgebraInstance::dense(n);
    const int rank = ctx.sampler.uniform_int(1, n - 1);
    const Idempotent e(ctx.sampler.idempotent(inst, rank));
    const auto p = selfadjointify(e);
    const auto& ee = e.element();
    const auto& pe = p.element();
    const double ne = ee.norm();
    double worst = rel(distance(pe, adjoint(pe)), pe.norm());
    worst = std::max(worst, rel(distance(pe * pe, pe), pe.norm()));
    worst = std::max(worst, rel(distance(ee * pe, pe), ne));
    worst = std::max(worst, rel(distance(pe * ee, ee), ne));
    // Orthogonal projector onto range(e) from an SVD of e.
    Eigen::JacobiSVD<Matrix> svd(ee.matrix(), Eigen::ComputeFullU);
    const Matrix ur = svd.matrixU().leftCols(rank);
    worst = std::max(worst, distance(pe, Element::constant(inst, ur * ur.adjoint())));
    worst = std::max(worst, distance(selfadjointify(p).element(), pe));
    return check(worst, 1e-8);
  }});

  out.push_back({"flags", "similarity", 1e-8, [](TrialContext& ctx) {
    const int n = std::max(2, ctx.dense_size());
    const auto inst = ctx.trial % 2 == 0 ? AlgebraInstance::dense(n)
                                         : AlgebraInstance::loop(ctx.loop_matdim(), 64);
    auto& s = ctx.sampler;
    const int rank = s.uniform_int(1, std::max(1, inst->dim() - 1));
    const auto pe = ctx.trial % 4 == 0 ? s.projection(inst, rank) : s.idempotent(inst, rank);
    const auto one = Element::identity(inst);
    const auto qe = pe + pe * s.gaussian(inst) * (one - pe);
    const Idempotent p(pe);
    const Idempotent q(qe);
    const auto sim = similarity(p, q);
    const auto diff = qe - pe;
    const double scale2 = std::max(1.0, qe.norm() * qe.norm());
    double worst = distance(diff * diff, Element::zero(inst)) / scale2;
    const auto s_inv = one - diff;
    worst = std::max(worst, distance(sim * s_inv, one) / scale2);
    worst = std::max(worst, distance(sim * qe * s_inv, pe) / (scale2 * scale2));
    worst = std::max(worst, distance(s_inv * sim, one) / scale2);
    return check(worst, 1e-8);
  }});

  return out;
}

std::vector<Property> factorization_properties() {
  std::vector<Property> out;

  out.push_back({"factorization", "gauss_roundtrip", 1e-7, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = ctx.trial % 5 == 4
                          ? AlgebraInstance::block(2, AlgebraInstance::loop(ctx.loop_matdim(), 64))
                          : AlgebraInstance::dense(std::max(2, ctx.dense_size()));
    const auto flag = random_flag(s, inst, false);
    const double c = 1.0 / std::sqrt(static_cast<double>(inst->dim()));
    const auto x0 = s.in_N_complement(flag, c);
    const auto d0 = s.in_D_invertible(flag);
    const auto y0 = s.in_N(flag, c);
    const auto f = gauss_decompose(x0 * d0 * y0, flag);
    return check(std::max({relative_difference(f.x, x0), relative_difference(f.d, d0),
                           relative_difference(f.y, y0)}),
                 1e-7);
  }});

  out.push_back({"factorization", "uab_roundtrip", 1e-7, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = ctx.trial % 5 == 4
                          ? AlgebraInstance::block(2, AlgebraInstance::loop(ctx.loop_matdim(), 64))
                          : AlgebraInstance::dense(std::max(2, ctx.dense_size()));
    const auto flag = random_flag(s, inst, true);
    const double c = 1.0 / std::sqrt(static_cast<double>(inst->dim()));
    const auto u0 = s.unitary(inst);
    const auto a0 = s.positive_diagonal(flag);
    const auto b0 = s.in_N(flag, c);
    const auto f = uab_decompose(u0 * a0 * b0, flag);
    return check(std::max({relative_difference(f.u, u0), relative_difference(f.a, a0),
                           relative_difference(f.b, b0)}),
                 1e-7);
  }});

  out.push_back({"factorization", "reconstruction", 1e-9, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(s, inst, true);
    const auto g = s.invertible(inst);
    const auto ng = nest_gram_factorize(g, flag);
    const auto uab = uab_decompose(g, flag);
    // Backward error of the block elimination, scaled by its growth.
    const auto gf = gauss_decompose(g, flag);
    const double growth = gf.x.norm() * gf.d.norm() * gf.y.norm() / g.norm();
    return check(std::max({ng.residual, uab.residual, gf.residual / std::max(1.0, growth)}),
                 1e-9);
  }});

  out.push_back({"factorization", "cholesky_consistency", 1e-8, [](TrialContext& ctx) {
    const int n = ctx.dense_size();
    const auto inst = AlgebraInstance::dense(n);
    const auto flag = full_flag(inst);
    const auto g = ctx.sampler.invertible(inst);
    const Matrix h = g.matrix().adjoint() * g.matrix();
    const Matrix r = Eigen::LLT<Matrix>(h).matrixU();
    const auto f = nest_gram_factorize(g, flag);
    const Matrix& d = f.d.matrix();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      const double expect = std::norm(r(i, i));
      worst = std::max(worst, std::abs(d(i, i) - expect) / expect);
    }
    const Matrix ab = positive_sqrt(f.d, flag).matrix() * f.b.matrix();
    worst = std::max(worst, (ab - r).norm() / r.norm());
    return check(worst, 1e-8);
  }});

  out.push_back({"factorization", "d_positivity", 0.0, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = s.random_selfadjoint_flag(
        inst, random_cuts(s, partition_extent(*inst), 2, 4));
    const auto f = nest_gram_factorize(s.invertible(inst), flag);
    double worst = 0.0;
    for (const auto& z : f.d_spectrum.points) worst = std::max(worst, -z.real());
    return check(worst, 0.0);
  }});

  out.push_back({"factorization", "stabilizer_invariance", 1e-8, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(s, inst, true);
    const auto g = s.invertible(inst);
    const auto w = s.in_D_invertible(flag) * s.in_N(flag, 0.5);
    const auto u1 = uab_decompose(g, flag).u;
    const auto u2 = uab_decompose(g * w, flag).u;
    const auto m = invert(u1) * u2;
    return check(std::max(delta_defect(m, flag), delta_defect(invert(m), flag)), 1e-8);
  }});

  out.push_back({"factorization", "factor_maps_continuity", 0.0, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(s, inst, true);
    const auto s0 = s.invertible(inst);
    const auto h = s.gaussian(inst);
    std::vector<Element> path;
    for (int k = 0; k < 4; ++k) path.push_back(s0 + scale(1e-4 * k, h));
    const auto report = factor_maps_consistency(path, flag);
    const bool ok = !report.failed_index && std::isfinite(report.max_ratio);
    return Outcome{ok, ok ? 0.0 : 1.0, report.failure};
  }});

  return out;
}

std::vector<Property> manifold_properties() {
  std::vector<Property> out;

  out.push_back({"manifold", "action_functoriality", 1e-8, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    InstancePtr inst;
    if (ctx.trial % 3 == 2) {
      const int n = std::max(2, ctx.dense_size());
      std::vector<int> sig(n, 1);
      sig.back() = -1;
      inst = AlgebraInstance::indefinite(sig);
    } else {
      inst = hermitian_instance(ctx);
    }
    const auto flag = random_flag(s, inst, false);
    const auto point = FlagPoint::of(flag);
    const auto g = near_identity(s, inst, 0.5);
    const auto h = near_identity(s, inst, 0.5);
    const auto lhs = flag_action(g * h, point);
    const auto rhs = flag_action(g, flag_action(h, point));
    double worst = 0.0;
    for (std::size_t j = 0; j < lhs.size(); ++j)
      worst = std::max(worst, equivalence_defect(lhs.reps()[j], rhs.reps()[j]));
    if (lhs.canonical() && rhs.canonical())
      for (std::size_t j = 0; j < lhs.size(); ++j)
        worst = std::max(worst, distance((*lhs.canonical())[j].element(),
                                         (*rhs.canonical())[j].element()));
    return check(worst, 1e-8);
  }});

  out.push_back({"manifold", "order_preservation", 1e-9, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(s, inst, false);
    const auto moved = flag_action(s.invertible(inst), FlagPoint::of(flag));
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < moved.size(); ++j) {
      const auto& lo = moved.reps()[j].element();
      const auto& hi = moved.reps()[j + 1].element();
      worst = std::max(worst, rel(distance(hi * lo, lo), lo.norm() * hi.norm()));
    }
    return check(worst, 1e-9);
  }});

  out.push_back({"manifold", "chart_orbit_compat", 1e-8, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(s, inst, false);
    const auto g = near_identity(s, inst, 0.9);
    const auto chart = chart_sigma(g, flag);
    const auto base = FlagPoint::of(flag);
    const auto a = flag_action(g, base);
    const auto b = flag_action(chart.point, base);
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
      worst = std::max(worst, equivalence_defect(a.reps()[j], b.reps()[j]));
    // sigma is constant on g Delta(delta)^x.
    const auto w = s.in_D_invertible(flag) * s.in_N(flag, 0.5);
    const auto moved = chart_sigma(g * w, flag);
    worst = std::max(worst, relative_difference(moved.point, chart.point));
    return check(worst, 1e-8);
  }});

  out.push_back({"manifold", "transitivity", 1e-8, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = s.random_selfadjoint_flag(
        inst, random_cuts(s, partition_extent(*inst), 2, 4));
    const auto w = unitary_transitivity_witness(s.invertible(inst), flag);
    return check(std::max(w.unitarity_residual, w.stabilizer_defect), 1e-8);
  }});

  out.push_back({"manifold", "chart_cocycle", 1e-8, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    const auto inst = hermitian_instance(ctx);
    const auto flag = random_flag(s, inst, false);
    const auto x = chart_sigma(near_identity(s, inst, 0.2), flag);
    const auto g = near_identity(s, inst, 0.2);
    const auto h = near_identity(s, inst, 0.2);
    const auto lhs = chart_transition(g, chart_transition(h, x));
    const auto rhs = chart_transition(g * h, x);
    const auto id = chart_transition(Element::identity(inst), x);
    return check(std::max(relative_difference(lhs.point, rhs.point),
                          relative_difference(id.point, x.point)),
                 1e-8);
  }});

  out.push_back({"manifold", "non_transitivity", 1e-12, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    if (ctx.trial % 2 == 0) {
      // Hermitian control: the same g-shape factors without obstruction.
      const auto inner = AlgebraInstance::dense(1 + ctx.trial % 3);
      const auto report = gshape_nestgram(inner, s.self_adjoint(inner));
      return Outcome{!report.obstructed, 0.0, report.failure};
    }
    const auto a = ctx.trial == 1 ? default_indefinite_witness() : random_indefinite_witness(s);
    const auto report = counterexample_char(a.instance_ptr(), a);
    const double defect = std::max(report.identity_residual,
                                   report.one_plus_a_squared * (ctx.trial == 1 ? 1.0 : 0.0));
    const bool ok = report.obstructed && report.failing_corner == 1u;
    return Outcome{ok && defect <= 1e-12, defect, report.failure};
  }});

  out.push_back({"manifold", "u11", 1e-9, [](TrialContext& ctx) {
    auto& s = ctx.sampler;
    if (ctx.trial % 2 == 0) {
      const auto inner = ctx.trial % 4 == 0 ? AlgebraInstance::dense(1 + ctx.trial % 3)
                                            : AlgebraInstance::loop(ctx.loop_matdim(), 64);
      const auto m2 = two_by_two(inner);
      const auto g = random_u11(m2, s);
      const auto omega = omega_membership(g, two_block_flag(m2));
      const double res = rel(u11_residual(g), g.norm() * g.norm());
      return Outcome{res <= 1e-9 && omega.member, res, omega.member ? "" : "g_11 singular"};
    }
    const auto a = ctx.trial == 1 ? default_indefinite_witness() : random_indefinite_witness(s);
    const auto report = u11_counterexample(a.instance_ptr(), a);
    const double res = rel(report.identity_residual, 1.0 + a.norm() * a.norm());
    return Outcome{report.obstructed && res <= 1e-9, res, report.failure};
  }});

  return out;
}

std::uint64_t property_seed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

bool selected(const Property& p, const std::vector<std::string>& filter) {
  if (filter.empty()) return true;
  const std::string key = p.module + "/" + p.name;
  return std::any_of(filter.begin(), filter.end(),
                     [&](const std::string& f) { return key.find(f) != std::string::npos; });
}

}  // namespace

const std::vector<Property>& all_properties() {
  static const std::vector<Property> props = [] {
    std::vector<Property> out;
    for (auto suite : {algebra_properties, flags_properties, factorization_properties,
                       manifold_properties})
      for (auto& p : suite()) out.push_back(std::move(p));
    return out;
  }();
  return props;
}

std::vector<PropertyResult> run_properties(const SweepConfig& config) {
  if (config.trials == 0) throw Error("property sweep needs at least one trial");
  if (config.dense_sizes.empty() || config.loop_matdims.empty() || config.loop_grids.empty())
    throw Error("property sweep needs non-empty size lists");
  const auto& props = all_properties();
  std::vector<PropertyResult> results;
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& prop = props[i];
    if (!selected(prop, config.filter)) continue;
    Sampler sampler(property_seed(config.seed, i));
    PropertyResult r{prop.module, prop.name, prop.threshold, config.trials, 0, 0.0, {}};
    for (std::size_t t = 0; t < config.trials; ++t) {
      TrialContext ctx{sampler, t, config};
      Outcome o;
      try {
        o = prop.check(ctx);
      } catch (const std::exception& e) {
        o = {false, std::numeric_limits<double>::infinity(), e.what()};
      }
      if (std::isfinite(o.defect)) r.worst_defect = std::max(r.worst_defect, o.defect);
      if (!o.pass) {
        if (r.failures == 0)
          r.first_failure = "trial " + std::to_string(t) + (o.note.empty() ? "" : ": " + o.note);
        ++r.failures;
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace flagfact
