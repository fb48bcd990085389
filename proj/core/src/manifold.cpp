#include "flagfact/manifold.hpp"

#include <algorithm>

namespace flagfact {

namespace {

Element signature_element(const InstancePtr& block_instance) {
  if (block_instance->kind() != InstanceKind::Block || block_instance->blockcount() != 2)
    throw Error("U_{1,1} lives in a 2x2 block instance");
  const auto& inner = block_instance->inner();
  return block_diagonal(block_instance,
                        {Element::identity(inner), Element::scalar(inner, -1.0)});
}

void check_witness(const Element& a) {
  if (!is_self_adjoint(a)) throw BadWitness("witness must be self-adjoint");
  const auto sp = spectrum(a);
  const double margin = a.instance().tolerances().spec_margin * std::max(1.0, sp.max_abs());
  if (sp.distance_to(Complex(0.0, 1.0)) > margin)
    throw BadWitness("witness spectrum does not contain i");
}

}  // namespace

// FlagPoint ------------------------------------------------------------------------

FlagPoint::FlagPoint(std::vector<Idempotent> reps) : reps_(std::move(reps)) {
  for (std::size_t j = 0; j + 1 < reps_.size(); ++j)
    if (!leq(reps_[j], reps_[j + 1]))
      throw BadPartition("flag point representatives are not increasing at " +
                         std::to_string(j + 1));
  if (!reps_.empty() && reps_.front().instance().known_hermitian()) {
    std::vector<Idempotent> canon;
    canon.reserve(reps_.size());
    for (const auto& q : reps_) canon.push_back(q.selfadjoint() ? q : selfadjointify(q));
    canonical_ = std::move(canon);
  }
}

FlagPoint FlagPoint::of(const Flag& flag) {
  return FlagPoint(std::vector<Idempotent>(flag.chain().begin(), flag.chain().end()));
}

bool same_point(const FlagPoint& a, const FlagPoint& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!equivalent(a.reps()[j], b.reps()[j])) return false;
  return true;
}

FlagPoint flag_action(const Element& g, const FlagPoint& point) {
  const auto g_inv = invert(g);
  std::vector<Idempotent> reps;
  reps.reserve(point.size());
  for (const auto& q : point.reps()) {
    require_same_instance(g, q.element());
    reps.emplace_back(g * q.element() * g_inv);
  }
  return FlagPoint(std::move(reps));
}

// Charts ---------------------------------------------------------------------------

OmegaReport omega_membership(const Element& g, const Flag& flag) {
  require_same_instance(g, flag.projection(0));
  OmegaReport report;
  report.corner_conditions = corner_conditions(g, flag);
  const double threshold = g.instance().tolerances().inv_threshold;
  for (std::size_t j = 0; j < report.corner_conditions.size(); ++j) {
    if (report.corner_conditions[j] < threshold) {
      report.first_failing = j + 1;
      break;
    }
  }
  report.member = !report.first_failing.has_value();
  return report;
}

ChartCoordinates chart_sigma(const Element& g, const Flag& flag) {
  auto factors = gauss_decompose(g, flag);
  return {flag, std::move(factors.x), factors.residual};
}

ChartCoordinates chart_transition(const Element& g, const ChartCoordinates& x) {
  const auto moved = g * x.point;
  const auto omega = omega_membership(moved, x.base);
  if (!omega.member)
    throw OutOfChart("g x leaves the chart domain at corner " +
                     std::to_string(*omega.first_failing));
  return chart_sigma(moved, x.base);
}

TransitivityWitness unitary_transitivity_witness(const Element& g, const Flag& flag) {
  auto factors = uab_decompose(g, flag);
  const auto w = invert(factors.u) * g;
  const auto w_inv = invert(g) * factors.u;
  TransitivityWitness out{std::move(factors.u), factors.unitarity_residual,
                          std::max(delta_defect(w, flag), delta_defect(w_inv, flag)), false};
  const double tol = g.instance().tolerances().rel_residual;
  out.certified = out.unitarity_residual <= tol && out.stabilizer_defect <= tol;
  return out;
}

// Counterexamples --------------------------------------------------------------------

InstancePtr two_by_two(const InstancePtr& inner) { return AlgebraInstance::block(2, inner); }

Flag two_block_flag(const InstancePtr& block_instance) {
  return standard_flag(block_instance, {1});
}

CounterexampleReport gshape_nestgram(const InstancePtr& inner, const Element& a) {
  if (!a.instance().same_as(*inner)) throw InstanceMismatch("witness outside the inner instance");
  const auto m2 = two_by_two(inner);
  const auto one = Element::identity(inner);
  const auto zero = Element::zero(inner);
  const auto g = assemble_blocks(m2, {{one, zero}, {a, one}});
  const auto one_plus_a2 = one + a * a;

  CounterexampleReport report;
  report.model = "char";
  report.witness_spectrum = spectrum(a);
  report.identity_residual = distance(block_at(adjoint(g) * g, 0, 0), one_plus_a2);
  report.one_plus_a_squared = one_plus_a2.norm();
  try {
    (void)nest_gram_factorize(g, two_block_flag(m2));
  } catch (const CornerNotInvertible& e) {
    report.obstructed = true;
    report.failing_corner = e.corner();
    report.failure = e.what();
  }
  return report;
}

CounterexampleReport counterexample_char(const InstancePtr& inner, const Element& a) {
  check_witness(a);
  return gshape_nestgram(inner, a);
}

double u11_residual(const Element& g) {
  const auto j = signature_element(g.instance_ptr());
  return distance(g * j * adjoint(g) * j, Element::identity(g.instance_ptr()));
}

bool u11_membership(const Element& g) {
  return u11_residual(g) <= g.instance().tolerances().rel_residual;
}

CounterexampleReport u11_counterexample(const InstancePtr& inner, const Element& a) {
  if (!a.instance().same_as(*inner)) throw InstanceMismatch("witness outside the inner instance");
  check_witness(a);
  const auto m2 = two_by_two(inner);
  const Complex i_unit(0.0, 1.0);
  const auto i1 = Element::scalar(inner, i_unit);
  const auto g11 = a + i1;
  const auto g = assemble_blocks(m2, {{g11, a}, {a, a - i1}});

  CounterexampleReport report;
  report.model = "u11";
  report.witness_spectrum = spectrum(a);
  report.identity_residual = u11_residual(g);
  report.u11_member = report.identity_residual <= inner->tolerances().rel_residual;
  report.one_plus_a_squared = (Element::identity(inner) + a * a).norm();
  report.g11_condition = conditioning(g11).relative_sigma_min;
  const auto omega = omega_membership(g, two_block_flag(m2));
  report.failing_corner = omega.first_failing;
  report.obstructed = report.u11_member && !omega.member && omega.first_failing == 1u;
  if (!omega.member)
    report.failure = "g_11 = a + i is not invertible; g lies outside N(1-delta)Delta(delta)^x";
  return report;
}

Element random_u11(const InstancePtr& block_instance, Sampler& sampler, double scale_factor) {
  const auto j = signature_element(block_instance);
  const auto y = sampler.gaussian(block_instance);
  const auto skew = scale(0.5 * scale_factor, y - j * adjoint(y) * j);
  return exponential(skew);
}

Element default_indefinite_witness() {
  const auto inst = AlgebraInstance::indefinite({1, -1});
  Matrix a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  return Element::constant(inst, a);
}

}  // namespace flagfact
