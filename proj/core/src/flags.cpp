#include "flagfact/flags.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flagfact {

namespace {

double tol_of(const Element& x) { return x.instance().tolerances().rel_residual; }

void require_same(const Idempotent& p, const Idempotent& q) {
  require_same_instance(p.element(), q.element());
}

}  // namespace

Idempotent::Idempotent(Element p) : p_(std::move(p)) {
  const double tol = tol_of(p_);
  const double n = p_.norm();
  if (distance(p_ * p_, p_) > tol * std::max(1.0, n * n))
    throw NotIdempotent("element is not idempotent");
  selfadjoint_ = distance(p_, adjoint(p_)) <= tol * std::max(1.0, n);
}

bool leq(const Idempotent& p, const Idempotent& q) {
  require_same(p, q);
  const auto& pe = p.element();
  return distance(q.element() * pe, pe) <= tol_of(pe) * std::max(1.0, pe.norm());
}

double equivalence_defect(const Idempotent& p, const Idempotent& q) {
  require_same(p, q);
  const auto& pe = p.element();
  const auto& qe = q.element();
  return std::max(distance(pe * qe, qe) / std::max(1.0, qe.norm()),
                  distance(qe * pe, pe) / std::max(1.0, pe.norm()));
}

bool equivalent(const Idempotent& p, const Idempotent& q) {
  return equivalence_defect(p, q) <= tol_of(p.element());
}

Element similarity(const Idempotent& p, const Idempotent& q) {
  if (!equivalent(p, q)) throw NotEquivalent("similarity needs p ~ q");
  const auto one = Element::identity(p.element().instance_ptr());
  const auto& pe = p.element();
  const auto& qe = q.element();
  return pe * qe + (one - pe) * (one - qe);
}

Idempotent selfadjointify(const Idempotent& e) {
  const auto& ee = e.element();
  const auto one = Element::identity(ee.instance_ptr());
  const auto skew = adjoint(ee) - ee;
  return Idempotent(ee * invert(one - skew));
}

// Flag -------------------------------------------------------------------------

Flag::Flag(InstancePtr instance, std::vector<Idempotent> chain)
    : instance_(std::move(instance)), chain_(std::move(chain)) {
  const auto zero = Element::zero(instance_);
  const auto one = Element::identity(instance_);
  const double tol = instance_->tolerances().rel_residual;
  projections_.reserve(chain_.size() + 2);
  projections_.push_back(zero);
  for (const auto& p : chain_) {
    if (!p.instance().same_as(*instance_))
      throw InstanceMismatch("flag member belongs to another instance");
    selfadjoint_ = selfadjoint_ && p.selfadjoint();
    projections_.push_back(p.element());
  }
  projections_.push_back(one);

  for (std::size_t k = 0; k + 1 < projections_.size(); ++k) {
    const auto& lo = projections_[k];
    const auto& hi = projections_[k + 1];
    if (distance(hi * lo, lo) > tol * std::max(1.0, lo.norm()))
      throw BadPartition("flag is not increasing at position " + std::to_string(k + 1));
    if (distance(hi, lo) <= tol)
      throw BadPartition("degenerate flag: p_" + std::to_string(k) + " = p_" +
                         std::to_string(k + 1));
  }

  corners_.reserve(projections_.size());
  blocks_.reserve(projections_.size());
  corners_.push_back(nullptr);
  blocks_.push_back(nullptr);
  for (std::size_t k = 1; k < projections_.size(); ++k) {
    corners_.push_back(std::make_shared<const Corner>(projections_[k]));
    blocks_.push_back(std::make_shared<const Corner>(projections_[k] - projections_[k - 1]));
  }
}

Flag Flag::trivial(InstancePtr instance) { return Flag(std::move(instance), {}); }

const Element& Flag::projection(std::size_t k) const { return projections_.at(k); }

const Corner& Flag::corner(std::size_t k) const {
  if (k == 0 || k >= corners_.size()) throw Error("corner index out of range");
  return *corners_[k];
}

const Corner& Flag::block(std::size_t k) const {
  if (k == 0 || k >= blocks_.size()) throw Error("block index out of range");
  return *blocks_[k];
}

// Truncation and membership ---------------------------------------------------

Element diagonal_truncation(const Element& x, const Flag& flag) {
  require_same_instance(x, flag.projection(0));
  auto out = Element::zero(x.instance_ptr());
  for (std::size_t k = 1; k <= flag.blocks(); ++k) {
    const auto& q = flag.block(k).projection();
    out = out + q * x * q;
  }
  return out;
}

double delta_defect(const Element& x, const Flag& flag) {
  require_same_instance(x, flag.projection(0));
  double worst = 0.0;
  for (std::size_t k = 1; k < flag.blocks(); ++k) {
    const auto& p = flag.projection(k);
    worst = std::max(worst, distance(x * p, p * x * p));
  }
  return worst / std::max(1.0, x.norm());
}

double diagonal_defect(const Element& x, const Flag& flag) {
  require_same_instance(x, flag.projection(0));
  double worst = 0.0;
  for (std::size_t k = 1; k < flag.blocks(); ++k) {
    const auto& p = flag.projection(k);
    worst = std::max(worst, distance(x * p, p * x));
  }
  return worst / std::max(1.0, x.norm());
}

bool in_Delta(const Element& x, const Flag& flag) {
  return delta_defect(x, flag) <= x.instance().tolerances().rel_residual;
}

bool in_D(const Element& x, const Flag& flag) {
  return diagonal_defect(x, flag) <= x.instance().tolerances().rel_residual;
}

bool in_N(const Element& x, const Flag& flag) {
  if (!in_Delta(x, flag)) return false;
  const auto one = Element::identity(x.instance_ptr());
  return distance(diagonal_truncation(x, flag), one) <=
         x.instance().tolerances().rel_residual * std::max(1.0, x.norm());
}

Flag complement_flag(const Flag& flag) {
  const auto one = Element::identity(flag.instance_ptr());
  std::vector<Idempotent> chain;
  const auto original = flag.chain();
  for (auto it = original.rbegin(); it != original.rend(); ++it)
    chain.emplace_back(one - it->element());
  return Flag(flag.instance_ptr(), std::move(chain));
}

int partition_extent(const AlgebraInstance& instance) {
  switch (instance.kind()) {
    case InstanceKind::Block:
      return instance.blockcount();
    case InstanceKind::Loop:
      return instance.matdim();
    default:
      return instance.dim();
  }
}

Flag standard_flag(const InstancePtr& instance, const std::vector<int>& cuts) {
  const int extent = partition_extent(*instance);
  const int unit = instance->kind() == InstanceKind::Block ? instance->inner()->dim() : 1;
  std::vector<Idempotent> chain;
  int previous = 0;
  for (int c : cuts) {
    if (c <= previous || c >= extent)
      throw BadPartition("cut positions must increase strictly inside (0, " +
                         std::to_string(extent) + ")");
    previous = c;
    Matrix p = Matrix::Zero(instance->dim(), instance->dim());
    p.topLeftCorner(c * unit, c * unit).setIdentity();
    chain.emplace_back(Element::constant(instance, p));
  }
  return Flag(instance, std::move(chain));
}

Flag full_flag(const InstancePtr& instance) {
  std::vector<int> cuts;
  for (int c = 1; c < partition_extent(*instance); ++c) cuts.push_back(c);
  return standard_flag(instance, cuts);
}

}  // namespace flagfact
