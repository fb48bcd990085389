#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "flagfact/algebra.hpp"

namespace flagfact {

/// p = p^2, with a certificate recording whether also p = p*.
class Idempotent {
 public:
  /// Throws NotIdempotent when ||p^2 - p|| exceeds rel_residual * max(1, ||p||^2).
  explicit Idempotent(Element p);

  const Element& element() const noexcept { return p_; }
  bool selfadjoint() const noexcept { return selfadjoint_; }
  const AlgebraInstance& instance() const noexcept { return p_.instance(); }

 private:
  Element p_;
  bool selfadjoint_ = false;
};

/// p <= q iff qp = p.
bool leq(const Idempotent& p, const Idempotent& q);
/// p ~ q iff pq = q and qp = p (same right ideal).
bool equivalent(const Idempotent& p, const Idempotent& q);
/// max(||pq - q|| / max(1, ||q||), ||qp - p|| / max(1, ||p||)).
double equivalence_defect(const Idempotent& p, const Idempotent& q);
/// s = pq + (1-p)(1-q), which satisfies s q s^{-1} = p.  Throws NotEquivalent.
Element similarity(const Idempotent& p, const Idempotent& q);
/// The unique self-adjoint idempotent equivalent to e, e(1 - (e* - e))^{-1}.
Idempotent selfadjointify(const Idempotent& e);

/// A strict chain 0 = p_0 < p_1 < ... < p_n = 1.  Only the interior members
/// are stored; corner data for every p_k and every block p_k - p_{k-1} is
/// precomputed.
class Flag {
 public:
  Flag(InstancePtr instance, std::vector<Idempotent> chain);

  static Flag trivial(InstancePtr instance);

  const InstancePtr& instance_ptr() const noexcept { return instance_; }
  const AlgebraInstance& instance() const noexcept { return *instance_; }
  std::span<const Idempotent> chain() const noexcept { return chain_; }
  /// Number of diagonal blocks n (chain length + 1).
  std::size_t blocks() const noexcept { return chain_.size() + 1; }
  bool selfadjoint() const noexcept { return selfadjoint_; }

  /// p_k for k = 0..n.
  const Element& projection(std::size_t k) const;
  /// Corner data for p_k, k = 1..n.
  const Corner& corner(std::size_t k) const;
  /// Corner data for the diagonal block p_k - p_{k-1}, k = 1..n.
  const Corner& block(std::size_t k) const;

 private:
  InstancePtr instance_;
  std::vector<Idempotent> chain_;
  bool selfadjoint_ = true;
  std::vector<Element> projections_;
  std::vector<std::shared_ptr<const Corner>> corners_;
  std::vector<std::shared_ptr<const Corner>> blocks_;
};

/// Phi(x) = sum_k (p_k - p_{k-1}) x (p_k - p_{k-1}).
Element diagonal_truncation(const Element& x, const Flag& flag);

/// Max over k of ||x p_k - p_k x p_k||, relative to max(1, ||x||).
double delta_defect(const Element& x, const Flag& flag);
/// Max over k of ||x p_k - p_k x||, relative to max(1, ||x||).
double diagonal_defect(const Element& x, const Flag& flag);

bool in_Delta(const Element& x, const Flag& flag);
bool in_D(const Element& x, const Flag& flag);
/// x in Delta(flag) with Phi(x) = 1.
bool in_N(const Element& x, const Flag& flag);

/// 0 = 1 - p_n < 1 - p_{n-1} < ... < 1 - p_0 = 1.
Flag complement_flag(const Flag& flag);

/// Leading-corner identity projections cut at the given positions.  Positions
/// count blocks for block instances, matrix rows otherwise (pointwise for
/// loops).  Throws BadPartition.
Flag standard_flag(const InstancePtr& instance, const std::vector<int>& cuts);
/// Every cut position 1..count-1.
Flag full_flag(const InstancePtr& instance);
/// Number of positions a standard flag can cut.
int partition_extent(const AlgebraInstance& instance);

}  // namespace flagfact
