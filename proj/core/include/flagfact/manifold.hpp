#pragma once

// Flag manifolds as unit-group orbits: the conjugation action on flags of
// idempotents, charts from the Gauss decomposition, unitary transitivity
// witnesses, and the two non-hermitian obstructions in M_2(A).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "flagfact/algebra.hpp"
#include "flagfact/factorization.hpp"
#include "flagfact/flags.hpp"
#include "flagfact/sampling.hpp"

namespace flagfact {

/// A point of Fl_A(n): an ordered tuple q_1 <= ... <= q_n of idempotents up to
/// the relation q ~ q' (same right ideal).  Hermitian instances also carry the
/// self-adjoint representative of every q_j.
class FlagPoint {
 public:
  explicit FlagPoint(std::vector<Idempotent> reps);

  /// The point represented by the interior members of a flag.
  static FlagPoint of(const Flag& flag);

  std::span<const Idempotent> reps() const noexcept { return reps_; }
  const std::optional<std::vector<Idempotent>>& canonical() const noexcept {
    return canonical_;
  }
  std::size_t size() const noexcept { return reps_.size(); }

 private:
  std::vector<Idempotent> reps_;
  std::optional<std::vector<Idempotent>> canonical_;
};

/// Pairwise equivalence of representatives.
bool same_point(const FlagPoint& a, const FlagPoint& b);

/// q_j -> g q_j g^{-1}.  Throws NotInvertible.
FlagPoint flag_action(const Element& g, const FlagPoint& point);

struct OmegaReport {
  bool member = false;
  /// sigma_min of p_j g p_j in its corner relative to g, j = 1..n.
  std::vector<double> corner_conditions;
  std::optional<std::size_t> first_failing;
};

/// g in Omega iff every p_j g p_j (j = 1..n) is invertible in its corner.
OmegaReport omega_membership(const Element& g, const Flag& flag);

struct ChartCoordinates {
  Flag base;
  /// Element of N(1 - delta).
  Element point;
  double residual = 0.0;
};

/// The x-factor of the Gauss decomposition of g.
ChartCoordinates chart_sigma(const Element& g, const Flag& flag);
/// sigma(g x).  Throws OutOfChart when g x is outside Omega.
ChartCoordinates chart_transition(const Element& g, const ChartCoordinates& x);

struct TransitivityWitness {
  Element u;
  double unitarity_residual = 0.0;
  /// Max of delta_defect(u^{-1} g) and delta_defect(g^{-1} u).
  double stabilizer_defect = 0.0;
  bool certified = false;
};

/// u-factor of the u a b decomposition of g; u p_j A = g p_j A for every j.
TransitivityWitness unitary_transitivity_witness(const Element& g, const Flag& flag);

/// M_2(A) and its flag 0 < diag(1, 0) < 1.
InstancePtr two_by_two(const InstancePtr& inner);
Flag two_block_flag(const InstancePtr& block_instance);

struct CounterexampleReport {
  std::string model;
  SpectrumApprox witness_spectrum;
  /// Did the construction hit the expected obstruction?
  bool obstructed = false;
  std::optional<std::size_t> failing_corner;
  std::string failure;
  /// char: ||(g*g)_11 - (1 + a^2)||.  u11: ||g J g* J - 1||.
  double identity_residual = 0.0;
  /// ||1 + a^2||.
  double one_plus_a_squared = 0.0;
  /// u11 only: relative sigma_min of g_11 = a + i.
  double g11_condition = 0.0;
  bool u11_member = false;
};

/// Runs nest_gram_factorize on g = [[1, 0], [a, 1]] in M_2(A).  Expects a
/// self-adjoint a with i in its spectrum; throws BadWitness otherwise.
CounterexampleReport counterexample_char(const InstancePtr& inner, const Element& a);

/// Same g-shape without witness preconditions; used as the hermitian control.
CounterexampleReport gshape_nestgram(const InstancePtr& inner, const Element& a);

/// ||g J g* J - 1|| <= rel_residual with J = diag(1, -1) blockwise.
bool u11_membership(const Element& g);
double u11_residual(const Element& g);

/// g = [[a + i, a], [a, a - i]] lies in U_{1,1} but has singular g_11.
CounterexampleReport u11_counterexample(const InstancePtr& inner, const Element& a);

/// exp(X) for a random J-skew X (J X* J = -X); always in U_{1,1}.
Element random_u11(const InstancePtr& block_instance, Sampler& sampler, double scale = 0.5);

/// The built-in non-hermitian witness: J = diag(1, -1) and a = [[0, 1], [-1, 0]].
Element default_indefinite_witness();

}  // namespace flagfact
