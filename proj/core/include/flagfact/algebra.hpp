#pragma once

// Concrete unital involutive algebras.
//
// Every instance is realized as C(grid, M_N(C)) with the involution
// x* = J x^H J for a +-1 diagonal signature J.  A dense instance has a
// one-point grid, a loop instance samples the circle uniformly, and a block
// instance M_n(B) is stored flattened (block (i,j) of the element occupies
// rows/cols [i*d, (i+1)*d) x [j*d, (j+1)*d) with d the flat size of B).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flagfact/errors.hpp"

namespace flagfact {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

struct ToleranceConfig {
  double rel_residual = 1e-9;
  /// Minimum sigma_min / sigma_max for an element to count as invertible.
  double inv_threshold = 1e-10;
  double spec_margin = 1e-10;
  /// Maximum trailing Fourier band energy fraction for loop samples.
  double loop_smoothness = 1e-8;

  void validate() const;
  bool operator==(const ToleranceConfig&) const = default;
};

enum class InstanceKind { DenseStandard, DenseIndefinite, Loop, Block };

std::string to_string(InstanceKind kind);

class AlgebraInstance;
using InstancePtr = std::shared_ptr<const AlgebraInstance>;
class Element;

class AlgebraInstance {
 public:
  static InstancePtr dense(int dim, ToleranceConfig tol = {});
  static InstancePtr indefinite(std::vector<int> signature,
                                ToleranceConfig tol = {});
  static InstancePtr loop(int matdim, int gridsize, ToleranceConfig tol = {});
  /// M_n(inner).  Tolerances default to those of the inner instance.
  static InstancePtr block(int blockcount, InstancePtr inner);
  static InstancePtr block(int blockcount, InstancePtr inner,
                           ToleranceConfig tol);

  InstanceKind kind() const noexcept { return kind_; }
  /// Flat matrix size N of every grid sample.
  int dim() const noexcept { return dim_; }
  /// Number of grid samples (1 unless a loop sits somewhere in the tower).
  int gridsize() const noexcept { return gridsize_; }
  /// Loop instances only: pointwise matrix size k.
  int matdim() const noexcept { return matdim_; }
  int blockcount() const noexcept { return blockcount_; }
  const InstancePtr& inner() const noexcept { return inner_; }
  const Eigen::VectorXd& signature() const noexcept { return signature_; }
  const ToleranceConfig& tolerances() const noexcept { return tol_; }

  InstancePtr with_tolerances(ToleranceConfig tol) const;

  bool standard_involution() const noexcept { return standard_; }
  /// Definite signature: the involution is conjugate transpose up to sign,
  /// and the instance is a hermitian algebra.
  bool known_hermitian() const noexcept { return standard_; }
  bool has_loop() const noexcept { return gridsize_ > 1 || kind_ == InstanceKind::Loop; }

  /// Structural equality (kind, parameters, tolerances).
  bool same_as(const AlgebraInstance& other) const;
  std::string describe() const;

 private:
  AlgebraInstance() = default;

  InstanceKind kind_ = InstanceKind::DenseStandard;
  int dim_ = 1;
  int gridsize_ = 1;
  int matdim_ = 0;
  int blockcount_ = 0;
  InstancePtr inner_;
  Eigen::VectorXd signature_;
  bool standard_ = true;
  ToleranceConfig tol_;
};

/// An immutable member of an instance: one N x N matrix per grid sample.
class Element {
 public:
  Element(InstancePtr instance, std::vector<Matrix> samples);

  static Element zero(const InstancePtr& instance);
  static Element identity(const InstancePtr& instance);
  static Element scalar(const InstancePtr& instance, Complex value);
  /// Same matrix at every grid sample.
  static Element constant(const InstancePtr& instance, const Matrix& m);

  const AlgebraInstance& instance() const noexcept { return *instance_; }
  const InstancePtr& instance_ptr() const noexcept { return instance_; }
  std::span<const Matrix> samples() const noexcept { return samples_; }
  const Matrix& sample(std::size_t i) const { return samples_.at(i); }
  std::size_t gridsize() const noexcept { return samples_.size(); }
  int dim() const noexcept { return instance_->dim(); }
  /// The single matrix of a one-sample element.
  const Matrix& matrix() const;

  /// Max over grid samples of the Frobenius norm.
  double norm() const;

 private:
  InstancePtr instance_;
  std::vector<Matrix> samples_;
};

void require_same_instance(const Element& x, const Element& y);

Element add(const Element& x, const Element& y);
Element sub(const Element& x, const Element& y);
Element mul(const Element& x, const Element& y);
Element scale(Complex lambda, const Element& x);
Element adjoint(const Element& x);

inline Element operator+(const Element& x, const Element& y) { return add(x, y); }
inline Element operator-(const Element& x, const Element& y) { return sub(x, y); }
inline Element operator*(const Element& x, const Element& y) { return mul(x, y); }
inline Element operator*(Complex lambda, const Element& x) { return scale(lambda, x); }

/// Max over samples of ||x_i - y_i||_F / max(||y_i||_F, 1e-300).
double relative_difference(const Element& x, const Element& y);
/// Max over samples of ||x_i - y_i||_F.
double distance(const Element& x, const Element& y);

/// Relative smallest singular value (sigma_min / sigma_max), minimized over
/// the grid.  Zero for the zero element.
struct Conditioning {
  double relative_sigma_min = 0.0;
  std::size_t worst_sample = 0;
};
Conditioning conditioning(const Element& x);

Element invert(const Element& x);

/// Pointwise matrix exponential.
Element exponential(const Element& x);

bool is_self_adjoint(const Element& x);

enum class SpectrumMethod { Eigenvalues, PointwiseUnion };

struct SpectrumApprox {
  std::vector<Complex> points;
  SpectrumMethod method = SpectrumMethod::Eigenvalues;

  double max_abs() const;
  double max_abs_imag() const;
  /// Distance from z to the nearest point (infinity when empty).
  double distance_to(Complex z) const;
};

SpectrumApprox spectrum(const Element& x);

/// Merge points closer than `radius`, keeping the first representative.
std::vector<Complex> collapse_points(std::vector<Complex> points, double radius);
/// sup_{a in from} dist(a, to).
double one_sided_distance(std::span<const Complex> from, std::span<const Complex> to);
double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b);

/// Block (i, j) of an element of a block instance, as an inner element.
Element block_at(const Element& x, int i, int j);
/// Inverse of block_at: blocks[i][j] must all live in instance->inner().
Element assemble_blocks(const InstancePtr& instance,
                        const std::vector<std::vector<Element>>& blocks);
/// diag(b_0, ..., b_{n-1}) with every b_i in instance->inner().
Element block_diagonal(const InstancePtr& instance, const std::vector<Element>& diagonal);

// Corners --------------------------------------------------------------------

/// Compression data for the corner algebra pAp of an idempotent p.  Each grid
/// sample carries an orthonormal basis V of range(p), so that
/// pAp ~ M_r via x -> V^H x V and X -> V X V^H p.
class Corner {
 public:
  explicit Corner(Element p);

  const Element& projection() const noexcept { return p_; }
  int rank() const noexcept { return rank_; }

  bool contains(const Element& x) const;
  /// ||pxp - x|| relative to max(1, ||x||).
  double containment_defect(const Element& x) const;

  std::vector<Matrix> compress(const Element& x) const;
  Element expand(std::span<const Matrix> compressed) const;

  /// Relative sigma_min of the compression, minimized over the grid.
  Conditioning conditioning(const Element& x) const;
  /// sigma_min of the compression over the largest singular value of
  /// `reference` (or of the compression, if larger).  Detects corners that are
  /// negligible relative to the ambient element.
  Conditioning conditioning(const Element& x, const Element& reference) const;
  /// Inverse of x inside pAp.  Throws NotInvertible.
  Element inverse(const Element& x) const;

 private:
  Element p_;
  int rank_ = 0;
  std::vector<Matrix> basis_;
};

Element corner_embed_iota0(const Element& x, const Corner& corner);
Element corner_embed_iota1(const Element& x, const Corner& corner);
/// sigma_A(iota_1(x)) with the point 1 removed, re-added when x - p is
/// singular inside the corner.  For p = 1 this is the ordinary spectrum.
SpectrumApprox corner_spectrum(const Element& x, const Corner& corner);

// Hermitian sampling ---------------------------------------------------------

struct HermitianReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double max_abs_imag = 0.0;
  double min_distance_to_minus_one = 0.0;
  /// First few violating self-adjoint samples.
  std::vector<Element> witnesses;

  bool hermitian() const noexcept { return violations == 0; }
};

/// Samples self-adjoint elements (x + x*)/2 and i(x* - x)/2 and checks that
/// their spectra are real and that -1 is not in the spectrum of the square.
HermitianReport hermitian_witness(const InstancePtr& instance, std::size_t trials,
                                  std::uint64_t seed);

/// Fraction of spectral energy in the trailing Fourier band |f| >= m/4 of a
/// loop-valued element (0 for one-sample elements).
double trailing_band_fraction(const Element& x);

}  // namespace flagfact
