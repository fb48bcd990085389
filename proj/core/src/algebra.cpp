#include "flagfact/algebra.hpp"

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flagfact/sampling.hpp"

namespace flagfact {

namespace {

// BDCSVD in Eigen 3.4.0 returned negative singular values on some corners.
using Svd = Eigen::JacobiSVD<Matrix>;

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

Matrix apply_involution(const Matrix& x, const Eigen::VectorXd& signature,
                        bool standard) {
  if (standard) return x.adjoint();
  Matrix y = x.adjoint();
  return signature.asDiagonal() * y * signature.asDiagonal();
}

template <class F>
Element map_samples(const Element& x, F f) {
  std::vector<Matrix> out;
  out.reserve(x.gridsize());
  for (const auto& s : x.samples()) out.push_back(f(s));
  return Element(x.instance_ptr(), std::move(out));
}

template <class F>
Element zip_samples(const Element& x, const Element& y, F f) {
  require_same_instance(x, y);
  std::vector<Matrix> out;
  out.reserve(x.gridsize());
  for (std::size_t i = 0; i < x.gridsize(); ++i)
    out.push_back(f(x.sample(i), y.sample(i)));
  return Element(x.instance_ptr(), std::move(out));
}

double relative_sigma_min(const Eigen::VectorXd& singular_values) {
  if (singular_values.size() == 0) return 1.0;
  const double smax = singular_values(0);
  if (!(smax > 0.0)) return 0.0;
  return singular_values(singular_values.size() - 1) / smax;
}

double spectrum_radius(const std::vector<Complex>& pts) {
  double r = 0.0;
  for (const auto& z : pts) r = std::max(r, std::abs(z));
  return r;
}

}  // namespace

void ToleranceConfig::validate() const {
  if (!(rel_residual > 0.0) || !(inv_threshold > 0.0) || !(spec_margin > 0.0) ||
      !(loop_smoothness > 0.0))
    throw Error("tolerances must be strictly positive");
}

std::string to_string(InstanceKind kind) {
  switch (kind) {
    case InstanceKind::DenseStandard:
      return "dense-standard";
    case InstanceKind::DenseIndefinite:
      return "dense-indefinite";
    case InstanceKind::Loop:
      return "loop";
    case InstanceKind::Block:
      return "block";
  }
  return "unknown";
}

// AlgebraInstance ------------------------------------------------------------

InstancePtr AlgebraInstance::dense(int dim, ToleranceConfig tol) {
  if (dim < 1) throw Error("dense instance needs dim >= 1");
  tol.validate();
  auto inst = std::shared_ptr<AlgebraInstance>(new AlgebraInstance());
  inst->kind_ = InstanceKind::DenseStandard;
  inst->dim_ = dim;
  inst->signature_ = Eigen::VectorXd::Ones(dim);
  inst->standard_ = true;
  inst->tol_ = tol;
  return inst;
}

InstancePtr AlgebraInstance::indefinite(std::vector<int> signature,
                                        ToleranceConfig tol) {
  if (signature.empty()) throw Error("indefinite instance needs a signature");
  tol.validate();
  auto inst = std::shared_ptr<AlgebraInstance>(new AlgebraInstance());
  inst->kind_ = InstanceKind::DenseIndefinite;
  inst->dim_ = static_cast<int>(signature.size());
  inst->signature_.resize(inst->dim_);
  for (int i = 0; i < inst->dim_; ++i) {
    if (signature[i] != 1 && signature[i] != -1)
      throw Error("signature entries must be +1 or -1");
    inst->signature_(i) = signature[i];
  }
  inst->standard_ = (inst->signature_.array() == inst->signature_(0)).all();
  inst->tol_ = tol;
  return inst;
}

InstancePtr AlgebraInstance::loop(int matdim, int gridsize, ToleranceConfig tol) {
  if (matdim < 1) throw Error("loop instance needs matdim >= 1");
  if (!is_power_of_two(gridsize))
    throw Error("loop gridsize must be a power of two");
  tol.validate();
  auto inst = std::shared_ptr<AlgebraInstance>(new AlgebraInstance());
  inst->kind_ = InstanceKind::Loop;
  inst->dim_ = matdim;
  inst->matdim_ = matdim;
  inst->gridsize_ = gridsize;
  inst->signature_ = Eigen::VectorXd::Ones(matdim);
  inst->standard_ = true;
  inst->tol_ = tol;
  return inst;
}

InstancePtr AlgebraInstance::block(int blockcount, InstancePtr inner) {
  if (!inner) throw Error("block instance needs an inner instance");
  auto tol = inner->tolerances();
  return block(blockcount, std::move(inner), tol);
}

InstancePtr AlgebraInstance::block(int blockcount, InstancePtr inner,
                                   ToleranceConfig tol) {
  if (blockcount < 1) throw Error("block instance needs blockcount >= 1");
  if (!inner) throw Error("block instance needs an inner instance");
  tol.validate();
  auto inst = std::shared_ptr<AlgebraInstance>(new AlgebraInstance());
  inst->kind_ = InstanceKind::Block;
  inst->blockcount_ = blockcount;
  inst->dim_ = blockcount * inner->dim();
  inst->gridsize_ = inner->gridsize();
  inst->signature_ = inner->signature().replicate(blockcount, 1);
  inst->standard_ = inner->standard_involution();
  inst->tol_ = tol;
  inst->inner_ = std::move(inner);
  return inst;
}

InstancePtr AlgebraInstance::with_tolerances(ToleranceConfig tol) const {
  tol.validate();
  auto inst = std::shared_ptr<AlgebraInstance>(new AlgebraInstance(*this));
  inst->tol_ = tol;
  return inst;
}

bool AlgebraInstance::same_as(const AlgebraInstance& other) const {
  if (this == &other) return true;
  if (kind_ != other.kind_ || dim_ != other.dim_ || gridsize_ != other.gridsize_ ||
      matdim_ != other.matdim_ || blockcount_ != other.blockcount_ ||
      !(tol_ == other.tol_) || signature_ != other.signature_)
    return false;
  if (kind_ == InstanceKind::Block) return inner_->same_as(*other.inner_);
  return true;
}

std::string AlgebraInstance::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case InstanceKind::DenseStandard:
      os << "M_" << dim_ << "(C)";
      break;
    case InstanceKind::DenseIndefinite: {
      os << "M_" << dim_ << "(C)[J=";
      for (int i = 0; i < dim_; ++i) os << (signature_(i) > 0 ? '+' : '-');
      os << "]";
      break;
    }
    case InstanceKind::Loop:
      os << "C(T,M_" << matdim_ << ")@" << gridsize_;
      break;
    case InstanceKind::Block:
      os << "M_" << blockcount_ << "(" << inner_->describe() << ")";
      break;
  }
  return os.str();
}

// Element ---------------------------------------------------------------------

Element::Element(InstancePtr instance, std::vector<Matrix> samples)
    : instance_(std::move(instance)), samples_(std::move(samples)) {
  if (!instance_) throw Error("element without an instance");
  if (samples_.size() != static_cast<std::size_t>(instance_->gridsize()))
    throw Error("element has " + std::to_string(samples_.size()) +
                " samples, instance expects " +
                std::to_string(instance_->gridsize()));
  for (const auto& s : samples_) {
    if (s.rows() != instance_->dim() || s.cols() != instance_->dim())
      throw Error("element sample has wrong shape");
    if (!s.allFinite()) throw Error("element has non-finite entries");
  }
}

Element Element::zero(const InstancePtr& instance) {
  return constant(instance, Matrix::Zero(instance->dim(), instance->dim()));
}

Element Element::identity(const InstancePtr& instance) {
  return constant(instance, Matrix::Identity(instance->dim(), instance->dim()));
}

Element Element::scalar(const InstancePtr& instance, Complex value) {
  return constant(instance,
                  value * Matrix::Identity(instance->dim(), instance->dim()));
}

Element Element::constant(const InstancePtr& instance, const Matrix& m) {
  return Element(instance, std::vector<Matrix>(instance->gridsize(), m));
}

const Matrix& Element::matrix() const {
  if (samples_.size() != 1)
    throw Error("matrix() called on a grid-valued element");
  return samples_.front();
}

double Element::norm() const {
  double n = 0.0;
  for (const auto& s : samples_) n = std::max(n, s.norm());
  return n;
}

void require_same_instance(const Element& x, const Element& y) {
  if (!x.instance().same_as(y.instance()))
    throw InstanceMismatch("operands belong to " + x.instance().describe() +
                           " and " + y.instance().describe());
}

Element add(const Element& x, const Element& y) {
  return zip_samples(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a + b; });
}

Element sub(const Element& x, const Element& y) {
  return zip_samples(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a - b; });
}

Element mul(const Element& x, const Element& y) {
  return zip_samples(x, y, [](const Matrix& a, const Matrix& b) -> Matrix { return a * b; });
}

Element scale(Complex lambda, const Element& x) {
  return map_samples(x, [lambda](const Matrix& a) -> Matrix { return lambda * a; });
}

Element adjoint(const Element& x) {
  const auto& sig = x.instance().signature();
  const bool standard = x.instance().standard_involution();
  return map_samples(x, [&](const Matrix& a) { return apply_involution(a, sig, standard); });
}

double relative_difference(const Element& x, const Element& y) {
  require_same_instance(x, y);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.gridsize(); ++i) {
    const double denom = std::max(y.sample(i).norm(), 1e-300);
    worst = std::max(worst, (x.sample(i) - y.sample(i)).norm() / denom);
  }
  return worst;
}

double distance(const Element& x, const Element& y) {
  require_same_instance(x, y);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.gridsize(); ++i)
    worst = std::max(worst, (x.sample(i) - y.sample(i)).norm());
  return worst;
}

Conditioning conditioning(const Element& x) {
  Conditioning c{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < x.gridsize(); ++i) {
    Svd svd(x.sample(i));
    const double r = relative_sigma_min(svd.singularValues());
    if (r < c.relative_sigma_min) c = {r, i};
  }
  return c;
}

Element invert(const Element& x) {
  const double threshold = x.instance().tolerances().inv_threshold;
  std::vector<Matrix> out;
  out.reserve(x.gridsize());
  for (std::size_t i = 0; i < x.gridsize(); ++i) {
    Svd svd(x.sample(i), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double r = relative_sigma_min(sv);
    if (r < threshold) {
      std::ostringstream os;
      os << "element is not invertible: relative sigma_min " << r;
      if (x.gridsize() > 1) os << " at grid sample " << i;
      throw NotInvertible(os.str(), r,
                          x.gridsize() > 1 ? std::optional<std::size_t>(i) : std::nullopt);
    }
    out.push_back(svd.matrixV() * sv.cwiseInverse().asDiagonal() *
                  svd.matrixU().adjoint());
  }
  return Element(x.instance_ptr(), std::move(out));
}

Element exponential(const Element& x) {
  return map_samples(x, [](const Matrix& a) -> Matrix { return a.exp(); });
}

bool is_self_adjoint(const Element& x) {
  const double tol = x.instance().tolerances().rel_residual;
  return distance(x, adjoint(x)) <= tol * std::max(1.0, x.norm());
}

// Spectra ----------------------------------------------------------------------

double SpectrumApprox::max_abs() const { return spectrum_radius(points); }

double SpectrumApprox::max_abs_imag() const {
  double r = 0.0;
  for (const auto& z : points) r = std::max(r, std::abs(z.imag()));
  return r;
}

double SpectrumApprox::distance_to(Complex z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : points) d = std::min(d, std::abs(p - z));
  return d;
}

std::vector<Complex> collapse_points(std::vector<Complex> points, double radius) {
  std::vector<Complex> kept;
  for (const auto& z : points) {
    const bool seen = std::any_of(kept.begin(), kept.end(), [&](const Complex& k) {
      return std::abs(k - z) <= radius;
    });
    if (!seen) kept.push_back(z);
  }
  return kept;
}

double one_sided_distance(std::span<const Complex> from, std::span<const Complex> to) {
  double worst = 0.0;
  for (const auto& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : to) best = std::min(best, std::abs(a - b));
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b) {
  return std::max(one_sided_distance(a, b), one_sided_distance(b, a));
}

SpectrumApprox spectrum(const Element& x) {
  std::vector<Complex> pts;
  for (const auto& s : x.samples()) {
    Eigen::ComplexEigenSolver<Matrix> es(s, /*computeEigenvectors=*/false);
    const auto& ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) pts.push_back(ev(i));
  }
  const double margin = x.instance().tolerances().spec_margin;
  const double radius = 100.0 * margin * std::max(1.0, spectrum_radius(pts));
  SpectrumApprox out;
  out.points = collapse_points(std::move(pts), radius);
  out.method = x.gridsize() > 1 ? SpectrumMethod::PointwiseUnion
                                : SpectrumMethod::Eigenvalues;
  return out;
}

// Blocks -----------------------------------------------------------------------

Element block_at(const Element& x, int i, int j) {
  const auto& inst = x.instance();
  if (inst.kind() != InstanceKind::Block) throw Error("block_at on a non-block element");
  if (i < 0 || j < 0 || i >= inst.blockcount() || j >= inst.blockcount())
    throw Error("block index out of range");
  const int d = inst.inner()->dim();
  std::vector<Matrix> out;
  out.reserve(x.gridsize());
  for (const auto& s : x.samples()) out.push_back(s.block(i * d, j * d, d, d));
  return Element(inst.inner(), std::move(out));
}

Element assemble_blocks(const InstancePtr& instance,
                        const std::vector<std::vector<Element>>& blocks) {
  if (instance->kind() != InstanceKind::Block)
    throw Error("assemble_blocks needs a block instance");
  const int n = instance->blockcount();
  const int d = instance->inner()->dim();
  if (blocks.size() != static_cast<std::size_t>(n))
    throw Error("block array has the wrong number of rows");
  std::vector<Matrix> out(instance->gridsize(), Matrix::Zero(instance->dim(), instance->dim()));
  for (int i = 0; i < n; ++i) {
    if (blocks[i].size() != static_cast<std::size_t>(n))
      throw Error("block array has the wrong number of columns");
    for (int j = 0; j < n; ++j) {
      const auto& b = blocks[i][j];
      if (!b.instance().same_as(*instance->inner()))
        throw InstanceMismatch("block does not belong to the inner instance");
      for (std::size_t g = 0; g < out.size(); ++g)
        out[g].block(i * d, j * d, d, d) = b.sample(g);
    }
  }
  return Element(instance, std::move(out));
}

Element block_diagonal(const InstancePtr& instance, const std::vector<Element>& diagonal) {
  const int n = instance->blockcount();
  if (diagonal.size() != static_cast<std::size_t>(n))
    throw Error("block_diagonal needs one block per diagonal slot");
  const auto zero = Element::zero(instance->inner());
  std::vector<std::vector<Element>> blocks(n, std::vector<Element>(n, zero));
  for (int i = 0; i < n; ++i) blocks[i][i] = diagonal[i];
  return assemble_blocks(instance, blocks);
}

// Corners ----------------------------------------------------------------------

Corner::Corner(Element p) : p_(std::move(p)) {
  const auto& tol = p_.instance().tolerances();
  const double pn = p_.norm();
  if (distance(p_ * p_, p_) > tol.rel_residual * std::max(1.0, pn * pn))
    throw NotIdempotent("corner projection is not idempotent");
  basis_.reserve(p_.gridsize());
  for (std::size_t g = 0; g < p_.gridsize(); ++g) {
    const Matrix& s = p_.sample(g);
    const double tr = s.trace().real();
    const int r = static_cast<int>(std::lround(tr));
    if (g == 0) {
      rank_ = r;
    } else if (r != rank_) {
      throw NotIdempotent("idempotent rank varies across the grid");
    }
    Svd svd(s, Eigen::ComputeFullU);
    basis_.push_back(svd.matrixU().leftCols(r));
  }
}

double Corner::containment_defect(const Element& x) const {
  return distance(p_ * x * p_, x) / std::max(1.0, x.norm());
}

bool Corner::contains(const Element& x) const {
  return containment_defect(x) <= p_.instance().tolerances().rel_residual;
}

std::vector<Matrix> Corner::compress(const Element& x) const {
  require_same_instance(x, p_);
  std::vector<Matrix> out;
  out.reserve(x.gridsize());
  for (std::size_t g = 0; g < x.gridsize(); ++g)
    out.push_back(basis_[g].adjoint() * x.sample(g) * basis_[g]);
  return out;
}

Element Corner::expand(std::span<const Matrix> compressed) const {
  if (compressed.size() != p_.gridsize()) throw Error("compressed sample count mismatch");
  std::vector<Matrix> out;
  out.reserve(compressed.size());
  for (std::size_t g = 0; g < compressed.size(); ++g)
    out.push_back(basis_[g] * compressed[g] * basis_[g].adjoint() * p_.sample(g));
  return Element(p_.instance_ptr(), std::move(out));
}

Conditioning Corner::conditioning(const Element& x) const {
  Conditioning c{std::numeric_limits<double>::infinity(), 0};
  const auto comp = compress(x);
  for (std::size_t g = 0; g < comp.size(); ++g) {
    Svd svd(comp[g]);
    const double r = relative_sigma_min(svd.singularValues());
    if (r < c.relative_sigma_min) c = {r, g};
  }
  return c;
}

Conditioning Corner::conditioning(const Element& x, const Element& reference) const {
  require_same_instance(x, reference);
  Conditioning c{std::numeric_limits<double>::infinity(), 0};
  const auto comp = compress(x);
  for (std::size_t g = 0; g < comp.size(); ++g) {
    Svd svd(comp[g]);
    Svd ref(reference.sample(g));
    const auto& sv = svd.singularValues();
    const double top = std::max(sv.size() > 0 ? sv(0) : 0.0, ref.singularValues()(0));
    const double r = top > 0.0 && sv.size() > 0 ? sv(sv.size() - 1) / top : 0.0;
    if (r < c.relative_sigma_min) c = {r, g};
  }
  return c;
}

Element Corner::inverse(const Element& x) const {
  const double threshold = p_.instance().tolerances().inv_threshold;
  auto comp = compress(x);
  for (std::size_t g = 0; g < comp.size(); ++g) {
    Svd svd(comp[g], Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double r = relative_sigma_min(sv);
    if (r < threshold)
      throw NotInvertible("element is not invertible in the corner algebra", r,
                          comp.size() > 1 ? std::optional<std::size_t>(g) : std::nullopt);
    comp[g] = svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint();
  }
  return expand(comp);
}

Element corner_embed_iota0(const Element& x, const Corner& corner) {
  if (!corner.contains(x)) throw NotInCorner("element does not satisfy pxp = x");
  return x;
}

Element corner_embed_iota1(const Element& x, const Corner& corner) {
  if (!corner.contains(x)) throw NotInCorner("element does not satisfy pxp = x");
  const auto& p = corner.projection();
  return x + (Element::identity(p.instance_ptr()) - p);
}

SpectrumApprox corner_spectrum(const Element& x, const Corner& corner) {
  const auto embedded = corner_embed_iota1(x, corner);
  if (corner.rank() == x.dim()) return spectrum(x);
  const auto& tol = x.instance().tolerances();
  SpectrumApprox full = spectrum(embedded);
  const double radius = 100.0 * tol.spec_margin * std::max(1.0, full.max_abs());
  std::erase_if(full.points, [&](const Complex& z) { return std::abs(z - 1.0) <= radius; });
  if (corner.rank() > 0 &&
      corner.conditioning(x - corner.projection()).relative_sigma_min < tol.inv_threshold)
    full.points.emplace_back(1.0, 0.0);
  return full;
}

// Hermitian sampling -------------------------------------------------------------

HermitianReport hermitian_witness(const InstancePtr& instance, std::size_t trials,
                                  std::uint64_t seed) {
  if (trials < 1) throw Error("hermitian_witness needs at least one trial");
  const auto& tol = instance->tolerances();
  Sampler sampler(seed);
  HermitianReport report;
  report.trials = trials;
  report.min_distance_to_minus_one = std::numeric_limits<double>::infinity();
  const Complex i_unit(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto x = sampler.gaussian(instance);
    const auto xs = adjoint(x);
    for (const auto& a : {scale(0.5, x + xs), scale(0.5 * i_unit, xs - x)}) {
      const auto sa = spectrum(a);
      const auto sq = spectrum(a * a);
      const double imag = sa.max_abs_imag();
      const double dist = sq.distance_to(Complex(-1.0, 0.0));
      report.max_abs_imag = std::max(report.max_abs_imag, imag);
      report.min_distance_to_minus_one = std::min(report.min_distance_to_minus_one, dist);
      const bool bad = imag > tol.spec_margin * std::max(1.0, sa.max_abs()) ||
                       dist <= tol.spec_margin;
      if (bad) {
        ++report.violations;
        if (report.witnesses.size() < 4) report.witnesses.push_back(a);
      }
    }
  }
  return report;
}

double trailing_band_fraction(const Element& x) {
  const std::size_t m = x.gridsize();
  if (m < 4) return 0.0;
  Eigen::FFT<double> fft;
  const int n = x.dim();
  double total = 0.0;
  double tail = 0.0;
  std::vector<Complex> series(m);
  std::vector<Complex> freq;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (std::size_t g = 0; g < m; ++g) series[g] = x.sample(g)(r, c);
      fft.fwd(freq, series);
      for (std::size_t f = 0; f < m; ++f) {
        const double e = std::norm(freq[f]);
        total += e;
        if (f >= m / 4 && f <= 3 * m / 4) tail += e;
      }
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

}  // namespace flagfact
