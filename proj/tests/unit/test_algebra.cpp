#include <cmath>
#include <numbers>

#include "flagfact/algebra.hpp"
#include "flagfact/sampling.hpp"
#include "support.hpp"

using namespace flagfact;
using namespace flagfact::testing;

namespace {

const Complex I{0.0, 1.0};

Element loop_scalar(const InstancePtr& inst, auto fn) {
  std::vector<Matrix> samples;
  for (int g = 0; g < inst->gridsize(); ++g) {
    const double theta = 2.0 * std::numbers::pi * g / inst->gridsize();
    samples.push_back(fn(theta));
  }
  return Element(inst, std::move(samples));
}

bool contains_point(const SpectrumApprox& sp, Complex z, double tol = 1e-10) {
  return sp.distance_to(z) <= tol;
}

}  // namespace

TEST(Instances, RejectBadParameters) {
  EXPECT_THROW(AlgebraInstance::dense(0), Error);
  EXPECT_THROW(AlgebraInstance::indefinite({1, 0}), Error);
  EXPECT_THROW(AlgebraInstance::loop(2, 48), Error);
  ToleranceConfig tol;
  tol.spec_margin = 0.0;
  EXPECT_THROW(tol.validate(), Error);
}

TEST(Instances, DescribeShape) {
  const auto blk = AlgebraInstance::block(3, AlgebraInstance::loop(2, 64));
  EXPECT_EQ(blk->dim(), 6);
  EXPECT_EQ(blk->gridsize(), 64);
  EXPECT_TRUE(blk->known_hermitian());
  EXPECT_FALSE(AlgebraInstance::indefinite({1, -1})->known_hermitian());
  EXPECT_TRUE(blk->same_as(*AlgebraInstance::block(3, AlgebraInstance::loop(2, 64))));
  EXPECT_FALSE(blk->same_as(*AlgebraInstance::block(2, AlgebraInstance::loop(2, 64))));
}

TEST(Element, UnitAndZeroLaws) {
  const auto inst = AlgebraInstance::dense(3);
  Sampler s(1);
  const auto x = s.gaussian(inst);
  expect_near(Element::identity(inst) * x, x);
  expect_near(x * Element::identity(inst), x);
  expect_near(Element::zero(inst) + x, x);
}

TEST(Element, RejectsNonFinite) {
  const auto inst = AlgebraInstance::dense(2);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(dense(inst, m), Error);
}

TEST(Element, MixedInstancesThrow) {
  const auto a = Element::identity(AlgebraInstance::dense(2));
  const auto b = Element::identity(AlgebraInstance::indefinite({1, -1}));
  EXPECT_THROW(a + b, InstanceMismatch);
  EXPECT_THROW(a * b, InstanceMismatch);
}

TEST(Adjoint, UnitIsSelfAdjoint) {
  for (const auto& inst : {AlgebraInstance::dense(3), AlgebraInstance::indefinite({1, -1, 1}),
                           AlgebraInstance::loop(2, 16)})
    expect_near(adjoint(Element::identity(inst)), Element::identity(inst));
}

TEST(Adjoint, IndefiniteWitnessIsSelfAdjoint) {
  const auto inst = AlgebraInstance::indefinite({1, -1});
  const auto a = dense(inst, mat({{0, 1}, {-1, 0}}));
  expect_near(adjoint(a), a);
  EXPECT_TRUE(is_self_adjoint(a));
}

TEST(Adjoint, LoopIsPointwiseConjugateTranspose) {
  const auto inst = AlgebraInstance::loop(2, 32);
  const auto x = loop_scalar(inst, [](double t) { return mat({{std::polar(1.0, t), 0}, {0, 1}}); });
  const auto expected =
      loop_scalar(inst, [](double t) { return mat({{std::polar(1.0, -t), 0}, {0, 1}}); });
  expect_near(adjoint(x), expected);
}

TEST(Adjoint, BlockTransposesBlocks) {
  const auto inner = AlgebraInstance::indefinite({1, -1});
  const auto inst = AlgebraInstance::block(2, inner);
  Sampler s(3);
  const auto b01 = s.gaussian(inner);
  const auto zero = Element::zero(inner);
  const auto x = assemble_blocks(inst, {{zero, b01}, {zero, zero}});
  const auto xs = adjoint(x);
  expect_near(block_at(xs, 1, 0), adjoint(b01));
  expect_near(block_at(xs, 0, 1), zero);
}

TEST(Invert, Identity) {
  const auto inst = AlgebraInstance::dense(4);
  expect_near(invert(Element::identity(inst)), Element::identity(inst));
}

TEST(Invert, HandInverse) {
  const auto inst = AlgebraInstance::dense(2);
  const auto x = dense(inst, mat({{2, 1}, {1, 1}}));
  const auto y = invert(x);
  expect_near(y, dense(inst, mat({{1, -1}, {-1, 2}})));
  expect_near(x * y, Element::identity(inst));
}

TEST(Invert, LoopPointwise) {
  const auto inst = AlgebraInstance::loop(1, 64);
  const auto x = loop_scalar(inst, [](double t) { return mat({{std::polar(1.0, t)}}); });
  const auto y = loop_scalar(inst, [](double t) { return mat({{std::polar(1.0, -t)}}); });
  expect_near(invert(x), y);
}

TEST(Invert, LoopVanishingSampleThrows) {
  const auto inst = AlgebraInstance::loop(1, 64);
  const auto x = loop_scalar(inst, [](double t) { return mat({{std::polar(1.0, t) - 1.0}}); });
  try {
    invert(x);
    FAIL() << "expected NotInvertible";
  } catch (const NotInvertible& e) {
    ASSERT_TRUE(e.sample().has_value());
    EXPECT_EQ(*e.sample(), 0u);
    EXPECT_LT(e.sigma_min(), 1e-10);
  }
}

TEST(Invert, RandomResidual) {
  Sampler s(5);
  for (int n : {2, 5, 9}) {
    const auto inst = AlgebraInstance::dense(n);
    const auto x = s.invertible(inst);
    const auto y = invert(x);
    const double bound = inst->tolerances().rel_residual * x.norm() * y.norm();
    EXPECT_LE(distance(x * y, Element::identity(inst)), bound);
    EXPECT_LE(distance(y * x, Element::identity(inst)), bound);
  }
}

TEST(Spectrum, Unit) {
  const auto sp = spectrum(Element::identity(AlgebraInstance::dense(3)));
  ASSERT_EQ(sp.points.size(), 1u);
  EXPECT_NEAR(std::abs(sp.points[0] - 1.0), 0.0, 1e-14);
  EXPECT_EQ(sp.method, SpectrumMethod::Eigenvalues);
}

TEST(Spectrum, IndefiniteWitness) {
  const auto inst = AlgebraInstance::indefinite({1, -1});
  const auto sp = spectrum(dense(inst, mat({{0, 1}, {-1, 0}})));
  EXPECT_EQ(sp.points.size(), 2u);
  EXPECT_TRUE(contains_point(sp, I));
  EXPECT_TRUE(contains_point(sp, -I));
}

TEST(Spectrum, LoopSamplesUnitCircle) {
  const auto inst = AlgebraInstance::loop(1, 64);
  const auto x = loop_scalar(inst, [](double t) { return mat({{std::polar(1.0, t)}}); });
  const auto sp = spectrum(x);
  EXPECT_EQ(sp.method, SpectrumMethod::PointwiseUnion);
  EXPECT_EQ(sp.points.size(), 64u);
  for (const auto& z : sp.points) EXPECT_NEAR(std::abs(z), 1.0, 1e-14);
}

TEST(Spectrum, BlockFlattens) {
  const auto inst = AlgebraInstance::block(2, AlgebraInstance::dense(1));
  const auto x = Element(inst, {mat({{1, 1}, {0, 3}})});
  const auto sp = spectrum(x);
  EXPECT_TRUE(contains_point(sp, 1.0));
  EXPECT_TRUE(contains_point(sp, 3.0));
}

TEST(Spectrum, HausdorffDistance) {
  const std::vector<Complex> a{0.0, 1.0};
  const std::vector<Complex> b{0.0, 1.0, 3.0};
  EXPECT_DOUBLE_EQ(one_sided_distance(a, b), 0.0);
  EXPECT_DOUBLE_EQ(hausdorff_distance(a, b), 2.0);
}

TEST(Corner, Embeddings) {
  const auto inst = AlgebraInstance::dense(2);
  const Corner corner(dense(inst, unit(2, 0, 0)));
  const auto& p = corner.projection();
  EXPECT_EQ(corner.rank(), 1);

  const auto sp_corner = corner_spectrum(p, corner);
  ASSERT_EQ(sp_corner.points.size(), 1u);
  EXPECT_NEAR(std::abs(sp_corner.points[0] - 1.0), 0.0, 1e-12);
  const auto sp0 = spectrum(corner_embed_iota0(p, corner));
  EXPECT_TRUE(contains_point(sp0, 0.0));
  EXPECT_TRUE(contains_point(sp0, 1.0));

  const auto x = scale(2.0, p);
  const auto sp2 = corner_spectrum(x, corner);
  ASSERT_EQ(sp2.points.size(), 1u);
  EXPECT_NEAR(std::abs(sp2.points[0] - 2.0), 0.0, 1e-12);
  const auto sp1 = spectrum(corner_embed_iota1(x, corner));
  EXPECT_TRUE(contains_point(sp1, 2.0));
  EXPECT_TRUE(contains_point(sp1, 1.0));
}

TEST(Corner, FullCornerIsOrdinarySpectrum) {
  const auto inst = AlgebraInstance::dense(3);
  Sampler s(8);
  const auto x = s.gaussian(inst);
  const Corner full(Element::identity(inst));
  EXPECT_LE(hausdorff_distance(corner_spectrum(x, full).points, spectrum(x).points), 1e-12);
}

TEST(Corner, RejectsOutsideElements) {
  const auto inst = AlgebraInstance::dense(2);
  const Corner corner(dense(inst, unit(2, 0, 0)));
  EXPECT_THROW(corner_embed_iota0(Element::identity(inst), corner), NotInCorner);
  EXPECT_THROW(corner_embed_iota1(Element::identity(inst), corner), NotInCorner);
}

TEST(Corner, ObliqueIdempotentInverse) {
  const auto inst = AlgebraInstance::dense(2);
  const auto e = dense(inst, mat({{1, 1}, {0, 0}}));
  const Corner corner(e);
  const auto x = scale(3.0, e);
  const auto y = corner.inverse(x);
  expect_near(y * x, e);
  expect_near(x * y, e);
}

TEST(Hermitian, StandardInstancesPass) {
  for (const auto& inst : {AlgebraInstance::dense(4), AlgebraInstance::loop(2, 64),
                           AlgebraInstance::block(2, AlgebraInstance::dense(2))}) {
    const auto report = hermitian_witness(inst, 10, 11);
    EXPECT_TRUE(report.hermitian()) << inst->describe();
    EXPECT_LE(report.max_abs_imag, 1e-10);
  }
}

TEST(Hermitian, IndefiniteFails) {
  const auto report = hermitian_witness(AlgebraInstance::indefinite({1, -1}), 40, 11);
  EXPECT_FALSE(report.hermitian());
  EXPECT_FALSE(report.witnesses.empty());
  for (const auto& w : report.witnesses) EXPECT_TRUE(is_self_adjoint(w));
}

TEST(Hermitian, ZeroTrialsRejected) {
  EXPECT_THROW(hermitian_witness(AlgebraInstance::dense(2), 0, 1), Error);
}

TEST(Loop, SmoothnessProxy) {
  const auto inst = AlgebraInstance::loop(2, 128);
  Sampler s(2);
  const auto x = s.gaussian(inst);
  EXPECT_LE(trailing_band_fraction(x), inst->tolerances().loop_smoothness);
  EXPECT_LE(trailing_band_fraction(x * adjoint(x)), inst->tolerances().loop_smoothness);
  std::vector<Matrix> spikes(128, Matrix::Zero(2, 2));
  spikes[5](0, 0) = 1.0;
  EXPECT_GT(trailing_band_fraction(Element(inst, spikes)), 0.1);
}

TEST(Sampling, SeedReproducible) {
  const auto inst = AlgebraInstance::loop(2, 16);
  Sampler a(99);
  Sampler b(99);
  EXPECT_EQ(distance(a.gaussian(inst), b.gaussian(inst)), 0.0);
  EXPECT_EQ(distance(a.unitary(inst), b.unitary(inst)), 0.0);
}

TEST(Sampling, UnitaryAndProjection) {
  Sampler s(4);
  const auto inst = AlgebraInstance::dense(5);
  const auto u = s.unitary(inst);
  expect_near(adjoint(u) * u, Element::identity(inst), 1e-12);
  const auto p = s.projection(inst, 2);
  expect_near(p * p, p, 1e-12);
  expect_near(adjoint(p), p, 1e-12);
  EXPECT_NEAR(p.matrix().trace().real(), 2.0, 1e-12);
}
