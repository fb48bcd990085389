#include "flagfact/flags.hpp"
#include "flagfact/sampling.hpp"
#include "support.hpp"

using namespace flagfact;
using namespace flagfact::testing;

namespace {

Idempotent idem(const InstancePtr& inst, const Matrix& m) { return Idempotent(dense(inst, m)); }

}  // namespace

TEST(Idempotent, Certificate) {
  const auto inst = AlgebraInstance::dense(2);
  EXPECT_TRUE(idem(inst, unit(2, 0, 0)).selfadjoint());
  EXPECT_FALSE(idem(inst, mat({{1, 1}, {0, 0}})).selfadjoint());
  EXPECT_THROW(idem(inst, mat({{2, 0}, {0, 0}})), NotIdempotent);
}

TEST(Order, Leq) {
  const auto inst = AlgebraInstance::dense(3);
  const auto zero = Idempotent(Element::zero(inst));
  const auto e11 = idem(inst, unit(3, 0, 0));
  const auto e22 = idem(inst, unit(3, 1, 1));
  const auto e11_e22 = idem(inst, unit(3, 0, 0) + unit(3, 1, 1));
  EXPECT_TRUE(leq(zero, e11));
  EXPECT_TRUE(leq(e11, e11_e22));
  EXPECT_FALSE(leq(e11, e22));
  EXPECT_THROW(leq(e11, idem(AlgebraInstance::dense(2), unit(2, 0, 0))), InstanceMismatch);
}

TEST(Equivalence, SimilarityOfSelf) {
  const auto inst = AlgebraInstance::dense(2);
  const auto p = idem(inst, unit(2, 0, 0));
  expect_near(similarity(p, p), Element::identity(inst));
}

TEST(Equivalence, HandSimilarity) {
  const auto inst = AlgebraInstance::dense(2);
  const auto p = idem(inst, unit(2, 0, 0));
  const auto q = idem(inst, mat({{1, 1}, {0, 0}}));
  ASSERT_TRUE(equivalent(p, q));
  const auto s = similarity(p, q);
  expect_near(s, dense(inst, mat({{1, 1}, {0, 1}})));
  expect_near(s * q.element() * invert(s), p.element());
  expect_near(invert(s), Element::identity(inst) - (q.element() - p.element()));
}

TEST(Equivalence, OrthogonalProjectionsAreNot) {
  const auto inst = AlgebraInstance::dense(2);
  const auto e11 = idem(inst, unit(2, 0, 0));
  const auto e22 = idem(inst, unit(2, 1, 1));
  EXPECT_FALSE(equivalent(e11, e22));
  EXPECT_THROW(similarity(e11, e22), NotEquivalent);
}

TEST(Selfadjointify, FixesSelfAdjoint) {
  const auto inst = AlgebraInstance::dense(3);
  Sampler s(6);
  const Idempotent e(s.projection(inst, 2));
  expect_near(selfadjointify(e).element(), e.element(), 1e-12);
}

TEST(Selfadjointify, HandCase) {
  const auto inst = AlgebraInstance::dense(2);
  const auto e = idem(inst, mat({{1, 1}, {0, 0}}));
  const auto p = selfadjointify(e);
  expect_near(p.element(), dense(inst, unit(2, 0, 0)));
  EXPECT_TRUE(p.selfadjoint());
  expect_near(e.element() * p.element(), p.element());
  expect_near(p.element() * e.element(), e.element());
}

TEST(Selfadjointify, ParametrizedCorner) {
  const auto inst = AlgebraInstance::dense(2);
  Sampler s(12);
  for (int k = 0; k < 20; ++k) {
    const Complex z = 3.0 * s.complex_normal();
    const auto p = selfadjointify(idem(inst, mat({{1, z}, {0, 0}})));
    expect_near(p.element(), dense(inst, unit(2, 0, 0)), 1e-12);
  }
}

TEST(Flag, Construction) {
  const auto inst = AlgebraInstance::dense(3);
  const auto flag = standard_flag(inst, {1, 2});
  EXPECT_EQ(flag.blocks(), 3u);
  EXPECT_TRUE(flag.selfadjoint());
  expect_near(flag.projection(1), dense(inst, unit(3, 0, 0)));
  expect_near(flag.projection(2), dense(inst, unit(3, 0, 0) + unit(3, 1, 1)));
  expect_near(flag.projection(3), Element::identity(inst));
  EXPECT_EQ(flag.block(2).rank(), 1);
}

TEST(Flag, TrivialAndErrors) {
  const auto inst = AlgebraInstance::dense(3);
  EXPECT_EQ(standard_flag(inst, {}).blocks(), 1u);
  EXPECT_THROW(standard_flag(inst, {2, 1}), BadPartition);
  EXPECT_THROW(standard_flag(inst, {3}), BadPartition);
  const auto p = idem(inst, unit(3, 0, 0));
  EXPECT_THROW(Flag(inst, {p, p}), BadPartition);
  EXPECT_THROW(Flag(inst, {idem(inst, unit(3, 1, 1)), idem(inst, unit(3, 0, 0) + unit(3, 2, 2))}),
               BadPartition);
}

TEST(Flag, BlockOverLoop) {
  const auto inst = AlgebraInstance::block(2, AlgebraInstance::loop(2, 16));
  const auto flag = standard_flag(inst, {1});
  const auto inner = inst->inner();
  expect_near(block_at(flag.projection(1), 0, 0), Element::identity(inner));
  expect_near(block_at(flag.projection(1), 1, 1), Element::zero(inner));
  EXPECT_EQ(partition_extent(*inst), 2);
}

TEST(Truncation, ZeroesOffDiagonal) {
  const auto inst = AlgebraInstance::dense(2);
  const auto flag = standard_flag(inst, {1});
  const auto x = dense(inst, mat({{1, 2}, {3, 4}}));
  expect_near(diagonal_truncation(x, flag), dense(inst, mat({{1, 0}, {0, 4}})));
}

TEST(Truncation, TrivialFlagIsIdentity) {
  const auto inst = AlgebraInstance::dense(3);
  Sampler s(2);
  const auto x = s.gaussian(inst);
  expect_near(diagonal_truncation(x, Flag::trivial(inst)), x);
}

TEST(Truncation, FixesBlockDiagonal) {
  const auto inst = AlgebraInstance::dense(4);
  const auto flag = standard_flag(inst, {1, 3});
  Sampler s(2);
  const auto d = s.in_D(flag);
  EXPECT_TRUE(in_D(d, flag));
  expect_near(diagonal_truncation(d, flag), d);
}

TEST(Membership, Triangular) {
  const auto inst = AlgebraInstance::dense(3);
  const auto flag = full_flag(inst);
  const auto upper = dense(inst, mat({{1, 2, 3}, {0, 4, 5}, {0, 0, 6}}));
  const auto unipotent = dense(inst, mat({{1, 2, 3}, {0, 1, 5}, {0, 0, 1}}));
  EXPECT_TRUE(in_Delta(upper, flag));
  EXPECT_FALSE(in_N(upper, flag));
  EXPECT_TRUE(in_N(unipotent, flag));
  EXPECT_FALSE(in_Delta(adjoint(upper), flag));
  EXPECT_FALSE(in_D(upper, flag));
}

TEST(Membership, ComplementFlag) {
  const auto inst = AlgebraInstance::dense(3);
  const auto flag = full_flag(inst);
  const auto comp = complement_flag(flag);
  ASSERT_EQ(comp.blocks(), 3u);
  expect_near(comp.projection(1), dense(inst, unit(3, 2, 2)));
  const auto lower = dense(inst, mat({{1, 0, 0}, {2, 1, 0}, {3, 4, 1}}));
  EXPECT_TRUE(in_N(lower, comp));
  EXPECT_FALSE(in_N(lower, flag));
}

TEST(Membership, MismatchThrows) {
  const auto flag = full_flag(AlgebraInstance::dense(2));
  EXPECT_THROW(in_Delta(Element::identity(AlgebraInstance::dense(3)), flag), InstanceMismatch);
}
