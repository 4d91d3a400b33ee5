#include "finj/localcoh.hpp"

#include <gtest/gtest.h>

using namespace finj;

namespace {

HypersurfaceData squares(Scalar p, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " + x" : "x") + std::to_string(i) + "^2";
    return validate_hypersurface(parse_poly(s, PrimeField(p), WeightSystem::standard(n)));
}

StabilizedLocalCoh lc(const HypersurfaceData& D, ModuleSpec spec, int i, int lo, int hi, bool fl = true) {
    GradedModule M(D, spec);
    StabilizeOptions o;
    o.finite_length = fl;
    return local_cohomology(D, M, i, lo, hi, o);
}

} // namespace

TEST(LocalCoh, TopOfQuadricCone) {
    auto D = squares(3, 3);
    auto H = lc(D, {ModuleKind::OD}, 2, -3, -1, false);
    auto dims = H.dims();
    EXPECT_EQ(dims[-1], 1u);
    EXPECT_EQ(dims, inverse_poly_oracle(D, -3, -1));
}

TEST(LocalCoh, DepthOfQuadricCone) {
    auto D = squares(3, 3);
    EXPECT_EQ(lc(D, {ModuleKind::OD}, 0, -4, 4).total_dim(), 0u);
    EXPECT_EQ(lc(D, {ModuleKind::OD}, 1, -4, 4).total_dim(), 0u);
}

TEST(LocalCoh, OmegaOneQuadricCone) {
    auto D = squares(3, 3);
    auto H = lc(D, {ModuleKind::OmegaD, 1}, 1, -4, 4);
    EXPECT_EQ(H.total_dim(), 1u);
    EXPECT_EQ(lc(D, {ModuleKind::OmegaD, 1}, 0, -4, 4).total_dim(), 0u);
}

TEST(LocalCoh, OneVariableStage) {
    // H^1 of K(x^2) on F_p[x] is coker(x^2): degrees b with b + 2 in {0, 1}
    GradedModule R(PrimeField(3), WeightSystem::standard(1));
    KoszulEngine E(R, {0});
    EXPECT_EQ(E.stage(1, 2, -2, {0})->dim() + E.stage(1, 2, -2, {-2})->dim() , 1u);
}

TEST(LocalCoh, JacobianOracleRange) {
    auto D = squares(3, 3);
    EXPECT_THROW(jacobian_kernel_oracle(D, 1, -2, 2), RangeError);
}

TEST(LocalCoh, VanishingSuiteQuadricCone) {
    auto rep = vanishing_suite(squares(3, 3), 0);
    EXPECT_TRUE(rep.pass);
    ASSERT_EQ(rep.socle_dims.size(), 1u);
    EXPECT_EQ(rep.socle_dims[0].second, 1u);
    for (const auto& e : rep.entries) EXPECT_EQ(e.total_dim, 0u) << e.module << " i=" << e.i;
}

TEST(LocalCoh, SocleOfTopCohomology) {
    auto D = squares(5, 4);
    GradedModule M(D, {ModuleKind::OD, 0});
    KoszulEngine E(M, koszul_parameters(D));
    StabilizeOptions o;
    o.finite_length = false;
    auto H = stabilize(E, D.d, D.a_invariant - 1, D.a_invariant, o, default_ncap(D));
    auto S = socle(E, H);
    EXPECT_EQ(S.total, 1u);
    EXPECT_EQ(S.dims.begin()->first, D.a_invariant);
}
