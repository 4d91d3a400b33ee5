#include "finj/finj.hpp"
#include "finj/fixtures.hpp"

#include <gtest/gtest.h>

using namespace finj;

namespace {

HypersurfaceData squares(Scalar p, int n) {
    return validate_hypersurface(parse_poly(sum_of_squares_text(n), PrimeField(p), WeightSystem::standard(n)));
}

// dim H^d_m(O_D)_e = dim (O_D)_{a-e}, by counting monomials
std::size_t top_dim_by_duality(const HypersurfaceData& D, int e) {
    auto count = [&](int t) { return t < 0 ? std::size_t{0} : monomials_of_degree(D.weights(), t).size(); };
    int t = D.a_invariant - e;
    return count(t) - count(t - D.deg_f);
}

// f^{p-1} has a monomial with all exponents below p
bool fedder_f_pure(const HypersurfaceData& D) {
    auto g = D.f.pow(D.p() - 1);
    for (const auto& [e, c] : g.terms()) {
        bool small = true;
        for (int x : e) small = small && x < static_cast<int>(D.p());
        if (small && c) return true;
    }
    return false;
}

} // namespace

TEST(TopCohomology, MatchesDualityCount) {
    for (const auto& fx : default_fixtures()) {
        auto D = fx.data();
        auto [lo, hi] = level_window(D, 0, {});
        auto model = inverse_poly_oracle(D, lo, hi);
        for (int e = lo; e <= hi; ++e) {
            std::size_t want = top_dim_by_duality(D, e);
            std::size_t got = model.count(e) ? model.at(e) : 0;
            EXPECT_EQ(got, want) << fx.name << " e=" << e;
        }
    }
}

TEST(CheckLevel, LevelZeroAgreesWithFedder) {
    for (const auto& fx : default_fixtures()) {
        auto D = fx.data();
        auto L = check_level(D, 0);
        ASSERT_NE(L.verdict, Verdict::Undetermined) << fx.name;
        EXPECT_EQ(L.injective(), fedder_f_pure(D)) << fx.name;
        auto fo = frobenius_oracle(D, D.a_invariant - D.weights().max_weight(), D.a_invariant);
        EXPECT_EQ(fo.injective, L.injective()) << fx.name;
        EXPECT_EQ(fo.socle_dim, 1u) << fx.name;
    }
}

TEST(CheckLevel, NonFPureQuadricPrimeTwoIsRejected) {
    // x0^2 + x1^2 + x2^2 in characteristic 2 is not reduced at the singular point
    EXPECT_THROW(squares(2, 3), InputError);
}

TEST(CheckLevel, FullMapMatchesSocleShortcut) {
    auto D = squares(3, 5);
    CheckOptions o;
    o.full_map = true;
    for (int j = 0; j <= 2; ++j) {
        auto full = check_level(D, j, o);
        auto fast = check_level(D, j);
        EXPECT_EQ(full.verdict, fast.verdict);
        ASSERT_EQ(full.degrees.size(), fast.degrees.size());
        for (std::size_t q = 0; q < full.degrees.size(); ++q) {
            EXPECT_EQ(full.degrees[q].source_dim, fast.degrees[q].source_dim);
            EXPECT_EQ(full.degrees[q].rank, fast.degrees[q].rank);
        }
    }
}

TEST(CheckLevel, SquaresLevelOneSourceIsOneDimensional) {
    auto L = check_level(squares(3, 5), 1);
    std::size_t tot = 0;
    for (const auto& d : L.degrees) tot += d.source_dim;
    EXPECT_EQ(tot, 1u);
    EXPECT_EQ(L.socle_dim, 1u);
    EXPECT_EQ(L.injective(), L.socle_injective);
}

TEST(CheckLevel, RangeChecked) {
    auto D = squares(3, 3);
    EXPECT_THROW(check_level(D, 1), RangeError);
    EXPECT_THROW(check_level(D, -1), RangeError);
}

TEST(CheckLevel, BudgetGivesUndetermined) {
    CheckOptions o;
    o.budget = 3;
    auto L = check_level(squares(3, 5), 1, o);
    EXPECT_EQ(L.verdict, Verdict::Undetermined);
    EXPECT_FALSE(L.note.empty());
}

TEST(FInj, CodimensionClause) {
    auto D = squares(3, 3);
    auto r = check_m_F_injective(D, 1);
    EXPECT_FALSE(r.codim_ok);
    EXPECT_EQ(r.verdict, Verdict::NotInjective);
    EXPECT_FALSE(r.levels.empty());
}

TEST(FInj, QuadricLevelZero) {
    auto r = check_m_F_injective(squares(3, 3), 0);
    EXPECT_TRUE(r.codim_ok);
    EXPECT_EQ(r.verdict, Verdict::Injective);
}

TEST(FInj, SmoothIsVacuouslyInjective) {
    auto D = validate_hypersurface(parse_poly("x0 + x1^2 + x2^2", PrimeField(3), WeightSystem({2, 1, 1})));
    ASSERT_TRUE(D.smooth());
    auto r = check_m_F_injective(D, 1);
    EXPECT_EQ(r.verdict, Verdict::Injective);
}

TEST(FInj, SquaresLevelOneReportIsConsistent) {
    auto D = squares(3, 5);
    auto r = check_m_F_injective(D, 1);
    ASSERT_EQ(r.levels.size(), 2u);
    if (r.levels[1].injective()) {
        EXPECT_TRUE(r.levels[0].injective());
    }
    EXPECT_TRUE(r.vanishing_ok);
}

TEST(Descent, SquaresAtThree) {
    auto rep = descent_check(squares(3, 5), 1);
    EXPECT_TRUE(rep.determined);
    EXPECT_EQ(rep.levels.size(), 2u);
}

TEST(Descent, LevelZeroIsTrivial) {
    auto rep = descent_check(squares(3, 5), 0);
    EXPECT_EQ(rep.levels.size(), 1u);
}

TEST(SocleChain, QuadricFourVariables) {
    auto r = socle_chain_check(squares(3, 4), 1);
    EXPECT_TRUE(r.isomorphism);
    EXPECT_EQ(r.source_socle_dim, 1u);
    EXPECT_EQ(r.target_socle_dim, 1u);
    EXPECT_EQ(r.target_degree, r.source_degree - 2);
}

TEST(SocleChain, SquaresFiveVariables) {
    auto D = squares(3, 5);
    for (int j = 1; j <= 2; ++j) EXPECT_TRUE(socle_chain_check(D, j).isomorphism) << j;
}

TEST(SocleChain, RangeChecked) {
    EXPECT_THROW(socle_chain_check(squares(3, 3), 1), RangeError);
    EXPECT_THROW(socle_chain_check(squares(3, 5), 3), RangeError);
}

TEST(KTheta, QuadricFourVariables) {
    auto r = K_theta_factorization_check(squares(3, 4), 1, 100);
    EXPECT_TRUE(r.pass);
    EXPECT_GT(r.checked, 100);
}

TEST(KTheta, SquaresLevelTwo) {
    auto r = K_theta_factorization_check(squares(3, 5), 2, 10);
    EXPECT_TRUE(r.pass);
}

TEST(Fixtures, AllValidate) {
    for (const auto& fx : default_fixtures()) {
        auto D = fx.data();
        EXPECT_EQ(D.codim_sing, D.d) << fx.name;
        EXPECT_GT(D.tjurina, 0) << fx.name;
    }
    EXPECT_THROW(fixture("nope"), InputError);
}
