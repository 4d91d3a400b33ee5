#include "finj/forms.hpp"

#include <gtest/gtest.h>

using namespace finj;

namespace {

Poly parse(const std::string& s, Scalar p, std::vector<int> w) {
    return parse_poly(s, PrimeField(p), WeightSystem(std::move(w)));
}

} // namespace

TEST(Field, RejectsComposite) {
    EXPECT_THROW(PrimeField(4), InputError);
    EXPECT_NO_THROW(PrimeField(7));
    PrimeField k(7);
    for (Scalar a = 1; a < 7; ++a) EXPECT_EQ(k.mul(a, k.inv(a)), 1u);
}

TEST(Poly, ParseAndPrintRoundTrip) {
    auto f = parse("x0^2 + x1*x2 - 3*x2^2", 5, {1, 1, 1});
    EXPECT_EQ(to_string(parse(to_string(f), 5, {1, 1, 1})), to_string(f));
    EXPECT_TRUE(f.is_homogeneous());
    EXPECT_EQ(*f.degree(), 2);
}

TEST(Poly, ParseErrors) {
    EXPECT_THROW(parse("x0 + x7", 5, {1, 1, 1}), InputError);
    EXPECT_THROW(parse("x0 x1", 5, {1, 1, 1}), InputError);
    EXPECT_THROW(parse("x0 +", 5, {1, 1, 1}), InputError);
}

TEST(Validation, QuadricCone) {
    auto D = validate_hypersurface(parse("x0^2 + x1^2 + x2^2", 5, {1, 1, 1}));
    EXPECT_EQ(D.d, 2);
    EXPECT_EQ(D.a_invariant, -1);
    EXPECT_EQ(D.tjurina, 1);
    EXPECT_EQ(free_module_piece({0}, D, Degree(2)).dim(), 5u);
}

TEST(Validation, RejectsNonIsolated) {
    EXPECT_THROW(validate_hypersurface(parse("x0*x1", 5, {1, 1, 1})), NotIsolatedSingularity);
    EXPECT_THROW(validate_hypersurface(parse("x0^2 + x1", 5, {1, 1, 1})), NotHomogeneous);
    EXPECT_THROW(validate_hypersurface(parse("x0^2 + x1^2", 5, {1, 1})), DimensionTooSmall);
}

TEST(Validation, SmoothIsFlagged) {
    auto D = validate_hypersurface(parse("x0 + x1^2", 5, {2, 1, 1}));
    EXPECT_TRUE(D.smooth());
}

TEST(Forms, DSquaredIsZero) {
    auto g = parse("x0^3*x1 + 2*x1^2*x2^2 + x2^4", 7, {1, 1, 1});
    auto w = d_of(g);
    EXPECT_TRUE(de_rham_d(w).is_zero());
}

TEST(Forms, KoszulExactQuadric) {
    auto D = validate_hypersurface(parse("x0^2 + x1^2 + x2^2", 5, {1, 1, 1}));
    auto rep = koszul_exactness_check(D, 2, -2, 6);
    EXPECT_TRUE(rep.exact);
}

TEST(LogForms, ImageVanishesOnSmallCases) {
    PrimeField k(3);
    WeightSystem w = WeightSystem::standard(4);
    for (const char* g : {"x1^2*x2^3", "x1*x2*x3", "(1+x3)*x1^2*x2"}) {
        auto poly = parse_poly(g, k, w);
        for (int deg = 1; deg <= 3; ++deg) {
            auto rep = log_form_check(poly, deg, 5, 42);
            EXPECT_TRUE(rep.pass) << g << " k=" << deg;
        }
    }
}
