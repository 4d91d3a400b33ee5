#include "finj/cartier.hpp"

#include <gtest/gtest.h>

using namespace finj;

namespace {

HypersurfaceData quadric(Scalar p, int n = 3) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " + x" : "x") + std::to_string(i) + "^2";
    return validate_hypersurface(parse_poly(s, PrimeField(p), WeightSystem::standard(n)));
}

} // namespace

TEST(Cartier, IsoSmallCases) {
    EXPECT_TRUE(cartier_iso_check(1, 2, 0, 4).pass);
    EXPECT_TRUE(cartier_iso_check(2, 3, 0, 6).pass);
    EXPECT_TRUE(cartier_iso_check(3, 2, 0, 4).pass);
}

TEST(Cartier, OneVariableCycles) {
    PrimeField k(3);
    DeRhamContext ctx(k, WeightSystem::standard(1));
    auto z = bzg_piece(ctx, BZG::Z, 0, Degree(1));
    ASSERT_EQ(z.piece.dim(), 1u);
    EXPECT_EQ(z.piece.basis[0].mono, Exponents{3});
    // B Omega^1 at frob degree 1 (underlying degree 3): d(x^3) = 0, so nothing
    auto b = bzg_piece(ctx, BZG::B, 1, Degree(1));
    EXPECT_EQ(b.piece.dim(), 0u);
    // frob degree 4/3: d(x^4) = x^3 dx
    auto b2 = bzg_piece(ctx, BZG::B, 1, Degree(4, 3));
    EXPECT_EQ(b2.piece.dim(), 1u);
}

TEST(Cartier, GammaFormula) {
    PrimeField k(3);
    WeightSystem w = WeightSystem::standard(2);
    Form om = Form::basis(k, w, {1, 0}, 0b10);
    Form c = inverse_cartier(om);
    EXPECT_EQ(c, Form::basis(k, w, {3, 2}, 0b10));
    EXPECT_EQ(inverse_cartier(Form::basis(k, w, {0, 0}, 0b01)), Form::basis(k, w, {2, 0}, 0b01));
}

TEST(Cartier, AdditivityModuloB) {
    PrimeField k(3);
    WeightSystem w = WeightSystem::standard(2);
    DeRhamContext ctx(k, w);
    Poly r = parse_poly("x0 + x1", k, w);
    // termwise C^{-1}(dr) vs r^{p-1} dr
    Form a = inverse_cartier(d_of(r));
    Form b = Form::from_poly(r.pow(2)).times(Poly::constant(k, w, 1));
    b = wedge(b, d_of(r));
    auto cs = g_class_space(ctx, 1, 3);
    EXPECT_TRUE(same_class(a, b, ctx, cs));
    EXPECT_FALSE(a == b);
}

TEST(Cartier, DiagramQuadric) {
    auto D = quadric(3);
    auto rep = diagram_check(D, 1, 0, 3, 10, 7);
    EXPECT_TRUE(rep.pass) << rep.left_failures << " " << rep.right_failures << " " << rep.complex_failures;
}
