#include <gtest/gtest.h>

#include <bidisc/function.hpp>

#include "support.hpp"

namespace bidisc {
namespace {

using testing::phi_t;

Poly2 poly(std::initializer_list<std::initializer_list<cd>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    CMatrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (const cd& x : row) {
            m(i, j++) = x;
        }
        ++i;
    }
    return Poly2(m);
}

RationalFunction2 phi_t_rational(double t) { return {0, 0, poly({{1.0, 0.0}, {0.0, -t}})}; }

TEST(Poly2, TrimsTrailingZeros) {
    const Poly2 p = poly({{1.0, 2.0, 0.0}, {0.0, 0.0, 0.0}});
    EXPECT_EQ(p.deg1(), 0);
    EXPECT_EQ(p.deg2(), 1);
    EXPECT_EQ(p(0.5, 2.0), cd(5.0));
}

TEST(Reflect, Constant) { EXPECT_EQ(reflect(Poly2::constant(1.0)), Poly2::constant(1.0)); }

TEST(Reflect, ExampleDenominator) {
    const double t = 0.3;
    const Poly2 r = reflect(poly({{1.0, 0.0}, {0.0, -t}}));
    EXPECT_EQ(r, poly({{-t, 0.0}, {0.0, 1.0}}));
}

TEST(Reflect, OneVariable) {
    const Poly2 r = reflect(poly({{2.0}, {-1.0}}));
    EXPECT_EQ(r, poly({{-1.0}, {2.0}}));
}

TEST(Reflect, ConjugatesCoefficients) {
    const Poly2 r = reflect(poly({{cd(1.0, 2.0), cd(0.0, 1.0)}}));
    EXPECT_EQ(r, poly({{cd(0.0, -1.0), cd(1.0, -2.0)}}));
}

TEST(Reflect, ZeroPolynomial) {
    try {
        reflect(Poly2());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "ZeroPolynomial");
    }
}

TEST(Reflect, InvolutionOnFullCornerPolynomials) {
    UnitRng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int d1 = trial % 4;
        const int d2 = (trial / 4) % 4;
        CMatrix c = testing::random_matrix(rng, d1 + 1, d2 + 1);
        c(0, 0) = 1.0 + std::abs(c(0, 0));
        c(d1, d2) = 1.0 + std::abs(c(d1, d2));
        const Poly2 p(c);
        EXPECT_EQ(reflect(reflect(p)), p);
    }
}

TEST(Eval, PhiTAtOrigin) {
    EXPECT_NEAR(std::abs(phi_t_rational(0.5).eval(0.0, 0.0) - cd(-0.5)), 0.0, 1e-15);
}

TEST(Eval, PhiTUnimodularOnTorus) {
    const auto f = phi_t_rational(0.5);
    for (int k = 0; k < 32; ++k) {
        const cd z = std::polar(1.0, 0.2 * k);
        EXPECT_NEAR(std::abs(f.eval(z, std::conj(z))), 1.0, 1e-14);
    }
}

TEST(Eval, MatchesClosedForm) {
    const auto f = phi_t_rational(0.7);
    const auto grid = make_random_grid(Ambient::Bidisc, 2, 50, 9);
    for (const auto& z : grid.points) {
        EXPECT_NEAR(std::abs(f(z) - phi_t(0.7, z(0), z(1))), 0.0, 1e-14);
    }
}

TEST(Eval, ConstantPolynomial) { EXPECT_EQ(Poly2::constant(1.0)(cd(0.3, 0.1), cd(-0.2)), cd(1.0)); }

TEST(Eval, NearPole) {
    // p = 1 - z1 has zeros on the torus; build without the zero-free check.
    const RationalFunction2 f(0, 0, poly({{1.0}, {-1.0}}), false);
    try {
        (void)f.eval(1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), "NearPole");
    }
}

TEST(ZeroFree, DetectsBoundaryAndInteriorZeros) {
    EXPECT_TRUE(check_zero_free(poly({{1.0, 0.0}, {0.0, -0.5}})).zero_free);
    EXPECT_TRUE(check_zero_free(poly({{2.0}, {-1.0}})).zero_free);
    EXPECT_FALSE(check_zero_free(poly({{1.0}, {-1.0}})).zero_free);
    // zero at z1 = 0.5 + 0.1i, between any grid nodes
    const auto rep = check_zero_free(poly({{-cd(0.5, 0.1)}, {1.0}}));
    EXPECT_FALSE(rep.zero_free);
    EXPECT_NEAR(std::abs(rep.offending(0) - cd(0.5, 0.1)), 0.0, 1e-12);
    // 2 - z1 - z2 vanishes at (1, 1)
    EXPECT_FALSE(check_zero_free(poly({{2.0, -1.0}, {-1.0, 0.0}})).zero_free);
    EXPECT_THROW(RationalFunction2(0, 0, poly({{1.0}, {-1.0}})), Error);
}

TEST(BoundaryModulus, Monomial) {
    const auto grid = make_torus_grid(64);
    const auto rep = boundary_modulus_test([](const Point& z) { return z(0) * z(1); }, grid, 1e-12);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.max_deviation, 1e-15);
}

TEST(BoundaryModulus, PhiT) {
    const auto f = phi_t_rational(0.5);
    const auto rep = boundary_modulus_test(f, make_torus_grid(64), 1e-12);
    EXPECT_TRUE(rep.pass);
}

TEST(BoundaryModulus, HalfZ1Fails) {
    const auto rep = boundary_modulus_test([](const Point& z) { return 0.5 * z(0); }, make_torus_grid(64), 1e-9);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.max_deviation, 0.5, 1e-15);
}

TEST(BoundaryModulus, RudinFormIsInner) {
    // Products of linear factors 1 - a z1 - b z2 with |a| + |b| < 1 are zero-free on the closed bidisc.
    UnitRng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        Poly2 p = Poly2::constant(1.0);
        const int factors = 1 + trial % 3;
        for (int f = 0; f < factors; ++f) {
            const double budget = 0.9 * rng.uniform();
            const double share = rng.uniform();
            const cd a = std::polar(budget * share, 6.28 * rng.uniform());
            const cd b = std::polar(budget * (1.0 - share), 6.28 * rng.uniform());
            CMatrix lin = CMatrix::Zero(2, 2);
            lin(0, 0) = 1.0;
            lin(1, 0) = -a;
            lin(0, 1) = -b;
            const PowerSeries2 prod = multiply(PowerSeries2{[&] {
                                                   CMatrix c = CMatrix::Zero(p.deg1() + 2, p.deg2() + 2);
                                                   c.topLeftCorner(p.deg1() + 1, p.deg2() + 1) = p.coeffs();
                                                   return c;
                                               }()},
                                               PowerSeries2{[&] {
                                                   CMatrix c = CMatrix::Zero(p.deg1() + 2, p.deg2() + 2);
                                                   c.topLeftCorner(2, 2) = lin;
                                                   return c;
                                               }()});
            p = Poly2(prod.coeffs);
        }
        const RationalFunction2 f(trial % 2, trial % 3, p);
        EXPECT_TRUE(boundary_modulus_test(f, make_torus_grid(32), 1e-10).pass);
    }
}

TEST(SeriesOf, PhiTCoefficients) {
    const double t = 0.5;
    const auto s = series_of(phi_t_rational(t), 6, 6);
    // (w - t) sum_k t^k w^k with w = z1 z2
    for (int i = 0; i <= 6; ++i) {
        for (int j = 0; j <= 6; ++j) {
            cd expected = 0.0;
            if (i == j) {
                expected = i == 0 ? -t : std::pow(t, i - 1) * (1.0 - t * t);
            }
            EXPECT_NEAR(std::abs(s.coeffs(i, j) - expected), 0.0, 1e-15) << i << "," << j;
        }
    }
    EXPECT_NEAR(s.coeffs(1, 1).real(), 0.75, 1e-15);
    EXPECT_NEAR(s.coeffs(2, 2).real(), 0.375, 1e-15);
}

TEST(SeriesOf, MonomialAndConstant) {
    const auto s = series_of(RationalFunction2(1, 1, Poly2::constant(1.0)), 3, 3);
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(1, 1) = 1.0;
    EXPECT_EQ(s.coeffs, expected);

    // constant c = conj(u)/u for p = u
    const cd u = std::polar(1.0, 0.4);
    const auto c = series_of(RationalFunction2(0, 0, Poly2::constant(u)), 2, 2);
    EXPECT_NEAR(std::abs(c.coeffs(0, 0) - std::conj(u) / u), 0.0, 1e-15);
    EXPECT_NEAR(c.coeffs.cwiseAbs().sum() - 1.0, 0.0, 1e-15);
}

TEST(SeriesOf, PartialSumsConvergeToValues) {
    for (double t : {0.1, 0.3, 0.5}) {
        const auto f = phi_t_rational(t);
        const auto s = series_of(f, 16, 16);
        UnitRng rng(41);
        for (int k = 0; k < 20; ++k) {
            const cd z1 = rng.in_disc(0.5);
            const cd z2 = rng.in_disc(0.5);
            EXPECT_NEAR(std::abs(s(z1, z2) - f.eval(z1, z2)), 0.0, 1e-6);
        }
    }
}

TEST(SeriesOf, GenericRationalMatchesEvaluation) {
    // (2 - z1)(3 - z2 + z1 z2 / 2) is zero-free on the closed bidisc
    const Poly2 p = poly({{6.0, -2.0}, {-3.0, 2.0}});
    const RationalFunction2 f(1, 0, p);
    const auto s = series_of(f, 40, 40);
    UnitRng rng(43);
    for (int k = 0; k < 20; ++k) {
        const cd z1 = rng.in_disc(0.5);
        const cd z2 = rng.in_disc(0.5);
        EXPECT_NEAR(std::abs(s(z1, z2) - f.eval(z1, z2)), 0.0, 1e-9);
    }
}

TEST(TimesUnimodular, FoldsConstantIntoDenominator) {
    const auto f = phi_t_rational(0.4);
    const cd c = std::polar(1.0, 1.1);
    const auto g = f.times_unimodular(c);
    const cd z1(0.2, -0.3);
    const cd z2(-0.1, 0.6);
    EXPECT_NEAR(std::abs(g.eval(z1, z2) - c * f.eval(z1, z2)), 0.0, 1e-14);
}

TEST(Grid, TorusResolutionFour) {
    const auto g = make_torus_grid(4);
    ASSERT_EQ(g.size(), 16U);
    for (const auto& z : g.points) {
        for (int k = 0; k < 2; ++k) {
            EXPECT_NEAR(std::abs(z(k)), 1.0, 1e-15);
            const double quarter = std::arg(z(k)) / (std::numbers::pi / 2);
            EXPECT_NEAR(quarter, std::round(quarter), 1e-12);
        }
    }
}

TEST(Grid, DiscIsDeterministic) {
    const auto a = make_random_grid(Ambient::Disc, 1, 5, 123);
    const auto b = make_random_grid(Ambient::Disc, 1, 5, 123);
    const auto c = make_random_grid(Ambient::Disc, 1, 5, 124);
    ASSERT_EQ(a.size(), 5U);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(a.points[k], b.points[k]);
        EXPECT_LE(std::abs(a.points[k](0)), 0.95);
    }
    EXPECT_NE(a.points[0], c.points[0]);
}

TEST(Grid, BallMembership) {
    const auto g = make_random_grid(Ambient::Ball, 2, 10, 5);
    ASSERT_EQ(g.size(), 10U);
    for (const auto& z : g.points) {
        EXPECT_LE(z.squaredNorm(), 0.9025 + 1e-15);
    }
}

TEST(Grid, PolydiscAndProduct) {
    const auto g = make_random_grid(Ambient::Polydisc, 3, 20, 1);
    for (const auto& z : g.points) {
        EXPECT_EQ(z.size(), 3);
        EXPECT_LE(z.cwiseAbs().maxCoeff(), 0.95);
    }
    const auto p = make_product_grid(3, 4, 2);
    ASSERT_EQ(p.size(), 12U);
    EXPECT_EQ(p.points[0], point2(0.0, 0.0));
    EXPECT_EQ(p.points[1](0), cd(0.0));
    EXPECT_EQ(p.points[4](1), cd(0.0));
}

TEST(Multiply, CommonTruncation) {
    PowerSeries2 a{CMatrix::Ones(3, 2)};
    PowerSeries2 b{CMatrix::Ones(2, 4)};
    const auto c = multiply(a, b);
    EXPECT_EQ(c.order1(), 1);
    EXPECT_EQ(c.order2(), 1);
    EXPECT_EQ(c.coeffs(1, 1), cd(4.0));
}

} // namespace
} // namespace bidisc
