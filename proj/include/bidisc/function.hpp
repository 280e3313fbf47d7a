#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "numlin.hpp"

namespace bidisc {

using Point = CVector;
using Evaluable = std::function<cd(const Point&)>;

inline Point point2(cd z1, cd z2) {
    Point p(2);
    p << z1, z2;
    return p;
}

inline Point point1(cd z) {
    Point p(1);
    p << z;
    return p;
}

// ---------------------------------------------------------------------------
// Bivariate polynomials
// ---------------------------------------------------------------------------

/// Polynomial sum_{i,j} c[i,j] z1^i z2^j stored with canonical (trimmed) degree.
class Poly2 {
public:
    Poly2() : coeffs_(CMatrix::Zero(1, 1)) {}

    explicit Poly2(CMatrix coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.size() == 0) {
            coeffs_ = CMatrix::Zero(1, 1);
        }
        trim();
    }

    static Poly2 constant(cd c) {
        CMatrix m(1, 1);
        m(0, 0) = c;
        return Poly2(m);
    }

    [[nodiscard]] int deg1() const { return static_cast<int>(coeffs_.rows()) - 1; }
    [[nodiscard]] int deg2() const { return static_cast<int>(coeffs_.cols()) - 1; }
    [[nodiscard]] const CMatrix& coeffs() const { return coeffs_; }
    [[nodiscard]] cd coeff(int i, int j) const {
        if (i < 0 || j < 0 || i > deg1() || j > deg2()) {
            return {0.0, 0.0};
        }
        return coeffs_(i, j);
    }
    [[nodiscard]] bool is_zero() const { return coeffs_.cwiseAbs().maxCoeff() == 0.0; }

    [[nodiscard]] cd operator()(cd z1, cd z2) const {
        cd acc{0.0, 0.0};
        for (int i = deg1(); i >= 0; --i) {
            cd row{0.0, 0.0};
            for (int j = deg2(); j >= 0; --j) {
                row = row * z2 + coeffs_(i, j);
            }
            acc = acc * z1 + row;
        }
        return acc;
    }

    [[nodiscard]] cd operator()(const Point& z) const { return (*this)(z(0), z(1)); }

    friend bool operator==(const Poly2& a, const Poly2& b) { return a.coeffs_ == b.coeffs_; }

private:
    void trim() {
        Eigen::Index rows = coeffs_.rows();
        Eigen::Index cols = coeffs_.cols();
        while (rows > 1 && coeffs_.row(rows - 1).head(cols).cwiseAbs().maxCoeff() == 0.0) {
            --rows;
        }
        while (cols > 1 && coeffs_.col(cols - 1).head(rows).cwiseAbs().maxCoeff() == 0.0) {
            --cols;
        }
        coeffs_ = CMatrix(coeffs_.topLeftCorner(rows, cols));
    }

    CMatrix coeffs_;
};

/// Coefficient reversal plus conjugation: z^d conj(p(1/conj z)).
inline Poly2 reflect(const Poly2& p) {
    if (p.is_zero()) {
        fail("ZeroPolynomial", "cannot reflect the zero polynomial");
    }
    const int d1 = p.deg1();
    const int d2 = p.deg2();
    CMatrix r(d1 + 1, d2 + 1);
    for (int i = 0; i <= d1; ++i) {
        for (int j = 0; j <= d2; ++j) {
            r(i, j) = std::conj(p.coeffs()(d1 - i, d2 - j));
        }
    }
    return Poly2(r);
}

// ---------------------------------------------------------------------------
// Zero-freeness on the closed bidisc
// ---------------------------------------------------------------------------

struct ZeroFreeReport {
    bool zero_free{true};
    Point offending;       // a (near-)zero when zero_free is false
    double min_root_modulus{std::numeric_limits<double>::infinity()};
};

namespace detail {

// Roots of sum_k c[k] x^k via the companion matrix; leading zeros dropped.
inline std::vector<cd> univariate_roots(const CVector& c) {
    Eigen::Index n = c.size() - 1;
    const double scale = c.cwiseAbs().maxCoeff();
    while (n > 0 && std::abs(c(n)) <= 1e-14 * scale) {
        --n;
    }
    std::vector<cd> roots;
    if (n <= 0) {
        return roots;
    }
    CMatrix companion = CMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        companion(0, k) = -c(n - 1 - k) / c(n);
    }
    for (Eigen::Index k = 1; k < n; ++k) {
        companion(k, k - 1) = 1.0;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
    for (Eigen::Index k = 0; k < n; ++k) {
        roots.push_back(es.eigenvalues()(k));
    }
    return roots;
}

} // namespace detail

/// Numerical surrogate for "p has no zero on the closed bidisc": one variable
/// is sampled on angles x radii, the other is solved exactly by companion
/// roots. Both orientations are checked.
inline ZeroFreeReport check_zero_free(const Poly2& p, int angles = 50, int radii = 10, double tol = kDefaultTol) {
    ZeroFreeReport rep;
    const double scale = p.coeffs().cwiseAbs().maxCoeff();
    for (int orient = 0; orient < 2; ++orient) {
        const CMatrix c = orient == 0 ? p.coeffs() : CMatrix(p.coeffs().transpose());
        for (int r = 0; r < radii; ++r) {
            const double rad = radii == 1 ? 1.0 : static_cast<double>(r) / (radii - 1);
            for (int a = 0; a < angles; ++a) {
                const cd fixed = std::polar(rad, 2.0 * std::numbers::pi * a / angles);
                // Coefficients in the free variable (row index of c).
                CVector uni(c.rows());
                for (Eigen::Index i = 0; i < c.rows(); ++i) {
                    cd acc{0.0, 0.0};
                    for (Eigen::Index j = c.cols() - 1; j >= 0; --j) {
                        acc = acc * fixed + c(i, j);
                    }
                    uni(i) = acc;
                }
                if (uni.cwiseAbs().maxCoeff() <= tol * scale) {
                    rep.zero_free = false;
                    rep.min_root_modulus = 0.0;
                    rep.offending = orient == 0 ? point2(0.0, fixed) : point2(fixed, 0.0);
                    return rep;
                }
                for (const cd& root : detail::univariate_roots(uni)) {
                    const double m = std::abs(root);
                    rep.min_root_modulus = std::min(rep.min_root_modulus, m);
                    if (m <= 1.0 + tol) {
                        rep.zero_free = false;
                        rep.offending = orient == 0 ? point2(root, fixed) : point2(fixed, root);
                        return rep;
                    }
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Truncated power series
// ---------------------------------------------------------------------------

/// Coefficients phi_ij for i <= N1, j <= N2. Anything beyond is unknown.
struct PowerSeries2 {
    CMatrix coeffs;

    [[nodiscard]] int order1() const { return static_cast<int>(coeffs.rows()) - 1; }
    [[nodiscard]] int order2() const { return static_cast<int>(coeffs.cols()) - 1; }

    [[nodiscard]] cd operator()(cd z1, cd z2) const {
        cd acc{0.0, 0.0};
        for (Eigen::Index i = coeffs.rows() - 1; i >= 0; --i) {
            cd row{0.0, 0.0};
            for (Eigen::Index j = coeffs.cols() - 1; j >= 0; --j) {
                row = row * z2 + coeffs(i, j);
            }
            acc = acc * z1 + row;
        }
        return acc;
    }
    [[nodiscard]] cd operator()(const Point& z) const { return (*this)(z(0), z(1)); }

    /// Restriction to the first (n1, n2) orders.
    [[nodiscard]] PowerSeries2 truncated(int n1, int n2) const {
        if (n1 > order1() || n2 > order2()) {
            fail("InsufficientTruncation", "requested orders exceed the known coefficients");
        }
        return {CMatrix(coeffs.topLeftCorner(n1 + 1, n2 + 1))};
    }
};

/// Cauchy product on the common truncation.
inline PowerSeries2 multiply(const PowerSeries2& a, const PowerSeries2& b) {
    const int n1 = std::min(a.order1(), b.order1());
    const int n2 = std::min(a.order2(), b.order2());
    CMatrix c = CMatrix::Zero(n1 + 1, n2 + 1);
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            for (int k = 0; k <= i; ++k) {
                for (int l = 0; l <= j; ++l) {
                    c(i, j) += a.coeffs(k, l) * b.coeffs(i - k, j - l);
                }
            }
        }
    }
    return {c};
}

// ---------------------------------------------------------------------------
// Rational inner functions in Rudin form
// ---------------------------------------------------------------------------

/// z1^m1 z2^m2 reflect(p)(z) / p(z).
class RationalFunction2 {
public:
    RationalFunction2(int m1, int m2, Poly2 denominator, bool verify = true)
        : m1_(m1), m2_(m2), denominator_(std::move(denominator)), numerator_(reflect(denominator_)) {
        if (m1_ < 0 || m2_ < 0) {
            fail("InvalidMonomial", "monomial exponents must be non-negative");
        }
        if (verify) {
            const auto rep = check_zero_free(denominator_);
            if (!rep.zero_free) {
                fail("NearPole", "denominator vanishes near (" + std::to_string(rep.offending(0).real()) + "," +
                                     std::to_string(rep.offending(0).imag()) + "), (" +
                                     std::to_string(rep.offending(1).real()) + "," +
                                     std::to_string(rep.offending(1).imag()) + ")");
            }
        }
    }

    /// Folds a unimodular constant c into the form by rotating p with c^{-1/2}.
    [[nodiscard]] RationalFunction2 times_unimodular(cd c) const {
        const cd u = std::conj(std::sqrt(c / std::abs(c)));
        return RationalFunction2(m1_, m2_, Poly2(CMatrix(u * denominator_.coeffs())), false);
    }

    [[nodiscard]] int m1() const { return m1_; }
    [[nodiscard]] int m2() const { return m2_; }
    [[nodiscard]] const Poly2& denominator() const { return denominator_; }
    [[nodiscard]] const Poly2& numerator() const { return numerator_; }

    [[nodiscard]] cd eval(cd z1, cd z2, double tol = kDefaultTol) const {
        const cd den = denominator_(z1, z2);
        if (std::abs(den) <= tol) {
            fail("NearPole", "|p(z)| = " + std::to_string(std::abs(den)));
        }
        return std::pow(z1, m1_) * std::pow(z2, m2_) * numerator_(z1, z2) / den;
    }
    [[nodiscard]] cd operator()(const Point& z) const { return eval(z(0), z(1)); }

private:
    int m1_;
    int m2_;
    Poly2 denominator_;
    Poly2 numerator_;
};

/// Taylor coefficients at the origin by recursive division numerator = phi * p.
inline PowerSeries2 series_of(const RationalFunction2& f, int n1, int n2) {
    const Poly2& p = f.denominator();
    const cd p00 = p.coeff(0, 0);
    if (std::abs(p00) <= kDefaultTol) {
        fail("NearPole", "denominator vanishes at the origin");
    }
    CMatrix phi = CMatrix::Zero(n1 + 1, n2 + 1);
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            cd acc = f.numerator().coeff(i - f.m1(), j - f.m2());
            for (int k = 0; k <= std::min(i, p.deg1()); ++k) {
                for (int l = 0; l <= std::min(j, p.deg2()); ++l) {
                    if (k == 0 && l == 0) {
                        continue;
                    }
                    acc -= p.coeff(k, l) * phi(i - k, j - l);
                }
            }
            phi(i, j) = acc / p00;
        }
    }
    return {phi};
}

// ---------------------------------------------------------------------------
// Finite Blaschke products  c * prod (z - a_k) / (1 - conj(a_k) z)
// ---------------------------------------------------------------------------

struct Blaschke {
    cd constant{1.0, 0.0};
    std::vector<cd> zeros;

    [[nodiscard]] cd operator()(cd z) const {
        cd v = constant;
        for (const cd& a : zeros) {
            v *= (z - a) / (1.0 - std::conj(a) * z);
        }
        return v;
    }
};

// ---------------------------------------------------------------------------
// Sample grids
// ---------------------------------------------------------------------------

enum class Ambient { Disc, Bidisc, Torus2, Polydisc, Ball };

struct PointGrid {
    Ambient ambient{Ambient::Bidisc};
    int dim{2};
    std::vector<Point> points;

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

inline std::string ambient_name(const PointGrid& g) {
    switch (g.ambient) {
    case Ambient::Disc: return "disc";
    case Ambient::Bidisc: return "bidisc";
    case Ambient::Torus2: return "torus2";
    case Ambient::Polydisc: return "polydisc-" + std::to_string(g.dim);
    case Ambient::Ball: return "ball-" + std::to_string(g.dim);
    }
    return "bidisc";
}

inline constexpr double kInteriorRadius = 0.95;

/// Deterministic uniform doubles in [0, 1) from a standard engine; the
/// conversion is spelled out so results do not depend on the library's
/// distribution implementations.
class UnitRng {
public:
    explicit UnitRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    cd in_disc(double radius) {
        const double r = radius * std::sqrt(uniform());
        return std::polar(r, 2.0 * std::numbers::pi * uniform());
    }

private:
    std::mt19937_64 engine_;
};

inline PointGrid make_torus_grid(int resolution) {
    if (resolution < 1) {
        fail("InvalidGrid", "resolution must be >= 1");
    }
    PointGrid g{Ambient::Torus2, 2, {}};
    g.points.reserve(static_cast<std::size_t>(resolution) * resolution);
    for (int a = 0; a < resolution; ++a) {
        for (int b = 0; b < resolution; ++b) {
            g.points.push_back(point2(std::polar(1.0, 2.0 * std::numbers::pi * a / resolution),
                                      std::polar(1.0, 2.0 * std::numbers::pi * b / resolution)));
        }
    }
    return g;
}

/// Seeded interior samples; every coordinate (or the Euclidean norm, for the
/// ball) is at most 0.95.
inline PointGrid make_random_grid(Ambient ambient, int dim, int count, std::uint64_t seed) {
    if (count < 1) {
        fail("InvalidGrid", "point count must be >= 1");
    }
    if (ambient == Ambient::Torus2) {
        fail("InvalidGrid", "torus grids are uniform, not random");
    }
    if (ambient == Ambient::Disc) {
        dim = 1;
    } else if (ambient == Ambient::Bidisc) {
        dim = 2;
    }
    UnitRng rng(seed);
    PointGrid g{ambient, dim, {}};
    for (int k = 0; k < count; ++k) {
        Point z(dim);
        if (ambient == Ambient::Ball) {
            for (int c = 0; c < dim; ++c) {
                z(c) = cd(rng.normal(), rng.normal());
            }
            const double r = kInteriorRadius * std::pow(rng.uniform(), 1.0 / (2.0 * dim));
            z *= r / z.norm();
        } else {
            for (int c = 0; c < dim; ++c) {
                z(c) = rng.in_disc(kInteriorRadius);
            }
        }
        g.points.push_back(z);
    }
    return g;
}

/// Product grid G1 x G2 on the bidisc; each factor starts with 0 so that the
/// sections (w1, 0), (0, w2) and the origin are all present.
inline PointGrid make_product_grid(int n1, int n2, std::uint64_t seed) {
    if (n1 < 1 || n2 < 1) {
        fail("InvalidGrid", "product grid factors must be non-empty");
    }
    UnitRng rng(seed);
    std::vector<cd> g1{0.0};
    std::vector<cd> g2{0.0};
    for (int k = 1; k < n1; ++k) {
        g1.push_back(rng.in_disc(kInteriorRadius));
    }
    for (int k = 1; k < n2; ++k) {
        g2.push_back(rng.in_disc(kInteriorRadius));
    }
    PointGrid g{Ambient::Bidisc, 2, {}};
    for (const cd& a : g1) {
        for (const cd& b : g2) {
            g.points.push_back(point2(a, b));
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Boundary modulus
// ---------------------------------------------------------------------------

struct BoundaryReport {
    bool pass{false};
    double max_deviation{0.0};
    Point argmax;
};

inline BoundaryReport boundary_modulus_test(const Evaluable& f, const PointGrid& grid, double tol) {
    if (grid.points.empty()) {
        fail("InvalidGrid", "empty grid");
    }
    BoundaryReport rep;
    rep.argmax = grid.points.front();
    for (const Point& z : grid.points) {
        const double dev = std::abs(std::abs(f(z)) - 1.0);
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.argmax = z;
        }
    }
    rep.pass = rep.max_deviation <= tol;
    return rep;
}

} // namespace bidisc
