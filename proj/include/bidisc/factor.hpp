#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "colligation.hpp"
#include "function.hpp"
#include "kernels.hpp"
#include "numlin.hpp"

namespace bidisc {

// ---------------------------------------------------------------------------
// Separability
// ---------------------------------------------------------------------------

struct SeparabilityResult {
    bool separable{false};
    double residual{0.0};
    cd normalization{1.0, 0.0};
    std::vector<cd> phi1;  // phi(z1, 0) / c at each grid point
    std::vector<cd> phi2;  // phi(0, z2) c / phi(0, 0)
};

/// phi(z) phi(0) = phi(z1, 0) phi(0, z2) on the grid. The split is fixed by
/// making phi1 positive real where |phi(z1, 0)| is largest.
inline SeparabilityResult separability_test(const Evaluable& phi, const PointGrid& grid, double tol = kDefaultTol) {
    require_grid_dimension(grid, 2, "separability_test");
    const cd origin = phi(point2(0.0, 0.0));
    if (std::abs(origin) <= tol) {
        fail("OriginZero", "phi(0,0) = 0; strip a monomial first (strip_monomial)");
    }
    SeparabilityResult r;
    std::vector<cd> first;
    std::vector<cd> second;
    double biggest = -1.0;
    for (const Point& z : grid.points) {
        const cd f = phi(point2(z(0), 0.0));
        const cd s = phi(point2(0.0, z(1)));
        r.residual = std::max(r.residual, std::abs(phi(z) * origin - f * s));
        if (std::abs(f) > biggest) {
            biggest = std::abs(f);
            r.normalization = biggest > 0.0 ? f / biggest : cd{1.0};
        }
        first.push_back(f);
        second.push_back(s);
    }
    r.separable = r.residual <= tol;
    for (std::size_t k = 0; k < first.size(); ++k) {
        r.phi1.push_back(first[k] / r.normalization);
        r.phi2.push_back(second[k] * r.normalization / origin);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Condition (4): co-isometric, structured, phi(0) D2 = C1 B2
// ---------------------------------------------------------------------------

struct ConditionFourReport {
    bool holds{false};
    bool coisometric{false};
    bool lower_left_zero{false};
    double residual{0.0};  // || a D2 - C1 B2 ||_F

    [[nodiscard]] std::string failure() const {
        if (!lower_left_zero) {
            return "lower-left block nonzero";
        }
        if (!coisometric) {
            return "colligation is not co-isometric";
        }
        if (!holds) {
            return "a*D2 differs from C1*B2 by " + std::to_string(residual);
        }
        return "";
    }
};

inline ConditionFourReport check_condition_4(const Colligation& v, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "check_condition_4 needs a two-variable colligation");
    }
    const auto st = structure_report(v, tol);
    ConditionFourReport r;
    r.coisometric = st.is_coisometry;
    r.lower_left_zero = st.lower_left_zero;
    r.residual = st.factorization_residual;
    r.holds = r.coisometric && r.lower_left_zero && st.factorization_condition;
    return r;
}

// ---------------------------------------------------------------------------
// Split and compose
// ---------------------------------------------------------------------------

struct FactorizationResult {
    Colligation v1;
    Colligation v2;
    cd y;
    cd x;
    double certificate{0.0};
};

inline constexpr int kCertificatePoints = 30;
inline constexpr std::uint64_t kCertificateSeed = 4242;

inline double product_residual(const Colligation& v, const Colligation& v1, const Colligation& v2,
                               const PointGrid& grid, double tol) {
    double worst = 0.0;
    for (const Point& z : grid.points) {
        worst = std::max(worst, std::abs(transfer(v, z, tol) - transfer(v1, point1(z(0)), tol) *
                                                                  transfer(v2, point1(z(1)), tol)));
    }
    return worst;
}

/// V1 = [[y, B1], [C1/x, D1]], V2 = [[x, B2/y], [C2, D4]] with
/// y = sqrt(1 - B1 B1^*) > 0 and x = a / y.
inline FactorizationResult split_colligation(const Colligation& v, double tol = kDefaultTol) {
    const auto cond = check_condition_4(v, tol);
    if (!cond.holds) {
        fail("ConditionFailed", cond.failure());
    }
    if (std::abs(v.a()) <= tol) {
        fail("OriginZero", "phi(0) = 0; strip a monomial first (strip_monomial)");
    }
    const double b1 = v.B1().squaredNorm();
    const cd y = std::sqrt(std::max(0.0, 1.0 - b1));
    const cd x = v.a() / y;
    FactorizationResult r{Colligation(y, v.B1(), v.C1() / x, v.D1(), {static_cast<int>(v.h1())}),
                          Colligation(x, v.B2() / y, v.C2(), v.D4(), {static_cast<int>(v.h2())}), y, x, 0.0};
    r.certificate = product_residual(v, r.v1, r.v2,
                                     make_random_grid(Ambient::Bidisc, 2, kCertificatePoints, kCertificateSeed), tol);
    return r;
}

/// [[a1 a2, B1, a1 B2], [a2 C1, D1, C1 B2], [C2, 0, D2]] on H1 + H2.
inline Colligation compose_colligations(const Colligation& v1, const Colligation& v2, double tol = kDefaultTol) {
    if (v1.variables() != 1 || v2.variables() != 1) {
        fail("DimensionMismatch", "compose_colligations takes two one-variable colligations");
    }
    const auto c1 = numlin::classify(v1.matrix(), tol);
    const auto c2 = numlin::classify(v2.matrix(), tol);
    if (!(c1.isometry && c2.isometry) && !(c1.coisometry && c2.coisometry)) {
        fail("ClassMismatch", "factors must both be isometric or both co-isometric");
    }
    const Eigen::Index h1 = v1.h();
    const Eigen::Index h2 = v2.h();
    const Eigen::Index h = h1 + h2;
    CMatrix b(1, h);
    b << v1.B(), v1.a() * v2.B();
    CMatrix c(h, 1);
    c << v2.a() * v1.C(), v2.C();
    CMatrix d = CMatrix::Zero(h, h);
    d.topLeftCorner(h1, h1) = v1.D();
    d.topRightCorner(h1, h2) = v1.C() * v2.B();
    d.bottomRightCorner(h2, h2) = v2.D();
    return {v1.a() * v2.a(), b, c, d, {static_cast<int>(h1), static_cast<int>(h2)}};
}

// ---------------------------------------------------------------------------
// Weak converse pipeline
// ---------------------------------------------------------------------------

struct WeakConverseReport {
    double inverse_residual{0.0};          // || D^* - a (aD - CB)^{-1} ||_F
    double literal_inverse_residual{0.0};  // || D^* - a^{-1} (aD - CB)^{-1} ||_F
    double annihilation_residual{0.0};     // || (a D2 - C1 B2) D3^* ||_F
    double condition_residual{0.0};       // || a D2 - C1 B2 ||_F
    bool pass{false};
    FactorizationResult split;
};

/// Runs the finite-dimensional converse: for unitary, structured, stable V with
/// a != 0, the inverse of aD - CB (through the 2x2 block formula) must equal
/// D^*/a, forcing a D2 = C1 B2, after which V splits.
inline WeakConverseReport weak_converse_check(const Colligation& v, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "weak_converse_check needs a two-variable colligation");
    }
    const auto st = structure_report(v, tol);
    if (!st.is_unitary) {
        fail("NotUnitary", "colligation is not unitary");
    }
    if (std::abs(v.a()) <= tol) {
        fail("OriginZero", "a = 0");
    }
    if (!st.lower_left_zero) {
        fail("NotStructured", "lower-left block nonzero (norm " + std::to_string(st.lower_left_norm) + ")");
    }
    if (!st.c0dot) {
        fail("NotStable", "a diagonal D block has spectral radius >= 1");
    }
    const cd a = v.a();
    const CMatrix m = a * v.D() - v.C() * v.B();
    CMatrix inv;
    if (v.h1() > 0 && v.h2() > 0) {
        const auto h1 = v.h1();
        const auto h2 = v.h2();
        inv = numlin::block_inverse_2x2(m.topLeftCorner(h1, h1), m.topRightCorner(h1, h2),
                                        m.bottomLeftCorner(h2, h1), m.bottomRightCorner(h2, h2), tol);
    } else if (v.h() > 0) {
        if (numlin::condition_number(m) > 1.0 / (100.0 * tol)) {
            fail("DeltaNotInvertible", "aD - CB is singular");
        }
        inv = m.fullPivLu().inverse();
    } else {
        inv = CMatrix(0, 0);
    }
    WeakConverseReport r;
    const CMatrix ds = v.D().adjoint();
    r.inverse_residual = (ds - a * inv).norm();
    r.literal_inverse_residual = (ds - inv / a).norm();
    const CMatrix cond = a * v.D2() - v.C1() * v.B2();
    r.condition_residual = cond.size() ? cond.norm() : 0.0;
    r.annihilation_residual = cond.size() ? (cond * v.D3().adjoint()).norm() : 0.0;
    r.pass = r.inverse_residual <= tol && r.condition_residual <= tol;
    if (r.pass) {
        r.split = split_colligation(v, tol);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Agler-kernel form of the factorization condition
// ---------------------------------------------------------------------------

struct FactorizationConditions {
    bool cond2{false};
    double k1_variation{0.0};   // spread of K1 across companion points
    double section_residual{0.0};  // Eq. conj(phi(0)) K2(., (w1,0)) = conj(phi(w1,0)) K2(., 0)
};

/// The grid must be a full product G1 x G2 with 0 in both factors, so every
/// (z1, w1) pair is seen with every choice of second coordinates.
inline FactorizationConditions agler_factorization_conditions(const Evaluable& phi, const SampledKernel& k1,
                                                              const SampledKernel& k2, double tol = kDefaultTol) {
    require_same_grid(k1, k2);
    require_grid_dimension(k1.grid, 2, "agler_factorization_conditions");
    const auto& pts = k1.grid.points;
    const cd origin = phi(point2(0.0, 0.0));
    if (std::abs(origin) <= tol) {
        fail("OriginZero", "phi(0,0) = 0; strip a monomial first (strip_monomial)");
    }
    auto key = [](cd c) { return std::pair{c.real(), c.imag()}; };
    std::map<std::pair<double, double>, int> first;
    std::map<std::pair<double, double>, int> second;
    std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, int> index;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        first.emplace(key(pts[i](0)), static_cast<int>(first.size()));
        second.emplace(key(pts[i](1)), static_cast<int>(second.size()));
        index[{key(pts[i](0)), key(pts[i](1))}] = i;
    }
    if (first.size() * second.size() != pts.size() || index.size() != pts.size() || !first.count(key(0.0)) ||
        !second.count(key(0.0))) {
        fail("GridNotCompanioned", "grid must be a product G1 x G2 with 0 in both factors");
    }
    FactorizationConditions r;
    // (a) K1(z, w) depends on z1, w1 only: compare with the representative whose second coordinates are 0.
    const int m = k1.size();
    for (int i = 0; i < m; ++i) {
        const int i0 = index.at({key(pts[i](0)), key(0.0)});
        for (int j = 0; j < m; ++j) {
            const int j0 = index.at({key(pts[j](0)), key(0.0)});
            r.k1_variation = std::max(r.k1_variation, (k1.at(i, j) - k1.at(i0, j0)).norm());
        }
    }
    // (b) the section identity for every z on the grid and every w1 in G1.
    const int zero = index.at({key(0.0), key(0.0)});
    for (const auto& [w1, unused] : first) {
        const int w = index.at({w1, key(0.0)});
        const cd pw = phi(pts[w]);
        for (int i = 0; i < m; ++i) {
            const CMatrix diff = std::conj(origin) * k2.at(i, w) - std::conj(pw) * k2.at(i, zero);
            r.section_residual = std::max(r.section_residual, diff.norm());
        }
    }
    r.cond2 = r.k1_variation <= tol && r.section_residual <= tol;
    return r;
}

// ---------------------------------------------------------------------------
// Difference-quotient description of the factorized colligation
// ---------------------------------------------------------------------------

/// With f = H1(.) u, g = H2(.) v (H(w) = B (I - E(w)D)^{-1}), the blocks of a
/// colligation satisfying condition (4) act as
///   D1 f = (f(w) - f(0)) / w1,           D2 g = (g(w1, 0) - g(0)) / w1,
///   D4 g = (g(w) - g(w1, 0)) / w2,       C1 1 = (phi(w1, 0) - phi(0)) / w1,
///   C2 1 = (phi(w) - phi(w1, 0)) / w2,   B1 f = f(0),  B2 g = g(0).
/// Each entry is the largest deviation over the grid and the coordinate basis.
struct DifferenceQuotientResiduals {
    double d1{0.0};
    double d2{0.0};
    double d4{0.0};
    double c1{0.0};
    double c2{0.0};
    double b1{0.0};
    double b2{0.0};

    [[nodiscard]] double max() const { return std::max({d1, d2, d4, c1, c2, b1, b2}); }
};

inline DifferenceQuotientResiduals difference_quotient_residuals(const Colligation& v, const PointGrid& grid,
                                                                 double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "difference_quotient_residuals needs a two-variable colligation");
    }
    const auto h1 = v.h1();
    const auto h2 = v.h2();
    const CMatrix origin_row = state_row(v, point2(0.0, 0.0), tol);
    const cd phi0 = transfer(v, point2(0.0, 0.0), tol);
    DifferenceQuotientResiduals r;
    r.b1 = h1 ? (v.B1() - origin_row.leftCols(h1)).norm() : 0.0;
    r.b2 = h2 ? (v.B2() - origin_row.rightCols(h2)).norm() : 0.0;
    for (const Point& w : grid.points) {
        if (std::abs(w(0)) < 1e-3 || std::abs(w(1)) < 1e-3) {
            continue;
        }
        const Point section = point2(w(0), 0.0);
        const CMatrix hw = state_row(v, w, tol);
        const CMatrix hs = state_row(v, section, tol);
        const cd pw = transfer(v, w, tol);
        const cd ps = transfer(v, section, tol);
        const CMatrix hw1 = hw.leftCols(h1);
        const CMatrix hw2 = hw.rightCols(h2);
        if (h1) {
            r.d1 = std::max(r.d1, (hw1 * v.D1() - (hw1 - origin_row.leftCols(h1)) / w(0)).norm());
            r.c1 = std::max(r.c1, std::abs((hw1 * v.C1())(0, 0) - (ps - phi0) / w(0)));
        }
        if (h1 && h2) {
            r.d2 = std::max(r.d2, (hw1 * v.D2() - (hs.rightCols(h2) - origin_row.rightCols(h2)) / w(0)).norm());
        }
        if (h2) {
            r.d4 = std::max(r.d4, (hw2 * v.D4() - (hw2 - hs.rightCols(h2)) / w(1)).norm());
            r.c2 = std::max(r.c2, std::abs((hw2 * v.C2())(0, 0) - (pw - ps) / w(1)));
        }
    }
    return r;
}

} // namespace bidisc
