#pragma once

// Random instances and closed-form references shared by the test binaries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <bidisc/colligation.hpp>
#include <bidisc/factor.hpp>
#include <bidisc/function.hpp>
#include <bidisc/kernels.hpp>
#include <bidisc/numlin.hpp>

namespace bidisc::testing {

inline CMatrix random_matrix(UnitRng& rng, Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = cd(rng.normal(), rng.normal());
        }
    }
    return m;
}

/// Haar-ish unitary: QR of a Gaussian matrix with the diagonal phases of R removed.
inline CMatrix random_unitary(UnitRng& rng, Eigen::Index n) {
    if (n == 0) {
        return CMatrix(0, 0);
    }
    Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, n, n));
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < n; ++k) {
        const cd d = r(k, k);
        q.col(k) *= d / std::abs(d);
    }
    return q;
}

inline Blaschke random_blaschke(UnitRng& rng, int degree, double max_radius, bool nonzero_at_origin = false) {
    Blaschke b;
    b.constant = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    for (int k = 0; k < degree; ++k) {
        cd z = rng.in_disc(max_radius);
        if (nonzero_at_origin) {
            while (std::abs(z) < 0.05) {
                z = rng.in_disc(max_radius);
            }
        }
        b.zeros.push_back(z);
    }
    return b;
}

inline Colligation permutation_colligation() {
    CMatrix v = CMatrix::Zero(3, 3);
    v(0, 1) = 1.0;
    v(1, 2) = 1.0;
    v(2, 0) = 1.0;
    return Colligation::from_matrix(v, {1, 1});
}

/// Unitary realization of (z1 z2 - t) / (1 - t z1 z2) with a nonzero
/// lower-left D entry.
inline Colligation vt_colligation(double t) {
    const double s = std::sqrt(1.0 - t * t);
    CMatrix v = CMatrix::Zero(3, 3);
    v(0, 0) = -t;
    v(0, 1) = s;
    v(1, 2) = 1.0;
    v(2, 0) = s;
    v(2, 1) = t;
    return Colligation::from_matrix(v, {1, 1});
}

inline cd phi_t(double t, cd z1, cd z2) { return (z1 * z2 - t) / (1.0 - t * z1 * z2); }

inline cd mobius(double p, cd z) { return (z + p) / (1.0 + p * z); }

/// Contraction colligation realizing z1/2 (partition [1, 0]).
inline Colligation half_z1_colligation() {
    CMatrix v = CMatrix::Zero(2, 2);
    v(0, 1) = 0.5;
    v(1, 0) = 1.0;
    return Colligation::from_matrix(v, {1, 0});
}

/// Unitary structured colligation realizing b1(z1) b2(z2).
inline Colligation composed_blaschke(const Blaschke& b1, const Blaschke& b2) {
    return compose_colligations(model_colligation(b1), model_colligation(b2));
}

struct BlaschkePair {
    Blaschke first;
    Blaschke second;
    Colligation v;

    [[nodiscard]] cd operator()(const Point& z) const { return first(z(0)) * second(z(1)); }
};

inline BlaschkePair random_blaschke_pair(UnitRng& rng, int max_degree, double max_radius,
                                         bool nonzero_at_origin = false) {
    const int d1 = static_cast<int>(rng.uniform() * (max_degree + 1)) % (max_degree + 1);
    const int d2 = static_cast<int>(rng.uniform() * (max_degree + 1)) % (max_degree + 1);
    BlaschkePair p{random_blaschke(rng, d1, max_radius, nonzero_at_origin),
                   random_blaschke(rng, d2, max_radius, nonzero_at_origin), {}};
    p.v = composed_blaschke(p.first, p.second);
    return p;
}

/// Contractive transfer matrix [[a, B], [C, D]] : C^e + C^h -> C^{e_star} + C^h,
/// the top rows of a random unitary, hence a co-isometry.
inline ThetaRealization random_theta(UnitRng& rng, int e_star, int e, int h) {
    const CMatrix u = random_unitary(rng, e + h);
    CMatrix t = u.topRows(e_star + h);
    return {t.topLeftCorner(e_star, e), t.topRightCorner(e_star, h), t.bottomLeftCorner(h, e),
            t.bottomRightCorner(h, h)};
}

} // namespace bidisc::testing
