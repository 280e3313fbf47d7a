#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "error.hpp"

namespace bidisc {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kDefaultTol = 1e-9;

namespace numlin {

struct PsdReport {
    bool psd{false};
    double lambda_min{0.0};
};

// A ~= factor * factor^*, factor is n x rank.
struct PsdFactorization {
    Eigen::Index rank{0};
    CMatrix factor;
    double residual{0.0};
};

struct Classification {
    bool isometry{false};
    bool coisometry{false};
    bool unitary{false};
    bool contraction{false};
};

inline double scaled_tol(const CMatrix& a, double tol) { return tol * (1.0 + a.norm()); }

inline void require_square(const CMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        fail("NonSquare", std::string(what) + " is " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()));
    }
}

inline void require_finite(const CMatrix& a) {
    if (!a.allFinite()) {
        fail("NonFinite", "matrix has NaN or Inf entries");
    }
}

namespace detail {

inline CMatrix hermitian_part_checked(const CMatrix& a, double tol) {
    require_square(a, "matrix");
    const double asym = (a - a.adjoint()).norm();
    if (asym > scaled_tol(a, tol)) {
        fail("NonHermitian", "||A - A*||_F = " + std::to_string(asym));
    }
    return 0.5 * (a + a.adjoint());
}

} // namespace detail

/// Positive semidefiniteness of a Hermitian matrix, judged on the eigenvalues
/// of its Hermitian part against the relative threshold -tol*(1+||A||_F).
inline PsdReport is_psd(const CMatrix& a, double tol = kDefaultTol) {
    const CMatrix h = detail::hermitian_part_checked(a, tol);
    if (h.size() == 0) {
        return {true, 0.0};
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    return {lmin >= -scaled_tol(a, tol), lmin};
}

/// Low-rank factorization by eigen-truncation; columns are ordered by
/// decreasing eigenvalue.
inline PsdFactorization psd_factor(const CMatrix& a, double tol = kDefaultTol) {
    const CMatrix h = detail::hermitian_part_checked(a, tol);
    const Eigen::Index n = h.rows();
    PsdFactorization out;
    out.factor = CMatrix::Zero(n, 0);
    if (n == 0) {
        return out;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const auto& vals = es.eigenvalues();
    const double thresh = scaled_tol(a, tol);
    if (vals.minCoeff() < -thresh) {
        fail("NotPsd", "lambda_min = " + std::to_string(vals.minCoeff()));
    }
    // Eigen sorts ascending; walk from the top.
    Eigen::Index rank = 0;
    for (Eigen::Index k = n - 1; k >= 0 && vals(k) > thresh; --k) {
        ++rank;
    }
    out.rank = rank;
    out.factor.resize(n, rank);
    for (Eigen::Index c = 0; c < rank; ++c) {
        const Eigen::Index k = n - 1 - c;
        out.factor.col(c) = es.eigenvectors().col(k) * std::sqrt(vals(k));
    }
    out.residual = (a - out.factor * out.factor.adjoint()).norm();
    return out;
}

inline double largest_singular_value(const CMatrix& v) {
    if (v.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<CMatrix> svd(v);
    return svd.singularValues()(0);
}

inline Classification classify(const CMatrix& v, double tol = kDefaultTol) {
    require_finite(v);
    Classification c;
    const auto rows = static_cast<double>(v.rows());
    const auto cols = static_cast<double>(v.cols());
    c.isometry = (v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).norm() <= tol * std::sqrt(cols);
    c.coisometry = (v * v.adjoint() - CMatrix::Identity(v.rows(), v.rows())).norm() <= tol * std::sqrt(rows);
    c.unitary = c.isometry && c.coisometry;
    c.contraction = largest_singular_value(v) <= 1.0 + tol;
    return c;
}

inline double spectral_radius(const CMatrix& d) {
    require_square(d, "matrix");
    if (d.size() == 0) {
        return 0.0;
    }
    Eigen::ComplexEigenSolver<CMatrix> es(d, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline double condition_number(const CMatrix& a) {
    if (a.size() == 0) {
        return 1.0;
    }
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

/// Inverse of X = [[P, Q], [R, S]] through the Schur complement
/// Delta = S - R P^{-1} Q. Both P and Delta must pass the guard
/// cond <= 1 / (100 tol).
inline CMatrix block_inverse_2x2(const CMatrix& p, const CMatrix& q, const CMatrix& r, const CMatrix& s,
                                 double tol = kDefaultTol) {
    require_square(p, "P");
    require_square(s, "S");
    if (q.rows() != p.rows() || q.cols() != s.cols() || r.rows() != s.rows() || r.cols() != p.cols()) {
        fail("NonConformable", "blocks of X do not line up");
    }
    const double guard = 1.0 / (100.0 * tol);
    if (condition_number(p) > guard) {
        fail("PNotInvertible", "cond(P) = " + std::to_string(condition_number(p)));
    }
    const Eigen::Index m = p.rows();
    const Eigen::Index n = s.rows();
    const CMatrix p_inv = p.size() ? CMatrix(p.partialPivLu().inverse()) : CMatrix(0, 0);
    const CMatrix delta = s - r * p_inv * q;
    if (condition_number(delta) > guard) {
        fail("DeltaNotInvertible", "cond(S - R P^-1 Q) = " + std::to_string(condition_number(delta)));
    }
    const CMatrix delta_inv = delta.size() ? CMatrix(delta.partialPivLu().inverse()) : CMatrix(0, 0);

    CMatrix x(m + n, m + n);
    x.topLeftCorner(m, m) = p_inv + p_inv * q * delta_inv * r * p_inv;
    x.topRightCorner(m, n) = -p_inv * q * delta_inv;
    x.bottomLeftCorner(n, m) = -delta_inv * r * p_inv;
    x.bottomRightCorner(n, n) = delta_inv;
    return x;
}

} // namespace numlin
} // namespace bidisc
