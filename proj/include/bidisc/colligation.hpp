#pragma once

#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "function.hpp"
#include "numlin.hpp"

namespace bidisc {

/// V = [[a, B], [C, D]] on C + H with H = H_1 + ... + H_n.
///
/// For two variables the state splits as H_1 + H_2 and
///
///     V = [[a,  B1,  B2 ],
///          [C1, D11, D12],
///          [C2, D21, D22]].
///
/// In the structured (upper triangular) form D21 = 0, D11 and D12 are usually
/// written D1 and D2, and the lower-right block is D3 (inner-function
/// certificate) or D4 (factorization). Accessors for both labelings exist.
class Colligation {
public:
    Colligation() : Colligation(cd{0.0}, CMatrix(1, 0), CMatrix(0, 1), CMatrix(0, 0), {0}) {}

    Colligation(cd a, CMatrix b, CMatrix c, CMatrix d, std::vector<int> partition)
        : a_(a), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), partition_(std::move(partition)) {
        validate();
    }

    /// Splits a full (1+h) x (1+h) matrix.
    static Colligation from_matrix(const CMatrix& v, std::vector<int> partition) {
        if (v.rows() != v.cols() || v.rows() < 1) {
            fail("NonConformable", "colligation matrix must be square and non-empty");
        }
        const Eigen::Index h = v.rows() - 1;
        return {v(0, 0), CMatrix(v.block(0, 1, 1, h)), CMatrix(v.block(1, 0, h, 1)),
                CMatrix(v.block(1, 1, h, h)), std::move(partition)};
    }

    [[nodiscard]] cd a() const { return a_; }
    [[nodiscard]] const CMatrix& B() const { return b_; }
    [[nodiscard]] const CMatrix& C() const { return c_; }
    [[nodiscard]] const CMatrix& D() const { return d_; }
    [[nodiscard]] const std::vector<int>& partition() const { return partition_; }
    [[nodiscard]] Eigen::Index h() const { return d_.rows(); }
    [[nodiscard]] int variables() const { return static_cast<int>(partition_.size()); }

    [[nodiscard]] CMatrix matrix() const {
        const Eigen::Index h = this->h();
        CMatrix v(h + 1, h + 1);
        v(0, 0) = a_;
        v.block(0, 1, 1, h) = b_;
        v.block(1, 0, h, 1) = c_;
        v.block(1, 1, h, h) = d_;
        return v;
    }

    // Two-variable block views.
    [[nodiscard]] Eigen::Index h1() const { return partition_.at(0); }
    [[nodiscard]] Eigen::Index h2() const { return h() - h1(); }
    [[nodiscard]] CMatrix B1() const { return b_.leftCols(h1()); }
    [[nodiscard]] CMatrix B2() const { return b_.rightCols(h2()); }
    [[nodiscard]] CMatrix C1() const { return c_.topRows(h1()); }
    [[nodiscard]] CMatrix C2() const { return c_.bottomRows(h2()); }
    [[nodiscard]] CMatrix D11() const { return d_.topLeftCorner(h1(), h1()); }
    [[nodiscard]] CMatrix D12() const { return d_.topRightCorner(h1(), h2()); }
    [[nodiscard]] CMatrix D21() const { return d_.bottomLeftCorner(h2(), h1()); }
    [[nodiscard]] CMatrix D22() const { return d_.bottomRightCorner(h2(), h2()); }

    [[nodiscard]] CMatrix D1() const { return D11(); }
    [[nodiscard]] CMatrix D2() const { return D12(); }
    [[nodiscard]] CMatrix D3() const { return D22(); }
    [[nodiscard]] CMatrix D4() const { return D22(); }
    [[nodiscard]] CMatrix lower_left() const { return D21(); }

    /// E(z) = z_1 I_{h_1} + ... + z_n I_{h_n} as a diagonal.
    [[nodiscard]] CVector state_scaling(const Point& z) const {
        if (z.size() != variables()) {
            fail("DimensionMismatch", "point has " + std::to_string(z.size()) + " coordinates, colligation has " +
                                          std::to_string(variables()) + " variables");
        }
        CVector e(h());
        Eigen::Index off = 0;
        for (int k = 0; k < variables(); ++k) {
            e.segment(off, partition_[k]).setConstant(z(k));
            off += partition_[k];
        }
        return e;
    }

private:
    void validate() const {
        const Eigen::Index h = d_.rows();
        if (d_.cols() != h || b_.rows() != 1 || b_.cols() != h || c_.rows() != h || c_.cols() != 1) {
            fail("NonConformable", "colligation blocks do not line up (h = " + std::to_string(h) + ")");
        }
        if (partition_.empty()) {
            fail("InvalidPartition", "partition must list at least one block");
        }
        for (int p : partition_) {
            if (p < 0) {
                fail("InvalidPartition", "partition entries must be non-negative");
            }
        }
        if (std::accumulate(partition_.begin(), partition_.end(), Eigen::Index{0}) != h) {
            fail("InvalidPartition", "partition does not sum to the state dimension");
        }
        if (!std::isfinite(a_.real()) || !std::isfinite(a_.imag()) || !b_.allFinite() || !c_.allFinite() ||
            !d_.allFinite()) {
            fail("NonFinite", "colligation has NaN or Inf entries");
        }
    }

    cd a_;
    CMatrix b_;
    CMatrix c_;
    CMatrix d_;
    std::vector<int> partition_;
};

// ---------------------------------------------------------------------------
// Transfer functions
// ---------------------------------------------------------------------------

/// a + B (I - E(z) D)^{-1} E(z) C, by a direct solve; no domain check.
inline cd transfer(const Colligation& v, const Point& z, double tol = kDefaultTol) {
    const CVector e = v.state_scaling(z);
    if (v.h() == 0) {
        return v.a();
    }
    const CMatrix lhs = CMatrix::Identity(v.h(), v.h()) - e.asDiagonal() * v.D();
    Eigen::PartialPivLU<CMatrix> lu(lhs);
    if (lu.rcond() < 100.0 * tol) {
        fail("ResolventIllConditioned", "rcond(I - E(z)D) = " + std::to_string(lu.rcond()));
    }
    const CVector x = lu.solve(CVector(e.asDiagonal() * v.C()));
    return v.a() + (v.B() * x)(0, 0);
}

inline void require_interior(const Point& z) {
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        if (std::abs(z(k)) >= 1.0) {
            fail("OutsideDomain", "coordinate " + std::to_string(k) + " has modulus >= 1");
        }
    }
}

inline cd transfer_1d(const Colligation& v, cd z, double tol = kDefaultTol) {
    if (v.variables() != 1) {
        fail("DimensionMismatch", "transfer_1d needs a one-variable colligation");
    }
    const Point p = point1(z);
    require_interior(p);
    return transfer(v, p, tol);
}

inline cd transfer_2d(const Colligation& v, const Point& z, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "transfer_2d needs a two-variable colligation");
    }
    require_interior(z);
    return transfer(v, z, tol);
}

inline Evaluable transfer_function(Colligation v, double tol = kDefaultTol) {
    return [v = std::move(v), tol](const Point& z) { return transfer(v, z, tol); };
}

/// Taylor coefficients of a structured two-variable colligation:
///   phi_00 = a, phi_i0 = B1 D1^{i-1} C1, phi_0j = B2 D3^{j-1} C2,
///   phi_ij = B1 D1^{i-1} D2 D3^{j-1} C2.
inline PowerSeries2 series_2d(const Colligation& v, int n1, int n2, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "series_2d needs a two-variable colligation");
    }
    if (v.D21().size() > 0 && v.D21().norm() > tol) {
        fail("NotStructured", "lower-left D block has norm " + std::to_string(v.D21().norm()));
    }
    CMatrix phi = CMatrix::Zero(n1 + 1, n2 + 1);
    phi(0, 0) = v.a();
    const CMatrix b1 = v.B1();
    const CMatrix d1 = v.D1();
    const CMatrix d2 = v.D2();
    const CMatrix d3 = v.D3();

    // right[j] = D3^{j-1} C2 for j >= 1
    std::vector<CMatrix> right(static_cast<std::size_t>(n2) + 1);
    if (n2 >= 1) {
        right[1] = v.C2();
        for (int j = 2; j <= n2; ++j) {
            right[j] = d3 * right[j - 1];
        }
    }
    for (int j = 1; j <= n2; ++j) {
        phi(0, j) = v.h2() ? (v.B2() * right[j])(0, 0) : cd{0.0};
    }
    CMatrix left = b1; // B1 D1^{i-1}
    for (int i = 1; i <= n1; ++i) {
        if (v.h1() > 0) {
            phi(i, 0) = (left * v.C1())(0, 0);
            if (v.h2() > 0) {
                const CMatrix ld2 = left * d2;
                for (int j = 1; j <= n2; ++j) {
                    phi(i, j) = (ld2 * right[j])(0, 0);
                }
            }
            left = left * d1;
        }
    }
    return {phi};
}

/// Taylor coefficients of any two-variable colligation. With
/// X(z) = (I - E(z)D)^{-1} E(z) C = sum X_ij z1^i z2^j,
///   X_ij = [i=1,j=0] P1 C + [i=0,j=1] P2 C + P1 D X_{i-1,j} + P2 D X_{i,j-1}.
inline PowerSeries2 taylor_coefficients(const Colligation& v, int n1, int n2) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "taylor_coefficients needs a two-variable colligation");
    }
    const Eigen::Index h1 = v.h1();
    const Eigen::Index h = v.h();
    CMatrix phi = CMatrix::Zero(n1 + 1, n2 + 1);
    phi(0, 0) = v.a();
    if (h == 0) {
        return {phi};
    }
    auto project = [&](CVector x, bool first) {
        if (first) {
            x.tail(h - h1).setZero();
        } else {
            x.head(h1).setZero();
        }
        return x;
    };
    std::vector<CVector> prev(static_cast<std::size_t>(n2) + 1, CVector::Zero(h));
    std::vector<CVector> cur(prev.size(), CVector::Zero(h));
    const CVector c = v.C().col(0);
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            CVector x = CVector::Zero(h);
            if (i == 1 && j == 0) {
                x += project(c, true);
            }
            if (i == 0 && j == 1) {
                x += project(c, false);
            }
            if (i > 0) {
                x += project(v.D() * prev[j], true);
            }
            if (j > 0) {
                x += project(v.D() * cur[j - 1], false);
            }
            cur[j] = x;
            if (i + j > 0) {
                phi(i, j) = (v.B() * x)(0, 0);
            }
        }
        std::swap(prev, cur);
    }
    return {phi};
}

// ---------------------------------------------------------------------------
// Structure report
// ---------------------------------------------------------------------------

struct StructureReport {
    bool is_isometry{false};
    bool is_coisometry{false};
    bool is_unitary{false};
    bool is_contraction{false};
    bool lower_left_zero{false};
    double lower_left_norm{0.0};
    double radius_d1{0.0};
    double radius_d3{0.0};
    bool c0dot{false};  // both diagonal radii < 1 - tol
    bool factorization_condition{false};
    double factorization_residual{0.0};
};

inline StructureReport structure_report(const Colligation& v, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "structure_report needs a two-variable colligation");
    }
    StructureReport r;
    const auto cls = numlin::classify(v.matrix(), tol);
    r.is_isometry = cls.isometry;
    r.is_coisometry = cls.coisometry;
    r.is_unitary = cls.unitary;
    r.is_contraction = cls.contraction;
    r.lower_left_norm = v.D21().size() ? v.D21().norm() : 0.0;
    r.lower_left_zero = r.lower_left_norm <= tol;
    r.radius_d1 = numlin::spectral_radius(v.D1());
    r.radius_d3 = numlin::spectral_radius(v.D3());
    r.c0dot = r.radius_d1 < 1.0 - tol && r.radius_d3 < 1.0 - tol;
    const CMatrix cond = v.a() * v.D2() - v.C1() * v.B2();
    r.factorization_residual = cond.size() ? cond.norm() : 0.0;
    r.factorization_condition = r.factorization_residual <= tol;
    return r;
}

// ---------------------------------------------------------------------------
// Model-space realization of a finite Blaschke product
// ---------------------------------------------------------------------------

/// Unitary colligation on C + (H^2 minus bH^2) in the Takenaka-Malmquist basis
///   e_k = sqrt(1-|a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} (z - a_j)/(1 - conj(a_j) z),
/// zeros taken in input order. With d_k = sqrt(1-|a_k|^2):
///   B_k    = e_k(0)              = d_k prod_{j<k} (-a_j)
///   C_k    = <M_z^* b, e_k>      = c d_k prod_{j>k} (-a_j)
///   D_jk   = <M_z^* e_k, e_j>    = conj(a_k) (j = k), d_j d_k prod_{j<m<k} (-a_m) (j < k), 0 (j > k).
inline Colligation model_colligation(const Blaschke& b, double tol = kDefaultTol) {
    if (std::abs(std::abs(b.constant) - 1.0) > tol) {
        fail("NotUnimodular", "Blaschke constant must have modulus 1");
    }
    for (const cd& z : b.zeros) {
        if (std::abs(z) >= 1.0) {
            fail("ZeroOnBoundary", "Blaschke zeros must lie strictly inside the disc");
        }
    }
    const auto h = static_cast<Eigen::Index>(b.zeros.size());
    std::vector<double> d(b.zeros.size());
    for (std::size_t k = 0; k < b.zeros.size(); ++k) {
        d[k] = std::sqrt(1.0 - std::norm(b.zeros[k]));
    }
    // prod_{j < m < k} (-a_m), computed directly; h is small.
    auto between = [&](Eigen::Index lo, Eigen::Index hi) {
        cd p{1.0, 0.0};
        for (Eigen::Index m = lo + 1; m < hi; ++m) {
            p *= -b.zeros[m];
        }
        return p;
    };
    CMatrix B(1, h);
    CMatrix C(h, 1);
    CMatrix D = CMatrix::Zero(h, h);
    for (Eigen::Index k = 0; k < h; ++k) {
        B(0, k) = d[k] * between(-1, k);
        C(k, 0) = b.constant * d[k] * between(k, h);
        D(k, k) = std::conj(b.zeros[k]);
        for (Eigen::Index j = 0; j < k; ++j) {
            D(j, k) = d[j] * d[k] * between(j, k);
        }
    }
    return {b(0.0), B, C, D, {static_cast<int>(h)}};
}

// ---------------------------------------------------------------------------
// Monomial stripping
// ---------------------------------------------------------------------------

struct StripResult {
    int power{0};
    PowerSeries2 reduced;
};

namespace detail {

inline StripResult strip_rows(const PowerSeries2& s, double tol, const char* var, const char* other) {
    const CMatrix& c = s.coeffs;
    if (std::abs(c(0, 0)) > tol) {
        return {0, s};
    }
    int p = 0;
    while (p < c.rows() && c.row(p).cwiseAbs().maxCoeff() <= tol) {
        ++p;
    }
    if (p == c.rows()) {
        fail("NotDivisible", "all known coefficients vanish; no power of " + std::string(var) +
                                 " can be isolated within the truncation");
    }
    PowerSeries2 reduced{CMatrix(c.bottomRows(c.rows() - p))};
    if (p == 0 || std::abs(reduced.coeffs(0, 0)) <= tol) {
        fail("NotDivisible", "after removing " + std::string(var) + "^" + std::to_string(p) +
                                 " the origin value is still zero; try stripping " + other);
    }
    return {p, reduced};
}

} // namespace detail

/// Largest p with z1^p dividing phi (on the known coefficients) and the
/// quotient z1^{-p} phi, which must not vanish at the origin.
inline StripResult strip_monomial(const PowerSeries2& s, double tol = kDefaultTol) {
    return detail::strip_rows(s, tol, "z1", "z2 (strip_monomial_z2)");
}

/// The same with the roles of z1 and z2 exchanged.
inline StripResult strip_monomial_z2(const PowerSeries2& s, double tol = kDefaultTol) {
    auto r = detail::strip_rows(PowerSeries2{CMatrix(s.coeffs.transpose())}, tol, "z2", "z1 (strip_monomial)");
    r.reduced.coeffs.transposeInPlace();
    return r;
}

struct RationalStripResult {
    int power{0};
    RationalFunction2 reduced;
};

/// Rudin-form input: the z1 power is the monomial exponent, since p(0) != 0
/// and reflect(p) keeps its leading row.
inline RationalStripResult strip_monomial(const RationalFunction2& f, double tol = kDefaultTol) {
    if (f.m1() == 0 && std::abs(f.eval(0.0, 0.0)) > tol) {
        return {0, f};
    }
    RationalFunction2 reduced(0, f.m2(), f.denominator(), false);
    if (std::abs(reduced.eval(0.0, 0.0)) <= tol) {
        fail("NotDivisible", "after removing z1^" + std::to_string(f.m1()) +
                                 " the origin value is still zero; try stripping z2 (strip_monomial_z2)");
    }
    return {f.m1(), reduced};
}

} // namespace bidisc
