#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "colligation.hpp"
#include "function.hpp"
#include "numlin.hpp"

namespace bidisc {

/// Leading M^2 x M^2 compression of the block Toeplitz operator of phi on
/// l^2(l^2): block (i, k) is Phi_{i-k} for i >= k, and each Phi_k is lower
/// triangular Toeplitz with (Phi_k)_{j,l} = phi_{k, j-l}.
struct ToeplitzTruncation {
    int order{0};
    std::vector<CMatrix> blocks;
    CMatrix assembled;

    /// Y_j, the j-th block column (M^2 x M).
    [[nodiscard]] CMatrix column(int j) const { return assembled.middleCols(j * order, order); }
};

namespace detail {

inline CMatrix lower_toeplitz(const CVector& first_column) {
    const Eigen::Index m = first_column.size();
    CMatrix t = CMatrix::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index l = 0; l <= j; ++l) {
            t(j, l) = first_column(j - l);
        }
    }
    return t;
}

inline ToeplitzTruncation assemble(std::vector<CMatrix> blocks) {
    const int m = static_cast<int>(blocks.size());
    ToeplitzTruncation t{m, std::move(blocks), CMatrix::Zero(m * m, m * m)};
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k <= i; ++k) {
            t.assembled.block(i * m, k * m, m, m) = t.blocks[i - k];
        }
    }
    return t;
}

} // namespace detail

inline ToeplitzTruncation toeplitz_truncate(const PowerSeries2& s, int m) {
    if (m < 1) {
        fail("InsufficientTruncation", "order must be at least 1");
    }
    if (s.order1() < m - 1 || s.order2() < m - 1) {
        fail("InsufficientTruncation", "series known to order (" + std::to_string(s.order1()) + "," +
                                           std::to_string(s.order2()) + "), need " + std::to_string(m - 1) +
                                           " in both variables");
    }
    std::vector<CMatrix> blocks;
    for (int k = 0; k < m; ++k) {
        blocks.push_back(detail::lower_toeplitz(s.coeffs.row(k).head(m).transpose()));
    }
    return detail::assemble(std::move(blocks));
}

/// Phi blocks read off a structured colligation: Phi_0 has first column
/// (a, B2 C2, B2 D3 C2, ...), Phi_j has (B1 D1^{j-1} C1, B1 D1^{j-1} D2 C2, ...).
inline ToeplitzTruncation phi_blocks_from_colligation(const Colligation& v, int m, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "phi_blocks_from_colligation needs a two-variable colligation");
    }
    if (v.D21().size() > 0 && v.D21().norm() > tol) {
        fail("NotStructured", "lower-left D block has norm " + std::to_string(v.D21().norm()));
    }
    if (m < 1) {
        fail("InsufficientTruncation", "order must be at least 1");
    }
    // tail[n] = D3^n C2
    std::vector<CMatrix> tail{v.C2()};
    for (int n = 1; n < m; ++n) {
        tail.push_back(v.D3() * tail.back());
    }
    std::vector<CMatrix> blocks;
    CVector col(m);
    col(0) = v.a();
    for (int n = 1; n < m; ++n) {
        col(n) = v.h2() ? (v.B2() * tail[n - 1])(0, 0) : cd{0.0};
    }
    blocks.push_back(detail::lower_toeplitz(col));
    CMatrix left = v.B1();  // B1 D1^{j-1}
    for (int j = 1; j < m; ++j) {
        col.setZero();
        if (v.h1() > 0) {
            col(0) = (left * v.C1())(0, 0);
            if (v.h2() > 0) {
                const CMatrix ld2 = left * v.D2();
                for (int n = 1; n < m; ++n) {
                    col(n) = (ld2 * tail[n - 1])(0, 0);
                }
            }
            left = left * v.D1();
        }
        blocks.push_back(detail::lower_toeplitz(col));
    }
    return detail::assemble(std::move(blocks));
}

/// max over i, j < window of || (Y_i^* Y_j)[:window, :window] - delta_ij I ||_F.
/// The products use every row of the compression; only the leading corner of
/// each block is compared, away from the truncation edge.
inline double isometry_defect(const ToeplitzTruncation& t, int window) {
    if (window < 1 || 2 * window > t.order) {
        fail("WindowTooLarge", "window " + std::to_string(window) + " must lie in [1, M/2] for M = " +
                                   std::to_string(t.order));
    }
    const int m = t.order;
    CMatrix cols(t.assembled.rows(), window * window);
    for (int j = 0; j < window; ++j) {
        cols.middleCols(j * window, window) = t.assembled.middleCols(j * m, window);
    }
    const CMatrix g = cols.adjoint() * cols;
    double worst = 0.0;
    for (int i = 0; i < window; ++i) {
        for (int j = 0; j < window; ++j) {
            CMatrix d = g.block(i * window, j * window, window, window);
            if (i == j) {
                d -= CMatrix::Identity(window, window);
            }
            worst = std::max(worst, d.norm());
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Proof quantities of the structured inner certificate
// ---------------------------------------------------------------------------

inline constexpr int kMaxSumTerms = 64;
inline constexpr double kSumTermFloor = 1e-14;

struct GeometricSum {
    CMatrix value;
    int terms{0};
    double last_term{0.0};
};

/// sum_m L^{*m} X R^m, stopped after 64 terms or once a term drops below 1e-14.
inline GeometricSum geometric_sum(const CMatrix& left, const CMatrix& x, const CMatrix& right) {
    GeometricSum s{CMatrix::Zero(x.rows(), x.cols())};
    CMatrix term = x;
    for (int m = 0; m < kMaxSumTerms; ++m) {
        s.value += term;
        s.terms = m + 1;
        s.last_term = term.size() ? term.norm() : 0.0;
        if (s.last_term < kSumTermFloor) {
            break;
        }
        term = left.adjoint() * term * right;
    }
    return s;
}

/// Entries of Y_0^* Y_0 and Y_0^* S^{*s} Y_0 in closed form, with P1 and the
/// D3-sums truncated. Row 0 holds y_d (position (0, d) of Y_0^* Y_0); the
/// shift-s block holds c_d for d in [-depth, depth] (c_d at (0, d), c_{-e} at (e, 0)).
struct ProofQuantities {
    cd y0;
    std::vector<cd> y;                    // y_1 .. y_depth
    std::vector<std::vector<cd>> c;       // c[s-1][d + depth], s = 1 .. shifts
    double first_sum_defect{0.0};         // || sum D1^{*j} B1^* B1 D1^j - I ||
    double second_sum_defect{0.0};        // || sum D3^{*j} (B2^* B2 + D2^* D2) D3^j - I ||
    int max_terms{0};
    double max_last_term{0.0};

    [[nodiscard]] double max_abs_y() const {
        double w = 0.0;
        for (const cd& v : y) {
            w = std::max(w, std::abs(v));
        }
        return w;
    }
    [[nodiscard]] double max_abs_c() const {
        double w = 0.0;
        for (const auto& row : c) {
            for (const cd& v : row) {
                w = std::max(w, std::abs(v));
            }
        }
        return w;
    }
};

inline ProofQuantities proof_quantities(const Colligation& v, int depth = 8, int shifts = 8,
                                        double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "proof_quantities needs a two-variable colligation");
    }
    if (v.D21().size() > 0 && v.D21().norm() > tol) {
        fail("NotStructured", "lower-left D block has norm " + std::to_string(v.D21().norm()));
    }
    const CMatrix b1 = v.B1();
    const CMatrix b2 = v.B2();
    const CMatrix c1 = v.C1();
    const CMatrix c2 = v.C2();
    const CMatrix d1 = v.D1();
    const CMatrix d2 = v.D2();
    const CMatrix d3 = v.D3();
    const auto n1 = v.h1();
    const auto n2 = v.h2();
    const cd a = v.a();
    auto scalar = [](const CMatrix& m) { return m.size() ? m(0, 0) : cd{0.0}; };

    ProofQuantities q;
    auto track = [&](const GeometricSum& s) {
        q.max_terms = std::max(q.max_terms, s.terms);
        q.max_last_term = std::max(q.max_last_term, s.last_term);
        return s.value;
    };
    const CMatrix p1 = track(geometric_sum(d1, b1.adjoint() * b1, d1));
    const CMatrix qs = track(geometric_sum(d3, b2.adjoint() * b2 + d2.adjoint() * p1 * d2, d3));
    q.first_sum_defect = n1 ? (p1 - CMatrix::Identity(n1, n1)).norm() : 0.0;
    q.second_sum_defect =
        n2 ? (track(geometric_sum(d3, b2.adjoint() * b2 + d2.adjoint() * d2, d3)) - CMatrix::Identity(n2, n2)).norm()
           : 0.0;

    q.y0 = std::norm(a) + scalar(c1.adjoint() * p1 * c1) + scalar(c2.adjoint() * qs * c2);
    // y_d = C2^* D3^{*(d-1)} (a B2^* + D2^* P1 C1 + D3^* Q C2)
    const CMatrix core = a * b2.adjoint() + d2.adjoint() * p1 * c1 + d3.adjoint() * qs * c2;
    CMatrix row = c2.adjoint();  // C2^* D3^{*(d-1)}
    for (int d = 1; d <= depth; ++d) {
        q.y.push_back(scalar(row * core));
        row = row * d3.adjoint();
    }

    // powers of D1 up to the largest shift
    std::vector<CMatrix> d1pow{CMatrix::Identity(n1, n1)};
    for (int s = 1; s <= shifts; ++s) {
        d1pow.push_back(d1pow.back() * d1);
    }
    for (int s = 1; s <= shifts; ++s) {
        const CMatrix r = (b2.adjoint() * b1 + d2.adjoint() * p1 * d1) * d1pow[s - 1];
        const CMatrix w0 = (std::conj(a) * b1 + c1.adjoint() * p1 * d1) * d1pow[s - 1];
        const CMatrix w = track(geometric_sum(d3, r * d2, d3));
        std::vector<cd> cs(static_cast<std::size_t>(2 * depth + 1));
        cs[depth] = scalar(w0 * c1) + scalar(c2.adjoint() * w * c2);
        CMatrix left = c2.adjoint();  // C2^* D3^{*(d-1)}
        CMatrix right = c2;           // D3^{e-1} C2
        for (int d = 1; d <= depth; ++d) {
            cs[depth + d] = scalar(left * r * c1) + scalar(left * d3.adjoint() * w * c2);
            cs[depth - d] = scalar(w0 * d2 * right) + scalar(c2.adjoint() * w * d3 * right);
            left = left * d3.adjoint();
            right = d3 * right;
        }
        q.c.push_back(std::move(cs));
    }
    return q;
}

// ---------------------------------------------------------------------------
// Three-valued inner certificate
// ---------------------------------------------------------------------------

enum class InnerVerdict { Certified, Refuted, Inconclusive };

inline const char* verdict_name(InnerVerdict v) {
    switch (v) {
    case InnerVerdict::Certified:
        return "certified";
    case InnerVerdict::Refuted:
        return "refuted";
    default:
        return "inconclusive";
    }
}

struct InnerCertificate {
    InnerVerdict verdict{InnerVerdict::Inconclusive};
    std::string reason;
    StructureReport structure;
    bool boundary_evaluated{false};
    bool boundary_pass{false};
    double boundary_deviation{0.0};
    Point boundary_argmax;
    std::string boundary_error;
    double isometry_defect_m16{0.0};
    bool has_proof_quantities{false};
    ProofQuantities proof;
};

inline constexpr int kCertifyGrid = 64;
inline constexpr int kCertifyOrder = 16;
inline constexpr int kCertifyWindow = 8;

/// Certified when V is isometric, structured and both diagonal blocks are
/// strictly stable; refuted when |tau| strays from 1 on the 64x64 torus by more
/// than 10 tol; inconclusive otherwise.
inline InnerCertificate certify_inner(const Colligation& v, double tol = kDefaultTol) {
    InnerCertificate cert;
    cert.structure = structure_report(v, tol);
    const auto& st = cert.structure;

    try {
        const auto rep = boundary_modulus_test(transfer_function(v, tol), make_torus_grid(kCertifyGrid), 10.0 * tol);
        cert.boundary_evaluated = true;
        cert.boundary_pass = rep.pass;
        cert.boundary_deviation = rep.max_deviation;
        cert.boundary_argmax = rep.argmax;
    } catch (const Error& e) {
        cert.boundary_error = e.what();
    }

    const PowerSeries2 series = taylor_coefficients(v, kCertifyOrder - 1, kCertifyOrder - 1);
    cert.isometry_defect_m16 = isometry_defect(toeplitz_truncate(series, kCertifyOrder), kCertifyWindow);
    if (st.lower_left_zero) {
        cert.proof = proof_quantities(v, 8, 8, tol);
        cert.has_proof_quantities = true;
    }

    if (st.is_isometry && st.lower_left_zero && st.c0dot) {
        cert.verdict = InnerVerdict::Certified;
        cert.reason = "isometric structured colligation with stable diagonal blocks";
    } else if (cert.boundary_evaluated && !cert.boundary_pass) {
        cert.verdict = InnerVerdict::Refuted;
        cert.reason = "boundary modulus deviates by " + std::to_string(cert.boundary_deviation);
    } else {
        cert.verdict = InnerVerdict::Inconclusive;
        cert.reason = cert.boundary_evaluated ? "inconclusive-by-structure: inner by sampling, not by certificate"
                                              : "inconclusive-by-structure: boundary evaluation failed";
    }
    return cert;
}

} // namespace bidisc
