#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "colligation.hpp"
#include "function.hpp"
#include "numlin.hpp"

namespace bidisc {

/// A kernel known on the ordered pairs of a finite grid. values[i*m + j] is
/// K(z_i, z_j), a dim x dim matrix.
struct SampledKernel {
    PointGrid grid;
    int dim{1};
    std::vector<CMatrix> values;

    [[nodiscard]] int size() const { return static_cast<int>(grid.points.size()); }
    [[nodiscard]] const CMatrix& at(int i, int j) const { return values[static_cast<std::size_t>(i * size() + j)]; }

    /// Block matrix [K(z_i, z_j)]_{ij}; K >= 0 on the grid iff this is PSD.
    [[nodiscard]] CMatrix gram() const {
        const int m = size();
        CMatrix g(m * dim, m * dim);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                g.block(i * dim, j * dim, dim, dim) = at(i, j);
            }
        }
        return g;
    }
};

using KernelFn = std::function<CMatrix(const Point&, const Point&)>;
using ScalarKernelFn = std::function<cd(const Point&, const Point&)>;

inline SampledKernel sample_kernel(const PointGrid& grid, int dim, const KernelFn& k) {
    SampledKernel s{grid, dim, {}};
    s.values.reserve(grid.points.size() * grid.points.size());
    for (const Point& z : grid.points) {
        for (const Point& w : grid.points) {
            CMatrix v = k(z, w);
            if (v.rows() != dim || v.cols() != dim) {
                fail("NonConformable", "kernel value has the wrong size");
            }
            s.values.push_back(std::move(v));
        }
    }
    return s;
}

inline SampledKernel sample_scalar_kernel(const PointGrid& grid, const ScalarKernelFn& k) {
    return sample_kernel(grid, 1, [&](const Point& z, const Point& w) { return CMatrix::Constant(1, 1, k(z, w)); });
}

inline cd inner(const Point& z, const Point& w) { return (w.adjoint() * z)(0, 0); }

/// prod_k (1 - z_k conj(w_k)).
inline cd szego_inverse(const Point& z, const Point& w) {
    cd p{1.0, 0.0};
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        p *= 1.0 - z(k) * std::conj(w(k));
    }
    return p;
}

/// The Szego kernel of the polydisc, prod_k 1/(1 - z_k conj(w_k)); on the disc this is S.
inline SampledKernel szego_kernel(const PointGrid& grid) {
    return sample_scalar_kernel(grid, [](const Point& z, const Point& w) { return 1.0 / szego_inverse(z, w); });
}

inline SampledKernel drury_arveson_kernel(const PointGrid& grid) {
    return sample_scalar_kernel(grid, [](const Point& z, const Point& w) { return 1.0 / (1.0 - inner(z, w)); });
}

/// Pointwise product (s(z,w) K(z,w)) with a scalar kernel.
inline SampledKernel hadamard(const SampledKernel& k, const ScalarKernelFn& s) {
    SampledKernel r = k;
    const int m = k.size();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            r.values[static_cast<std::size_t>(i * m + j)] *= s(k.grid.points[i], k.grid.points[j]);
        }
    }
    return r;
}

/// Pointwise I - s(z,w) K(z,w).
inline SampledKernel identity_minus(const SampledKernel& k, const ScalarKernelFn& s) {
    SampledKernel r = hadamard(k, s);
    const int m = k.size();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            r.values[static_cast<std::size_t>(i * m + j)] = CMatrix::Identity(k.dim, k.dim) - r.at(i, j);
        }
    }
    return r;
}

inline void require_same_grid(const SampledKernel& a, const SampledKernel& b) {
    if (a.grid.points.size() != b.grid.points.size() || a.dim != b.dim) {
        fail("GridMismatch", "kernels are sampled on different grids or have different value sizes");
    }
    for (std::size_t i = 0; i < a.grid.points.size(); ++i) {
        if (a.grid.points[i] != b.grid.points[i]) {
            fail("GridMismatch", "grid point " + std::to_string(i) + " differs");
        }
    }
}

inline void require_grid_dimension(const PointGrid& g, int dim, const char* op) {
    if (g.dim != dim) {
        fail("DimensionMismatch", std::string(op) + " needs points with " + std::to_string(dim) + " coordinates");
    }
}

// ---------------------------------------------------------------------------
// Agler kernels
// ---------------------------------------------------------------------------

struct AglerKernels {
    SampledKernel k1;
    SampledKernel k2;
    double max_residual{0.0};
};

/// H(z) = B (I - E(z) D)^{-1}.
inline CMatrix state_row(const Colligation& v, const Point& z, double tol) {
    const CVector e = v.state_scaling(z);
    const CMatrix lhs = CMatrix::Identity(v.h(), v.h()) - e.asDiagonal() * v.D();
    Eigen::PartialPivLU<CMatrix> lu(lhs.adjoint());
    if (v.h() > 0 && lu.rcond() < 100.0 * tol) {
        fail("ResolventIllConditioned", "rcond(I - E(z)D) = " + std::to_string(lu.rcond()));
    }
    if (v.h() == 0) {
        return CMatrix(1, 0);
    }
    return CMatrix(lu.solve(CMatrix(v.B().adjoint())).adjoint());
}

/// Largest | 1 - phi(z)conj(phi(w)) - (1 - z1 w1*) K1 - (1 - z2 w2*) K2 | over the grid.
inline double agler_residual(const Evaluable& phi, const SampledKernel& k1, const SampledKernel& k2) {
    const int m = k1.size();
    std::vector<cd> values;
    for (const Point& z : k1.grid.points) {
        values.push_back(phi(z));
    }
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Point& z = k1.grid.points[i];
            const Point& w = k1.grid.points[j];
            const cd lhs = 1.0 - values[i] * std::conj(values[j]);
            const cd rhs = (1.0 - z(0) * std::conj(w(0))) * k1.at(i, j)(0, 0) +
                           (1.0 - z(1) * std::conj(w(1))) * k2.at(i, j)(0, 0);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

/// For co-isometric V the identity
///   1 - tau(z)conj(tau(w)) = sum_i (1 - z_i w_i*) H_i(z) H_i(w)^*
/// holds with H_i the H_i-columns of H(z) = B (I - E(z)D)^{-1}.
inline AglerKernels agler_kernels_of(const Colligation& v, const PointGrid& grid, double tol = kDefaultTol) {
    if (v.variables() != 2) {
        fail("DimensionMismatch", "agler_kernels_of needs a two-variable colligation");
    }
    require_grid_dimension(grid, 2, "agler_kernels_of");
    if (!numlin::classify(v.matrix(), tol).coisometry) {
        fail("NotCoisometric", "VV^* differs from I by more than tol");
    }
    std::vector<CMatrix> rows;
    double scale = 1.0;
    for (const Point& z : grid.points) {
        require_interior(z);
        rows.push_back(state_row(v, z, tol));
        scale = std::max(scale, rows.back().squaredNorm());
    }
    const auto h1 = v.h1();
    const auto h2 = v.h2();
    AglerKernels out{{grid, 1, {}}, {grid, 1, {}}, 0.0};
    for (const CMatrix& hz : rows) {
        for (const CMatrix& hw : rows) {
            out.k1.values.push_back(hz.leftCols(h1) * hw.leftCols(h1).adjoint());
            out.k2.values.push_back(hz.rightCols(h2) * hw.rightCols(h2).adjoint());
        }
    }
    out.max_residual = agler_residual(transfer_function(v, tol), out.k1, out.k2);
    if (out.max_residual > tol * scale) {
        fail("IdentityViolated", "Agler identity residual " + std::to_string(out.max_residual));
    }
    return out;
}

struct AglerCheck {
    bool pass{false};
    double max_residual{0.0};
    double lambda_min_k1{0.0};
    double lambda_min_k2{0.0};
};

inline AglerCheck verify_agler_decomposition(const Evaluable& phi, const SampledKernel& k1, const SampledKernel& k2,
                                             double tol = kDefaultTol) {
    require_same_grid(k1, k2);
    require_grid_dimension(k1.grid, 2, "verify_agler_decomposition");
    if (k1.dim != 1) {
        fail("DimensionMismatch", "Agler kernels of a scalar function are scalar");
    }
    const auto p1 = numlin::is_psd(k1.gram(), tol);
    const auto p2 = numlin::is_psd(k2.gram(), tol);
    AglerCheck c;
    c.lambda_min_k1 = p1.lambda_min;
    c.lambda_min_k2 = p2.lambda_min;
    c.max_residual = agler_residual(phi, k1, k2);
    c.pass = p1.psd && p2.psd && c.max_residual <= tol;
    return c;
}

// ---------------------------------------------------------------------------
// de Branges-Rovnyak kernels on the disc
// ---------------------------------------------------------------------------

/// Theta(z) = a + z B (I - z D)^{-1} C : C^e -> C^{e_star}, so a is e_star x e,
/// B is e_star x h, C is h x e. In the lurking-isometry notation this is
/// A^* + z C_V^* (I - z D_V^*)^{-1} B_V^* with the transfer matrix [[a, B], [C, D]] = V^*.
struct ThetaRealization {
    CMatrix a;
    CMatrix B;
    CMatrix C;
    CMatrix D;

    [[nodiscard]] Eigen::Index e() const { return a.cols(); }
    [[nodiscard]] Eigen::Index e_star() const { return a.rows(); }
    [[nodiscard]] Eigen::Index h() const { return D.rows(); }

    [[nodiscard]] CMatrix transfer_matrix() const {
        CMatrix t(e_star() + h(), e() + h());
        t << a, B, C, D;
        return t;
    }

    [[nodiscard]] CMatrix operator()(cd z) const {
        if (h() == 0) {
            return a;
        }
        const CMatrix lhs = CMatrix::Identity(h(), h()) - z * D;
        return a + z * B * lhs.partialPivLu().solve(C);
    }
};

inline void validate(const ThetaRealization& t) {
    if (t.B.rows() != t.e_star() || t.C.cols() != t.e() || t.B.cols() != t.h() || t.C.rows() != t.h() ||
        t.D.cols() != t.h()) {
        fail("NonConformable", "Theta realization blocks do not line up");
    }
}

/// K_Theta(z, w) = (I - Theta(z)Theta(w)^*) / (1 - z conj(w)).
inline SampledKernel dbr_kernel(const ThetaRealization& t, const PointGrid& grid) {
    validate(t);
    require_grid_dimension(grid, 1, "dbr_kernel");
    std::vector<CMatrix> theta;
    for (const Point& z : grid.points) {
        theta.push_back(t(z(0)));
    }
    SampledKernel k{grid, static_cast<int>(t.e_star()), {}};
    const auto m = grid.points.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const cd s = 1.0 - grid.points[i](0) * std::conj(grid.points[j](0));
            k.values.push_back((CMatrix::Identity(t.e_star(), t.e_star()) - theta[i] * theta[j].adjoint()) / s);
        }
    }
    return k;
}

inline double max_kernel_difference(const SampledKernel& a, const SampledKernel& b) {
    require_same_grid(a, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        worst = std::max(worst, (a.values[i] - b.values[i]).norm());
    }
    return worst;
}

struct DbrReport {
    bool is_dbr{false};
    double lambda_min{0.0};
};

inline cd one_minus_zw(const Point& z, const Point& w) { return 1.0 - z(0) * std::conj(w(0)); }

/// K is a de Branges-Rovnyak kernel on the grid iff I - (1 - z w*) K >= 0 there.
inline DbrReport dbr_test_disc(const SampledKernel& k, double tol = kDefaultTol) {
    require_grid_dimension(k.grid, 1, "dbr_test_disc");
    const auto r = numlin::is_psd(identity_minus(k, one_minus_zw).gram(), tol);
    return {r.psd, r.lambda_min};
}

inline constexpr int kMaxValueDim = 8;
inline constexpr int kDefaultPaddingCap = 256;

struct DbrReconstruction {
    ThetaRealization theta;
    int padding{0};
    double residual{0.0};
    bool contract_ok{false};
};

/// Lurking isometry: with I - (1 - z w*) K = F F^* and K = G G^* on the grid,
///   V : [eta; conj(w) G(w)^* eta] -> [F(w)^* eta; G(w)^* eta]
/// is isometric on the span of the left-hand vectors. It is extended by sending
/// the orthogonal complement of that span to fresh directions appended to the
/// output space, and Theta is read off V.
inline DbrReconstruction dbr_reconstruct_disc(const SampledKernel& k, double tol = kDefaultTol,
                                              int padding_cap = kDefaultPaddingCap) {
    require_grid_dimension(k.grid, 1, "dbr_reconstruct_disc");
    if (k.dim > kMaxValueDim) {
        fail("UnsupportedDimension", "kernel values larger than 8 x 8 are not supported");
    }
    const auto test = dbr_test_disc(k, tol);
    if (!test.is_dbr) {
        fail("NotDbr", "I - (1 - z w*) K has Gram eigenvalue " + std::to_string(test.lambda_min));
    }
    const auto kp = numlin::is_psd(k.gram(), tol);
    if (!kp.psd) {
        fail("NotDbr", "K itself is not positive; Gram eigenvalue " + std::to_string(kp.lambda_min));
    }
    const int m = k.size();
    const int es = k.dim;
    const auto ff = numlin::psd_factor(identity_minus(k, one_minus_zw).gram(), tol);
    const auto gf = numlin::psd_factor(k.gram(), tol);
    const auto rf = ff.rank;
    const auto h = gf.rank;

    // Columns indexed by (grid point i, basis vector of E_star).
    CMatrix x(es + h, m * es);
    CMatrix y(rf + h, m * es);
    for (int i = 0; i < m; ++i) {
        const cd w = k.grid.points[i](0);
        const CMatrix f_star = ff.factor.middleRows(i * es, es).adjoint();  // F(w_i)^*
        const CMatrix g_star = gf.factor.middleRows(i * es, es).adjoint();  // G(w_i)^*
        x.block(0, i * es, es, es) = CMatrix::Identity(es, es);
        x.block(es, i * es, h, es) = std::conj(w) * g_star;
        y.block(0, i * es, rf, es) = f_star;
        y.block(rf, i * es, h, es) = g_star;
    }

    const Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > numlin::scaled_tol(x, tol)) {
        ++r;
    }
    const Eigen::Index domain = es + h;
    const Eigen::Index pad = domain - r;
    if (pad > padding_cap) {
        fail("RankOverflow", "isometric extension needs " + std::to_string(pad) + " padding directions");
    }
    // On range(X): U_r -> Y W_r S_r^{-1}, replaced by its nearest isometry.
    CMatrix image = y * svd.matrixV().leftCols(r) * sv.head(r).cwiseInverse().asDiagonal();
    if (r > 0) {
        const Eigen::JacobiSVD<CMatrix> polar(image, Eigen::ComputeThinU | Eigen::ComputeThinV);
        image = polar.matrixU() * polar.matrixV().adjoint();
    }
    // Codomain ordering: F-space (rf), padding (pad), state (h).
    const Eigen::Index out_e = rf + pad;
    CMatrix v = CMatrix::Zero(out_e + h, domain);
    CMatrix placed = CMatrix::Zero(out_e + h, r);
    placed.topRows(rf) = image.topRows(rf);
    placed.bottomRows(h) = image.bottomRows(h);
    v += placed * svd.matrixU().leftCols(r).adjoint();
    v.block(rf, 0, pad, domain) = svd.matrixU().rightCols(pad).adjoint();

    // V = [[A, B_V], [C_V, D_V]] : E_star + H -> E + H; transfer matrix is V^*.
    const CMatrix t = v.adjoint();
    DbrReconstruction out;
    out.theta.a = t.topLeftCorner(es, out_e);
    out.theta.B = t.topRightCorner(es, h);
    out.theta.C = t.bottomLeftCorner(h, out_e);
    out.theta.D = t.bottomRightCorner(h, h);
    out.padding = static_cast<int>(pad);
    out.residual = max_kernel_difference(k, dbr_kernel(out.theta, k.grid));
    out.contract_ok = out.residual <= 10.0 * tol;
    return out;
}

struct NfReport {
    bool below_szego{false};      // S - K >= 0
    bool szego_quotient{false};   // (1 - z w*) K >= 0
    double lambda_min_below{0.0};
    double lambda_min_quotient{0.0};
};

inline NfReport dbr_test_nf(const SampledKernel& k, double tol = kDefaultTol) {
    require_grid_dimension(k.grid, 1, "dbr_test_nf");
    SampledKernel diff = k;
    const int m = k.size();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const cd s = 1.0 / one_minus_zw(k.grid.points[i], k.grid.points[j]);
            diff.values[static_cast<std::size_t>(i * m + j)] = s * CMatrix::Identity(k.dim, k.dim) - k.at(i, j);
        }
    }
    const auto p1 = numlin::is_psd(diff.gram(), tol);
    const auto p2 = numlin::is_psd(hadamard(k, one_minus_zw).gram(), tol);
    return {p1.psd, p2.psd, p1.lambda_min, p2.lambda_min};
}

struct PolydiscReport {
    bool pass{false};
    std::vector<double> lambda_min_parts;
    double sum_residual{0.0};
    double lambda_min_hadamard{0.0};
};

/// Certificate check: each K_i >= 0, K = sum_i K_i / prod_{j != i}(1 - z_j w_j*),
/// and I - S_n^{-1} K >= 0.
inline PolydiscReport dbr_test_polydisc(const SampledKernel& k, const std::vector<SampledKernel>& parts,
                                        double tol = kDefaultTol) {
    const int n = k.grid.dim;
    if (n < 2) {
        fail("DimensionMismatch", "dbr_test_polydisc needs at least two variables");
    }
    if (static_cast<int>(parts.size()) != n) {
        fail("GridMismatch", "need one kernel per variable");
    }
    PolydiscReport rep;
    bool parts_psd = true;
    for (const auto& p : parts) {
        require_same_grid(k, p);
        const auto r = numlin::is_psd(p.gram(), tol);
        parts_psd = parts_psd && r.psd;
        rep.lambda_min_parts.push_back(r.lambda_min);
    }
    const int m = k.size();
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const Point& z = k.grid.points[i];
            const Point& w = k.grid.points[j];
            CMatrix sum = CMatrix::Zero(k.dim, k.dim);
            for (int v = 0; v < n; ++v) {
                cd denom{1.0, 0.0};
                for (int u = 0; u < n; ++u) {
                    if (u != v) {
                        denom *= 1.0 - z(u) * std::conj(w(u));
                    }
                }
                sum += parts[v].at(i, j) / denom;
            }
            rep.sum_residual = std::max(rep.sum_residual, (k.at(i, j) - sum).norm());
        }
    }
    const auto had = numlin::is_psd(identity_minus(k, szego_inverse).gram(), tol);
    rep.lambda_min_hadamard = had.lambda_min;
    rep.pass = parts_psd && rep.sum_residual <= tol && had.psd;
    return rep;
}

/// I - (1 - <z, w>) K >= 0 on the grid.
inline DbrReport dbr_test_ball(const SampledKernel& k, double tol = kDefaultTol) {
    const auto r = numlin::is_psd(
        identity_minus(k, [](const Point& z, const Point& w) { return 1.0 - inner(z, w); }).gram(), tol);
    return {r.psd, r.lambda_min};
}

} // namespace bidisc
