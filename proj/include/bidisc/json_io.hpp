#pragma once

// JSON forms of the library types. Complex scalars are [re, im]; matrices are
// arrays of rows. Doubles are written shortest-round-trip, so parsing an
// emitted document gives back bit-identical values.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colligation.hpp"
#include "function.hpp"
#include "kernels.hpp"

namespace bidisc::io {

using json = nlohmann::ordered_json;

[[noreturn]] inline void schema_fail(const std::string& where, const std::string& what) {
    fail("SchemaError", where + ": " + what);
}

inline json parse_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail("ParseError", source + ": " + e.what());
    }
}

inline const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        schema_fail(where, std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

inline int to_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) {
        schema_fail(where, "expected an integer");
    }
    return j.get<int>();
}

// ---------------------------------------------------------------------------
// Scalars and matrices
// ---------------------------------------------------------------------------

inline json to_json(cd z) { return json::array({z.real(), z.imag()}); }

inline cd complex_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        schema_fail(where, "complex numbers are [re, im]");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(to_json(m(i, k)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// An empty array, or rows that are all empty, stands for any matrix of size
/// zero; `rows`/`cols` (when >= 0) fix its shape in that case.
inline CMatrix matrix_from(const json& j, const std::string& where, Eigen::Index rows = -1, Eigen::Index cols = -1) {
    if (!j.is_array()) {
        schema_fail(where, "matrices are arrays of rows");
    }
    const auto r = static_cast<Eigen::Index>(j.size());
    Eigen::Index c = 0;
    for (const auto& row : j) {
        if (!row.is_array()) {
            schema_fail(where, "matrices are arrays of rows");
        }
    }
    if (r > 0) {
        c = static_cast<Eigen::Index>(j[0].size());
    }
    if (r * c == 0 && rows >= 0 && cols >= 0 && rows * cols == 0) {
        return CMatrix(rows, cols);
    }
    CMatrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != c) {
            schema_fail(where, "ragged matrix rows");
        }
        for (Eigen::Index k = 0; k < c; ++k) {
            m(i, k) = complex_from(j[i][k], where);
        }
    }
    if ((rows >= 0 && m.rows() != rows) || (cols >= 0 && m.cols() != cols)) {
        schema_fail(where, "expected a " + std::to_string(rows) + " x " + std::to_string(cols) + " matrix, got " +
                               std::to_string(m.rows()) + " x " + std::to_string(m.cols()));
    }
    return m;
}

inline json point_json(const Point& z) {
    json p = json::array();
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        p.push_back(to_json(z(k)));
    }
    return p;
}

inline Point point_from(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        schema_fail(where, "points are non-empty arrays of [re, im]");
    }
    Point z(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        z(static_cast<Eigen::Index>(k)) = complex_from(j[k], where);
    }
    return z;
}

// ---------------------------------------------------------------------------
// Colligations
// ---------------------------------------------------------------------------

inline json to_json(const Colligation& v) {
    json j;
    j["a"] = to_json(v.a());
    j["B"] = matrix_json(v.B());
    j["C"] = matrix_json(v.C());
    j["D"] = matrix_json(v.D());
    j["partition"] = v.partition();
    return j;
}

inline bool is_colligation(const json& j) { return j.is_object() && j.contains("partition") && j.contains("D"); }

inline Colligation colligation_from(const json& j) {
    const std::string w = "colligation";
    const CMatrix d = matrix_from(field(j, "D", w), w + ".D");
    if (d.rows() != d.cols()) {
        schema_fail(w, "D must be square");
    }
    const Eigen::Index h = d.rows();
    std::vector<int> partition;
    const json& p = field(j, "partition", w);
    if (!p.is_array()) {
        schema_fail(w, "partition is an array of block sizes");
    }
    for (const auto& e : p) {
        partition.push_back(to_int(e, w + ".partition"));
    }
    return {complex_from(field(j, "a", w), w + ".a"), matrix_from(field(j, "B", w), w + ".B", 1, h),
            matrix_from(field(j, "C", w), w + ".C", h, 1), d, partition};
}

// ---------------------------------------------------------------------------
// Polynomials, series, rational inner functions, Blaschke products
// ---------------------------------------------------------------------------

inline json coeffs_json(const CMatrix& c) {
    json j;
    j["deg"] = json::array({c.rows() - 1, c.cols() - 1});
    j["coeffs"] = matrix_json(c);
    return j;
}

inline CMatrix coeffs_from(const json& j, const std::string& w) {
    const json& deg = field(j, "deg", w);
    if (!deg.is_array() || deg.size() != 2) {
        schema_fail(w, "deg is [d1, d2]");
    }
    const int d1 = to_int(deg[0], w + ".deg");
    const int d2 = to_int(deg[1], w + ".deg");
    if (d1 < 0 || d2 < 0) {
        schema_fail(w, "degrees must be non-negative");
    }
    return matrix_from(field(j, "coeffs", w), w + ".coeffs", d1 + 1, d2 + 1);
}

inline json to_json(const Poly2& p) { return coeffs_json(p.coeffs()); }
inline json to_json(const PowerSeries2& s) { return coeffs_json(s.coeffs); }

inline Poly2 poly_from(const json& j) { return Poly2(coeffs_from(j, "polynomial")); }
inline PowerSeries2 series_from(const json& j) { return {coeffs_from(j, "series")}; }

inline bool is_series(const json& j) { return j.is_object() && j.contains("deg") && j.contains("coeffs"); }

/// {"monomial": [m1, m2], "denominator": poly}; the numerator is implied.
inline json to_json(const RationalFunction2& f) {
    json j;
    j["monomial"] = json::array({f.m1(), f.m2()});
    j["denominator"] = to_json(f.denominator());
    return j;
}

inline bool is_rational(const json& j) { return j.is_object() && j.contains("monomial") && j.contains("denominator"); }

inline RationalFunction2 rational_from(const json& j) {
    const std::string w = "rational";
    const json& m = field(j, "monomial", w);
    if (!m.is_array() || m.size() != 2) {
        schema_fail(w, "monomial is [m1, m2]");
    }
    return {to_int(m[0], w + ".monomial"), to_int(m[1], w + ".monomial"), poly_from(field(j, "denominator", w))};
}

inline json to_json(const Blaschke& b) {
    json j;
    j["constant"] = to_json(b.constant);
    j["zeros"] = json::array();
    for (const cd& a : b.zeros) {
        j["zeros"].push_back(to_json(a));
    }
    return j;
}

inline bool is_blaschke(const json& j) { return j.is_object() && j.contains("zeros"); }

inline Blaschke blaschke_from(const json& j) {
    const std::string w = "blaschke";
    Blaschke b;
    b.constant = j.contains("constant") ? complex_from(j.at("constant"), w + ".constant") : cd{1.0, 0.0};
    const json& zs = field(j, "zeros", w);
    if (!zs.is_array()) {
        schema_fail(w, "zeros is an array of [re, im]");
    }
    for (const auto& z : zs) {
        b.zeros.push_back(complex_from(z, w + ".zeros"));
    }
    return b;
}

// ---------------------------------------------------------------------------
// Grids and sampled kernels
// ---------------------------------------------------------------------------

inline json to_json(const PointGrid& g) {
    json j;
    j["ambient"] = ambient_name(g);
    j["points"] = json::array();
    for (const Point& z : g.points) {
        j["points"].push_back(point_json(z));
    }
    return j;
}

/// "disc", "bidisc", "torus2", "polydisc-n", "ball-n".
inline std::pair<Ambient, int> ambient_from(const std::string& name) {
    auto suffix = [&](const std::string& prefix) -> int {
        try {
            std::size_t used = 0;
            const int n = std::stoi(name.substr(prefix.size()), &used);
            if (used + prefix.size() == name.size() && n >= 1) {
                return n;
            }
        } catch (const std::exception&) {
        }
        schema_fail("grid.ambient", "bad dimension in \"" + name + "\"");
    };
    if (name == "disc") {
        return {Ambient::Disc, 1};
    }
    if (name == "bidisc") {
        return {Ambient::Bidisc, 2};
    }
    if (name == "torus2") {
        return {Ambient::Torus2, 2};
    }
    if (name.rfind("polydisc-", 0) == 0) {
        return {Ambient::Polydisc, suffix("polydisc-")};
    }
    if (name.rfind("ball-", 0) == 0) {
        return {Ambient::Ball, suffix("ball-")};
    }
    schema_fail("grid.ambient", "unknown ambient \"" + name + "\"");
}

inline PointGrid grid_from(const json& j) {
    const std::string w = "grid";
    const json& amb = field(j, "ambient", w);
    if (!amb.is_string()) {
        schema_fail(w, "ambient is a string");
    }
    const auto [ambient, dim] = ambient_from(amb.get<std::string>());
    PointGrid g{ambient, dim, {}};
    const json& pts = field(j, "points", w);
    if (!pts.is_array()) {
        schema_fail(w, "points is an array");
    }
    for (const auto& p : pts) {
        Point z = point_from(p, w + ".points");
        if (z.size() != dim) {
            schema_fail(w, "point with " + std::to_string(z.size()) + " coordinates in a " + amb.get<std::string>() +
                               " grid");
        }
        g.points.push_back(std::move(z));
    }
    return g;
}

inline json to_json(const SampledKernel& k) {
    json j;
    j["grid"] = to_json(k.grid);
    j["dim"] = k.dim;
    j["values"] = json::array();
    for (const CMatrix& v : k.values) {
        j["values"].push_back(matrix_json(v));
    }
    return j;
}

inline SampledKernel kernel_from(const json& j) {
    const std::string w = "kernel";
    SampledKernel k{grid_from(field(j, "grid", w)), to_int(field(j, "dim", w), w + ".dim"), {}};
    if (k.dim < 1) {
        schema_fail(w, "dim must be >= 1");
    }
    const json& vals = field(j, "values", w);
    const auto m = k.grid.points.size();
    if (!vals.is_array() || vals.size() != m * m) {
        schema_fail(w, "values must hold one matrix per ordered pair of grid points (" + std::to_string(m * m) + ")");
    }
    for (const auto& v : vals) {
        k.values.push_back(matrix_from(v, w + ".values", k.dim, k.dim));
    }
    return k;
}

// ---------------------------------------------------------------------------
// One-variable operator-valued realizations
// ---------------------------------------------------------------------------

inline json to_json(const ThetaRealization& t) {
    json j;
    j["a"] = matrix_json(t.a);
    j["B"] = matrix_json(t.B);
    j["C"] = matrix_json(t.C);
    j["D"] = matrix_json(t.D);
    j["dims"] = json::array({t.e(), t.e_star(), t.h()});
    return j;
}

inline ThetaRealization theta_from(const json& j) {
    const std::string w = "theta";
    const json& dims = field(j, "dims", w);
    if (!dims.is_array() || dims.size() != 3) {
        schema_fail(w, "dims is [e, e_star, h]");
    }
    const int e = to_int(dims[0], w + ".dims");
    const int es = to_int(dims[1], w + ".dims");
    const int h = to_int(dims[2], w + ".dims");
    if (e < 0 || es < 0 || h < 0) {
        schema_fail(w, "dims must be non-negative");
    }
    ThetaRealization t{matrix_from(field(j, "a", w), w + ".a", es, e), matrix_from(field(j, "B", w), w + ".B", es, h),
                       matrix_from(field(j, "C", w), w + ".C", h, e), matrix_from(field(j, "D", w), w + ".D", h, h)};
    validate(t);
    return t;
}

} // namespace bidisc::io
