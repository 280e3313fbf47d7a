#pragma once

// Command dispatch behind the bidisc tool. Every command reads JSON inputs,
// produces a report {command, inputs-digest, tol, verdict, evidence} and an
// exit status: 0 success, 1 refuted or failed verdict, 2 error.

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "colligation.hpp"
#include "factor.hpp"
#include "json_io.hpp"
#include "kernels.hpp"
#include "toeplitz.hpp"

namespace bidisc::cli {

using io::json;

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{
        "eval",         "classify",        "inner-check",  "toeplitz-check", "agler-kernels", "agler-verify",
        "dbr-check",    "dbr-nf-check",    "dbr-reconstruct", "dbr-polydisc", "dbr-ball",      "factor",
        "compose",      "split",           "model",        "strip"};
    return names;
}

struct Command {
    std::string name;
    std::vector<std::string> inputs;
    double tol{kDefaultTol};
    std::optional<std::string> grid;
    std::uint64_t seed{1};
    std::optional<std::string> at;  // eval: a point as JSON, e.g. [[0,0],[0,0]]
    int variable{1};                // strip: 1 or 2
};

struct Outcome {
    int exit_code{0};
    json report;
};

/// BIDISC_SCHUR_TOL if set and parseable, else 1e-9.
inline double default_tol() {
    if (const char* env = std::getenv("BIDISC_SCHUR_TOL")) {
        char* end = nullptr;
        const double t = std::strtod(env, &end);
        if (end != env && *end == '\0' && t > 0.0) {
            return t;
        }
    }
    return kDefaultTol;
}

namespace detail {

/// Kinds that describe a negative answer rather than a broken run.
inline bool is_verdict_failure(const std::string& kind) {
    static const std::set<std::string> kinds{"ConditionFailed", "NotDbr", "NotDivisible"};
    return kinds.count(kind) > 0;
}

inline std::string sha256_hex(const std::string& data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        fail("DigestError", "SHA-256 failed");
    }
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

inline std::string number_text(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

class Context {
public:
    explicit Context(const Command& cmd) : cmd_(cmd) {
        feed("command", cmd.name);
        feed("tol", number_text(cmd.tol));
        feed("seed", std::to_string(cmd.seed));
        feed("grid", cmd.grid.value_or(""));
        feed("at", cmd.at.value_or(""));
        feed("variable", std::to_string(cmd.variable));
        for (const auto& path : cmd.inputs) {
            texts_.push_back(read(path));
        }
        if (cmd.grid && !cmd.grid->empty() && (*cmd.grid)[0] == '@') {
            grid_text_ = read(cmd.grid->substr(1));
        }
    }

    [[nodiscard]] double tol() const { return cmd_.tol; }
    [[nodiscard]] const Command& command() const { return cmd_; }

    json load(std::size_t index) {
        if (index >= cmd_.inputs.size()) {
            fail("UsageError", cmd_.name + " needs " + std::to_string(index + 1) + " input file(s)");
        }
        const auto& text = texts_[index];
        if (!text) {
            fail("ParseError", "cannot read " + cmd_.inputs[index]);
        }
        return io::parse_text(*text, cmd_.inputs[index]);
    }

    void require_inputs(std::size_t lo, std::size_t hi) const {
        const auto n = cmd_.inputs.size();
        if (n < lo || n > hi) {
            fail("UsageError", cmd_.name + " takes " + (lo == hi ? std::to_string(lo)
                                                                : std::to_string(lo) + " to " + std::to_string(hi)) +
                                   " input file(s), got " + std::to_string(n));
        }
    }

    /// Parses --grid, or the fallback spec when the flag is absent.
    PointGrid grid(const std::string& fallback) {
        const std::string spec = cmd_.grid.value_or(fallback);
        if (!spec.empty() && spec[0] == '@') {
            if (!grid_text_) {
                fail("ParseError", "cannot read " + spec.substr(1));
            }
            return io::grid_from(io::parse_text(*grid_text_, spec.substr(1)));
        }
        return parse_grid_spec(spec, cmd_.seed);
    }

    [[nodiscard]] std::string digest() const { return "sha256:" + sha256_hex(buffer_); }

    static PointGrid parse_grid_spec(const std::string& spec, std::uint64_t seed) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string p; std::getline(ss, p, ':');) {
            parts.push_back(p);
        }
        auto bad = [&](const std::string& why) -> PointGrid { fail("InvalidGrid", "\"" + spec + "\": " + why); };
        auto count = [&](const std::string& s) {
            try {
                std::size_t used = 0;
                const int n = std::stoi(s, &used);
                if (used == s.size() && n >= 1) {
                    return n;
                }
            } catch (const std::exception&) {
            }
            bad("\"" + s + "\" is not a positive count");
            return 0;
        };
        auto seed_of = [&](std::size_t at) {
            if (parts.size() <= at) {
                return seed;
            }
            if (parts.size() > at + 1 || parts[at].rfind("seed=", 0) != 0) {
                bad("trailing fields must be a single seed=N");
            }
            try {
                std::size_t used = 0;
                const std::string s = parts[at].substr(5);
                const auto v = std::stoull(s, &used);
                if (used == s.size()) {
                    return static_cast<std::uint64_t>(v);
                }
            } catch (const std::exception&) {
            }
            bad("bad seed");
            return seed;
        };
        if (parts.size() < 2) {
            return bad("expected torus2:N, product:AxB or <ambient>:rand:N[:seed=S]");
        }
        if (parts[0] == "torus2") {
            if (parts.size() != 2) {
                bad("torus2 takes a single resolution");
            }
            return make_torus_grid(count(parts[1]));
        }
        if (parts[0] == "product") {
            const auto x = parts[1].find('x');
            if (x == std::string::npos) {
                bad("product grids are product:AxB");
            }
            return make_product_grid(count(parts[1].substr(0, x)), count(parts[1].substr(x + 1)), seed_of(2));
        }
        const auto [ambient, dim] = io::ambient_from(parts[0]);
        if (parts.size() < 3 || parts[1] != "rand") {
            bad("random grids are <ambient>:rand:N[:seed=S]");
        }
        return make_random_grid(ambient, dim, count(parts[2]), seed_of(3));
    }

private:
    std::optional<std::string> read(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            feed("missing", path);
            return std::nullopt;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        feed("file", ss.str());
        return ss.str();
    }

    void feed(const std::string& tag, const std::string& value) {
        buffer_ += tag;
        buffer_ += '\0';
        buffer_ += std::to_string(value.size());
        buffer_ += '\0';
        buffer_ += value;
    }

    Command cmd_;
    std::string buffer_;
    std::vector<std::optional<std::string>> texts_;
    std::optional<std::string> grid_text_;
};

struct Result {
    std::string verdict;
    bool pass{true};
    json evidence = json::object();
};

// ---------------------------------------------------------------------------
// Evidence helpers
// ---------------------------------------------------------------------------

inline json classification_json(const numlin::Classification& c) {
    json j;
    j["isometry"] = c.isometry;
    j["coisometry"] = c.coisometry;
    j["unitary"] = c.unitary;
    j["contraction"] = c.contraction;
    return j;
}

inline json structure_json(const StructureReport& s) {
    json j;
    j["isometry"] = s.is_isometry;
    j["coisometry"] = s.is_coisometry;
    j["unitary"] = s.is_unitary;
    j["contraction"] = s.is_contraction;
    j["lower_left_zero"] = s.lower_left_zero;
    j["lower_left_norm"] = s.lower_left_norm;
    j["c0dot"] = s.c0dot;
    j["factorization_condition"] = s.factorization_condition;
    j["factorization_residual"] = s.factorization_residual;
    return j;
}

inline json radii_json(const StructureReport& s) { return json::array({s.radius_d1, s.radius_d3}); }

inline json proof_json(const ProofQuantities& p) {
    json j;
    j["y0"] = io::to_json(p.y0);
    j["max_abs_y"] = p.max_abs_y();
    j["max_abs_c"] = p.max_abs_c();
    j["first_sum_defect"] = p.first_sum_defect;
    j["second_sum_defect"] = p.second_sum_defect;
    j["max_terms"] = p.max_terms;
    j["max_last_term"] = p.max_last_term;
    return j;
}

inline json values_json(const std::vector<cd>& v) {
    json j = json::array();
    for (const cd& z : v) {
        j.push_back(io::to_json(z));
    }
    return j;
}

inline json separability_json(const SeparabilityResult& s) {
    json j;
    j["separable"] = s.separable;
    j["residual"] = s.residual;
    j["normalization"] = io::to_json(s.normalization);
    return j;
}

inline json split_json(const FactorizationResult& f) {
    json j;
    j["V1"] = io::to_json(f.v1);
    j["V2"] = io::to_json(f.v2);
    j["y"] = io::to_json(f.y);
    j["x"] = io::to_json(f.x);
    j["certificate"] = f.certificate;
    return j;
}

inline json condition_json(const ConditionFourReport& c) {
    json j;
    j["holds"] = c.holds;
    j["coisometric"] = c.coisometric;
    j["lower_left_zero"] = c.lower_left_zero;
    j["residual"] = c.residual;
    return j;
}

// ---------------------------------------------------------------------------
// Function inputs
// ---------------------------------------------------------------------------

struct FunctionInput {
    std::string kind;
    int variables{2};
    Evaluable f;
    std::optional<Colligation> colligation;
    std::optional<RationalFunction2> rational;
    std::optional<PowerSeries2> series;
};

inline FunctionInput function_from(const json& j, double tol) {
    FunctionInput in;
    if (io::is_colligation(j)) {
        in.kind = "colligation";
        in.colligation = io::colligation_from(j);
        in.variables = in.colligation->variables();
        in.f = transfer_function(*in.colligation, tol);
    } else if (io::is_rational(j)) {
        in.kind = "rational";
        in.rational = io::rational_from(j);
        in.f = [r = *in.rational, tol](const Point& z) {
            if (z.size() != 2) {
                fail("DimensionMismatch", "rational functions take two coordinates");
            }
            return r.eval(z(0), z(1), tol);
        };
    } else if (io::is_series(j)) {
        in.kind = "series";
        in.series = io::series_from(j);
        in.f = [s = *in.series](const Point& z) {
            if (z.size() != 2) {
                fail("DimensionMismatch", "series take two coordinates");
            }
            return s(z);
        };
    } else if (io::is_blaschke(j)) {
        in.kind = "blaschke";
        in.variables = 1;
        in.f = [b = io::blaschke_from(j)](const Point& z) {
            if (z.size() != 1) {
                fail("DimensionMismatch", "Blaschke products take one coordinate");
            }
            return b(z(0));
        };
    } else {
        fail("SchemaError", "input is not a colligation, rational function, series or Blaschke product");
    }
    return in;
}

inline Colligation require_colligation(const json& j) {
    if (!io::is_colligation(j)) {
        fail("SchemaError", "expected a colligation {a, B, C, D, partition}");
    }
    return io::colligation_from(j);
}

inline Colligation require_two_variables(const json& j) {
    Colligation v = require_colligation(j);
    if (v.variables() != 2) {
        fail("DimensionMismatch", "expected a two-variable colligation");
    }
    return v;
}

/// Kernel files hold a kernel, or a report/object whose evidence carries it under `key`.
inline SampledKernel kernel_input(const json& j, const char* key = nullptr) {
    if (key != nullptr) {
        if (j.contains("evidence") && j["evidence"].contains(key)) {
            return io::kernel_from(j["evidence"][key]);
        }
        if (j.contains(key)) {
            return io::kernel_from(j[key]);
        }
    }
    if (j.contains("evidence") && j["evidence"].contains("kernel")) {
        return io::kernel_from(j["evidence"]["kernel"]);
    }
    return io::kernel_from(j);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Result do_eval(Context& ctx) {
    ctx.require_inputs(1, 1);
    const auto in = function_from(ctx.load(0), ctx.tol());
    std::vector<Point> points;
    if (ctx.command().at) {
        points.push_back(io::point_from(io::parse_text(*ctx.command().at, "--at"), "--at"));
    } else if (ctx.command().grid) {
        points = ctx.grid("").points;
    } else {
        points.push_back(Point::Zero(in.variables));
    }
    Result r{"evaluated", true, {}};
    r.evidence["input"] = in.kind;
    r.evidence["points"] = json::array();
    r.evidence["values"] = json::array();
    for (const Point& z : points) {
        r.evidence["points"].push_back(io::point_json(z));
        r.evidence["values"].push_back(io::to_json(in.f(z)));
    }
    return r;
}

inline Result do_classify(Context& ctx) {
    ctx.require_inputs(1, 1);
    const Colligation v = require_colligation(ctx.load(0));
    const auto c = numlin::classify(v.matrix(), ctx.tol());
    Result r;
    r.evidence["classification"] = classification_json(c);
    r.evidence["norm"] = numlin::largest_singular_value(v.matrix());
    if (v.variables() == 2) {
        const auto st = structure_report(v, ctx.tol());
        r.evidence["structure"] = structure_json(st);
        r.evidence["radii"] = radii_json(st);
    }
    r.verdict = c.unitary       ? "unitary"
                : c.isometry    ? "isometric"
                : c.coisometry  ? "co-isometric"
                : c.contraction ? "contractive"
                                : "not-contractive";
    r.pass = c.contraction;
    return r;
}

inline Result do_inner_check(Context& ctx) {
    ctx.require_inputs(1, 1);
    const Colligation v = require_two_variables(ctx.load(0));
    const auto cert = certify_inner(v, ctx.tol());
    Result r{verdict_name(cert.verdict), cert.verdict == InnerVerdict::Certified, {}};
    r.evidence["reason"] = cert.reason;
    r.evidence["structure"] = structure_json(cert.structure);
    r.evidence["radii"] = radii_json(cert.structure);
    json b;
    b["evaluated"] = cert.boundary_evaluated;
    if (cert.boundary_evaluated) {
        b["pass"] = cert.boundary_pass;
        b["max_deviation"] = cert.boundary_deviation;
        b["argmax"] = io::point_json(cert.boundary_argmax);
    } else {
        b["error"] = cert.boundary_error;
    }
    r.evidence["boundary"] = b;
    r.evidence["isometry_defect_m16"] = cert.isometry_defect_m16;
    r.evidence["proof_quantities"] = cert.has_proof_quantities ? proof_json(cert.proof) : json(nullptr);
    return r;
}

inline constexpr std::array<int, 3> kToeplitzOrders{8, 16, 32};
inline constexpr int kToeplitzWindow = 4;

inline Result do_toeplitz_check(Context& ctx) {
    ctx.require_inputs(1, 1);
    const auto in = function_from(ctx.load(0), ctx.tol());
    const int top = kToeplitzOrders.back() - 1;
    PowerSeries2 series;
    json structure = nullptr;
    json radii = nullptr;
    if (in.colligation) {
        if (in.colligation->variables() != 2) {
            fail("DimensionMismatch", "toeplitz-check needs a two-variable function");
        }
        series = taylor_coefficients(*in.colligation, top, top);
        const auto st = structure_report(*in.colligation, ctx.tol());
        structure = structure_json(st);
        radii = radii_json(st);
    } else if (in.rational) {
        series = series_of(*in.rational, top, top);
    } else if (in.series) {
        series = *in.series;
    } else {
        fail("DimensionMismatch", "toeplitz-check needs a two-variable function");
    }

    json boundary = nullptr;
    bool boundary_pass = false;
    bool boundary_known = false;
    if (!in.series) {
        try {
            const auto rep = boundary_modulus_test(in.f, ctx.grid("torus2:64"), 10.0 * ctx.tol());
            boundary = rep.max_deviation;
            boundary_pass = rep.pass;
            boundary_known = true;
        } catch (const Error& e) {
            if (e.kind() == "InvalidGrid" || e.kind() == "DimensionMismatch") {
                throw;
            }
        }
    }

    json defects = json::object();
    std::vector<double> seen;
    for (int m : kToeplitzOrders) {
        if (series.order1() < m - 1 || series.order2() < m - 1) {
            defects[std::to_string(m)] = nullptr;
            continue;
        }
        const double d = isometry_defect(toeplitz_truncate(series, m), kToeplitzWindow);
        defects[std::to_string(m)] = d;
        seen.push_back(d);
    }
    if (seen.empty()) {
        fail("InsufficientTruncation", "series too short for M = 8");
    }
    bool settling = true;
    for (std::size_t k = 1; k < seen.size(); ++k) {
        settling = settling && seen[k] <= seen[k - 1] + ctx.tol();
    }

    Result r;
    r.evidence["structure"] = structure;
    r.evidence["radii"] = radii;
    r.evidence["boundary_deviation"] = boundary;
    r.evidence["isometry_defect_by_M"] = defects;
    r.evidence["window"] = kToeplitzWindow;
    if (boundary_known && !boundary_pass) {
        r.verdict = "not-inner";
        r.pass = false;
    } else if (boundary_known && settling) {
        r.verdict = "consistent-with-inner";
    } else {
        r.verdict = "inconclusive";
        r.pass = false;
    }
    return r;
}

inline Result do_agler_kernels(Context& ctx) {
    ctx.require_inputs(1, 1);
    const Colligation v = require_two_variables(ctx.load(0));
    const auto ak = agler_kernels_of(v, ctx.grid("bidisc:rand:40"), ctx.tol());
    Result r{"decomposed", true, {}};
    r.evidence["max_residual"] = ak.max_residual;
    r.evidence["k1"] = io::to_json(ak.k1);
    r.evidence["k2"] = io::to_json(ak.k2);
    return r;
}

inline Result do_agler_verify(Context& ctx) {
    ctx.require_inputs(2, 3);
    const auto in = function_from(ctx.load(0), ctx.tol());
    SampledKernel k1;
    SampledKernel k2;
    if (ctx.command().inputs.size() == 2) {
        const json pair = ctx.load(1);
        k1 = kernel_input(pair, "k1");
        k2 = kernel_input(pair, "k2");
    } else {
        k1 = kernel_input(ctx.load(1), "k1");
        k2 = kernel_input(ctx.load(2), "k2");
    }
    const auto check = verify_agler_decomposition(in.f, k1, k2, ctx.tol());
    Result r{check.pass ? "verified" : "refuted", check.pass, {}};
    r.evidence["max_residual"] = check.max_residual;
    r.evidence["lambda_min_k1"] = check.lambda_min_k1;
    r.evidence["lambda_min_k2"] = check.lambda_min_k2;
    return r;
}

inline Result do_dbr_check(Context& ctx) {
    ctx.require_inputs(1, 1);
    const SampledKernel k = kernel_input(ctx.load(0));
    const bool ball = k.grid.ambient == Ambient::Ball;
    const auto rep = ball ? dbr_test_ball(k, ctx.tol()) : dbr_test_disc(k, ctx.tol());
    Result r{rep.is_dbr ? "dbr" : "not-dbr", rep.is_dbr, {}};
    r.evidence["test"] = ball ? "ball" : "disc";
    r.evidence["lambda_min"] = rep.lambda_min;
    return r;
}

inline Result do_dbr_ball(Context& ctx) {
    ctx.require_inputs(1, 1);
    const SampledKernel k = kernel_input(ctx.load(0));
    const auto rep = dbr_test_ball(k, ctx.tol());
    Result r{rep.is_dbr ? "dbr" : "not-dbr", rep.is_dbr, {}};
    r.evidence["lambda_min"] = rep.lambda_min;
    return r;
}

inline Result do_dbr_nf(Context& ctx) {
    ctx.require_inputs(1, 1);
    const auto rep = dbr_test_nf(kernel_input(ctx.load(0)), ctx.tol());
    const bool ok = rep.below_szego && rep.szego_quotient;
    Result r{ok ? "pass" : "fail", ok, {}};
    r.evidence["below_szego"] = rep.below_szego;
    r.evidence["szego_quotient"] = rep.szego_quotient;
    r.evidence["lambda_min_below"] = rep.lambda_min_below;
    r.evidence["lambda_min_quotient"] = rep.lambda_min_quotient;
    return r;
}

/// Accepts a sampled kernel, or a realization whose kernel is sampled on --grid first.
inline Result do_dbr_reconstruct(Context& ctx) {
    ctx.require_inputs(1, 1);
    const json j = ctx.load(0);
    Result r;
    SampledKernel k;
    if (j.contains("dims")) {
        k = dbr_kernel(io::theta_from(j), ctx.grid("disc:rand:12"));
        r.evidence["kernel"] = io::to_json(k);
    } else {
        k = kernel_input(j);
    }
    const auto rec = dbr_reconstruct_disc(k, ctx.tol());
    r.verdict = rec.contract_ok ? "reconstructed" : "residual-too-large";
    r.pass = rec.contract_ok;
    r.evidence["theta"] = io::to_json(rec.theta);
    r.evidence["padding"] = rec.padding;
    r.evidence["residual"] = rec.residual;
    return r;
}

inline Result do_dbr_polydisc(Context& ctx) {
    const auto n = ctx.command().inputs.size();
    if (n < 3) {
        fail("UsageError", "dbr-polydisc takes the kernel followed by one kernel per variable");
    }
    const SampledKernel k = kernel_input(ctx.load(0));
    std::vector<SampledKernel> parts;
    for (std::size_t i = 1; i < n; ++i) {
        parts.push_back(kernel_input(ctx.load(i)));
    }
    const auto rep = dbr_test_polydisc(k, parts, ctx.tol());
    Result r{rep.pass ? "pass" : "fail", rep.pass, {}};
    r.evidence["lambda_min_parts"] = rep.lambda_min_parts;
    r.evidence["sum_residual"] = rep.sum_residual;
    r.evidence["lambda_min_hadamard"] = rep.lambda_min_hadamard;
    return r;
}

/// In Rudin form every monomial factor sits in the exponents: the reflected
/// denominator of a trimmed polynomial keeps a nonzero z1^0 row and z2^0 column.
inline Result factor_rational(Context& ctx, const RationalFunction2& f) {
    const double tol = ctx.tol();
    const RationalFunction2 rest(0, 0, f.denominator(), false);
    const cd origin = rest.eval(0.0, 0.0, tol);
    if (std::abs(origin) <= tol) {
        fail("NotDivisible", "after removing z1^" + std::to_string(f.m1()) + " z2^" + std::to_string(f.m2()) +
                                 " the quotient still vanishes at the origin and no further monomial divides it");
    }
    const auto sep = separability_test([rest, tol](const Point& z) { return rest.eval(z(0), z(1), tol); },
                                       ctx.grid("bidisc:rand:30"), tol);
    Result r{sep.separable ? "separable" : "NotSeparable", sep.separable, {}};
    r.evidence["input"] = "rational";
    r.evidence["monomial"] = json::array({f.m1(), f.m2()});
    r.evidence["separability"] = separability_json(sep);
    r.evidence["phi1"] = values_json(sep.phi1);
    r.evidence["phi2"] = values_json(sep.phi2);
    return r;
}

inline Result do_factor(Context& ctx) {
    ctx.require_inputs(1, 1);
    const json j = ctx.load(0);
    if (io::is_rational(j)) {
        return factor_rational(ctx, io::rational_from(j));
    }
    const Colligation v = require_two_variables(j);
    const auto cond = check_condition_4(v, ctx.tol());
    Result r;
    r.evidence["input"] = "colligation";
    r.evidence["condition_4"] = condition_json(cond);
    try {
        r.evidence["separability"] =
            separability_json(separability_test(transfer_function(v, ctx.tol()), ctx.grid("bidisc:rand:30"),
                                                ctx.tol()));
    } catch (const Error& e) {
        if (e.kind() != "OriginZero") {
            throw;
        }
        r.evidence["separability"] = e.what();
    }
    if (!cond.holds) {
        r.verdict = "ConditionFailed: " + cond.failure();
        r.pass = false;
        return r;
    }
    const auto split = split_colligation(v, ctx.tol());
    r.evidence["separable"] = true;
    const json parts = split_json(split);
    for (const auto& [key, value] : parts.items()) {
        r.evidence[key] = value;
    }
    r.verdict = "separable";
    return r;
}

inline Result do_split(Context& ctx) {
    ctx.require_inputs(1, 1);
    const auto split = split_colligation(require_two_variables(ctx.load(0)), ctx.tol());
    return {"split", true, split_json(split)};
}

inline Result do_compose(Context& ctx) {
    ctx.require_inputs(2, 2);
    const Colligation v1 = require_colligation(ctx.load(0));
    const Colligation v2 = require_colligation(ctx.load(1));
    const Colligation v = compose_colligations(v1, v2, ctx.tol());
    Result r{"composed", true, {}};
    r.evidence["colligation"] = io::to_json(v);
    r.evidence["product_residual"] = product_residual(
        v, v1, v2, make_random_grid(Ambient::Bidisc, 2, kCertificatePoints, kCertificateSeed), ctx.tol());
    return r;
}

inline constexpr int kModelPoints = 50;

inline Result do_model(Context& ctx) {
    ctx.require_inputs(1, 1);
    const json j = ctx.load(0);
    if (!io::is_blaschke(j)) {
        fail("SchemaError", "expected a Blaschke product {constant, zeros}");
    }
    const Blaschke b = io::blaschke_from(j);
    const Colligation v = model_colligation(b, ctx.tol());
    const CMatrix m = v.matrix();
    const double unitary = (m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())).norm();
    double worst = 0.0;
    for (const Point& z : ctx.grid("disc:rand:50").points) {
        worst = std::max(worst, std::abs(transfer_1d(v, z(0), ctx.tol()) - b(z(0))));
    }
    const bool ok = unitary <= ctx.tol() && worst <= ctx.tol();
    Result r{ok ? "realized" : "mismatch", ok, {}};
    r.evidence["colligation"] = io::to_json(v);
    r.evidence["unitary_defect"] = unitary;
    r.evidence["reproduction_residual"] = worst;
    return r;
}

inline Result do_strip(Context& ctx) {
    ctx.require_inputs(1, 1);
    const json j = ctx.load(0);
    const int var = ctx.command().variable;
    if (var != 1 && var != 2) {
        fail("UsageError", "--var is 1 or 2");
    }
    Result r{"stripped", true, {}};
    if (io::is_rational(j)) {
        const RationalFunction2 f = io::rational_from(j);
        if (var == 1) {
            const auto s = strip_monomial(f, ctx.tol());
            r.evidence["power"] = s.power;
            r.evidence["reduced"] = io::to_json(s.reduced);
        } else {
            const RationalFunction2 swapped(f.m2(), f.m1(), Poly2(CMatrix(f.denominator().coeffs().transpose())),
                                            false);
            const auto s = strip_monomial(swapped, ctx.tol());
            r.evidence["power"] = s.power;
            r.evidence["reduced"] = io::to_json(RationalFunction2(
                s.reduced.m2(), s.reduced.m1(), Poly2(CMatrix(s.reduced.denominator().coeffs().transpose())), false));
        }
        return r;
    }
    if (!io::is_series(j)) {
        fail("SchemaError", "strip takes a rational function or a series");
    }
    const PowerSeries2 s = io::series_from(j);
    const auto st = var == 1 ? strip_monomial(s, ctx.tol()) : strip_monomial_z2(s, ctx.tol());
    r.evidence["power"] = st.power;
    r.evidence["reduced"] = io::to_json(st.reduced);
    return r;
}

inline Result dispatch(Context& ctx) {
    const std::string& n = ctx.command().name;
    if (n == "eval") return do_eval(ctx);
    if (n == "classify") return do_classify(ctx);
    if (n == "inner-check") return do_inner_check(ctx);
    if (n == "toeplitz-check") return do_toeplitz_check(ctx);
    if (n == "agler-kernels") return do_agler_kernels(ctx);
    if (n == "agler-verify") return do_agler_verify(ctx);
    if (n == "dbr-check") return do_dbr_check(ctx);
    if (n == "dbr-nf-check") return do_dbr_nf(ctx);
    if (n == "dbr-reconstruct") return do_dbr_reconstruct(ctx);
    if (n == "dbr-polydisc") return do_dbr_polydisc(ctx);
    if (n == "dbr-ball") return do_dbr_ball(ctx);
    if (n == "factor") return do_factor(ctx);
    if (n == "compose") return do_compose(ctx);
    if (n == "split") return do_split(ctx);
    if (n == "model") return do_model(ctx);
    if (n == "strip") return do_strip(ctx);
    fail("UsageError", "unknown command \"" + n + "\"");
}

} // namespace detail

inline Outcome run(const Command& cmd) {
    detail::Context ctx(cmd);
    detail::Result res;
    int code = 0;
    try {
        res = detail::dispatch(ctx);
        code = res.pass ? 0 : 1;
    } catch (const Error& e) {
        res = {e.what(), false, json::object()};
        code = detail::is_verdict_failure(e.kind()) ? 1 : 2;
    } catch (const std::exception& e) {
        res = {std::string("InternalError: ") + e.what(), false, json::object()};
        code = 2;
    }
    json report;
    report["command"] = cmd.name;
    report["inputs-digest"] = ctx.digest();
    report["tol"] = cmd.tol;
    report["verdict"] = res.verdict;
    report["evidence"] = res.evidence;
    return {code, report};
}

} // namespace bidisc::cli
