#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <gtest/gtest.h>

#include <bidisc/cli.hpp>

#include "support.hpp"

namespace {

using namespace bidisc;
using bidisc::cli::Command;
using bidisc::io::json;

std::string sample(const std::string& name) { return std::string(BIDISC_SAMPLES_DIR) + "/" + name; }

cli::Outcome run(const std::string& name, std::vector<std::string> inputs, std::optional<std::string> grid = {}) {
    Command c;
    c.name = name;
    for (auto& i : inputs) {
        i = sample(i);
    }
    c.inputs = std::move(inputs);
    c.grid = std::move(grid);
    return cli::run(c);
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "bidisc_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write(const std::filesystem::path& p, const json& j) { std::ofstream(p) << j.dump(); }

std::string capture(const std::string& cmdline, int* status) {
    std::string out;
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmdline.c_str(), "r"), pclose);
    std::array<char, 4096> buf{};
    for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0;) {
        out.append(buf.data(), n);
    }
    const int raw = pclose(pipe.release());
    *status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

TEST(Cli, InnerCheckPermutationIsCertified) {
    const auto o = run("inner-check", {"permutation.json"});
    EXPECT_EQ(o.exit_code, 0);
    EXPECT_EQ(o.report["verdict"], "certified");
}

TEST(Cli, FactorOnVtFailsCondition) {
    const auto o = run("factor", {"vt_0.5.json"});
    EXPECT_EQ(o.exit_code, 1);
    EXPECT_EQ(o.report["verdict"], "ConditionFailed: lower-left block nonzero");
}

TEST(Cli, EvalPhiTAtOrigin) {
    for (const char* file : {"phi_t_0.5.json", "vt_0.5.json"}) {
        const auto o = run("eval", {file});
        ASSERT_EQ(o.exit_code, 0) << file;
        const cd v = io::complex_from(o.report["evidence"]["values"][0], "value");
        EXPECT_NEAR(std::abs(v - cd(-0.5)), 0.0, 1e-15) << file;
    }
}

TEST(Cli, ReportAlwaysHasTheFiveFields) {
    for (const auto& o : {run("inner-check", {"vt_0.5.json"}), run("eval", {"missing.json"}),
                          run("classify", {"phi_t_0.5.json"})}) {
        for (const char* key : {"command", "inputs-digest", "tol", "verdict", "evidence"}) {
            EXPECT_TRUE(o.report.contains(key)) << key;
        }
    }
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("inner-check", {"vt_0.5.json"}).exit_code, 1);
    EXPECT_EQ(run("inner-check", {"vt_0.5.json"}).report["verdict"], "inconclusive");
    EXPECT_EQ(run("eval", {"missing.json"}).exit_code, 2);
    EXPECT_EQ(run("classify", {"phi_t_0.5.json"}).exit_code, 2);  // SchemaError
    EXPECT_EQ(run("eval", {"vt_0.5.json"}, "bidisc:nope").exit_code, 2);
    EXPECT_EQ(run("frobnicate", {}).exit_code, 2);
    EXPECT_EQ(run("dbr-check", {"szego2_disc.json"}).exit_code, 1);
    EXPECT_EQ(run("dbr-check", {"theta_kernel.json"}).exit_code, 0);
    EXPECT_EQ(run("strip", {"z1z2_rational.json"}).exit_code, 1);  // NotDivisible
}

TEST(Cli, ErrorVerdictNamesTheKind) {
    const auto o = run("classify", {"phi_t_0.5.json"});
    EXPECT_EQ(o.report["verdict"].get<std::string>().rfind("SchemaError: ", 0), 0u);
    const auto p = run("eval", {"missing.json"});
    EXPECT_EQ(p.report["verdict"].get<std::string>().rfind("ParseError: ", 0), 0u);
}

TEST(Cli, FactorPaths) {
    const auto comp = run("factor", {"composed.json"});
    EXPECT_EQ(comp.exit_code, 0);
    EXPECT_EQ(comp.report["verdict"], "separable");
    for (const char* key : {"separable", "V1", "V2", "certificate"}) {
        EXPECT_TRUE(comp.report["evidence"].contains(key)) << key;
    }
    EXPECT_LE(comp.report["evidence"]["certificate"].get<double>(), 1e-9);

    EXPECT_EQ(run("factor", {"separable_rational.json"}).exit_code, 0);
    const auto phi = run("factor", {"phi_t_0.5.json"});
    EXPECT_EQ(phi.exit_code, 1);
    EXPECT_EQ(phi.report["verdict"], "NotSeparable");
    const auto mono = run("factor", {"z1z2_rational.json"});
    EXPECT_EQ(mono.exit_code, 0);
    EXPECT_EQ(mono.report["evidence"]["monomial"], json::array({1, 1}));
}

TEST(Cli, FactorReportsNotDivisibleWhenNoMonomialSplitsOff) {
    // p = 3 - z1 - z2: its reflection -z1 - z2 + 3 z1 z2 vanishes at 0 and is
    // divisible by neither variable.
    CMatrix c = CMatrix::Zero(2, 2);
    c(0, 0) = 3.0;
    c(1, 0) = -1.0;
    c(0, 1) = -1.0;
    const auto path = scratch("no_monomial.json");
    write(path, io::to_json(RationalFunction2(0, 0, Poly2(c))));
    Command cmd{"factor", {path.string()}};
    const auto o = cli::run(cmd);
    EXPECT_EQ(o.exit_code, 1);
    EXPECT_EQ(o.report["verdict"].get<std::string>().rfind("NotDivisible", 0), 0u);
}

TEST(Cli, ToeplitzEvidenceBundle) {
    const auto o = run("toeplitz-check", {"vt_0.5.json"});
    EXPECT_EQ(o.exit_code, 0);
    const auto& e = o.report["evidence"];
    for (const char* key : {"structure", "radii", "boundary_deviation", "isometry_defect_by_M"}) {
        EXPECT_TRUE(e.contains(key)) << key;
    }
    const double d8 = e["isometry_defect_by_M"]["8"];
    const double d32 = e["isometry_defect_by_M"]["32"];
    EXPECT_LT(d32, d8);
}

TEST(Cli, AglerPipeline) {
    Command make{"agler-kernels", {sample("vt_0.5.json")}};
    make.grid = "bidisc:rand:12:seed=7";
    const auto kernels = cli::run(make);
    ASSERT_EQ(kernels.exit_code, 0);
    const auto path = scratch("vt_kernels.json");
    write(path, kernels.report);
    EXPECT_EQ(cli::run({"agler-verify", {sample("phi_t_0.5.json"), path.string()}}).exit_code, 0);
    const auto wrong = cli::run({"agler-verify", {sample("permutation.json"), path.string()}});
    EXPECT_EQ(wrong.exit_code, 1);
    EXPECT_EQ(wrong.report["verdict"], "refuted");
}

TEST(Cli, DbrKernelRoundTrip) {
    const auto rec = run("dbr-reconstruct", {"theta_kernel.json"});
    ASSERT_EQ(rec.exit_code, 0);
    const auto theta = io::theta_from(rec.report["evidence"]["theta"]);
    const auto k = io::kernel_from(io::parse_text(
        [] {
            std::ifstream in(sample("theta_kernel.json"));
            return std::string(std::istreambuf_iterator<char>(in), {});
        }(),
        "theta_kernel.json"));
    EXPECT_LE(max_kernel_difference(k, dbr_kernel(theta, k.grid)), 1e-7);
}

TEST(Cli, PolydiscAndNf) {
    EXPECT_EQ(run("dbr-polydisc", {"szego_polydisc2.json", "szego_polydisc2_part1.json", "szego_polydisc2_part2.json"})
                  .exit_code,
              0);
    const auto nf = run("dbr-nf-check", {"szego2_disc.json"});
    EXPECT_EQ(nf.exit_code, 1);
    EXPECT_FALSE(nf.report["evidence"]["below_szego"].get<bool>());
    EXPECT_TRUE(nf.report["evidence"]["szego_quotient"].get<bool>());
}

TEST(Cli, ModelComposeSplit) {
    EXPECT_EQ(run("model", {"blaschke.json"}).exit_code, 0);
    const auto comp = run("compose", {"model_mobius_0.4.json", "model_blaschke_deg2.json"});
    ASSERT_EQ(comp.exit_code, 0);
    EXPECT_LE(comp.report["evidence"]["product_residual"].get<double>(), 1e-12);
    const auto split = run("split", {"composed.json"});
    ASSERT_EQ(split.exit_code, 0);
    const Colligation v1 = io::colligation_from(split.report["evidence"]["V1"]);
    EXPECT_EQ(v1.variables(), 1);
}

TEST(Cli, GridSpecs) {
    using cli::detail::Context;
    EXPECT_EQ(Context::parse_grid_spec("torus2:4", 1).size(), 16u);
    const auto r = Context::parse_grid_spec("bidisc:rand:40:seed=7", 1);
    const auto ref = make_random_grid(Ambient::Bidisc, 2, 40, 7);
    ASSERT_EQ(r.size(), ref.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        EXPECT_EQ(r.points[i], ref.points[i]);
    }
    const auto p = Context::parse_grid_spec("product:8x8", 3);
    EXPECT_EQ(p.size(), 64u);
    EXPECT_EQ(p.points[0], point2(0.0, 0.0));
    EXPECT_EQ(Context::parse_grid_spec("ball-3:rand:5", 1).dim, 3);
    for (const char* bad : {"torus2", "torus2:0", "bidisc:rand:4:seed=x", "product:8", "sphere:rand:3"}) {
        EXPECT_THROW(Context::parse_grid_spec(bad, 1), Error) << bad;
    }
}

TEST(Cli, ToleranceFromEnvironment) {
    ::setenv("BIDISC_SCHUR_TOL", "1e-6", 1);
    EXPECT_EQ(cli::default_tol(), 1e-6);
    ::setenv("BIDISC_SCHUR_TOL", "junk", 1);
    EXPECT_EQ(cli::default_tol(), kDefaultTol);
    ::unsetenv("BIDISC_SCHUR_TOL");
    EXPECT_EQ(cli::default_tol(), kDefaultTol);
}

TEST(Cli, DigestTracksInputsAndOptions) {
    const auto a = run("eval", {"vt_0.5.json"});
    const auto b = run("eval", {"permutation.json"});
    Command c{"eval", {sample("vt_0.5.json")}};
    c.tol = 1e-8;
    EXPECT_NE(a.report["inputs-digest"], b.report["inputs-digest"]);
    EXPECT_NE(a.report["inputs-digest"], cli::run(c).report["inputs-digest"]);
    EXPECT_EQ(a.report["inputs-digest"], run("eval", {"vt_0.5.json"}).report["inputs-digest"]);
}

TEST(Cli, BinaryOutputIsDeterministic) {
    const std::string base = std::string(BIDISC_TOOL) + " ";
    for (const std::string args : {"agler-kernels " + sample("vt_0.5.json") + " --grid bidisc:rand:8 --seed 11",
                                   "toeplitz-check " + sample("phi_t_0.5.json"),
                                   "factor " + sample("composed.json")}) {
        int s1 = -1;
        int s2 = -1;
        const std::string first = capture(base + args + " 2>/dev/null", &s1);
        const std::string second = capture(base + args + " 2>/dev/null", &s2);
        EXPECT_EQ(s1, 0) << args;
        EXPECT_EQ(s1, s2);
        EXPECT_FALSE(first.empty());
        EXPECT_EQ(first, second) << args;
    }
}

TEST(Cli, BinaryExitCodes) {
    const std::string base = std::string(BIDISC_TOOL) + " ";
    int s = -1;
    const std::string out = capture(base + "inner-check " + sample("permutation.json") + " 2>/dev/null", &s);
    EXPECT_EQ(s, 0);
    EXPECT_EQ(json::parse(out)["verdict"], "certified");
    capture(base + "factor " + sample("vt_0.5.json") + " 2>/dev/null", &s);
    EXPECT_EQ(s, 1);
    capture(base + "eval /no/such/file.json 2>/dev/null", &s);
    EXPECT_EQ(s, 2);
    capture(base + "bogus 2>/dev/null", &s);
    EXPECT_EQ(s, 2);
}

TEST(Cli, OutFlagWritesTheReport) {
    const auto path = scratch("out_report.json");
    std::filesystem::remove(path);
    int s = -1;
    const std::string stdout_text = capture(std::string(BIDISC_TOOL) + " eval " + sample("phi_t_0.5.json") +
                                                " --out " + path.string() + " 2>/dev/null",
                                            &s);
    EXPECT_EQ(s, 0);
    EXPECT_TRUE(stdout_text.empty());
    std::ifstream in(path);
    const json j = json::parse(in);
    EXPECT_EQ(j["verdict"], "evaluated");
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

template <class T, class Parse>
T reparse(const T& value, Parse parse) {
    return parse(json::parse(io::to_json(value).dump()));
}

TEST(JsonIo, ColligationRoundTripIsExact) {
    UnitRng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pair = bidisc::testing::random_blaschke_pair(rng, 3, 0.9, trial % 2 == 0);
        const Colligation back = reparse(pair.v, io::colligation_from);
        EXPECT_EQ(back.matrix(), pair.v.matrix());
        EXPECT_EQ(back.partition(), pair.v.partition());
    }
    const Colligation empty(cd(0.6, -0.8), CMatrix(1, 0), CMatrix(0, 1), CMatrix(0, 0), {0, 0});
    const Colligation back = reparse(empty, io::colligation_from);
    EXPECT_EQ(back.a(), empty.a());
    EXPECT_EQ(back.h(), 0);
}

TEST(JsonIo, OtherTypesRoundTrip) {
    UnitRng rng(17);
    const Blaschke b = bidisc::testing::random_blaschke(rng, 4, 0.9, true);
    const Blaschke bb = reparse(b, io::blaschke_from);
    EXPECT_EQ(bb.constant, b.constant);
    EXPECT_EQ(bb.zeros, b.zeros);

    CMatrix c = bidisc::testing::random_matrix(rng, 3, 2);
    c(0, 0) = 4.0;
    const RationalFunction2 f(1, 2, Poly2(c), false);
    const RationalFunction2 fb = reparse(f, io::rational_from);
    EXPECT_EQ(fb.denominator().coeffs(), f.denominator().coeffs());
    EXPECT_EQ(fb.m1(), 1);
    EXPECT_EQ(fb.m2(), 2);

    const PowerSeries2 s{bidisc::testing::random_matrix(rng, 4, 5)};
    EXPECT_EQ(reparse(s, io::series_from).coeffs, s.coeffs);

    for (const PointGrid& g : {make_random_grid(Ambient::Ball, 3, 5, 2), make_torus_grid(3)}) {
        const PointGrid gb = reparse(g, io::grid_from);
        EXPECT_EQ(gb.ambient, g.ambient);
        EXPECT_EQ(gb.dim, g.dim);
        EXPECT_EQ(gb.points, g.points);
    }

    const ThetaRealization t{bidisc::testing::random_matrix(rng, 2, 3), bidisc::testing::random_matrix(rng, 2, 4),
                             bidisc::testing::random_matrix(rng, 4, 3), bidisc::testing::random_matrix(rng, 4, 4)};
    const ThetaRealization tb = reparse(t, io::theta_from);
    EXPECT_EQ(tb.transfer_matrix(), t.transfer_matrix());

    const SampledKernel k = szego_kernel(make_random_grid(Ambient::Disc, 1, 4, 8));
    const SampledKernel kb = reparse(k, io::kernel_from);
    EXPECT_EQ(max_kernel_difference(k, kb), 0.0);
}

TEST(JsonIo, EmittedReportsReparse) {
    const auto o = run("split", {"composed.json"});
    const json again = json::parse(o.report.dump());
    EXPECT_EQ(again, o.report);
    const Colligation v2 = io::colligation_from(again["evidence"]["V2"]);
    EXPECT_EQ(io::to_json(v2), o.report["evidence"]["V2"]);
}

TEST(JsonIo, SchemaErrors) {
    auto kind = [](const std::string& text, auto parse) {
        try {
            parse(io::parse_text(text, "inline"));
        } catch (const Error& e) {
            return e.kind();
        }
        return std::string("none");
    };
    EXPECT_EQ(kind("{", io::colligation_from), "ParseError");
    EXPECT_EQ(kind(R"({"a":[0,0],"B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]]})", io::colligation_from), "SchemaError");
    EXPECT_EQ(kind(R"({"a":"0","B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]],"partition":[1]})", io::colligation_from),
              "SchemaError");
    EXPECT_EQ(kind(R"({"a":[0,0],"B":[[[1,0],[0,0]]],"C":[[[1,0]]],"D":[[[0,0]]],"partition":[1]})",
                   io::colligation_from),
              "SchemaError");
    EXPECT_EQ(kind(R"({"a":[0,0],"B":[[[1,0]]],"C":[[[1,0]]],"D":[[[0,0]]],"partition":[2]})", io::colligation_from),
              "InvalidPartition");
    EXPECT_EQ(kind(R"({"deg":[1,0],"coeffs":[[[1,0]]]})", io::series_from), "SchemaError");
    EXPECT_EQ(kind(R"({"ambient":"bidisc","points":[[[0,0]]]})", io::grid_from), "SchemaError");
    EXPECT_EQ(kind(R"({"ambient":"annulus","points":[]})", io::grid_from), "SchemaError");
    EXPECT_EQ(kind(R"({"grid":{"ambient":"disc","points":[[[0,0]]]},"dim":1,"values":[]})", io::kernel_from),
              "SchemaError");
}

} // namespace
