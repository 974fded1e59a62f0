#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "splitkit/io.hpp"
#include "test_support.hpp"

using namespace splitkit;
using namespace testsupport;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("splitkit_test_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(SPLITKIT_CLI_PATH) + " " + args +
                            " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SplittingDesign sample_design() {
    Vec sigma(4, 1.0), lip(3, 0.8);
    PresetBounds b = preset_bounds(PresetKind::DFBR, sigma, lip);
    return dfbr_design(5, sigma, lip, 0.5 * b.d_bar);
}

}  // namespace

TEST_CASE("design files round-trip exactly") {
    auto design = sample_design();
    const std::string text = design_to_json_text(design);
    auto parsed = design_from_json_text(text);
    CHECK(parsed.n == design.n);
    CHECK(parsed.H.data() == design.H.data());
    CHECK(parsed.G.data() == design.G.data());
    CHECK(parsed.P.data() == design.P.data());
    CHECK(parsed.Q.data() == design.Q.data());
    CHECK(parsed.R.data() == design.R.data());
    CHECK(parsed.K.data() == design.K.data());
    CHECK(parsed.M->data() == design.M->data());
    CHECK(parsed.sigma == design.sigma);
    CHECK(parsed.lip == design.lip);
    CHECK(design_to_json_text(parsed) == text);
}

TEST_CASE("designs without K rebuild it on load") {
    auto rng = make_rng(61);
    const int n = 5, m = 4, l = 3;
    auto pat = default_patterns(n, m, l);
    auto mats = random_design(n, m, l, pat, {}, 4);
    SplittingDesign d;
    d.n = n;
    d.m = m;
    d.l = l;
    d.laplacian = laplacian_complete(n);
    d.H = mats.H;
    d.G = mats.G;
    d.P = mats.P;
    d.Q = mats.Q;
    d.R = mats.R;
    d.pattern_HG = pat.hg;
    d.pattern_E = pat.e;
    d.pattern_F = pat.f;
    Vec sigma = random_vec(rng, m, 0.5, 2.0);
    Vec lip = random_vec(rng, l, 0.5, 2.0);
    build_K(d, sigma, lip);

    SplittingDesign stripped = d;
    stripped.has_K = false;
    stripped.K = Matrix();
    std::string text = design_to_json_text(stripped);
    auto parsed = design_from_json_text(text);
    CHECK(parsed.has_K);
    Matrix diff = parsed.K;
    diff -= d.K;
    CHECK(diff.max_abs() < 1e-14);
}

TEST_CASE("trace CSV format") {
    TempDir tmp;
    RunTrace trace;
    TraceRecord a;
    a.iter = 0;
    a.residual = 1.25;
    a.consensus = 0.5;
    a.metric = 3.0;
    trace.records.push_back(a);
    TraceRecord b;
    b.iter = 1;
    b.residual = 0.25;
    b.consensus = 0.125;
    trace.records.push_back(b);
    const std::string path = tmp.file("trace.csv");
    write_trace_csv(trace, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,residual,consensus,metric,fejer");
    std::getline(in, line);
    CHECK(line == "0,1.25,0.5,3,");
    std::getline(in, line);
    CHECK(line == "1,0.25,0.125,,");
}

TEST_CASE("cli validate") {
    TempDir tmp;
    auto design = sample_design();
    const std::string good = tmp.file("good.json");
    save_design(design, good);
    CHECK(run_cli("validate " + good) == 0);

    SUBCASE("broken column sum exits 1") {
        auto bad = design;
        bad.H(1, 0) = 0.5;
        const std::string file = tmp.file("bad.json");
        save_design(bad, file);
        CHECK(run_cli("validate " + file) == 1);
    }
    SUBCASE("malformed file exits 2") {
        const std::string file = tmp.file("broken.json");
        std::ofstream(file) << "{ not json";
        CHECK(run_cli("validate " + file) == 2);
        CHECK(run_cli("validate " + tmp.file("missing.json")) == 2);
    }
}

TEST_CASE("cli run on the game family") {
    TempDir tmp;
    nlohmann::json cfg;
    cfg["problem"] = {{"family", "game"}, {"n", 3},     {"m", 2},
                      {"l", 1},           {"dim", 3},   {"distribution", "uniform"},
                      {"seed", 4},        {"scaling", "none"}};
    cfg["method"] = {{"preset", "SDYR"}, {"d_frac", 0.9}, {"gamma", 0.5}};
    cfg["run"] = {{"max_iter", 40000}, {"tol", 1e-8}, {"metric", "gap"}, {"metric_every", 10}};
    cfg["output"] = {{"trace", tmp.file("trace.csv")}, {"summary", tmp.file("summary.json")}};
    const std::string cfg_path = tmp.file("config.json");
    std::ofstream(cfg_path) << cfg.dump(2);

    CHECK(run_cli("run " + cfg_path) == 0);
    const std::string trace1 = slurp(tmp.file("trace.csv"));
    CHECK(!trace1.empty());
    auto summary = nlohmann::json::parse(slurp(tmp.file("summary.json")));
    CHECK(summary["converged"].get<bool>());

    SUBCASE("gap metric trends downward") {
        std::istringstream in(trace1);
        std::string line;
        std::getline(in, line);  // header
        double first = -1.0, last = -1.0;
        while (std::getline(in, line)) {
            std::stringstream row(line);
            std::string field;
            for (int c = 0; c <= 3; ++c) std::getline(row, field, ',');
            if (!field.empty()) {
                const double g = std::stod(field);
                if (first < 0.0) first = g;
                last = g;
            }
        }
        REQUIRE(first >= 0.0);
        CHECK(last < first);
    }
    SUBCASE("same config gives a byte-identical trace") {
        CHECK(run_cli("run " + cfg_path) == 0);
        CHECK(slurp(tmp.file("trace.csv")) == trace1);
    }
    SUBCASE("missing design file exits 2") {
        cfg["method"] = {{"design_file", tmp.file("nope.json")}};
        const std::string cfg2 = tmp.file("config2.json");
        std::ofstream(cfg2) << cfg.dump(2);
        CHECK(run_cli("run " + cfg2) == 2);
    }
}

TEST_CASE("cli select") {
    TempDir tmp;
    nlohmann::json pats;
    pats["n"] = 3;
    pats["m"] = 2;
    pats["l"] = 1;
    pats["pattern_HG"] = {0, 1, 2};
    pats["pattern_E"] = {0, 1, 1};
    pats["pattern_F"] = {0, 0, 1};
    const std::string pat_path = tmp.file("patterns.json");
    std::ofstream(pat_path) << pats.dump(2);

    const std::string out = tmp.file("design.json");
    const std::string args = "select " + pat_path + " --sigma 1.0,0.5 --lip 0.8 --iters 400 -o " + out;
    CHECK(run_cli(args) == 0);
    CHECK(run_cli("validate " + out) == 0);

    SUBCASE("forced P,Q,R match the unique feasible point") {
        auto d = load_design(out);
        CHECK(d.P(1, 0) == 1.0);
        CHECK(d.Q(2, 0) == 1.0);
        CHECK(d.R(0, 0) == 1.0);
    }
    SUBCASE("repeated invocation writes an identical file") {
        const std::string text1 = slurp(out);
        CHECK(run_cli(args) == 0);
        CHECK(slurp(out) == text1);
    }
    SUBCASE("malformed patterns exit 2") {
        std::ofstream(pat_path) << "still not json";
        CHECK(run_cli(args) == 2);
    }
}

TEST_CASE("cli bench writes the comparison table") {
    TempDir tmp;
    nlohmann::json suite;
    suite["problem"] = {{"family", "game"}, {"n", 3}, {"m", 2}, {"l", 1}, {"dim", 3}};
    suite["settings"] = {"uniform"};
    suite["seeds"] = {1, 2};
    suite["epsilons"] = {1e-2, 1e30};
    suite["methods"] = {"SDYR"};
    suite["method_params"] = {{"d_frac", 0.9}};
    suite["max_iter"] = 20000;
    suite["metric_every"] = 5;
    suite["output"] = tmp.file("bench.csv");
    const std::string path = tmp.file("suite.json");
    std::ofstream(path) << suite.dump(2);

    CHECK(run_cli("bench " + path, "SPLITKIT_THREADS=2") == 0);
    std::istringstream in(slurp(tmp.file("bench.csv")));
    std::string line;
    std::getline(in, line);
    CHECK(line == "setting,epsilon,SDYR");
    // one row per epsilon; the absurd threshold is met at the first record
    std::getline(in, line);
    CHECK(line.rfind("uniform,0.01,", 0) == 0);
    std::getline(in, line);
    CHECK(line.rfind("uniform,1e+30,", 0) == 0);
    CHECK(line.substr(line.rfind(',') + 1) == "0");
}

TEST_CASE("resolve_method rejects an uncertifiable design") {
    auto design = sample_design();
    design.K *= 0.01;
    for (int i = 0; i < design.n; ++i) {
        design.d[i] = 2.0 / design.K(i, i);
        for (int j = 0; j < i; ++j) design.N(i, j) = -design.K(i, j);
    }
    TempDir tmp;
    const std::string file = tmp.file("bad.json");
    save_design(design, file);
    MethodSpec spec;
    spec.design_file = file;
    CHECK_THROWS_AS(resolve_method(spec, design.sigma, design.lip, 5, 4, 3), ValidationError);
}
