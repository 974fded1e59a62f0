#include "splitkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace splitkit {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& A) {
    json rows = json::array();
    for (int i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < A.cols(); ++j) row.push_back(A(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j, int rows, int cols, const std::string& what) {
    Matrix A(rows, cols);
    if (!j.is_array()) throw std::invalid_argument(what + ": expected an array of rows");
    if (rows == 0 || cols == 0) return A;
    if (static_cast<int>(j.size()) != rows) throw std::invalid_argument(what + ": wrong row count");
    for (int i = 0; i < rows; ++i) {
        const json& row = j[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw std::invalid_argument(what + ": wrong column count in row " + std::to_string(i + 1));
        for (int jj = 0; jj < cols; ++jj) A(i, jj) = row[jj].get<double>();
    }
    return A;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

json parse(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(what + ": " + e.what());
    }
}

}  // namespace

SplittingDesign design_from_json_text(const std::string& text) {
    json j = parse(text, "design file");
    SplittingDesign d;
    d.n = j.at("n").get<int>();
    d.m = j.at("m").get<int>();
    d.l = j.at("l").get<int>();
    d.sigma = j.at("sigma").get<Vec>();
    d.lip = j.at("lip").get<Vec>();
    if (j.contains("M") && !j["M"].is_null()) d.M = matrix_from_json(j["M"], d.n, d.n - 1, "M");
    if (j.contains("laplacian") && !j["laplacian"].is_null())
        d.laplacian = matrix_from_json(j["laplacian"], d.n, d.n, "laplacian");
    if (j.contains("U") && !j["U"].is_null()) {
        const json& u = j["U"];
        const int t = u.empty() ? 0 : static_cast<int>(u[0].size());
        d.U = matrix_from_json(u, d.n, t, "U");
    }
    d.H = matrix_from_json(j.at("H"), d.n, d.m, "H");
    d.G = matrix_from_json(j.at("G"), d.m, d.n, "G");
    d.P = matrix_from_json(j.at("P"), d.n, d.l, "P");
    d.Q = matrix_from_json(j.at("Q"), d.n, d.l, "Q");
    d.R = matrix_from_json(j.at("R"), d.l, d.n, "R");
    d.pattern_HG = j.at("pattern_HG").get<StaircaseVector>();
    d.pattern_E = j.at("pattern_E").get<StaircaseVector>();
    d.pattern_F = j.at("pattern_F").get<StaircaseVector>();
    if (j.contains("K") && !j["K"].is_null()) {
        d.K = matrix_from_json(j["K"], d.n, d.n, "K");
        d.N = Matrix(d.n, d.n);
        d.d.assign(d.n, 0.0);
        for (int i = 0; i < d.n; ++i) {
            if (!(d.K(i, i) > 0.0)) throw std::invalid_argument("design file: K has a nonpositive diagonal entry");
            d.d[i] = 2.0 / d.K(i, i);
            for (int jj = 0; jj < i; ++jj) d.N(i, jj) = -d.K(i, jj);
        }
        d.has_K = true;
        d.check_shapes();
    } else {
        build_K(d, d.sigma, d.lip);
    }
    return d;
}

std::string design_to_json_text(const SplittingDesign& design) {
    json j;
    j["n"] = design.n;
    j["m"] = design.m;
    j["l"] = design.l;
    j["sigma"] = design.sigma;
    j["lip"] = design.lip;
    if (design.M) j["M"] = matrix_to_json(*design.M);
    if (design.laplacian) j["laplacian"] = matrix_to_json(*design.laplacian);
    if (design.U) j["U"] = matrix_to_json(*design.U);
    j["H"] = matrix_to_json(design.H);
    j["G"] = matrix_to_json(design.G);
    j["P"] = matrix_to_json(design.P);
    j["Q"] = matrix_to_json(design.Q);
    j["R"] = matrix_to_json(design.R);
    j["pattern_HG"] = design.pattern_HG;
    j["pattern_E"] = design.pattern_E;
    j["pattern_F"] = design.pattern_F;
    if (design.has_K) j["K"] = matrix_to_json(design.K);
    return j.dump(2) + "\n";
}

SplittingDesign load_design(const std::string& path) { return design_from_json_text(read_file(path)); }

void save_design(const SplittingDesign& design, const std::string& path) {
    write_file(path, design_to_json_text(design));
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace: " + path);
    out << "iter,residual,consensus,metric,fejer\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : trace.records) {
        out << r.iter << ',' << fmt(r.residual) << ',' << fmt(r.consensus) << ',';
        if (r.metric) out << fmt(*r.metric);
        out << ',';
        if (r.fejer) out << fmt(*r.fejer);
        out << '\n';
    }
}

namespace {

ProblemSpec problem_spec_from_json(const json& j) {
    ProblemSpec p;
    p.family = j.at("family").get<std::string>();
    p.n = j.at("n").get<int>();
    p.m = j.at("m").get<int>();
    p.l = j.at("l").get<int>();
    p.dim = j.at("dim").get<int>();
    if (j.contains("distribution")) p.distribution = j["distribution"].get<std::string>();
    if (j.contains("scaling")) p.scaling = j["scaling"].get<std::string>();
    if (j.contains("delta1")) p.delta1 = j["delta1"].get<double>();
    if (j.contains("delta2")) p.delta2 = j["delta2"].get<double>();
    if (j.contains("seed")) p.seed = j["seed"].get<unsigned>();
    return p;
}

MethodSpec method_spec_from_json(const json& j) {
    MethodSpec m;
    if (j.contains("preset")) m.preset = j["preset"].get<std::string>();
    if (j.contains("design_file")) m.design_file = j["design_file"].get<std::string>();
    if (j.contains("d")) m.d = j["d"].get<double>();
    if (j.contains("d_frac")) m.d_frac = j["d_frac"].get<double>();
    if (j.contains("lambda")) m.lambda = j["lambda"].get<double>();
    if (j.contains("gamma")) m.gamma = j["gamma"].get<double>();
    if (j.contains("mode")) m.mode = j["mode"].get<std::string>();
    if (j.contains("select_iters")) m.select_iters = j["select_iters"].get<long>();
    if (j.contains("select_step")) m.select_step = j["select_step"].get<double>();
    return m;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    json j = parse(read_file(path), "config file");
    ExperimentConfig c;
    c.problem = problem_spec_from_json(j.at("problem"));
    c.method = method_spec_from_json(j.at("method"));
    if (j.contains("run")) {
        const json& r = j["run"];
        if (r.contains("max_iter")) c.run.max_iter = r["max_iter"].get<long>();
        if (r.contains("tol")) c.run.tol = r["tol"].get<double>();
        if (r.contains("metric")) c.run.metric = r["metric"].get<std::string>();
        if (r.contains("metric_every")) c.run.metric_every = r["metric_every"].get<long>();
        if (r.contains("gap_tol")) c.run.gap_tol = r["gap_tol"].get<double>();
    }
    const json& o = j.at("output");
    if (o.contains("trace")) c.trace_path = o["trace"].get<std::string>();
    if (o.contains("summary")) c.summary_path = o["summary"].get<std::string>();
    return c;
}

BenchSuite load_bench_suite(const std::string& path) {
    json j = parse(read_file(path), "suite file");
    BenchSuite s;
    s.problem = problem_spec_from_json(j.at("problem"));
    s.settings = j.at("settings").get<std::vector<std::string>>();
    s.seeds = j.at("seeds").get<std::vector<unsigned>>();
    s.epsilons = j.at("epsilons").get<std::vector<double>>();
    s.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("method_params")) s.method_params = method_spec_from_json(j["method_params"]);
    if (j.contains("max_iter")) s.max_iter = j["max_iter"].get<long>();
    if (j.contains("metric_every")) s.metric_every = j["metric_every"].get<long>();
    if (j.contains("gap_tol")) s.gap_tol = j["gap_tol"].get<double>();
    s.output = j.at("output").get<std::string>();
    return s;
}

PatternFile load_patterns(const std::string& path) {
    json j = parse(read_file(path), "patterns file");
    PatternFile p;
    p.n = j.at("n").get<int>();
    p.m = j.at("m").get<int>();
    p.l = j.at("l").get<int>();
    p.patterns.hg = j.at("pattern_HG").get<StaircaseVector>();
    p.patterns.e = j.at("pattern_E").get<StaircaseVector>();
    p.patterns.f = j.at("pattern_F").get<StaircaseVector>();
    return p;
}

BuiltProblem build_problem(const ProblemSpec& spec) {
    BuiltProblem built;
    if (spec.family == "huber") {
        HuberScaling scaling = spec.scaling == "heterogeneous" ? HuberScaling::heterogeneous : HuberScaling::none;
        auto inst = make_huber_problem(spec.n, spec.m, spec.l, spec.dim, spec.delta1, spec.delta2, scaling, spec.seed);
        built.ops = std::move(inst.ops);
        built.huber = inst.problem;
        HuberProblem p = *built.huber;
        built.objective = [p](const Vec& x) { return huber_objective(p, x); };
    } else if (spec.family == "game") {
        auto inst = make_game_problem(spec.n, spec.m, spec.l, spec.dim,
                                      game_distribution_from_name(spec.distribution), spec.seed);
        built.ops = std::move(inst.ops);
        built.game = inst.problem;
    } else {
        throw std::invalid_argument("unknown problem family: " + spec.family);
    }
    return built;
}

ResolvedMethod resolve_method(const MethodSpec& method, const Vec& sigma, const Vec& lip, int n, int m, int l) {
    ResolvedMethod out;
    if (!method.design_file.empty() && method.preset.empty()) {
        out.design = load_design(method.design_file);
        out.name = method.design_file;
        out.mode = out.design.laplacian && !out.design.M ? GovernorMode::lifted : GovernorMode::base;
    } else if (method.preset == "CRFB" || method.preset == "crfb") {
        UpsilonOptions opts;
        opts.iters = method.select_iters;
        opts.step = method.select_step;
        out.design = crfb_design(n, m, l, sigma, lip, default_patterns(n, m, l), opts);
        out.name = "CRFB";
        out.mode = GovernorMode::lifted;
    } else {
        const PresetKind kind = preset_from_name(method.preset);
        PresetBounds b = preset_bounds(kind, sigma, lip);
        const double d = method.d > 0.0 ? method.d : method.d_frac * b.d_bar;
        out.design = preset_design(kind, n, sigma, lip, d, method.lambda);
        out.name = preset_name(kind);
        out.mode = GovernorMode::base;
    }
    if (method.mode == "base")
        out.mode = GovernorMode::base;
    else if (method.mode == "lifted")
        out.mode = GovernorMode::lifted;

    auto cert = validate_assumption(out.design, sigma, lip);
    if (!cert.pass())
        throw ValidationError("method '" + out.name + "' fails design validation:\n" + cert.report());
    return out;
}

}  // namespace splitkit
