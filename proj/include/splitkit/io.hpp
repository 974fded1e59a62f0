#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "splitkit/framework.hpp"
#include "splitkit/presets.hpp"
#include "splitkit/problems.hpp"

namespace splitkit {

/// A method resolved to a design that fails certification.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Design file: JSON with n, m, l, sigma, lip, the matrices as nested row
/// arrays, the three pattern vectors, optional M / laplacian / U / K.
/// Loading without K rebuilds it from the standard construction.
SplittingDesign load_design(const std::string& path);
void save_design(const SplittingDesign& design, const std::string& path);

SplittingDesign design_from_json_text(const std::string& text);
std::string design_to_json_text(const SplittingDesign& design);

void write_trace_csv(const RunTrace& trace, const std::string& path);

struct ProblemSpec {
    std::string family;  // "huber" | "game"
    int n = 0, m = 0, l = 0, dim = 2;
    std::string distribution = "uniform";  // game families
    std::string scaling = "none";          // huber families
    double delta1 = 1.0;
    double delta2 = 2.0;
    unsigned seed = 0;
};

struct MethodSpec {
    std::string preset;       // "CRFB" | "DFBR" | "PDYR" | "SDYR" | "" (file)
    std::string design_file;  // used when preset is empty
    double d = -1.0;          // absolute stepsize, or
    double d_frac = 0.9;      // fraction of the computed bound
    double lambda = -1.0;     // <= 0 picks the half-slack default
    double gamma = 0.5;
    std::string mode;         // "base" | "lifted" | "" (preset default)
    long select_iters = 2000;
    double select_step = 1.0;
};

struct RunSpec {
    long max_iter = 10000;
    double tol = 1e-8;
    std::string metric = "none";  // "objective" | "gap" | "none"
    long metric_every = 10;
    double gap_tol = 1e-9;
};

struct ExperimentConfig {
    ProblemSpec problem;
    MethodSpec method;
    RunSpec run;
    std::string trace_path;
    std::string summary_path;
};

ExperimentConfig load_experiment_config(const std::string& path);

struct BenchSuite {
    ProblemSpec problem;                  // sizes shared by all cells
    std::vector<std::string> settings;    // distributions (game) or scalings (huber)
    std::vector<unsigned> seeds;
    std::vector<double> epsilons;
    std::vector<std::string> methods;
    MethodSpec method_params;
    long max_iter = 50000;
    long metric_every = 10;
    double gap_tol = 1e-9;
    std::string output;
};

BenchSuite load_bench_suite(const std::string& path);

struct PatternFile {
    int n = 0, m = 0, l = 0;
    PatternSet patterns;
};

PatternFile load_patterns(const std::string& path);

/// Problem instance with oracles plus the metric closure for the trace.
struct BuiltProblem {
    OperatorTriple ops;
    std::function<double(const Vec&)> objective;  // huber family
    std::optional<GameProblem> game;
    std::optional<HuberProblem> huber;
};

BuiltProblem build_problem(const ProblemSpec& spec);

/// Resolve a method spec against problem constants; the returned design has
/// passed validate_assumption.
struct ResolvedMethod {
    SplittingDesign design;
    GovernorMode mode = GovernorMode::base;
    std::string name;
};

ResolvedMethod resolve_method(const MethodSpec& method, const Vec& sigma, const Vec& lip, int n, int m, int l);

}  // namespace splitkit
