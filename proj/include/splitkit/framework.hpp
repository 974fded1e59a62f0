#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitkit/operators.hpp"
#include "splitkit/structure.hpp"

namespace splitkit {

enum class GovernorMode { base, lifted };

struct TraceRecord {
    long iter = 0;
    double residual = 0.0;   // ||M^T x|| = ||(Id-T)z|| / gamma
    double consensus = 0.0;  // max_i ||x_i - xbar||
    std::optional<double> metric;
    std::optional<double> fejer;
    double ergodic_residual = 0.0;  // norm of the running mean of M^T x
};

struct RunTrace {
    std::vector<TraceRecord> records;
    long size() const { return static_cast<long>(records.size()); }
};

struct SolverConfig {
    double gamma = 0.5;                 // constant relaxation in (0,1)
    std::vector<double> gamma_schedule; // optional periodic schedule, overrides gamma
    long max_iter = 10000;
    double tol = 1e-8;
    GovernorMode mode = GovernorMode::base;
    unsigned seed = 0;

    // Optional problem metric (objective or gap), evaluated on the block mean
    // every metric_every iterations.
    std::function<double(const Vec&)> metric;
    long metric_every = 1;

    // Optional known fixed point; enables the fejer column of the trace.
    std::optional<BlockVector> reference_z;

    // Optional early stop, checked on every trace record.
    std::function<bool(const TraceRecord&)> stop_when;

    double gamma_at(long k) const;
    void validate() const;
};

struct SolveResult {
    Vec solution;           // block mean of the final sweep
    RunTrace trace;
    bool converged = false;
    long iterations = 0;
    double final_residual = 0.0;
    double final_consensus = 0.0;
    double wall_seconds = 0.0;
    BlockVector x;  // final sweep output
    BlockVector z;  // final governor state (base mode) or w (lifted mode)
    std::string message;
};

/// One Gauss-Seidel sweep of the main scheme: block i is resolved against the
/// already-computed prefix, with each B_j evaluated once and each C_j at most
/// twice (arguments accumulated incrementally as blocks become available).
/// `governor_input` carries the n blocks d-weighted into each resolvent: Mz in
/// base form, w in the lifted form.
BlockVector inner_sweep(const OperatorTriple& problem, const SplittingDesign& design,
                        const BlockVector& governor_input);

/// z <- z - gamma_k M^T x.
BlockVector governor_update(const BlockVector& z, const BlockVector& x, double gamma_k, const Matrix& M);

/// One lifted iteration: sweep with w in place of Mz, then
/// w <- w - gamma_k L x. Requires the laplacian.
std::pair<BlockVector, BlockVector> lifted_step(const OperatorTriple& problem, const SplittingDesign& design,
                                                const BlockVector& w, double gamma_k);

class SolverDivergence : public std::runtime_error {
public:
    SolverDivergence(const std::string& what, long iter) : std::runtime_error(what), iteration(iter) {}
    long iteration;
};

SolveResult solve(const OperatorTriple& problem, const SplittingDesign& design, const SolverConfig& config);

/// Least-squares slope of log(ergodic residual) against log(iteration) over
/// the last half of the trace.
double ergodic_residual_rate(const RunTrace& trace);

}  // namespace splitkit
