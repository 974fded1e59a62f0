#include "splitkit/framework.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace splitkit {

double SolverConfig::gamma_at(long k) const {
    if (gamma_schedule.empty()) return gamma;
    return gamma_schedule[static_cast<std::size_t>(k) % gamma_schedule.size()];
}

void SolverConfig::validate() const {
    if (gamma_schedule.empty()) {
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("config: constant gamma must lie in (0,1)");
    } else {
        double floor = 1.0;
        for (double g : gamma_schedule) {
            if (g < 0.0 || g > 1.0) throw std::invalid_argument("config: schedule entries must lie in [0,1]");
            floor = std::min(floor, g * (1.0 - g));
        }
        if (!(floor > 0.0)) throw std::invalid_argument("config: schedule must keep gamma(1-gamma) bounded away from 0");
    }
    if (max_iter < 1) throw std::invalid_argument("config: max_iter must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
    if (metric_every < 1) throw std::invalid_argument("config: metric_every must be positive");
}

BlockVector inner_sweep(const OperatorTriple& problem, const SplittingDesign& design,
                        const BlockVector& governor_input) {
    const int n = design.n;
    const int m = design.m;
    const int l = design.l;
    if (problem.n() != n || problem.m() != m || problem.l() != l)
        throw std::invalid_argument("inner_sweep: operator counts do not match the design");
    if (governor_input.blocks() != n) throw std::invalid_argument("inner_sweep: governor input must have n blocks");
    if (!design.has_K) throw std::invalid_argument("inner_sweep: design has no K");
    const int dim = governor_input.dim();

    BlockVector x(n, dim);
    std::vector<Vec> g_arg(m, Vec(dim, 0.0));
    std::vector<Vec> r_arg(l, Vec(dim, 0.0));
    std::vector<Vec> p_arg(l, Vec(dim, 0.0));
    std::vector<Vec> b_val(m), cr_val(l), cp_val(l);
    std::vector<char> b_done(m, 0), cr_done(l, 0), cp_done(l, 0);

    for (int i = 0; i < n; ++i) {
        Vec in = governor_input.block_copy(i);
        for (int j = 0; j < i; ++j) {
            const double k_ij = design.K(i, j);
            if (k_ij == 0.0) continue;
            auto xj = x.block(j);
            for (int c = 0; c < dim; ++c) in[c] -= k_ij * xj[c];
        }
        for (int j = 0; j < m; ++j) {
            const double h_ij = design.H(i, j);
            if (h_ij == 0.0) continue;
            if (!b_done[j]) {
                b_val[j] = problem.B[j].apply(g_arg[j]);
                b_done[j] = 1;
            }
            axpy(-h_ij, b_val[j], in);
        }
        for (int j = 0; j < l; ++j) {
            const double pq = design.P(i, j) - design.Q(i, j);
            if (pq != 0.0) {
                if (!cr_done[j]) {
                    cr_val[j] = problem.C[j].apply(r_arg[j]);
                    cr_done[j] = 1;
                }
                axpy(-pq, cr_val[j], in);
            }
            const double q_ij = design.Q(i, j);
            if (q_ij != 0.0) {
                if (!cp_done[j]) {
                    cp_val[j] = problem.C[j].apply(p_arg[j]);
                    cp_done[j] = 1;
                }
                axpy(-q_ij, cp_val[j], in);
            }
        }
        const double di = design.d[i];
        Vec xi = problem.A[i].resolve(di, scaled(in, di));
        if (static_cast<int>(xi.size()) != dim) throw std::runtime_error("inner_sweep: resolvent changed the dimension");
        x.set_block(i, xi);

        for (int j = 0; j < m; ++j) {
            const double g_ji = design.G(j, i);
            if (g_ji != 0.0) axpy(g_ji, xi, g_arg[j]);
        }
        for (int j = 0; j < l; ++j) {
            const double r_ji = design.R(j, i);
            if (r_ji != 0.0) axpy(r_ji, xi, r_arg[j]);
            const double p_ij = design.P(i, j);
            if (p_ij != 0.0) axpy(p_ij, xi, p_arg[j]);
        }
    }
    return x;
}

BlockVector governor_update(const BlockVector& z, const BlockVector& x, double gamma_k, const Matrix& M) {
    BlockVector step = block_apply(M.transposed(), x);
    BlockVector out = z;
    step *= gamma_k;
    out -= step;
    return out;
}

std::pair<BlockVector, BlockVector> lifted_step(const OperatorTriple& problem, const SplittingDesign& design,
                                                const BlockVector& w, double gamma_k) {
    if (!design.laplacian) throw std::invalid_argument("lifted_step: design has no laplacian");
    BlockVector x = inner_sweep(problem, design, w);
    BlockVector step = block_apply(*design.laplacian, x);
    step *= gamma_k;
    BlockVector w_next = w;
    w_next -= step;
    return {std::move(x), std::move(w_next)};
}

namespace {

double consensus_error(const BlockVector& x, const Vec& mean) {
    double worst = 0.0;
    for (int i = 0; i < x.blocks(); ++i) {
        auto b = x.block(i);
        double d2 = 0.0;
        for (int k = 0; k < x.dim(); ++k) {
            const double d = b[k] - mean[k];
            d2 += d * d;
        }
        worst = std::max(worst, std::sqrt(d2));
    }
    return worst;
}

double quadratic_form(const BlockVector& x, const Matrix& S) {
    BlockVector sx = block_apply(S, x);
    double q = 0.0;
    for (std::size_t i = 0; i < x.data().size(); ++i) q += x.data()[i] * sx.data()[i];
    return q;
}

}  // namespace

SolveResult solve(const OperatorTriple& problem, const SplittingDesign& design, const SolverConfig& config) {
    config.validate();
    SplittingDesign local = design;
    if (config.mode == GovernorMode::base) {
        ensure_governor_factor(local);
    } else if (!local.laplacian) {
        local.laplacian = *local.M * local.M->transposed();
    }
    local.check_shapes();
    if (!local.has_K) throw std::invalid_argument("solve: design has no K (run build_K or load a complete design)");

    const int n = local.n;
    const int dim = problem.dim;
    const bool lifted = config.mode == GovernorMode::lifted;
    const Matrix Mt = lifted ? Matrix() : local.M->transposed();

    BlockVector state = lifted ? BlockVector(n, dim) : BlockVector(n - 1, dim);
    BlockVector x_sum(n, dim);

    SolveResult result;
    result.trace.records.reserve(static_cast<std::size_t>(std::min<long>(config.max_iter, 1 << 20)));

    double initial_residual = -1.0;
    double best_score = std::numeric_limits<double>::infinity();
    const auto t0 = std::chrono::steady_clock::now();

    for (long k = 0; k < config.max_iter; ++k) {
        const double gamma_k = config.gamma_at(k);
        BlockVector x;
        BlockVector next;
        double residual = 0.0;
        if (lifted) {
            auto [xs, wn] = lifted_step(problem, local, state, gamma_k);
            x = std::move(xs);
            next = std::move(wn);
            residual = std::sqrt(std::max(0.0, quadratic_form(x, *local.laplacian)));
        } else {
            BlockVector gov = block_apply(*local.M, state);
            x = inner_sweep(problem, local, gov);
            BlockVector mtx = block_apply(Mt, x);
            residual = mtx.norm();
            mtx *= gamma_k;
            next = state;
            next -= mtx;
        }

        if (!x.finite() || !next.finite()) throw SolverDivergence("non-finite iterate at iteration " + std::to_string(k), k);
        if (initial_residual < 0.0) initial_residual = residual;
        if (initial_residual > 0.0 && residual > 1e8 * initial_residual)
            throw SolverDivergence("residual blew up at iteration " + std::to_string(k), k);

        x_sum += x;
        BlockVector x_mean = x_sum;
        x_mean *= 1.0 / static_cast<double>(k + 1);
        double ergodic;
        if (lifted) {
            ergodic = std::sqrt(std::max(0.0, quadratic_form(x_mean, *local.laplacian)));
        } else {
            ergodic = block_apply(Mt, x_mean).norm();
        }

        const Vec mean = x.block_mean();
        TraceRecord rec;
        rec.iter = k;
        rec.residual = residual;
        rec.consensus = consensus_error(x, mean);
        rec.ergodic_residual = ergodic;
        if (config.metric && k % config.metric_every == 0) rec.metric = config.metric(mean);
        if (config.reference_z && config.reference_z->blocks() == state.blocks()) {
            rec.fejer = distance(state, *config.reference_z);
        }
        result.trace.records.push_back(rec);

        const double score = residual + rec.consensus;
        if (score < best_score) {
            best_score = score;
            result.solution = mean;
            result.x = x;
            result.z = state;
            result.final_residual = residual;
            result.final_consensus = rec.consensus;
        }

        if (residual <= config.tol && rec.consensus <= 10.0 * config.tol) {
            result.converged = true;
            result.solution = mean;
            result.x = x;
            result.z = state;
            result.final_residual = residual;
            result.final_consensus = rec.consensus;
            result.iterations = k + 1;
            break;
        }
        if (config.stop_when && config.stop_when(rec)) {
            result.solution = mean;
            result.x = x;
            result.z = state;
            result.final_residual = residual;
            result.final_consensus = rec.consensus;
            result.iterations = k + 1;
            result.message = "early stop";
            break;
        }
        state = std::move(next);
    }

    if (!result.converged && result.message.empty()) {
        result.iterations = result.trace.size();
        result.message = "not converged";
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

double ergodic_residual_rate(const RunTrace& trace) {
    const long len = trace.size();
    if (len < 100) throw std::invalid_argument("ergodic_residual_rate: trace too short (need >= 100)");
    const long start = len / 2;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    long count = 0;
    for (long k = start; k < len; ++k) {
        const double xk = std::log(static_cast<double>(trace.records[k].iter + 1));
        const double yk = std::log(std::max(trace.records[k].ergodic_residual, 1e-300));
        sx += xk;
        sy += yk;
        sxx += xk * xk;
        sxy += xk * yk;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (count * sxy - sx * sy) / denom;
}

}  // namespace splitkit
