#include "splitkit/selection.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>

namespace splitkit {

namespace {

// Free-entry masks per matrix, 1 where the entry may be nonzero.
struct Masks {
    Matrix H, G, P, Q, R;
};

Masks pattern_masks(int n, int m, int l, const PatternSet& pat) {
    check_staircase_vector(pat.hg, n, m, "pattern hg");
    check_staircase_vector(pat.e, n, l, "pattern e");
    check_staircase_vector(pat.f, n, l, "pattern f");
    for (int i = 1; i < n; ++i)
        if (pat.e[i - 1] < pat.f[i]) throw std::invalid_argument("patterns: need Etilde_{i-1} >= F_i");
    Masks mk{Matrix(n, m), Matrix(m, n), Matrix(n, l), Matrix(n, l), Matrix(l, n)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) mk.H(i, j) = (j + 1 <= pat.hg[i]) ? 1.0 : 0.0;
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) mk.G(j, i) = (j + 1 > pat.hg[i]) ? 1.0 : 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < l; ++j) {
            mk.P(i, j) = (j + 1 > pat.f[i] && j + 1 <= pat.e[i]) ? 1.0 : 0.0;
            mk.Q(i, j) = (j + 1 <= pat.f[i]) ? 1.0 : 0.0;
        }
    for (int j = 0; j < l; ++j)
        for (int i = 0; i < n; ++i) mk.R(j, i) = (j + 1 > pat.e[i]) ? 1.0 : 0.0;
    return mk;
}

// Lines carrying a sum-to-one constraint: columns of H, P, Q; rows of G, R.
void check_feasible(const Masks& mk) {
    auto line_has_free = [](const Matrix& mask, bool columns, const std::string& what) {
        const int outer = columns ? mask.cols() : mask.rows();
        const int inner = columns ? mask.rows() : mask.cols();
        for (int a = 0; a < outer; ++a) {
            bool any = false;
            for (int b = 0; b < inner; ++b)
                if ((columns ? mask(b, a) : mask(a, b)) != 0.0) {
                    any = true;
                    break;
                }
            if (!any) throw std::invalid_argument("infeasible pattern: " + what + " " + std::to_string(a + 1) +
                                                  " has no free entry");
        }
    };
    line_has_free(mk.H, true, "H column");
    line_has_free(mk.G, false, "G row");
    line_has_free(mk.P, true, "P column");
    line_has_free(mk.Q, true, "Q column");
    line_has_free(mk.R, false, "R row");
}

// Exact Euclidean projection onto {pattern zeros} intersect {line sums = 1}:
// zero the pattern entries, then shift the free entries of each line by the
// mean violation.
void project_constraints(Matrix& A, const Matrix& mask, bool columns) {
    const int outer = columns ? A.cols() : A.rows();
    const int inner = columns ? A.rows() : A.cols();
    for (int a = 0; a < outer; ++a) {
        double sum = 0.0;
        int free_count = 0;
        for (int b = 0; b < inner; ++b) {
            double& v = columns ? A(b, a) : A(a, b);
            if ((columns ? mask(b, a) : mask(a, b)) == 0.0) {
                v = 0.0;
            } else {
                sum += v;
                ++free_count;
            }
        }
        if (free_count == 0) continue;
        const double shift = (1.0 - sum) / free_count;
        for (int b = 0; b < inner; ++b) {
            double& v = columns ? A(b, a) : A(a, b);
            if ((columns ? mask(b, a) : mask(a, b)) != 0.0) v += shift;
        }
    }
}

void sample_matrix(Matrix& A, const Matrix& mask, std::pair<double, double> interval, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(interval.first, interval.second);
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) A(i, j) = mask(i, j) != 0.0 ? dist(rng) : 0.0;
}

void normalize_lines(Matrix& A, const Matrix& mask, bool columns, const std::string& what) {
    const int outer = columns ? A.cols() : A.rows();
    const int inner = columns ? A.rows() : A.cols();
    for (int a = 0; a < outer; ++a) {
        double sum = 0.0;
        for (int b = 0; b < inner; ++b) sum += columns ? A(b, a) : A(a, b);
        if (std::abs(sum) < 1e-12)
            throw std::runtime_error("random_design: near-zero normalizer in " + what + " " + std::to_string(a + 1));
        for (int b = 0; b < inner; ++b) {
            double& v = columns ? A(b, a) : A(a, b);
            v /= sum;
        }
        (void)mask;
    }
}

}  // namespace

PatternSet default_patterns(int n, int m, int l) {
    if (n < 1) throw std::invalid_argument("default_patterns: n must be >= 1");
    if (l > 0 && n < 3) throw std::invalid_argument("default_patterns: l >= 1 needs n >= 3");
    PatternSet pat;
    pat.hg.resize(n, 0);
    pat.e.resize(n, 0);
    pat.f.resize(n, 0);
    for (int i = 0; i < n; ++i) pat.hg[i] = n > 1 ? (i * m) / (n - 1) : m;
    if (l > 0) {
        for (int i = 0; i < n - 1; ++i) pat.e[i] = (i * l) / (n - 2);
        pat.e[n - 1] = l;
        pat.f[0] = 0;
        for (int i = 1; i < n; ++i) pat.f[i] = pat.e[i - 1];
        pat.f[n - 1] = l;
    }
    return pat;
}

PatternSet random_patterns(int n, int m, int l, unsigned seed) {
    if (l > 0 && n < 3) throw std::invalid_argument("random_patterns: l >= 1 needs n >= 3");
    std::mt19937_64 rng(seed);
    PatternSet pat;
    pat.hg.assign(n, 0);
    pat.e.assign(n, 0);
    pat.f.assign(n, 0);
    if (n > 1) {
        std::uniform_int_distribution<int> dm(0, m);
        for (int i = 1; i < n - 1; ++i) pat.hg[i] = dm(rng);
        std::sort(pat.hg.begin() + 1, pat.hg.end() - 1);
        pat.hg[n - 1] = m;
    } else {
        pat.hg[0] = m;
    }
    if (l > 0) {
        std::uniform_int_distribution<int> dl(0, l);
        for (int i = 1; i < n - 2; ++i) pat.e[i] = dl(rng);
        std::sort(pat.e.begin() + 1, pat.e.begin() + std::max(n - 2, 1));
        pat.e[n - 2] = l;  // F_n = l requires Etilde_{n-1} = l
        pat.e[n - 1] = l;
        for (int i = 1; i < n - 1; ++i) {
            std::uniform_int_distribution<int> df(pat.f[i - 1], pat.e[i - 1]);
            pat.f[i] = df(rng);
        }
        pat.f[n - 1] = l;
    }
    return pat;
}

RandomDesignMatrices random_design(int n, int m, int l, const PatternSet& patterns,
                                   const SampleIntervals& intervals, unsigned seed) {
    Masks mk = pattern_masks(n, m, l, patterns);
    check_feasible(mk);
    std::mt19937_64 rng(seed);
    RandomDesignMatrices out{Matrix(n, m), Matrix(m, n), Matrix(n, l), Matrix(n, l), Matrix(l, n)};
    sample_matrix(out.H, mk.H, intervals.H, rng);
    sample_matrix(out.G, mk.G, intervals.G, rng);
    sample_matrix(out.P, mk.P, intervals.P, rng);
    sample_matrix(out.Q, mk.Q, intervals.Q, rng);
    sample_matrix(out.R, mk.R, intervals.R, rng);
    normalize_lines(out.H, mk.H, true, "H column");
    normalize_lines(out.G, mk.G, false, "G row");
    normalize_lines(out.P, mk.P, true, "P column");
    normalize_lines(out.Q, mk.Q, true, "Q column");
    normalize_lines(out.R, mk.R, false, "R row");
    return out;
}

Matrix laplacian_complete(int n) {
    if (n < 2) throw std::invalid_argument("laplacian_complete: n must be >= 2");
    // n I - e e^T has spectral norm n; normalized form is I - (1/n) e e^T.
    Matrix L(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) L(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / n;
    return L;
}

namespace {

bool connected(const std::vector<std::vector<char>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v)
            if (adj[u][v] && !seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
    }
    return count == n;
}

Matrix laplacian_of(const std::vector<std::vector<char>>& adj) {
    const int n = static_cast<int>(adj.size());
    Matrix L(n, n);
    for (int i = 0; i < n; ++i) {
        int deg = 0;
        for (int j = 0; j < n; ++j)
            if (adj[i][j]) {
                ++deg;
                L(i, j) = -1.0;
            }
        L(i, i) = deg;
    }
    return L;
}

}  // namespace

Matrix laplacian_watts_strogatz(int n, int degree, double rewire_p, unsigned seed) {
    if (n < 2) throw std::invalid_argument("laplacian_watts_strogatz: n must be >= 2");
    if (degree < 1) throw std::invalid_argument("laplacian_watts_strogatz: degree must be >= 1");
    const int k = std::min(2 * ((degree + 1) / 2), n - 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<int> node(0, n - 1);

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int s = 1; s <= k / 2; ++s) {
                const int j = (i + s) % n;
                adj[i][j] = adj[j][i] = 1;
            }
        if (k % 2 == 1) {
            // degree capped at n-1 with n-1 odd: ring lattice is complete
        }
        for (int i = 0; i < n; ++i)
            for (int s = 1; s <= k / 2; ++s) {
                if (coin(rng) >= rewire_p) continue;
                const int j = (i + s) % n;
                int t = node(rng);
                int guard = 0;
                while ((t == i || adj[i][t]) && guard++ < 4 * n) t = node(rng);
                if (t == i || adj[i][t]) continue;  // node saturated, keep the edge
                adj[i][j] = adj[j][i] = 0;
                adj[i][t] = adj[t][i] = 1;
            }
        if (!connected(adj)) continue;
        Matrix L = laplacian_of(adj);
        const double nrm = spectral_norm(L).value;
        L *= 1.0 / nrm;
        return L;
    }
    throw std::runtime_error("laplacian_watts_strogatz: no connected graph after 100 attempts");
}

Matrix laplacian_random_factor(int n, unsigned seed) {
    if (n < 2) throw std::invalid_argument("laplacian_random_factor: n must be >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix Mt(n, n - 1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n - 1; ++j) Mt(i, j) = dist(rng);
    // Center the columns so M^T e_n = 0.
    for (int j = 0; j < n - 1; ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += Mt(i, j);
        mean /= n;
        for (int i = 0; i < n; ++i) Mt(i, j) -= mean;
    }
    Matrix L = Mt * Mt.transposed();
    const double nrm = spectral_norm(L).value;
    if (nrm == 0.0) throw std::runtime_error("laplacian_random_factor: degenerate sample");
    L *= 1.0 / nrm;
    return L;
}

double algebraic_connectivity(const Matrix& laplacian) {
    auto eig = symmetric_eigen(laplacian);
    if (eig.values.size() < 2) throw std::invalid_argument("algebraic_connectivity: need n >= 2");
    return eig.values[1];
}

Matrix upsilon_matrix(const Matrix& H, const Matrix& G, const Matrix& P, const Matrix& Q, const Matrix& R,
                      const Vec& sigma, const Vec& lip) {
    const int n = H.rows() > 0 ? H.rows() : P.rows();
    const int m = H.cols();
    const int l = P.cols();
    Matrix U(n, m + 2 * l);
    if (m > 0) {
        Matrix W1 = H - G.transposed();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < m; ++j) U(i, j) = W1(i, j) / std::sqrt(2.0 * sigma[j]);
    }
    if (l > 0) {
        Matrix W2 = P - Q;
        Matrix W3 = P - R.transposed();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < l; ++j) {
                const double s = std::sqrt(lip[j]);
                U(i, m + j) = W2(i, j) * s;
                U(i, m + l + j) = W3(i, j) * s;
            }
    }
    return U;
}

SelectionResult minimize_upsilon(int n, int m, int l, const PatternSet& patterns, const Vec& sigma, const Vec& lip,
                                 const UpsilonOptions& opts) {
    if (static_cast<int>(sigma.size()) != m || static_cast<int>(lip.size()) != l)
        throw std::invalid_argument("minimize_upsilon: constant lengths must match m, l");
    for (double s : sigma)
        if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("minimize_upsilon: sigma must be positive finite");
    for (double s : lip)
        if (!(s > 0.0) || !std::isfinite(s)) throw std::domain_error("minimize_upsilon: lip must be positive finite");
    Masks mk = pattern_masks(n, m, l, patterns);
    check_feasible(mk);

    SelectionResult res;
    res.H = Matrix(n, m);
    res.G = Matrix(m, n);
    res.P = Matrix(n, l);
    res.Q = Matrix(n, l);
    res.R = Matrix(l, n);
    auto project_all = [&](SelectionResult& r) {
        project_constraints(r.H, mk.H, true);
        project_constraints(r.G, mk.G, false);
        project_constraints(r.P, mk.P, true);
        project_constraints(r.Q, mk.Q, true);
        project_constraints(r.R, mk.R, false);
    };
    if (opts.start_seed != 0) {
        RandomDesignMatrices start = random_design(n, m, l, patterns, SampleIntervals{}, opts.start_seed);
        res.H = std::move(start.H);
        res.G = std::move(start.G);
        res.P = std::move(start.P);
        res.Q = std::move(start.Q);
        res.R = std::move(start.R);
    }
    project_all(res);  // uniform weight over free entries unless seeded

    if (m + 2 * l == 0) {
        res.converged = true;
        return res;
    }

    SelectionResult best = res;
    best.upsilon_norm = spectral_norm(upsilon_matrix(res.H, res.G, res.P, res.Q, res.R, sigma, lip)).value;
    double best_at_90 = best.upsilon_norm;
    const long mark = opts.iters - opts.iters / 10;

    SelectionResult cur = res;
    for (long k = 0; k < opts.iters; ++k) {
        Matrix Ups = upsilon_matrix(cur.H, cur.G, cur.P, cur.Q, cur.R, sigma, lip);
        SingularPair sp = spectral_norm(Ups);
        if (!std::isfinite(sp.value)) throw std::runtime_error("minimize_upsilon: non-finite objective");
        if (sp.value < best.upsilon_norm) {
            best = cur;
            best.upsilon_norm = sp.value;
        }
        if (k == mark) best_at_90 = best.upsilon_norm;

        // Subgradient of the spectral norm at Upsilon is u v^T, pulled back
        // through the three column blocks.
        const double t = opts.step / std::sqrt(static_cast<double>(k + 1));
        for (int i = 0; i < n; ++i) {
            const double ui = sp.u[i];
            for (int j = 0; j < m; ++j) {
                const double g1 = ui * sp.v[j] / std::sqrt(2.0 * sigma[j]);
                cur.H(i, j) -= t * g1;
                cur.G(j, i) -= t * (-g1);
            }
            for (int j = 0; j < l; ++j) {
                const double s = std::sqrt(lip[j]);
                const double g2 = ui * sp.v[m + j] * s;
                const double g3 = ui * sp.v[m + l + j] * s;
                cur.P(i, j) -= t * (g2 + g3);
                cur.Q(i, j) -= t * (-g2);
                cur.R(j, i) -= t * (-g3);
            }
        }
        project_all(cur);
    }
    Matrix Ups = upsilon_matrix(cur.H, cur.G, cur.P, cur.Q, cur.R, sigma, lip);
    const double final_val = spectral_norm(Ups).value;
    if (final_val < best.upsilon_norm) {
        best = cur;
        best.upsilon_norm = final_val;
    }

    project_all(best);  // snap: exact pattern zeros, exact line sums
    best.iterations = opts.iters;
    best.converged = (best_at_90 - best.upsilon_norm) <= 1e-6 * std::max(best.upsilon_norm, 1e-30);
    return best;
}

WMatrixResult w_matrix(const Matrix& H, const Matrix& G, const Matrix& P, const Matrix& Q, const Matrix& R,
                       const Vec& sigma, const Vec& lip) {
    WMatrixResult out;
    out.W = coupling_matrix(H, G, P, Q, R, sigma, lip);
    out.norm2 = spectral_norm(out.W).value;
    const double ups = spectral_norm(upsilon_matrix(H, G, P, Q, R, sigma, lip)).value;
    if (std::abs(out.norm2 - ups * ups) > 1e-8 * (1.0 + out.norm2))
        throw std::runtime_error("w_matrix: ||W||_2 and ||Upsilon||_2^2 disagree");
    return out;
}

}  // namespace splitkit
