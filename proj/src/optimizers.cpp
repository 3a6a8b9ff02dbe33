#include "srq/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace srq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Budget-guarded evaluation with best-so-far bookkeeping.
struct Evaluator {
    const ObjectiveFn& fn;
    int budget;
    int used = 0;
    std::vector<double> best_x;
    double best_f = kInf;

    bool exhausted() const { return used >= budget; }

    double eval(const std::vector<double>& x) {
        ++used;
        const double f = fn(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
        return f;
    }
};

// Detects stagnation of the per-iteration best value.
struct StallDetector {
    double rel_tol;
    std::size_t window;
    std::vector<double> history;

    bool update(double best_f) {
        history.push_back(best_f);
        if (history.size() <= window) return false;
        const double before = history[history.size() - 1 - window];
        const double improvement = before - best_f;
        return improvement < rel_tol * std::max(1.0, std::abs(best_f));
    }
};

std::size_t stall_window(const OptimOptions& options, std::size_t dim) {
    return options.stall_window > 0 ? static_cast<std::size_t>(options.stall_window) : 2 * dim;
}

OptimResult finish(const Evaluator& ev, const std::vector<double>& x0, bool converged) {
    OptimResult result;
    result.best_x = ev.best_x.empty() ? x0 : ev.best_x;
    result.best_f = ev.best_f;
    result.evaluations = ev.used;
    result.converged = converged;
    return result;
}

// Seeded scatter around x0: one dominant axis component per vertex plus a
// little jitter on every coordinate, so runs with different seeds explore
// different simplexes while staying well-conditioned.
std::vector<std::vector<double>> scattered_simplex(const std::vector<double>& x0, double step,
                                                   std::mt19937_64& rng) {
    const std::size_t n = x0.size();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    std::vector<std::vector<double>> vertices;
    vertices.reserve(n + 1);
    vertices.push_back(x0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v = x0;
        for (std::size_t d = 0; d < n; ++d) v[d] += step * jitter(rng);
        const double sign = u01(rng) < 0.5 ? -1.0 : 1.0;
        v[i] += sign * step * (0.75 + 0.5 * u01(rng));
        vertices.push_back(std::move(v));
    }
    return vertices;
}

// Solves A x = b in place by Gaussian elimination with partial pivoting;
// returns false when the system is (near-)singular.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (std::abs(a[pivot][col]) < 1e-14) return false;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = a[r][col] / a[col][col];
            if (m == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        double s = b[col];
        for (std::size_t c = col + 1; c < n; ++c) s -= a[col][c] * b[c];
        b[col] = s / a[col][col];
    }
    return true;
}

} // namespace

OptimResult minimize_nelder_mead(const ObjectiveFn& fn, std::vector<double> x0,
                                 const OptimOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("empty parameter vector");
    Evaluator ev{fn, options.max_evaluations, 0, {}, kInf};
    std::mt19937_64 rng(options.seed);

    std::vector<std::vector<double>> x = scattered_simplex(x0, options.initial_step, rng);
    std::vector<double> f(n + 1, kInf);
    for (std::size_t i = 0; i <= n && !ev.exhausted(); ++i) f[i] = ev.eval(x[i]);
    if (ev.exhausted()) return finish(ev, x0, false);

    constexpr double alpha = 1.0; // reflection
    constexpr double gamma = 2.0; // expansion
    constexpr double rho = 0.5;   // contraction
    constexpr double sigma = 0.5; // shrink

    StallDetector stall{options.rel_tol, stall_window(options, n), {}};
    std::vector<std::size_t> order(n + 1);

    while (!ev.exhausted()) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&f](std::size_t a, std::size_t b) { return f[a] < f[b]; });
        const std::size_t best = order[0];
        const std::size_t second_worst = order[n - 1];
        const std::size_t worst = order[n];

        if (stall.update(f[best])) return finish(ev, x0, true);
        if (std::abs(f[worst] - f[best]) <= 1e-12 * (1.0 + std::abs(f[best])))
            return finish(ev, x0, true);

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < n; ++d) centroid[d] += x[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        std::vector<double> reflected(n);
        for (std::size_t d = 0; d < n; ++d)
            reflected[d] = centroid[d] + alpha * (centroid[d] - x[worst][d]);
        if (ev.exhausted()) break;
        const double f_reflected = ev.eval(reflected);

        if (f_reflected < f[best]) {
            if (ev.exhausted()) {
                x[worst] = reflected;
                f[worst] = f_reflected;
                break;
            }
            std::vector<double> expanded(n);
            for (std::size_t d = 0; d < n; ++d)
                expanded[d] = centroid[d] + gamma * (reflected[d] - centroid[d]);
            const double f_expanded = ev.eval(expanded);
            if (f_expanded < f_reflected) {
                x[worst] = std::move(expanded);
                f[worst] = f_expanded;
            } else {
                x[worst] = std::move(reflected);
                f[worst] = f_reflected;
            }
        } else if (f_reflected < f[second_worst]) {
            x[worst] = std::move(reflected);
            f[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < f[worst];
            std::vector<double> contracted(n);
            const std::vector<double>& toward = outside ? reflected : x[worst];
            for (std::size_t d = 0; d < n; ++d)
                contracted[d] = centroid[d] + rho * (toward[d] - centroid[d]);
            if (ev.exhausted()) break;
            const double f_contracted = ev.eval(contracted);
            if (f_contracted < (outside ? f_reflected : f[worst])) {
                x[worst] = std::move(contracted);
                f[worst] = f_contracted;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < n; ++d)
                        x[i][d] = x[best][d] + sigma * (x[i][d] - x[best][d]);
                    if (ev.exhausted()) break;
                    f[i] = ev.eval(x[i]);
                }
            }
        }
    }
    return finish(ev, x0, false);
}

OptimResult minimize_spsa(const ObjectiveFn& fn, std::vector<double> x0,
                          const OptimOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("empty parameter vector");
    Evaluator ev{fn, options.max_evaluations, 0, {}, kInf};
    std::mt19937_64 rng(options.seed);
    std::bernoulli_distribution coin(0.5);

    ev.eval(x0);
    StallDetector stall{options.rel_tol, stall_window(options, n), {}};

    std::vector<double> x = x0;
    std::vector<double> delta(n);
    std::vector<double> x_plus(n);
    std::vector<double> x_minus(n);
    for (int k = 0; ev.used + 2 <= options.max_evaluations; ++k) {
        const double ck = options.spsa_c / std::pow(k + 1.0, options.spsa_gamma);
        const double ak = options.spsa_a / std::pow(k + 1.0, options.spsa_alpha);
        for (std::size_t d = 0; d < n; ++d) {
            delta[d] = coin(rng) ? 1.0 : -1.0;
            x_plus[d] = x[d] + ck * delta[d];
            x_minus[d] = x[d] - ck * delta[d];
        }
        const double f_plus = ev.eval(x_plus);
        const double f_minus = ev.eval(x_minus);
        const double diff = (f_plus - f_minus) / (2.0 * ck);
        for (std::size_t d = 0; d < n; ++d) x[d] -= ak * diff * delta[d];

        // The perturbed points alone can miss the iterate's progress, so
        // measure the iterate itself now and then.
        if (k % 8 == 7 && ev.used < options.max_evaluations) ev.eval(x);

        if (stall.update(ev.best_f)) return finish(ev, x0, true);
    }
    return finish(ev, x0, false);
}

OptimResult minimize_cobyla_style(const ObjectiveFn& fn, std::vector<double> x0,
                                  const OptimOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("empty parameter vector");
    Evaluator ev{fn, options.max_evaluations, 0, {}, kInf};
    std::mt19937_64 rng(options.seed);

    std::vector<std::vector<double>> x = scattered_simplex(x0, options.initial_step, rng);
    std::vector<double> f(n + 1, kInf);
    for (std::size_t i = 0; i <= n && !ev.exhausted(); ++i) f[i] = ev.eval(x[i]);
    if (ev.exhausted()) return finish(ev, x0, false);

    double radius = options.initial_step;
    const double radius_min = 1e-8;
    // Shrink phases legitimately go several iterations without improvement,
    // so the stall window gets a floor here.
    StallDetector stall{options.rel_tol, std::max<std::size_t>(stall_window(options, n), 24), {}};

    auto rebuild_around = [&](const std::vector<double>& center) {
        x = scattered_simplex(center, radius, rng);
        for (std::size_t i = 0; i <= n && !ev.exhausted(); ++i) f[i] = ev.eval(x[i]);
    };

    while (!ev.exhausted() && radius > radius_min) {
        std::size_t best = 0, worst = 0;
        for (std::size_t i = 1; i <= n; ++i) {
            if (f[i] < f[best]) best = i;
            if (f[i] > f[worst]) worst = i;
        }
        if (stall.update(f[best])) return finish(ev, x0, true);

        // Keep the interpolation points on the scale of the trust region,
        // otherwise the linear fit stops reflecting the local slope.
        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            double dist = 0.0;
            for (std::size_t d = 0; d < n; ++d) {
                const double diff = x[i][d] - x[best][d];
                dist += diff * diff;
            }
            spread = std::max(spread, std::sqrt(dist));
        }
        if (spread > 8.0 * radius || spread < 1e-3 * radius) {
            rebuild_around(x[best]);
            continue;
        }

        // Interpolate the linear model b + g.x through all n+1 points.
        std::vector<std::vector<double>> a(n + 1, std::vector<double>(n + 1, 1.0));
        std::vector<double> rhs(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t d = 0; d < n; ++d) a[i][d + 1] = x[i][d];
            rhs[i] = f[i];
        }
        if (!solve_linear(a, rhs)) {
            rebuild_around(x[best]);
            continue;
        }

        double g_norm = 0.0;
        for (std::size_t d = 0; d < n; ++d) g_norm += rhs[d + 1] * rhs[d + 1];
        g_norm = std::sqrt(g_norm);
        if (g_norm < 1e-14) {
            radius *= 0.5;
            continue;
        }

        std::vector<double> candidate = x[best];
        for (std::size_t d = 0; d < n; ++d) candidate[d] -= radius * rhs[d + 1] / g_norm;
        if (ev.exhausted()) break;
        const double f_candidate = ev.eval(candidate);

        if (f_candidate < f[best]) {
            x[worst] = std::move(candidate);
            f[worst] = f_candidate;
            radius = std::min(radius * 1.5, options.initial_step * 4.0);
        } else {
            if (f_candidate < f[worst]) {
                x[worst] = std::move(candidate);
                f[worst] = f_candidate;
            }
            radius *= 0.5;
        }
    }
    return finish(ev, x0, radius <= radius_min);
}

} // namespace srq
