#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace srq {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct OptimOptions {
    int max_evaluations = 500;
    // Converged once the best value improved by less than rel_tol (relative)
    // over the last stall_window iterations; 0 means 2 * dimension.
    double rel_tol = 1e-6;
    int stall_window = 0;
    std::uint64_t seed = 0;
    // Scatter radius for the seeded initial simplex / trust region.
    double initial_step = 0.25;
    // SPSA gain sequences a_k = spsa_a/(k+1)^0.602, c_k = spsa_c/(k+1)^0.101.
    double spsa_a = 0.1;
    double spsa_c = 0.1;
    double spsa_alpha = 0.602;
    double spsa_gamma = 0.101;
};

struct OptimResult {
    std::vector<double> best_x;
    double best_f = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// All three minimizers evaluate x0 first, keep best-so-far bookkeeping, and
// never exceed max_evaluations; seeds control the initial simplex scatter
// (Nelder-Mead, trust-region) or the perturbation signs (SPSA).
OptimResult minimize_nelder_mead(const ObjectiveFn& fn, std::vector<double> x0,
                                 const OptimOptions& options);
OptimResult minimize_spsa(const ObjectiveFn& fn, std::vector<double> x0,
                          const OptimOptions& options);
// Linear-model trust-region search in the spirit of constrained
// linear-approximation methods, minus the constraint machinery.
OptimResult minimize_cobyla_style(const ObjectiveFn& fn, std::vector<double> x0,
                                  const OptimOptions& options);

} // namespace srq
