#pragma once

#include <span>
#include <string>
#include <vector>

#include "srq/model.hpp"

namespace srq {

// Second-stage corrective action for one timestep. Satisfies the balance
// j - buy + sell = p and the complementarity buy * sell = 0 exactly.
struct RecourseSplit {
    long long buy = 0;
    long long sell = 0;
};

// Classical benchmark bundle: here-and-now optimum, wait-and-see bound,
// expected-value solution and the derived EVPI / VSS gaps.
struct SolutionReport {
    std::vector<long long> hn_j;
    double hn_value = 0.0;
    double ws_value = 0.0;
    std::vector<long long> ev_j;
    double eev_value = 0.0;
    double evpi = 0.0;
    double vss = 0.0;
};

inline constexpr std::size_t kDefaultSearchCap = std::size_t{1} << 24;

// Closed-form second stage: buy = max(j - p, 0), sell = max(p - j, 0).
RecourseSplit recourse_split(long long j, long long p);

// First-stage revenue plus recourse cost for one realized scenario:
// sum_t [ -ev * j_t + buy * max(j_t - p_t, 0) - sell * max(p_t - j_t, 0) ].
double scenario_cost(std::span<const long long> j, std::span<const long long> p,
                     const Prices& prices);

// Same closed form for a real-valued scenario vector; used by the
// expected-value benchmark, which plugs in E[p] directly.
double scenario_cost(std::span<const long long> j, std::span<const double> p,
                     const Prices& prices);

// Probability-weighted scenario cost over the joint product measure.
double expected_cost(std::span<const long long> j, const InstanceSpec& instance,
                     std::size_t scenario_cap = kDefaultScenarioCap);

struct HereAndNowSolution {
    std::vector<long long> j;
    double value = 0.0;
};

// Exhaustive argmin of expected_cost over the first-stage integer box;
// ties break toward the lexicographically smallest vector.
HereAndNowSolution solve_here_and_now(const InstanceSpec& instance,
                                      std::size_t search_cap = kDefaultSearchCap,
                                      std::size_t scenario_cap = kDefaultScenarioCap);

// Perfect-foresight bound: sum over scenarios of probability times the
// per-scenario optimum.
double solve_wait_and_see(const InstanceSpec& instance,
                          std::size_t search_cap = kDefaultSearchCap,
                          std::size_t scenario_cap = kDefaultScenarioCap);

struct ExpectedValueSolution {
    std::vector<long long> j;
    double eev = 0.0;
};

// Deterministic mean-scenario solution and its true expected cost (EEV).
ExpectedValueSolution solve_expected_value(const InstanceSpec& instance,
                                           std::size_t search_cap = kDefaultSearchCap,
                                           std::size_t scenario_cap = kDefaultScenarioCap);

SolutionReport benchmark_report(const InstanceSpec& instance,
                                std::size_t search_cap = kDefaultSearchCap,
                                std::size_t scenario_cap = kDefaultScenarioCap);

// Fixed-field-name JSON (hn_j, hn_value, ws_value, ev_j, eev_value, evpi, vss).
std::string report_to_json(const SolutionReport& report, int indent = 2);

} // namespace srq
