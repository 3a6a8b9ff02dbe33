#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace srq {

// First-stage EV tariff and intra-day recourse prices, per energy unit.
// The premise of the whole model is intraday_sell < ev < intraday_buy:
// trading with the EVs beats the exchange and recourse is penalized.
struct Prices {
    double ev = 0.25;
    double intraday_buy = 0.4;
    double intraday_sell = 0.1;
};

// Binary-encoded first-stage decision: value = offset + sum_k 2^k b_k,
// so the representable range [offset, offset + 2^bit_width - 1] is the
// feasible box [j_min, j_max]. bit_width 0 pins the variable at offset.
struct FirstStageVar {
    int bit_width = 2;
    long long offset = 0;

    long long min_value() const { return offset; }
    long long max_value() const { return offset + (1LL << bit_width) - 1; }
    long long range_size() const { return 1LL << bit_width; }
};

struct ScenarioPoint {
    long long value = 0;
    double probability = 0.0;
};

// Discrete per-timestep distribution of the uncertain PV output p_t.
// register_offset shifts the binary register mapping (p = offset + bits),
// which also admits negative support values; defaults to 0.
struct ScenarioDistribution {
    std::vector<ScenarioPoint> support;
    long long register_offset = 0;

    long long min_value() const;
    long long max_value() const;
};

// The whole problem statement: T timesteps, prices, per-timestep
// first-stage variables and PV distributions, and the bit width used for
// each of the buy_t / sell_t recourse variables.
struct InstanceSpec {
    int horizon = 1;
    Prices prices;
    std::vector<FirstStageVar> j_vars;
    std::vector<ScenarioDistribution> p_dists;
    int recourse_bit_width = 2;
};

// Every violated invariant as "path: message"; empty means the instance
// is accepted by all downstream modules.
std::vector<std::string> validate(const InstanceSpec& instance);

// E[p] = sum of value * probability.
double expected_scenario(const ScenarioDistribution& dist);

struct JointScenario {
    std::vector<long long> p;
    double probability = 0.0;
};

inline constexpr std::size_t kDefaultScenarioCap = 1'000'000;

// Cartesian product of the per-timestep supports with product
// probabilities; timesteps are independent. Throws on scenario explosion
// (product size > cap).
std::vector<JointScenario> joint_scenarios(const InstanceSpec& instance,
                                           std::size_t cap = kDefaultScenarioCap);

// Number of joint scenarios without materializing them.
std::size_t joint_scenario_count(const InstanceSpec& instance);

} // namespace srq
