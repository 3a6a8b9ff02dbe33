#include "srq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <json.hpp>

namespace srq {

namespace {

// Walks the first-stage integer box in lexicographic order, so the first
// strict improvement is automatically the lexicographically smallest
// minimizer.
void for_each_first_stage(const InstanceSpec& instance, std::size_t search_cap,
                          const std::function<void(std::span<const long long>)>& visit) {
    std::size_t space = 1;
    for (const auto& v : instance.j_vars) {
        const auto sz = static_cast<std::size_t>(v.range_size());
        if (space > search_cap / sz)
            throw std::runtime_error("first-stage search space exceeds cap " +
                                     std::to_string(search_cap));
        space *= sz;
    }

    const int T = instance.horizon;
    std::vector<long long> j(T);
    for (int t = 0; t < T; ++t) j[t] = instance.j_vars[t].min_value();
    while (true) {
        visit(j);
        int t = T - 1;
        while (t >= 0 && ++j[t] > instance.j_vars[t].max_value()) {
            j[t] = instance.j_vars[t].min_value();
            --t;
        }
        if (t < 0) break;
    }
}

} // namespace

RecourseSplit recourse_split(long long j, long long p) {
    return RecourseSplit{std::max(j - p, 0LL), std::max(p - j, 0LL)};
}

double scenario_cost(std::span<const long long> j, std::span<const long long> p,
                     const Prices& prices) {
    double cost = 0.0;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const RecourseSplit rs = recourse_split(j[t], p[t]);
        cost += -prices.ev * static_cast<double>(j[t]) +
                prices.intraday_buy * static_cast<double>(rs.buy) -
                prices.intraday_sell * static_cast<double>(rs.sell);
    }
    return cost;
}

double scenario_cost(std::span<const long long> j, std::span<const double> p,
                     const Prices& prices) {
    double cost = 0.0;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const double jt = static_cast<double>(j[t]);
        cost += -prices.ev * jt + prices.intraday_buy * std::max(jt - p[t], 0.0) -
                prices.intraday_sell * std::max(p[t] - jt, 0.0);
    }
    return cost;
}

double expected_cost(std::span<const long long> j, const InstanceSpec& instance,
                     std::size_t scenario_cap) {
    double sum = 0.0;
    for (const auto& sc : joint_scenarios(instance, scenario_cap))
        sum += sc.probability * scenario_cost(j, sc.p, instance.prices);
    return sum;
}

HereAndNowSolution solve_here_and_now(const InstanceSpec& instance, std::size_t search_cap,
                                      std::size_t scenario_cap) {
    const auto scenarios = joint_scenarios(instance, scenario_cap);
    HereAndNowSolution best;
    bool first = true;
    for_each_first_stage(instance, search_cap, [&](std::span<const long long> j) {
        double value = 0.0;
        for (const auto& sc : scenarios)
            value += sc.probability * scenario_cost(j, sc.p, instance.prices);
        if (first || value < best.value) {
            best.j.assign(j.begin(), j.end());
            best.value = value;
            first = false;
        }
    });
    return best;
}

double solve_wait_and_see(const InstanceSpec& instance, std::size_t search_cap,
                          std::size_t scenario_cap) {
    double total = 0.0;
    for (const auto& sc : joint_scenarios(instance, scenario_cap)) {
        double best = 0.0;
        bool first = true;
        for_each_first_stage(instance, search_cap, [&](std::span<const long long> j) {
            const double value = scenario_cost(j, sc.p, instance.prices);
            if (first || value < best) {
                best = value;
                first = false;
            }
        });
        total += sc.probability * best;
    }
    return total;
}

ExpectedValueSolution solve_expected_value(const InstanceSpec& instance, std::size_t search_cap,
                                           std::size_t scenario_cap) {
    std::vector<double> p_mean(instance.horizon);
    for (int t = 0; t < instance.horizon; ++t) p_mean[t] = expected_scenario(instance.p_dists[t]);

    ExpectedValueSolution sol;
    double best = 0.0;
    bool first = true;
    for_each_first_stage(instance, search_cap, [&](std::span<const long long> j) {
        const double value = scenario_cost(j, std::span<const double>(p_mean), instance.prices);
        if (first || value < best) {
            sol.j.assign(j.begin(), j.end());
            best = value;
            first = false;
        }
    });
    sol.eev = expected_cost(sol.j, instance, scenario_cap);
    return sol;
}

SolutionReport benchmark_report(const InstanceSpec& instance, std::size_t search_cap,
                                std::size_t scenario_cap) {
    SolutionReport report;
    const HereAndNowSolution hn = solve_here_and_now(instance, search_cap, scenario_cap);
    report.hn_j = hn.j;
    report.hn_value = hn.value;
    report.ws_value = solve_wait_and_see(instance, search_cap, scenario_cap);
    const ExpectedValueSolution ev = solve_expected_value(instance, search_cap, scenario_cap);
    report.ev_j = ev.j;
    report.eev_value = ev.eev;
    report.evpi = report.hn_value - report.ws_value;
    report.vss = report.eev_value - report.hn_value;
    return report;
}

std::string report_to_json(const SolutionReport& report, int indent) {
    nlohmann::json j;
    j["hn_j"] = report.hn_j;
    j["hn_value"] = report.hn_value;
    j["ws_value"] = report.ws_value;
    j["ev_j"] = report.ev_j;
    j["eev_value"] = report.eev_value;
    j["evpi"] = report.evpi;
    j["vss"] = report.vss;
    return j.dump(indent);
}

} // namespace srq
