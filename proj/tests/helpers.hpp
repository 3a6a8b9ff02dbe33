#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "srq/model.hpp"

namespace srq::test {

// ---------------------------------------------------------------------
// Independent brute-force oracles. These deliberately avoid the closed
// forms used by the library: the second stage is found by enumerating all
// (buy, sell) pairs on the balance line and the expectation by walking the
// scenario product directly.
// ---------------------------------------------------------------------

struct BruteRecourse {
    long long buy = 0;
    long long sell = 0;
    double cost = 0.0;
    bool found = false;
};

inline BruteRecourse brute_force_recourse(long long j, long long p, const Prices& prices,
                                          long long limit) {
    BruteRecourse best;
    for (long long buy = 0; buy <= limit; ++buy) {
        for (long long sell = 0; sell <= limit; ++sell) {
            if (j - buy + sell != p) continue;
            const double cost = prices.intraday_buy * static_cast<double>(buy) -
                                prices.intraday_sell * static_cast<double>(sell);
            if (!best.found || cost < best.cost) {
                best = {buy, sell, cost, true};
            }
        }
    }
    return best;
}

inline double brute_force_scenario_cost(std::span<const long long> j,
                                        std::span<const long long> p, const Prices& prices,
                                        long long limit) {
    double total = 0.0;
    for (std::size_t t = 0; t < j.size(); ++t) {
        const BruteRecourse rec = brute_force_recourse(j[t], p[t], prices, limit);
        total += -prices.ev * static_cast<double>(j[t]) + rec.cost;
    }
    return total;
}

inline double brute_force_expected_cost(std::span<const long long> j,
                                        const InstanceSpec& instance, long long limit) {
    double total = 0.0;
    std::vector<long long> p(instance.horizon);
    std::function<void(int, double)> walk = [&](int t, double prob) {
        if (t == instance.horizon) {
            total += prob * brute_force_scenario_cost(j, p, instance.prices, limit);
            return;
        }
        for (const auto& pt : instance.p_dists[t].support) {
            p[t] = pt.value;
            walk(t + 1, prob * pt.probability);
        }
    };
    walk(0, 1.0);
    return total;
}

// ---------------------------------------------------------------------
// Canned instances
// ---------------------------------------------------------------------

inline InstanceSpec make_paper_instance() {
    InstanceSpec instance;
    instance.horizon = 1;
    instance.prices = {0.25, 0.4, 0.1};
    instance.j_vars = {FirstStageVar{2, 0}};
    instance.p_dists = {ScenarioDistribution{{{1, 0.2}, {2, 0.5}, {3, 0.3}}, 0}};
    instance.recourse_bit_width = 2;
    return instance;
}

inline InstanceSpec make_pointmass_instance(long long p_value = 2) {
    InstanceSpec instance = make_paper_instance();
    instance.p_dists = {ScenarioDistribution{{{p_value, 1.0}}, 0}};
    return instance;
}

inline InstanceSpec make_random_instance(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> horizon_dist(1, 2);
    std::uniform_int_distribution<int> bits_dist(0, 2);
    std::uniform_int_distribution<long long> offset_dist(0, 2);
    std::uniform_int_distribution<int> support_dist(1, 3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    InstanceSpec instance;
    instance.horizon = horizon_dist(rng);
    const double sell = 0.05 + 0.15 * u01(rng);
    const double ev = sell + 0.05 + 0.15 * u01(rng);
    const double buy = ev + 0.05 + 0.2 * u01(rng);
    instance.prices = {ev, buy, sell};

    long long worst_need = 0;
    for (int t = 0; t < instance.horizon; ++t) {
        FirstStageVar var;
        var.bit_width = bits_dist(rng);
        var.offset = offset_dist(rng);
        instance.j_vars.push_back(var);

        ScenarioDistribution dist;
        const int n_points = support_dist(rng);
        std::uniform_int_distribution<long long> value_dist(0, 5);
        std::vector<long long> values;
        while (static_cast<int>(values.size()) < n_points) {
            const long long v = value_dist(rng);
            bool dup = false;
            for (long long seen : values) dup = dup || seen == v;
            if (!dup) values.push_back(v);
        }
        double remaining = 1.0;
        for (int i = 0; i < n_points; ++i) {
            double prob;
            if (i + 1 == n_points) {
                prob = remaining;
            } else {
                prob = remaining * (0.2 + 0.6 * u01(rng));
                remaining -= prob;
            }
            dist.support.push_back({values[i], prob});
        }
        instance.p_dists.push_back(dist);

        const long long j_max = var.offset + (1LL << var.bit_width) - 1;
        long long p_min = dist.support[0].value, p_max = dist.support[0].value;
        for (const auto& pt : dist.support) {
            p_min = std::min(p_min, pt.value);
            p_max = std::max(p_max, pt.value);
        }
        worst_need = std::max(worst_need, std::max(j_max - p_min, p_max - var.offset));
    }
    int bits = 0;
    while ((1LL << bits) - 1 < worst_need) ++bits;
    instance.recourse_bit_width = bits;
    return instance;
}

// ---------------------------------------------------------------------
// Statistics helpers
// ---------------------------------------------------------------------

// Upper critical value of the chi-square distribution via the
// Wilson-Hilferty approximation; z is the standard-normal quantile of the
// target significance (3.0902 for alpha = 0.001).
inline double chi_square_critical(int df, double z = 3.0902) {
    const double a = 2.0 / (9.0 * df);
    const double base = 1.0 - a + z * std::sqrt(a);
    return df * base * base * base;
}

// Max elementwise deviation between two amplitude vectors after aligning
// the global phase on the largest component.
inline double deviation_after_phase_alignment(std::span<const std::complex<double>> a,
                                              std::span<const std::complex<double>> b) {
    std::size_t anchor = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double mag = std::abs(a[i]);
        if (mag > best) {
            best = mag;
            anchor = i;
        }
    }
    std::complex<double> phase{1.0, 0.0};
    if (std::abs(b[anchor]) > 1e-300) {
        phase = a[anchor] / b[anchor];
        phase /= std::abs(phase);
    }
    double max_dev = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        max_dev = std::max(max_dev, std::abs(a[i] - phase * b[i]));
    return max_dev;
}

} // namespace srq::test
