#include "srq/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "srq/util.hpp"

namespace srq {

namespace {

constexpr double kProbSumTol = 1e-12;

std::string dist_path(int t) {
    return "p_dists[" + std::to_string(t) + "]";
}

} // namespace

long long ScenarioDistribution::min_value() const {
    long long m = support.empty() ? 0 : support.front().value;
    for (const auto& pt : support) m = std::min(m, pt.value);
    return m;
}

long long ScenarioDistribution::max_value() const {
    long long m = support.empty() ? 0 : support.front().value;
    for (const auto& pt : support) m = std::max(m, pt.value);
    return m;
}

std::vector<std::string> validate(const InstanceSpec& instance) {
    std::vector<std::string> errors;
    auto fail = [&errors](const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    };

    if (instance.horizon < 1) fail("horizon", "must be >= 1");

    const Prices& pr = instance.prices;
    if (pr.ev < 0 || pr.intraday_buy < 0 || pr.intraday_sell < 0)
        fail("prices", "all prices must be >= 0");
    if (!(pr.intraday_sell < pr.ev && pr.ev < pr.intraday_buy))
        fail("prices", "price ordering violated: require intraday_sell < ev < intraday_buy, got " +
                           format_double(pr.intraday_sell) + " / " + format_double(pr.ev) + " / " +
                           format_double(pr.intraday_buy));

    if (static_cast<int>(instance.j_vars.size()) != instance.horizon)
        fail("j_vars", "length " + std::to_string(instance.j_vars.size()) + " != horizon " +
                           std::to_string(instance.horizon));
    if (static_cast<int>(instance.p_dists.size()) != instance.horizon)
        fail("p_dists", "length " + std::to_string(instance.p_dists.size()) + " != horizon " +
                            std::to_string(instance.horizon));

    for (std::size_t t = 0; t < instance.j_vars.size(); ++t) {
        const FirstStageVar& v = instance.j_vars[t];
        if (v.bit_width < 0 || v.bit_width > 30)
            fail("j_vars[" + std::to_string(t) + "].bit_width", "must be in [0, 30]");
    }
    if (instance.recourse_bit_width < 0 || instance.recourse_bit_width > 30)
        fail("recourse_bit_width", "must be in [0, 30]");

    for (std::size_t t = 0; t < instance.p_dists.size(); ++t) {
        const ScenarioDistribution& d = instance.p_dists[t];
        if (d.support.empty()) {
            fail(dist_path(static_cast<int>(t)), "empty support");
            continue;
        }
        double sum = 0.0;
        std::set<long long> seen;
        for (const auto& pt : d.support) {
            if (!(pt.probability > 0.0) || pt.probability > 1.0)
                fail(dist_path(static_cast<int>(t)),
                     "probability " + format_double(pt.probability) + " of value " +
                         std::to_string(pt.value) + " outside (0, 1]");
            if (!seen.insert(pt.value).second)
                fail(dist_path(static_cast<int>(t)),
                     "duplicate support value " + std::to_string(pt.value));
            if (pt.value < d.register_offset)
                fail(dist_path(static_cast<int>(t)),
                     "value " + std::to_string(pt.value) + " below register offset " +
                         std::to_string(d.register_offset) + ", not representable");
            sum += pt.probability;
        }
        if (std::abs(sum - 1.0) > kProbSumTol)
            fail(dist_path(static_cast<int>(t)), "probabilities sum " + format_double(sum));
    }

    // Recourse registers must be able to absorb the worst imbalance in
    // either direction.
    if (static_cast<int>(instance.j_vars.size()) == instance.horizon &&
        static_cast<int>(instance.p_dists.size()) == instance.horizon) {
        const long long recourse_max = (1LL << instance.recourse_bit_width) - 1;
        for (int t = 0; t < instance.horizon; ++t) {
            const FirstStageVar& jv = instance.j_vars[t];
            const ScenarioDistribution& d = instance.p_dists[t];
            if (d.support.empty()) continue;
            const long long need_buy = std::max(0LL, jv.max_value() - d.min_value());
            const long long need_sell = std::max(0LL, d.max_value() - jv.min_value());
            const long long need = std::max(need_buy, need_sell);
            if (need > recourse_max)
                fail("recourse_bit_width",
                     "timestep " + std::to_string(t) + " needs recourse up to " +
                         std::to_string(need) + " but width " +
                         std::to_string(instance.recourse_bit_width) + " caps at " +
                         std::to_string(recourse_max));
        }
    }

    return errors;
}

double expected_scenario(const ScenarioDistribution& dist) {
    double sum = 0.0;
    for (const auto& pt : dist.support) sum += static_cast<double>(pt.value) * pt.probability;
    return sum;
}

std::size_t joint_scenario_count(const InstanceSpec& instance) {
    std::size_t count = 1;
    for (const auto& d : instance.p_dists) {
        if (d.support.empty()) return 0;
        count *= d.support.size();
    }
    return count;
}

std::vector<JointScenario> joint_scenarios(const InstanceSpec& instance, std::size_t cap) {
    std::size_t total = 1;
    for (const auto& d : instance.p_dists) {
        if (d.support.empty()) throw std::runtime_error("joint_scenarios: empty support");
        if (total > cap / d.support.size())
            throw std::runtime_error("scenario explosion: joint scenario count exceeds cap " +
                                     std::to_string(cap));
        total *= d.support.size();
    }

    std::vector<JointScenario> out;
    out.reserve(total);
    const int T = instance.horizon;
    std::vector<std::size_t> idx(T, 0);
    while (true) {
        JointScenario sc;
        sc.p.resize(T);
        sc.probability = 1.0;
        for (int t = 0; t < T; ++t) {
            const ScenarioPoint& pt = instance.p_dists[t].support[idx[t]];
            sc.p[t] = pt.value;
            sc.probability *= pt.probability;
        }
        out.push_back(std::move(sc));

        int t = T - 1;
        while (t >= 0 && ++idx[t] == instance.p_dists[t].support.size()) {
            idx[t] = 0;
            --t;
        }
        if (t < 0) break;
    }
    return out;
}

} // namespace srq
