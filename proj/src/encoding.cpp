#include "srq/encoding.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace srq {

namespace {

int bits_for_value(long long max_shifted) {
    int bits = 0;
    while ((1LL << bits) - 1 < max_shifted) ++bits;
    return bits;
}

long long extract_bits(std::uint64_t basis, const BitRange& range) {
    long long v = 0;
    for (int k = 0; k < range.count; ++k)
        if (basis >> (range.first + k) & 1ULL) v |= 1LL << k;
    return v;
}

// Signed weight of a decision bit in the balance expression
// d_t = j_t - buy_t + sell_t.
double balance_weight(const DecisionBitInfo& info) {
    const double w = static_cast<double>(1LL << info.significance);
    return info.kind == VarKind::Buy ? -w : w;
}

} // namespace

QubitLayout build_layout(const InstanceSpec& instance) {
    QubitLayout layout;
    layout.steps.resize(instance.horizon);

    int next = 0;
    for (int t = 0; t < instance.horizon; ++t) {
        TimestepBits& step = layout.steps[t];
        step.j = {next, instance.j_vars[t].bit_width};
        next += step.j.count;
        step.buy = {next, instance.recourse_bit_width};
        next += step.buy.count;
        step.sell = {next, instance.recourse_bit_width};
        next += step.sell.count;

        for (int k = 0; k < step.j.count; ++k)
            layout.decision_bits.push_back({t, VarKind::J, k});
        for (int k = 0; k < step.buy.count; ++k)
            layout.decision_bits.push_back({t, VarKind::Buy, k});
        for (int k = 0; k < step.sell.count; ++k)
            layout.decision_bits.push_back({t, VarKind::Sell, k});
    }
    layout.decision_qubits = next;

    for (int t = 0; t < instance.horizon; ++t) {
        const ScenarioDistribution& d = instance.p_dists[t];
        const int ns = bits_for_value(d.max_value() - d.register_offset);
        layout.steps[t].p = {next, ns};
        next += ns;
        for (int k = 0; k < ns; ++k) layout.scenario_bits.push_back({t, k});
    }
    layout.scenario_qubits = next - layout.decision_qubits;
    return layout;
}

ScenarioQubo build_qubo(const InstanceSpec& instance, const QubitLayout& layout, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("penalty weight lambda must be > 0");

    ScenarioQubo qubo;
    qubo.n_bits = layout.decision_qubits;
    qubo.horizon = instance.horizon;
    qubo.lambda = lambda;
    qubo.linear.assign(qubo.n_bits, ScenarioAffine{0.0, std::vector<double>(instance.horizon, 0.0)});
    qubo.constant_p_linear.assign(instance.horizon, 0.0);
    qubo.constant_p_quadratic.assign(instance.horizon, 0.0);

    const Prices& pr = instance.prices;

    // Per-bit objective coefficients.
    for (int i = 0; i < qubo.n_bits; ++i) {
        const DecisionBitInfo& info = layout.decision_bits[i];
        const double w = static_cast<double>(1LL << info.significance);
        switch (info.kind) {
        case VarKind::J: qubo.linear[i].c0 += -pr.ev * w; break;
        case VarKind::Buy: qubo.linear[i].c0 += pr.intraday_buy * w; break;
        case VarKind::Sell: qubo.linear[i].c0 += -pr.intraday_sell * w; break;
        }
    }

    // Penalty lambda * (j_t - buy_t + sell_t - p_t)^2, expanded over the
    // binary encodings with p_t symbolic. Writing the balance as
    // u_t + sum_i w_i x_i with u_t = j_offset_t - p_t gives
    //   lambda * [ u^2 + sum_i (2 u w_i + w_i^2) x_i
    //              + 2 sum_{i<l} w_i w_l x_i x_l ].
    for (int t = 0; t < instance.horizon; ++t) {
        const double j_offset = static_cast<double>(instance.j_vars[t].offset);
        qubo.constant0 += -pr.ev * j_offset;

        std::vector<int> bits;
        for (int i = 0; i < qubo.n_bits; ++i)
            if (layout.decision_bits[i].timestep == t) bits.push_back(i);

        qubo.constant0 += lambda * j_offset * j_offset;
        qubo.constant_p_linear[t] += -2.0 * lambda * j_offset;
        qubo.constant_p_quadratic[t] += lambda;

        for (std::size_t a = 0; a < bits.size(); ++a) {
            const int i = bits[a];
            const double wi = balance_weight(layout.decision_bits[i]);
            qubo.linear[i].c0 += lambda * (2.0 * j_offset * wi + wi * wi);
            qubo.linear[i].cp[t] += -2.0 * lambda * wi;
            for (std::size_t b = a + 1; b < bits.size(); ++b) {
                const int l = bits[b];
                const double wl = balance_weight(layout.decision_bits[l]);
                auto& entry = qubo.quadratic[{i, l}];
                if (entry.cp.empty()) entry.cp.assign(instance.horizon, 0.0);
                entry.c0 += 2.0 * lambda * wi * wl;
            }
        }
    }

    return qubo;
}

double qubo_energy(const ScenarioQubo& qubo, std::uint64_t decision_bits,
                   std::span<const long long> p) {
    double e = qubo.constant0;
    for (int t = 0; t < qubo.horizon; ++t) {
        const double pt = static_cast<double>(p[t]);
        e += qubo.constant_p_linear[t] * pt + qubo.constant_p_quadratic[t] * pt * pt;
    }
    for (int i = 0; i < qubo.n_bits; ++i)
        if (decision_bits >> i & 1ULL) e += qubo.linear[i].at(p);
    for (const auto& [key, coeff] : qubo.quadratic)
        if ((decision_bits >> key.first & 1ULL) && (decision_bits >> key.second & 1ULL))
            e += coeff.at(p);
    return e;
}

double SplitIsing::field(int spin, std::span<const long long> p) const {
    double h = field0[spin];
    for (int t = 0; t < horizon; ++t)
        h += scenario_coupling[t][spin] * static_cast<double>(p[t]);
    return h;
}

double SplitIsing::scenario_constant(std::span<const long long> p) const {
    double c = 0.0;
    for (int t = 0; t < horizon; ++t) {
        const double pt = static_cast<double>(p[t]);
        c += scenario_constant_linear[t] * pt + scenario_constant_quadratic[t] * pt * pt;
    }
    return c;
}

double SplitIsing::energy(std::uint64_t decision_bits, std::span<const long long> p) const {
    auto spin = [decision_bits](int i) {
        return (decision_bits >> i & 1ULL) ? -1.0 : 1.0;
    };
    double e = 0.0;
    for (const auto& [key, J] : couplings) e -= J * spin(key.first) * spin(key.second);
    for (int i = 0; i < n_spins; ++i) e -= field(i, p) * spin(i);
    return e;
}

SplitIsing qubo_to_split_ising(const ScenarioQubo& qubo, const QubitLayout& layout) {
    if (layout.decision_qubits != qubo.n_bits)
        throw std::invalid_argument("layout does not match qubo decision register");
    SplitIsing ising;
    ising.n_spins = qubo.n_bits;
    ising.horizon = qubo.horizon;
    ising.field0.assign(qubo.n_bits, 0.0);
    ising.scenario_coupling.assign(qubo.horizon, std::vector<double>(qubo.n_bits, 0.0));
    ising.constant0 = qubo.constant0;
    ising.scenario_constant_linear = qubo.constant_p_linear;
    ising.scenario_constant_quadratic = qubo.constant_p_quadratic;

    // x_i x_l = (1 - s_i - s_l + s_i s_l) / 4
    for (const auto& [key, coeff] : qubo.quadratic) {
        if (coeff.depends_on_p())
            throw std::runtime_error(
                "encoder bug: scenario-dependent quadratic decision term between bits " +
                std::to_string(key.first) + " and " + std::to_string(key.second));
        const double q = coeff.c0;
        if (q == 0.0) continue;
        ising.couplings[key] += -q / 4.0;
        ising.field0[key.first] += q / 4.0;
        ising.field0[key.second] += q / 4.0;
        ising.constant0 += q / 4.0;
    }

    // x_i = (1 - s_i) / 2
    for (int i = 0; i < qubo.n_bits; ++i) {
        const ScenarioAffine& lin = qubo.linear[i];
        ising.field0[i] += lin.c0 / 2.0;
        ising.constant0 += lin.c0 / 2.0;
        for (int t = 0; t < qubo.horizon; ++t) {
            if (t < static_cast<int>(lin.cp.size()) && lin.cp[t] != 0.0) {
                ising.scenario_coupling[t][i] += lin.cp[t] / 2.0;
                ising.scenario_constant_linear[t] += lin.cp[t] / 2.0;
            }
        }
    }

    // Drop exact zeros so |couplings| matches the true interaction count.
    for (auto it = ising.couplings.begin(); it != ising.couplings.end();)
        it = it->second == 0.0 ? ising.couplings.erase(it) : std::next(it);

    return ising;
}

DecodedState decode(std::uint64_t basis, const QubitLayout& layout, const InstanceSpec& instance) {
    DecodedState st;
    st.j.resize(instance.horizon);
    st.buy.resize(instance.horizon);
    st.sell.resize(instance.horizon);
    st.p.resize(instance.horizon);
    for (int t = 0; t < instance.horizon; ++t) {
        const TimestepBits& step = layout.steps[t];
        st.j[t] = instance.j_vars[t].offset + extract_bits(basis, step.j);
        st.buy[t] = extract_bits(basis, step.buy);
        st.sell[t] = extract_bits(basis, step.sell);
        st.p[t] = instance.p_dists[t].register_offset + extract_bits(basis, step.p);
    }
    return st;
}

std::vector<long long> decode_j(std::uint64_t basis, const QubitLayout& layout,
                                const InstanceSpec& instance) {
    std::vector<long long> j(instance.horizon);
    for (int t = 0; t < instance.horizon; ++t)
        j[t] = instance.j_vars[t].offset + extract_bits(basis, layout.steps[t].j);
    return j;
}

std::vector<long long> decode_p(std::uint64_t basis, const QubitLayout& layout,
                                const InstanceSpec& instance) {
    std::vector<long long> p(instance.horizon);
    for (int t = 0; t < instance.horizon; ++t)
        p[t] = instance.p_dists[t].register_offset + extract_bits(basis, layout.steps[t].p);
    return p;
}

namespace {

void insert_bits(std::uint64_t& basis, const BitRange& range, long long value,
                 const char* what) {
    if (value < 0 || value >= (1LL << range.count))
        throw std::invalid_argument(std::string(what) + " value " + std::to_string(value) +
                                    " not representable in " + std::to_string(range.count) +
                                    " bits");
    for (int k = 0; k < range.count; ++k)
        if (value >> k & 1LL) basis |= 1ULL << (range.first + k);
}

} // namespace

std::uint64_t encode_decisions(const QubitLayout& layout, const InstanceSpec& instance,
                               std::span<const long long> j, std::span<const long long> buy,
                               std::span<const long long> sell) {
    std::uint64_t basis = 0;
    for (int t = 0; t < instance.horizon; ++t) {
        const TimestepBits& step = layout.steps[t];
        insert_bits(basis, step.j, j[t] - instance.j_vars[t].offset, "j");
        insert_bits(basis, step.buy, buy[t], "buy");
        insert_bits(basis, step.sell, sell[t], "sell");
    }
    return basis;
}

std::uint64_t encode_scenario(const QubitLayout& layout, const InstanceSpec& instance,
                              std::span<const long long> p) {
    std::uint64_t basis = 0;
    for (int t = 0; t < instance.horizon; ++t)
        insert_bits(basis, layout.steps[t].p, p[t] - instance.p_dists[t].register_offset, "p");
    return basis;
}

bool penalty_dominates(const ScenarioQubo& qubo, const QubitLayout& layout,
                       const InstanceSpec& instance) {
    if (layout.decision_qubits > 24)
        throw std::runtime_error("penalty_dominates: decision register too large to enumerate");

    const std::uint64_t n_states = 1ULL << layout.decision_qubits;
    for (const auto& sc : joint_scenarios(instance)) {
        std::uint64_t best = 0;
        double best_e = qubo_energy(qubo, 0, sc.p);
        for (std::uint64_t x = 1; x < n_states; ++x) {
            const double e = qubo_energy(qubo, x, sc.p);
            if (e < best_e) {
                best_e = e;
                best = x;
            }
        }
        const DecodedState st = decode(best, layout, instance);
        for (int t = 0; t < instance.horizon; ++t)
            if (st.j[t] - st.buy[t] + st.sell[t] != sc.p[t]) return false;
    }
    return true;
}

std::string split_ising_to_json(const SplitIsing& ising, int indent) {
    nlohmann::json j;
    j["n_spins"] = ising.n_spins;
    j["horizon"] = ising.horizon;
    auto couplings = nlohmann::json::array();
    for (const auto& [key, J] : ising.couplings)
        couplings.push_back({key.first, key.second, J});
    j["couplings"] = couplings;
    auto fields = nlohmann::json::array();
    for (int i = 0; i < ising.n_spins; ++i) fields.push_back({i, ising.field0[i]});
    j["fields"] = fields;
    auto sc = nlohmann::json::array();
    for (int t = 0; t < ising.horizon; ++t)
        for (int i = 0; i < ising.n_spins; ++i)
            if (ising.scenario_coupling[t][i] != 0.0)
                sc.push_back({t, i, ising.scenario_coupling[t][i]});
    j["scenario_couplings"] = sc;
    j["constant"] = ising.constant0;
    j["scenario_constant_linear"] = ising.scenario_constant_linear;
    j["scenario_constant_quadratic"] = ising.scenario_constant_quadratic;
    return j.dump(indent);
}

} // namespace srq
