#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srq/model.hpp"

namespace srq {

enum class VarKind { J, Buy, Sell };

struct BitRange {
    int first = 0;
    int count = 0;
};

struct TimestepBits {
    BitRange j;
    BitRange buy;
    BitRange sell;
    BitRange p;
};

struct DecisionBitInfo {
    int timestep = 0;
    VarKind kind = VarKind::J;
    int significance = 0; // weight 2^significance, LSB-first
};

struct ScenarioBitInfo {
    int timestep = 0;
    int significance = 0;
};

// Global qubit numbering: decision qubits occupy [0, n_d) ordered per
// timestep as j-bits, buy-bits, sell-bits; scenario qubits occupy
// [n_d, n_d + n_s). Within a variable, bit k carries weight 2^k.
struct QubitLayout {
    std::vector<TimestepBits> steps;
    int decision_qubits = 0;
    int scenario_qubits = 0;
    std::vector<DecisionBitInfo> decision_bits; // indexed by qubit
    std::vector<ScenarioBitInfo> scenario_bits; // indexed by qubit - decision_qubits

    int total_qubits() const { return decision_qubits + scenario_qubits; }
};

QubitLayout build_layout(const InstanceSpec& instance);

// A coefficient that is affine in the scenario values: c0 + sum_t cp[t]*p_t.
struct ScenarioAffine {
    double c0 = 0.0;
    std::vector<double> cp;

    double at(std::span<const long long> p) const {
        double v = c0;
        for (std::size_t t = 0; t < cp.size(); ++t) v += cp[t] * static_cast<double>(p[t]);
        return v;
    }
    bool depends_on_p() const {
        for (double c : cp)
            if (c != 0.0) return true;
        return false;
    }
};

// Penalty QUBO over the decision bits with the scenario values p_t kept
// symbolic. The balance constraint enters as lambda*(j - buy + sell - p)^2,
// so after expansion every p-dependence is at most linear per term, plus a
// per-timestep p^2 constant.
struct ScenarioQubo {
    int n_bits = 0;
    int horizon = 0;
    double lambda = 1.0;
    std::map<std::pair<int, int>, ScenarioAffine> quadratic; // keys i < j
    std::vector<ScenarioAffine> linear;                      // per decision bit
    double constant0 = 0.0;
    std::vector<double> constant_p_linear;    // per t, multiplies p_t
    std::vector<double> constant_p_quadratic; // per t, multiplies p_t^2
};

ScenarioQubo build_qubo(const InstanceSpec& instance, const QubitLayout& layout, double lambda);

// Evaluates the scenario-instantiated QUBO on a decision bitstring
// (bit i of decision_bits = qubit i).
double qubo_energy(const ScenarioQubo& qubo, std::uint64_t decision_bits,
                   std::span<const long long> p);

// Ising form of the same problem with the scenario dependence isolated:
// couplings J are scenario-free by construction and the external field
// splits as h_i(p) = field0[i] + sum_t scenario_coupling[t][i] * p_t.
struct SplitIsing {
    int n_spins = 0;
    int horizon = 0;
    std::map<std::pair<int, int>, double> couplings;    // keys i < j
    std::vector<double> field0;                         // h0_i
    std::vector<std::vector<double>> scenario_coupling; // [t][i]
    double constant0 = 0.0;
    std::vector<double> scenario_constant_linear;    // per t, multiplies p_t
    std::vector<double> scenario_constant_quadratic; // per t, multiplies p_t^2

    double field(int spin, std::span<const long long> p) const;
    double scenario_constant(std::span<const long long> p) const;
    // -sum_{i<j} J_ij s_i s_j - sum_i h_i(p) s_i with s = 1 - 2*bit
    // (bit 0 maps to spin +1, the Pauli-Z eigenvalue of |0>).
    double energy(std::uint64_t decision_bits, std::span<const long long> p) const;
};

// Substitutes x = (1 - s)/2. Throws if any quadratic decision term carries
// scenario dependence, which would signal an encoder bug.
SplitIsing qubo_to_split_ising(const ScenarioQubo& qubo, const QubitLayout& layout);

struct DecodedState {
    std::vector<long long> j;
    std::vector<long long> buy;
    std::vector<long long> sell;
    std::vector<long long> p;
};

// Integer values of all registers for one full basis state, offsets applied.
DecodedState decode(std::uint64_t basis, const QubitLayout& layout, const InstanceSpec& instance);

std::vector<long long> decode_j(std::uint64_t basis, const QubitLayout& layout,
                                const InstanceSpec& instance);
std::vector<long long> decode_p(std::uint64_t basis, const QubitLayout& layout,
                                const InstanceSpec& instance);

// Inverse of decode for the decision registers; values must be in range.
std::uint64_t encode_decisions(const QubitLayout& layout, const InstanceSpec& instance,
                               std::span<const long long> j, std::span<const long long> buy,
                               std::span<const long long> sell);

// Scenario-register bits of a p-vector, already shifted to [n_d, n_d+n_s).
std::uint64_t encode_scenario(const QubitLayout& layout, const InstanceSpec& instance,
                              std::span<const long long> p);

// Enumeration check that the penalty weight dominates: for every joint
// scenario, the QUBO argmin over decision bitstrings satisfies the balance
// constraint. Intended for desk-scale instances.
bool penalty_dominates(const ScenarioQubo& qubo, const QubitLayout& layout,
                       const InstanceSpec& instance);

std::string split_ising_to_json(const SplitIsing& ising, int indent = 2);

} // namespace srq
