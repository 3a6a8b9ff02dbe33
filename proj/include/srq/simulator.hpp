#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace srq {

using Amplitude = std::complex<double>;

inline constexpr int kDefaultQubitCap = 26;

// Dense statevector over n qubits. Basis-index bit k belongs to qubit k,
// LSB-first, matching the register layout of the encoding module. Gates
// mutate amplitudes in place; sampling never collapses the state.
class StateVector {
public:
    explicit StateVector(int num_qubits, int qubit_cap = kDefaultQubitCap);

    int num_qubits() const { return n_; }
    std::uint64_t size() const { return std::uint64_t{1} << n_; }

    std::span<const Amplitude> amplitudes() const { return amps_; }
    Amplitude amplitude(std::uint64_t basis) const { return amps_[basis]; }
    double probability(std::uint64_t basis) const { return std::norm(amps_[basis]); }
    double norm_squared() const;

    void apply_h(int qubit);
    void apply_rx(int qubit, double angle);
    // RZ(phi) = exp(-i phi Z / 2): |0> gains exp(-i phi/2), |1> gains
    // exp(+i phi/2).
    void apply_rz(int qubit, double angle);
    // RZZ(phi) = exp(-i phi Z(x)Z / 2).
    void apply_rzz(int qubit_a, int qubit_b, double angle);
    // RZ on the target only where the control bit is 1.
    void apply_crz(int control, int target, double angle);

    // Loads sqrt(probabilities) into a contiguous sub-register that must
    // currently be |0...0> and unentangled from the rest. probabilities maps
    // sub-register basis values to weights summing to 1.
    void prepare_amplitudes(int first_qubit, int qubit_count,
                            const std::vector<std::pair<std::uint64_t, double>>& probabilities);

    // amplitude(z) *= exp(-i gamma cost(z)); diagonal-oracle phase separator
    // used as a cross-check against the gate decomposition.
    void apply_diagonal_phase(double gamma, const std::function<double(std::uint64_t)>& cost);

private:
    void check_qubit(int qubit) const;
    template <typename Fn> void for_each_pair(int qubit, Fn&& fn);

    int n_;
    std::vector<Amplitude> amps_;
};

// Exact diagonal-observable expectation sum_z |a_z|^2 cost(z).
double expectation_diagonal(const StateVector& state,
                            const std::function<double(std::uint64_t)>& cost);

struct ShotCounts {
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;
};

// i.i.d. draws from |amplitude|^2; deterministic given the seed.
ShotCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed);

// Debug dump as [[index, re, im], ...]; format not stability-guaranteed.
std::string state_to_json(const StateVector& state);

} // namespace srq
