#include "srq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace srq {

StateVector::StateVector(int num_qubits, int qubit_cap) : n_(num_qubits) {
    if (num_qubits < 1)
        throw std::invalid_argument("state needs at least one qubit");
    if (num_qubits > qubit_cap)
        throw std::invalid_argument("qubit count " + std::to_string(num_qubits) +
                                    " exceeds cap " + std::to_string(qubit_cap));
    amps_.assign(std::uint64_t{1} << n_, Amplitude{0.0, 0.0});
    amps_[0] = Amplitude{1.0, 0.0};
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const Amplitude& a : amps_) s += std::norm(a);
    return s;
}

void StateVector::check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_)
        throw std::invalid_argument("qubit index " + std::to_string(qubit) + " out of range");
}

// Visits each (i0, i1 = i0 | 2^qubit) amplitude pair once by splitting the
// remaining index bits around the target bit.
template <typename Fn> void StateVector::for_each_pair(int qubit, Fn&& fn) {
    const std::uint64_t mask = std::uint64_t{1} << qubit;
    const std::uint64_t lo_mask = mask - 1;
    const std::uint64_t hi_mask = ~lo_mask;
    const std::uint64_t half = size() >> 1;
    for (std::uint64_t r = 0; r < half; ++r) {
        const std::uint64_t i0 = ((r & hi_mask) << 1) | (r & lo_mask);
        fn(amps_[i0], amps_[i0 | mask]);
    }
}

void StateVector::apply_h(int qubit) {
    check_qubit(qubit);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for_each_pair(qubit, [inv_sqrt2](Amplitude& a0, Amplitude& a1) {
        const Amplitude t0 = a0;
        const Amplitude t1 = a1;
        a0 = inv_sqrt2 * (t0 + t1);
        a1 = inv_sqrt2 * (t0 - t1);
    });
}

void StateVector::apply_rx(int qubit, double angle) {
    check_qubit(qubit);
    const double c = std::cos(angle / 2.0);
    const Amplitude mis{0.0, -std::sin(angle / 2.0)};
    for_each_pair(qubit, [c, mis](Amplitude& a0, Amplitude& a1) {
        const Amplitude t0 = a0;
        const Amplitude t1 = a1;
        a0 = c * t0 + mis * t1;
        a1 = mis * t0 + c * t1;
    });
}

void StateVector::apply_rz(int qubit, double angle) {
    check_qubit(qubit);
    const Amplitude phase0 = std::exp(Amplitude{0.0, -angle / 2.0});
    const Amplitude phase1 = std::exp(Amplitude{0.0, angle / 2.0});
    for_each_pair(qubit, [phase0, phase1](Amplitude& a0, Amplitude& a1) {
        a0 *= phase0;
        a1 *= phase1;
    });
}

void StateVector::apply_rzz(int qubit_a, int qubit_b, double angle) {
    check_qubit(qubit_a);
    check_qubit(qubit_b);
    if (qubit_a == qubit_b) throw std::invalid_argument("rzz needs two distinct qubits");
    const Amplitude even = std::exp(Amplitude{0.0, -angle / 2.0});
    const Amplitude odd = std::exp(Amplitude{0.0, angle / 2.0});
    const std::uint64_t mask_a = std::uint64_t{1} << qubit_a;
    const std::uint64_t mask_b = std::uint64_t{1} << qubit_b;
    for (std::uint64_t z = 0; z < size(); ++z)
        amps_[z] *= (bool(z & mask_a) != bool(z & mask_b)) ? odd : even;
}

void StateVector::apply_crz(int control, int target, double angle) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) throw std::invalid_argument("crz needs two distinct qubits");
    const Amplitude phase0 = std::exp(Amplitude{0.0, -angle / 2.0});
    const Amplitude phase1 = std::exp(Amplitude{0.0, angle / 2.0});
    const std::uint64_t mask_c = std::uint64_t{1} << control;
    const std::uint64_t mask_t = std::uint64_t{1} << target;
    for (std::uint64_t z = 0; z < size(); ++z) {
        if (!(z & mask_c)) continue;
        amps_[z] *= (z & mask_t) ? phase1 : phase0;
    }
}

void StateVector::prepare_amplitudes(
    int first_qubit, int qubit_count,
    const std::vector<std::pair<std::uint64_t, double>>& probabilities) {
    if (first_qubit < 0 || qubit_count < 1 || first_qubit + qubit_count > n_)
        throw std::invalid_argument("register out of range");

    const std::uint64_t reg_size = std::uint64_t{1} << qubit_count;
    std::vector<double> root(reg_size, 0.0);
    double sum = 0.0;
    for (const auto& [value, prob] : probabilities) {
        if (value >= reg_size)
            throw std::invalid_argument("value " + std::to_string(value) +
                                        " not representable in register");
        if (prob < 0.0) throw std::invalid_argument("negative probability");
        root[value] = std::sqrt(prob);
        sum += prob;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum));

    const std::uint64_t reg_mask = (reg_size - 1) << first_qubit;
    for (std::uint64_t z = 0; z < size(); ++z)
        if ((z & reg_mask) && std::norm(amps_[z]) > 1e-24)
            throw std::invalid_argument("register not in |0...0> before amplitude encoding");

    // Fan each surviving amplitude out across the register values.
    const std::uint64_t rest = size() >> qubit_count;
    const std::uint64_t lo_mask = (std::uint64_t{1} << first_qubit) - 1;
    for (std::uint64_t r = 0; r < rest; ++r) {
        const std::uint64_t base = ((r & ~lo_mask) << qubit_count) | (r & lo_mask);
        const Amplitude a = amps_[base];
        for (std::uint64_t v = 0; v < reg_size; ++v)
            amps_[base | (v << first_qubit)] = a * root[v];
    }
}

void StateVector::apply_diagonal_phase(double gamma,
                                       const std::function<double(std::uint64_t)>& cost) {
    for (std::uint64_t z = 0; z < size(); ++z)
        amps_[z] *= std::exp(Amplitude{0.0, -gamma * cost(z)});
}

double expectation_diagonal(const StateVector& state,
                            const std::function<double(std::uint64_t)>& cost) {
    double e = 0.0;
    const auto amps = state.amplitudes();
    for (std::uint64_t z = 0; z < amps.size(); ++z) {
        const double p = std::norm(amps[z]);
        if (p > 0.0) e += p * cost(z);
    }
    return e;
}

ShotCounts sample(const StateVector& state, std::uint64_t shots, std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("need at least one shot");

    const auto amps = state.amplitudes();
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (std::uint64_t z = 0; z < amps.size(); ++z) {
        acc += std::norm(amps[z]);
        cdf[z] = acc;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    ShotCounts result;
    result.total = shots;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = uniform(rng) * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t z =
            it == cdf.end() ? amps.size() - 1 : static_cast<std::uint64_t>(it - cdf.begin());
        ++result.counts[z];
    }
    return result;
}

std::string state_to_json(const StateVector& state) {
    nlohmann::json j = nlohmann::json::array();
    const auto amps = state.amplitudes();
    for (std::uint64_t z = 0; z < amps.size(); ++z)
        if (std::norm(amps[z]) > 0.0) j.push_back({z, amps[z].real(), amps[z].imag()});
    return j.dump();
}

} // namespace srq
