#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "srq/oracle.hpp"
#include "srq/qaoa.hpp"
#include "srq/util.hpp"

using namespace srq;
using doctest::Approx;

namespace {

const InstanceSpec kPaper = test::make_paper_instance();

// Decision-register-only QAOA on the p-instantiated problem; reference for
// the stochastic-deterministic consistency checks.
double deterministic_objective(const CompiledProblem& problem, std::span<const double> gamma,
                               std::span<const double> beta, std::span<const long long> p_fixed) {
    StateVector state(problem.layout.decision_qubits);
    for (int q = 0; q < problem.layout.decision_qubits; ++q) state.apply_h(q);
    for (std::size_t k = 0; k < gamma.size(); ++k) {
        for (int i = 0; i < problem.layout.decision_qubits; ++i)
            state.apply_rz(i, -2.0 * gamma[k] * problem.ising.field(i, p_fixed));
        for (const auto& [key, J] : problem.ising.couplings)
            state.apply_rzz(key.first, key.second, -2.0 * gamma[k] * J);
        for (int i = 0; i < problem.layout.decision_qubits; ++i)
            state.apply_rx(i, -2.0 * beta[k]);
    }
    return expectation_diagonal(state, [&](std::uint64_t z) {
        return qubo_energy(problem.qubo, z, p_fixed);
    });
}

// Scenario-weighted mean energy over uniform decisions; the expected value
// of the objective at gamma = beta = 0.
double uniform_mean_energy(const CompiledProblem& problem, const InstanceSpec& instance) {
    const std::uint64_t n_dec = 1ULL << problem.layout.decision_qubits;
    double total = 0.0;
    for (const auto& sc : joint_scenarios(instance)) {
        double mean = 0.0;
        for (std::uint64_t x = 0; x < n_dec; ++x) mean += qubo_energy(problem.qubo, x, sc.p);
        total += sc.probability * mean / static_cast<double>(n_dec);
    }
    return total;
}

StateVector run_full_circuit(const CompiledProblem& problem, const QaoaParams& params) {
    StateVector state(problem.layout.total_qubits());
    apply_circuit(build_circuit(problem.ising, problem.layout, problem.instance, params.gamma,
                                params.beta),
                  state);
    return state;
}

} // namespace

TEST_SUITE("qaoa") {

TEST_CASE("annealing ramp endpoints") {
    const QaoaParams params = init_params(InitStrategy::AnnealingRamp, 2, 1.0, 1.0, 0);
    CHECK(params.gamma == std::vector<double>{0.5, 1.0});
    CHECK(params.beta == std::vector<double>{0.5, 0.0});
}

TEST_CASE("constant and random initializations") {
    const QaoaParams constant = init_params(InitStrategy::Constant, 3, 1.0, 1.0, 0);
    CHECK(constant.gamma == std::vector<double>{0.5, 0.5, 0.5});
    CHECK(constant.beta == std::vector<double>{0.5, 0.5, 0.5});

    const QaoaParams a = init_params(InitStrategy::Random, 4, 1.0, 1.0, 99);
    const QaoaParams b = init_params(InitStrategy::Random, 4, 1.0, 1.0, 99);
    CHECK(a.gamma == b.gamma);
    CHECK(a.beta == b.beta);
    for (double g : a.gamma) {
        CHECK(g >= 0.0);
        CHECK(g < 3.15);
    }
    const QaoaParams c = init_params(InitStrategy::Random, 4, 1.0, 1.0, 100);
    CHECK(a.gamma != c.gamma);

    CHECK_THROWS_AS(init_params(InitStrategy::Random, 0, 1.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("circuit gate counts for one layer on the paper instance") {
    const CompiledProblem problem = compile_problem(kPaper, 1.0);
    const QaoaParams params = init_params(InitStrategy::Constant, 1, 1.0, 1.0, 0);
    const Circuit circuit = build_circuit(problem.ising, problem.layout, kPaper, params.gamma,
                                          params.beta);

    int prep = 0, h = 0, rz = 0, rzz = 0, crz = 0, rx = 0;
    for (const GateOp& op : circuit.ops) {
        if (std::holds_alternative<PrepareOp>(op)) ++prep;
        else if (std::holds_alternative<HOp>(op)) ++h;
        else if (std::holds_alternative<RzOp>(op)) ++rz;
        else if (std::holds_alternative<RzzOp>(op)) ++rzz;
        else if (std::holds_alternative<CrzOp>(op)) ++crz;
        else ++rx;
    }
    CHECK(prep == 1);
    CHECK(h == 6);
    CHECK(rz == 6);
    CHECK(rzz == 15); // all pairs within the 6-bit timestep couple
    CHECK(crz == 12); // 2 scenario bits x 6 coupled decision bits
    CHECK(rx == 6);

    std::vector<double> bad_beta{0.1, 0.2};
    CHECK_THROWS_AS(build_circuit(problem.ising, problem.layout, kPaper, params.gamma, bad_beta),
                    std::invalid_argument);
}

TEST_CASE("zero gamma leaves the phase part inert") {
    const CompiledProblem problem = compile_problem(kPaper, 1.0);
    const std::vector<double> gamma{0.0}, beta{0.35};
    const StateVector with_layer = run_full_circuit(problem, {gamma, beta});

    const std::vector<double> zero{0.0};
    StateVector reference(problem.layout.total_qubits());
    apply_circuit(build_circuit(problem.ising, problem.layout, kPaper, zero, zero), reference);
    for (int i = 0; i < problem.layout.decision_qubits; ++i) reference.apply_rx(i, -2.0 * 0.35);

    for (std::uint64_t z = 0; z < reference.size(); ++z)
        CHECK(std::abs(with_layer.amplitude(z) - reference.amplitude(z)) < 1e-12);
}

TEST_CASE("objective at zero angles is the scenario-weighted mean energy") {
    const CompiledProblem problem = compile_problem(kPaper, 1.0);
    QaoaConfig config;
    config.layers = 1;
    const QaoaParams zero{{0.0}, {0.0}};
    CHECK(objective(zero, problem, config) ==
          Approx(uniform_mean_energy(problem, kPaper)).epsilon(1e-10));

    // Decision register is uniform per scenario branch.
    const StateVector state = run_full_circuit(problem, zero);
    const double per_state = 1.0 / 64.0;
    for (const auto& sc : joint_scenarios(kPaper)) {
        const std::uint64_t branch = encode_scenario(problem.layout, kPaper, sc.p);
        for (std::uint64_t x = 0; x < 64; ++x)
            CHECK(state.probability(branch | x) ==
                  Approx(sc.probability * per_state).epsilon(1e-10));
    }
}

TEST_CASE("register offsets fold into the field rotations") {
    InstanceSpec shifted;
    shifted.horizon = 1;
    shifted.prices = kPaper.prices;
    shifted.j_vars = {FirstStageVar{2, 0}};
    shifted.p_dists = {ScenarioDistribution{{{3, 0.6}, {4, 0.4}}, 3}};
    shifted.recourse_bit_width = 3;
    REQUIRE(validate(shifted).empty());

    const CompiledProblem problem = compile_problem(shifted, 1.0);
    CHECK(problem.layout.scenario_qubits == 1);

    QaoaConfig config;
    config.layers = 1;
    CHECK(objective({{0.0}, {0.0}}, problem, config) ==
          Approx(uniform_mean_energy(problem, shifted)).epsilon(1e-10));

    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> angle(-1.5, 1.5);
    for (int trial = 0; trial < 5; ++trial) {
        const QaoaParams params{{angle(rng)}, {angle(rng)}};
        const StateVector state = run_full_circuit(problem, params);
        const double expectation = expectation_diagonal(
            state, [&](std::uint64_t z) { return problem.basis_cost(z); });
        CHECK(objective(params, problem, config) == Approx(expectation).epsilon(1e-12));
        CHECK(state.norm_squared() == Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("phase layer equals the diagonal oracle on an offset instance") {
    InstanceSpec shifted;
    shifted.horizon = 1;
    shifted.prices = kPaper.prices;
    shifted.j_vars = {FirstStageVar{2, 1}};
    shifted.p_dists = {ScenarioDistribution{{{1, 0.3}, {2, 0.4}, {4, 0.3}}, 1}};
    shifted.recourse_bit_width = 2;
    REQUIRE(validate(shifted).empty());
    const CompiledProblem problem = compile_problem(shifted, 1.0);

    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    const std::vector<double> zero{0.0};
    const std::uint64_t decision_mask = (1ULL << problem.layout.decision_qubits) - 1;
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector<double> gamma{angle(rng)};

        StateVector gate_built(problem.layout.total_qubits());
        apply_circuit(build_circuit(problem.ising, problem.layout, shifted, gamma, zero),
                      gate_built);

        StateVector oracle(problem.layout.total_qubits());
        apply_circuit(build_circuit(problem.ising, problem.layout, shifted, zero, zero), oracle);
        oracle.apply_diagonal_phase(gamma[0], [&](std::uint64_t z) {
            const std::vector<long long> p = decode_p(z, problem.layout, shifted);
            return problem.ising.energy(z & decision_mask, p);
        });

        for (std::uint64_t z = 0; z < gate_built.size(); ++z)
            REQUIRE(std::abs(gate_built.amplitude(z) - oracle.amplitude(z)) < 1e-9);
    }
}

TEST_CASE("a point mass at the register offset needs no scenario qubits") {
    InstanceSpec fixed;
    fixed.horizon = 1;
    fixed.prices = kPaper.prices;
    fixed.j_vars = {FirstStageVar{2, 0}};
    fixed.p_dists = {ScenarioDistribution{{{3, 1.0}}, 3}};
    fixed.recourse_bit_width = 2;
    REQUIRE(validate(fixed).empty());

    const CompiledProblem problem = compile_problem(fixed, 1.0);
    CHECK(problem.layout.scenario_qubits == 0);
    CHECK(problem.layout.total_qubits() == 6);

    QaoaConfig config;
    config.layers = 1;
    CHECK(objective({{0.0}, {0.0}}, problem, config) ==
          Approx(uniform_mean_energy(problem, fixed)).epsilon(1e-10));

    config.max_evaluations = 150;
    config.seed = 3;
    const RunResult result = optimize(config, fixed);
    CHECK(result.feasibility.size() == 1);
    CHECK(result.feasibility[0].p == std::vector<long long>{3});
}

TEST_CASE("exact objective decomposes into per-branch expectations") {
    const CompiledProblem problem = compile_problem(kPaper, 1.0);
    QaoaConfig config;
    config.layers = 2;
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        const QaoaParams params{{angle(rng), angle(rng)}, {angle(rng), angle(rng)}};
        const StateVector state = run_full_circuit(problem, params);

        double decomposed = 0.0;
        for (const auto& sc : joint_scenarios(kPaper)) {
            const std::uint64_t branch = encode_scenario(problem.layout, kPaper, sc.p);
            for (std::uint64_t x = 0; x < 64; ++x)
                decomposed += state.probability(branch | x) *
                              qubo_energy(problem.qubo, x, sc.p);
        }
        CHECK(objective(params, problem, config) == Approx(decomposed).epsilon(1e-10));
    }
}

TEST_CASE("scenario marginal survives the circuit") {
    const CompiledProblem problem = compile_problem(kPaper, 1.0);
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        QaoaParams params;
        for (int k = 0; k < 3; ++k) {
            params.gamma.push_back(angle(rng));
            params.beta.push_back(angle(rng));
        }
        const StateVector state = run_full_circuit(problem, params);
        for (const auto& sc : joint_scenarios(kPaper)) {
            const std::uint64_t branch = encode_scenario(problem.layout, kPaper, sc.p);
            double marginal = 0.0;
            for (std::uint64_t x = 0; x < 64; ++x) marginal += state.probability(branch | x);
            CHECK(marginal == Approx(sc.probability).epsilon(1e-10));
        }
    }
}

TEST_CASE("point-mass scenario reduces to the deterministic pipeline") {
    const InstanceSpec point = test::make_pointmass_instance();
    const CompiledProblem problem = compile_problem(point, 1.0);
    const std::vector<long long> p_fixed{2};
    QaoaConfig config;
    config.layers = 2;

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const QaoaParams params{{angle(rng), angle(rng)}, {angle(rng), angle(rng)}};
        const double stochastic = objective(params, problem, config);
        const double deterministic =
            deterministic_objective(problem, params.gamma, params.beta, p_fixed);
        CHECK(stochastic == Approx(deterministic).epsilon(1e-10));
    }
}

TEST_CASE("sampled objective agrees with the exact one") {
    const CompiledProblem problem = compile_problem(kPaper, 1.0);
    QaoaConfig exact_config;
    exact_config.layers = 1;
    const QaoaParams params{{0.4}, {0.3}};
    const double exact = objective(params, problem, exact_config);

    // Exact standard deviation of the per-shot cost.
    const StateVector state = run_full_circuit(problem, params);
    double second_moment = 0.0;
    for (std::uint64_t z = 0; z < state.size(); ++z)
        second_moment += state.probability(z) * problem.basis_cost(z) * problem.basis_cost(z);
    const double variance = second_moment - exact * exact;

    QaoaConfig sampled_config = exact_config;
    sampled_config.eval_mode = EvalMode::Sampled;
    sampled_config.shots = 1000000;
    sampled_config.seed = 71;
    const double sampled = objective(params, problem, sampled_config);
    const double standard_error = std::sqrt(variance / sampled_config.shots);
    CHECK(std::abs(sampled - exact) < 5.0 * standard_error);
}

TEST_CASE("optimize with budget one returns the init point") {
    QaoaConfig config;
    config.layers = 3;
    config.max_evaluations = 1;
    config.seed = 5;
    const RunResult result = optimize(config, kPaper);
    CHECK(result.evaluations == 1);
    REQUIRE(result.cost_trace.size() == 1);
    const QaoaParams init = init_params(InitStrategy::AnnealingRamp, 3, 1.0, 1.0,
                                        mix_seed(config.seed, 1));
    CHECK(result.best_params.gamma == init.gamma);
    CHECK(result.best_params.beta == init.beta);
    CHECK(result.best_expectation == Approx(result.cost_trace[0]));
}

TEST_CASE("optimization never loses to the initial parameters") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        QaoaConfig config;
        config.layers = 2;
        config.max_evaluations = 120;
        config.seed = seed;
        const RunResult result = optimize(config, kPaper);
        CHECK(result.best_expectation <= result.cost_trace.front() + 1e-12);
        CHECK(result.cost_trace.size() <= 120);

        double marginal_sum = 0.0;
        for (const auto& [j, prob] : result.decision_marginal) marginal_sum += prob;
        CHECK(marginal_sum == Approx(1.0).epsilon(1e-9));
        CHECK(result.feasibility.size() == 3);
    }
}

TEST_CASE("optimize is deterministic given the seed") {
    QaoaConfig config;
    config.layers = 2;
    config.max_evaluations = 80;
    config.seed = 12345;
    const RunResult a = optimize(config, kPaper);
    const RunResult b = optimize(config, kPaper);
    CHECK(a.best_expectation == b.best_expectation);
    CHECK(a.cost_trace == b.cost_trace);
    CHECK(a.best_params.gamma == b.best_params.gamma);
    CHECK(a.best_params.beta == b.best_params.beta);
    CHECK(a.modal_j == b.modal_j);
    CHECK(a.decision_marginal == b.decision_marginal);
}

TEST_CASE("point-mass run approaches the enumerated minimum") {
    const InstanceSpec point = test::make_pointmass_instance();
    const CompiledProblem problem = compile_problem(point, 1.0);
    double minimum = 1e300;
    const std::vector<long long> p_fixed{2};
    for (std::uint64_t x = 0; x < 64; ++x)
        minimum = std::min(minimum, qubo_energy(problem.qubo, x, p_fixed));
    CHECK(minimum == Approx(-0.5).epsilon(1e-12));

    // A deep, finely stepped ramp tracks the annealing path closely; the
    // optimizer then only has to hold on to it.
    QaoaConfig config;
    config.layers = 300;
    config.max_evaluations = 250;
    config.gamma_max = 0.4;
    config.beta_max = 0.15;
    config.seed = 4;
    const RunResult result = optimize(config, point);
    CHECK(result.best_expectation < minimum + 0.05);
    CHECK(result.modal_j == std::vector<long long>{2});
}

TEST_CASE("sampled optimize produces a histogram") {
    QaoaConfig config;
    config.layers = 1;
    config.max_evaluations = 10;
    config.eval_mode = EvalMode::Sampled;
    config.shots = 256;
    config.seed = 9;
    const RunResult result = optimize(config, kPaper);
    REQUIRE(result.histogram.has_value());
    CHECK(result.histogram->total == 256);
    double marginal_sum = 0.0;
    for (const auto& [j, prob] : result.decision_marginal) marginal_sum += prob;
    CHECK(marginal_sum == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("layer sweep shapes, seeds and determinism") {
    QaoaConfig config;
    config.max_evaluations = 30;
    config.seed = 100;

    const std::vector<int> single{1};
    const SweepTable one = layer_sweep(kPaper, single, 1, config);
    CHECK(one.rows.size() == 1);
    CHECK(one.stats.size() == 1);
    CHECK(one.oracle_j == std::vector<long long>{2});

    const std::vector<int> pair{1, 5};
    const SweepTable table = layer_sweep(kPaper, pair, 10, config);
    REQUIRE(table.rows.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(table.rows[i].seed == 100 + static_cast<std::uint64_t>(i));
    CHECK(table.rows[0].layers == 1);
    CHECK(table.rows[10].layers == 5);

    const SweepTable parallel = layer_sweep(kPaper, pair, 10, config, 2);
    CHECK(sweep_to_csv(parallel, false) == sweep_to_csv(table, false));

    const std::string csv = sweep_to_csv(table, false);
    CHECK(csv.find("layers,run,seed,best_expectation,modal_j,success,evaluations,wall_ms") == 0);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n' ? 1 : 0;
    CHECK(lines == 21); // header + 20 rows
}

} // TEST_SUITE
