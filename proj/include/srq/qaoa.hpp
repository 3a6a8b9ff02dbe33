#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "srq/encoding.hpp"
#include "srq/model.hpp"
#include "srq/simulator.hpp"

namespace srq {

enum class InitStrategy { AnnealingRamp, Random, Constant };
enum class OptimizerKind { NelderMead, Spsa, CobylaStyle };
enum class EvalMode { ExactExpectation, Sampled };

std::string to_string(InitStrategy s);
std::string to_string(OptimizerKind k);
std::string to_string(EvalMode m);
InitStrategy parse_init_strategy(const std::string& name);
OptimizerKind parse_optimizer_kind(const std::string& name);
EvalMode parse_eval_mode(const std::string& name);

struct QaoaConfig {
    int layers = 1;
    InitStrategy init = InitStrategy::AnnealingRamp;
    OptimizerKind optimizer = OptimizerKind::NelderMead;
    EvalMode eval_mode = EvalMode::ExactExpectation;
    int shots = 4096;
    int max_evaluations = 500;
    std::uint64_t seed = 0;
    double penalty = 1.0;
    double gamma_max = 1.0;
    double beta_max = 1.0;
};

struct QaoaParams {
    std::vector<double> gamma;
    std::vector<double> beta;
};

// annealing-ramp: gamma ramps up to gamma_max, beta ramps down from
// beta_max; random: uniform in [0, pi); constant: all 0.5.
QaoaParams init_params(InitStrategy strategy, int layers, double gamma_max, double beta_max,
                       std::uint64_t seed);

// --- gate sequence -----------------------------------------------------

struct PrepareOp {
    int first_qubit = 0;
    int qubit_count = 0;
    std::vector<std::pair<std::uint64_t, double>> probabilities;
};
struct HOp {
    int qubit = 0;
};
struct RxOp {
    int qubit = 0;
    double angle = 0.0;
};
struct RzOp {
    int qubit = 0;
    double angle = 0.0;
};
struct RzzOp {
    int qubit_a = 0;
    int qubit_b = 0;
    double angle = 0.0;
};
struct CrzOp {
    int control = 0;
    int target = 0;
    double angle = 0.0;
};

using GateOp = std::variant<PrepareOp, HOp, RxOp, RzOp, RzzOp, CrzOp>;

struct Circuit {
    int num_qubits = 0;
    std::vector<GateOp> ops;
};

// Scenario registers amplitude-encoded, H on every decision qubit, then per
// layer the phase separator (RZ for the scenario-free field, RZZ per
// coupling, CRZ from each scenario bit weighted by 2^significance) followed
// by the X mixer on decision qubits. Each phase layer acts on basis states
// exactly as exp(-i gamma_k E(z)) with E the scenario-conditional Ising
// energy; per-scenario constants stay classical.
Circuit build_circuit(const SplitIsing& ising, const QubitLayout& layout,
                      const InstanceSpec& instance, std::span<const double> gamma,
                      std::span<const double> beta);

void apply_circuit(const Circuit& circuit, StateVector& state);

// Everything the objective needs, compiled once per instance + penalty.
struct CompiledProblem {
    InstanceSpec instance;
    QubitLayout layout;
    ScenarioQubo qubo;
    SplitIsing ising;
    // Full QUBO energy per basis state, materialized when small enough.
    std::vector<double> cost_table;

    double basis_cost(std::uint64_t z) const;
};

CompiledProblem compile_problem(const InstanceSpec& instance, double penalty);

// <psi|H_C|psi> with the scenario expectation realized by the amplitude-
// encoded register; sampled mode estimates the same quantity from shots.
double objective(const QaoaParams& params, const CompiledProblem& problem,
                 const QaoaConfig& config, int eval_index = 0);

struct BranchFeasibility {
    std::vector<long long> p;
    double probability = 0.0;
    std::vector<long long> j;
    std::vector<long long> buy;
    std::vector<long long> sell;
    bool balance_ok = false;
    bool complementarity_ok = false;
};

struct RunResult {
    QaoaParams best_params;
    double best_expectation = 0.0;
    std::vector<double> cost_trace;
    // Marginal over decoded first-stage vectors, summed across buy / sell /
    // scenario registers; sorted by j-vector.
    std::vector<std::pair<std::vector<long long>, double>> decision_marginal;
    std::vector<long long> modal_j;
    std::vector<BranchFeasibility> feasibility;
    int evaluations = 0;
    bool converged = false;
    double wall_ms = 0.0;
    std::optional<ShotCounts> histogram; // sampled mode only
};

RunResult optimize(const QaoaConfig& config, const InstanceSpec& instance);

std::string run_result_to_json(const RunResult& result, const QaoaConfig& config,
                               std::span<const long long> oracle_j, bool include_timings,
                               int indent = 2);

// --- layer sweep --------------------------------------------------------

struct SweepRow {
    int layers = 0;
    int run = 0;
    std::uint64_t seed = 0;
    double best_expectation = 0.0;
    std::vector<long long> modal_j;
    bool success = false;
    int evaluations = 0;
    double wall_ms = 0.0;
    std::vector<double> cost_trace;
};

struct LayerStats {
    int layers = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    double success_fraction = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<LayerStats> stats;
    std::vector<long long> oracle_j;
};

// runs_per_layer independent seeded runs per layer count; run (layer_index,
// run_index) uses seed base_config.seed + layer_index * runs_per_layer +
// run_index. jobs > 1 distributes runs across threads; results are merged
// in deterministic order either way.
SweepTable layer_sweep(const InstanceSpec& instance, std::span<const int> layer_counts,
                       int runs_per_layer, const QaoaConfig& base_config, int jobs = 1);

std::string sweep_to_csv(const SweepTable& table, bool include_timings);
std::string sweep_to_json(const SweepTable& table, bool include_timings, int indent = 2);

} // namespace srq
