#include "srq/qaoa.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "srq/optimizers.hpp"
#include "srq/oracle.hpp"
#include "srq/util.hpp"

namespace srq {

namespace {

constexpr int kCostTableMaxQubits = 22;

// Sub-seed salts; keeps init, optimizer and sampling streams independent.
constexpr std::uint64_t kSaltInit = 1;
constexpr std::uint64_t kSaltOptimizer = 2;
constexpr std::uint64_t kSaltFinalShots = 3;
constexpr std::uint64_t kSaltEvalShots = 1000;

} // namespace

std::string to_string(InitStrategy s) {
    switch (s) {
    case InitStrategy::AnnealingRamp: return "annealing-ramp";
    case InitStrategy::Random: return "random";
    case InitStrategy::Constant: return "constant";
    }
    return "?";
}

std::string to_string(OptimizerKind k) {
    switch (k) {
    case OptimizerKind::NelderMead: return "nelder-mead";
    case OptimizerKind::Spsa: return "spsa";
    case OptimizerKind::CobylaStyle: return "cobyla-style";
    }
    return "?";
}

std::string to_string(EvalMode m) {
    return m == EvalMode::ExactExpectation ? "exact" : "sampled";
}

InitStrategy parse_init_strategy(const std::string& name) {
    if (name == "annealing-ramp") return InitStrategy::AnnealingRamp;
    if (name == "random") return InitStrategy::Random;
    if (name == "constant") return InitStrategy::Constant;
    throw std::invalid_argument("unknown init strategy '" + name + "'");
}

OptimizerKind parse_optimizer_kind(const std::string& name) {
    if (name == "nelder-mead") return OptimizerKind::NelderMead;
    if (name == "spsa") return OptimizerKind::Spsa;
    if (name == "cobyla-style") return OptimizerKind::CobylaStyle;
    throw std::invalid_argument("unknown optimizer '" + name + "'");
}

EvalMode parse_eval_mode(const std::string& name) {
    if (name == "exact") return EvalMode::ExactExpectation;
    if (name == "sampled") return EvalMode::Sampled;
    throw std::invalid_argument("unknown eval mode '" + name + "'");
}

QaoaParams init_params(InitStrategy strategy, int layers, double gamma_max, double beta_max,
                       std::uint64_t seed) {
    if (layers < 1) throw std::invalid_argument("layers must be >= 1");
    QaoaParams params;
    params.gamma.resize(layers);
    params.beta.resize(layers);
    switch (strategy) {
    case InitStrategy::AnnealingRamp:
        for (int k = 0; k < layers; ++k) {
            const double frac = static_cast<double>(k + 1) / static_cast<double>(layers);
            params.gamma[k] = frac * gamma_max;
            params.beta[k] = (1.0 - frac) * beta_max;
        }
        break;
    case InitStrategy::Random: {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> angle(0.0, std::acos(-1.0));
        for (int k = 0; k < layers; ++k) params.gamma[k] = angle(rng);
        for (int k = 0; k < layers; ++k) params.beta[k] = angle(rng);
        break;
    }
    case InitStrategy::Constant:
        std::fill(params.gamma.begin(), params.gamma.end(), 0.5);
        std::fill(params.beta.begin(), params.beta.end(), 0.5);
        break;
    }
    return params;
}

Circuit build_circuit(const SplitIsing& ising, const QubitLayout& layout,
                      const InstanceSpec& instance, std::span<const double> gamma,
                      std::span<const double> beta) {
    if (gamma.size() != beta.size())
        throw std::invalid_argument("gamma and beta must have equal length");

    Circuit circuit;
    circuit.num_qubits = layout.total_qubits();

    // Scenario registers: amplitude-encode each per-timestep distribution.
    for (int t = 0; t < instance.horizon; ++t) {
        const BitRange& reg = layout.steps[t].p;
        if (reg.count == 0) continue;
        PrepareOp prep;
        prep.first_qubit = reg.first;
        prep.qubit_count = reg.count;
        for (const auto& pt : instance.p_dists[t].support)
            prep.probabilities.push_back(
                {static_cast<std::uint64_t>(pt.value - instance.p_dists[t].register_offset),
                 pt.probability});
        circuit.ops.push_back(std::move(prep));
    }

    for (int i = 0; i < layout.decision_qubits; ++i) circuit.ops.push_back(HOp{i});

    // Scenario-register offsets make a constant contribution to the field:
    // h_i(p) = h0_i + sum_t c_ti * (offset_t + sum_m 2^m y_tm).
    std::vector<double> field_base(layout.decision_qubits, 0.0);
    for (int i = 0; i < layout.decision_qubits; ++i) {
        field_base[i] = ising.field0[i];
        for (int t = 0; t < instance.horizon; ++t)
            field_base[i] += ising.scenario_coupling[t][i] *
                             static_cast<double>(instance.p_dists[t].register_offset);
    }

    for (std::size_t k = 0; k < gamma.size(); ++k) {
        const double g = gamma[k];

        // exp(+i g h_i s_i) = RZ(-2 g h_i) on qubit i
        for (int i = 0; i < layout.decision_qubits; ++i)
            circuit.ops.push_back(RzOp{i, -2.0 * g * field_base[i]});

        // exp(+i g J_il s_i s_l) = RZZ(-2 g J_il)
        for (const auto& [key, J] : ising.couplings)
            circuit.ops.push_back(RzzOp{key.first, key.second, -2.0 * g * J});

        // exp(+i g c_ti 2^m y_tm s_i) = CRZ(-2 g c_ti 2^m), controlled by
        // scenario bit m of register t.
        for (int t = 0; t < instance.horizon; ++t) {
            const BitRange& reg = layout.steps[t].p;
            for (int m = 0; m < reg.count; ++m) {
                const double weight = static_cast<double>(1LL << m);
                for (int i = 0; i < layout.decision_qubits; ++i) {
                    const double c = ising.scenario_coupling[t][i];
                    if (c == 0.0) continue;
                    circuit.ops.push_back(CrzOp{reg.first + m, i, -2.0 * g * c * weight});
                }
            }
        }

        // X mixer, exp(+i beta sum X). With the e^{-i gamma E} phase layer
        // this is the sign under which the increasing-gamma /
        // decreasing-beta ramp follows the annealing path from |+...+>
        // toward the low-energy states.
        for (int i = 0; i < layout.decision_qubits; ++i)
            circuit.ops.push_back(RxOp{i, -2.0 * beta[k]});
    }
    return circuit;
}

void apply_circuit(const Circuit& circuit, StateVector& state) {
    if (state.num_qubits() != circuit.num_qubits)
        throw std::invalid_argument("state size does not match circuit");
    for (const GateOp& op : circuit.ops) {
        std::visit(
            [&state](const auto& gate) {
                using T = std::decay_t<decltype(gate)>;
                if constexpr (std::is_same_v<T, PrepareOp>)
                    state.prepare_amplitudes(gate.first_qubit, gate.qubit_count,
                                             gate.probabilities);
                else if constexpr (std::is_same_v<T, HOp>)
                    state.apply_h(gate.qubit);
                else if constexpr (std::is_same_v<T, RxOp>)
                    state.apply_rx(gate.qubit, gate.angle);
                else if constexpr (std::is_same_v<T, RzOp>)
                    state.apply_rz(gate.qubit, gate.angle);
                else if constexpr (std::is_same_v<T, RzzOp>)
                    state.apply_rzz(gate.qubit_a, gate.qubit_b, gate.angle);
                else
                    state.apply_crz(gate.control, gate.target, gate.angle);
            },
            op);
    }
}

double CompiledProblem::basis_cost(std::uint64_t z) const {
    if (!cost_table.empty()) return cost_table[z];
    const std::uint64_t decision_mask = (std::uint64_t{1} << layout.decision_qubits) - 1;
    const std::vector<long long> p = decode_p(z, layout, instance);
    return qubo_energy(qubo, z & decision_mask, p);
}

CompiledProblem compile_problem(const InstanceSpec& instance, double penalty) {
    CompiledProblem problem;
    problem.instance = instance;
    problem.layout = build_layout(instance);
    problem.qubo = build_qubo(instance, problem.layout, penalty);
    problem.ising = qubo_to_split_ising(problem.qubo, problem.layout);

    const int total = problem.layout.total_qubits();
    if (total <= kCostTableMaxQubits) {
        const std::uint64_t n_states = std::uint64_t{1} << total;
        const std::uint64_t decision_mask = (std::uint64_t{1} << problem.layout.decision_qubits) - 1;
        problem.cost_table.resize(n_states);
        for (std::uint64_t z = 0; z < n_states; ++z) {
            const std::vector<long long> p = decode_p(z, problem.layout, problem.instance);
            problem.cost_table[z] = qubo_energy(problem.qubo, z & decision_mask, p);
        }
    }
    return problem;
}

namespace {

StateVector run_circuit(const QaoaParams& params, const CompiledProblem& problem) {
    StateVector state(problem.layout.total_qubits());
    const Circuit circuit = build_circuit(problem.ising, problem.layout, problem.instance,
                                          params.gamma, params.beta);
    apply_circuit(circuit, state);
    return state;
}

double histogram_mean_cost(const ShotCounts& counts, const CompiledProblem& problem) {
    double sum = 0.0;
    for (const auto& [z, count] : counts.counts)
        sum += static_cast<double>(count) * problem.basis_cost(z);
    return sum / static_cast<double>(counts.total);
}

} // namespace

double objective(const QaoaParams& params, const CompiledProblem& problem,
                 const QaoaConfig& config, int eval_index) {
    const StateVector state = run_circuit(params, problem);
    if (config.eval_mode == EvalMode::ExactExpectation)
        return expectation_diagonal(state,
                                    [&problem](std::uint64_t z) { return problem.basis_cost(z); });
    const ShotCounts counts =
        sample(state, static_cast<std::uint64_t>(config.shots),
               mix_seed(config.seed, kSaltEvalShots + static_cast<std::uint64_t>(eval_index)));
    return histogram_mean_cost(counts, problem);
}

namespace {

QaoaParams unflatten(const std::vector<double>& x, int layers) {
    QaoaParams params;
    params.gamma.assign(x.begin(), x.begin() + layers);
    params.beta.assign(x.begin() + layers, x.end());
    return params;
}

// Probability by full basis state, either exact or from shot frequencies.
std::vector<std::pair<std::uint64_t, double>> state_distribution(const StateVector& state,
                                                                 const ShotCounts* counts) {
    std::vector<std::pair<std::uint64_t, double>> dist;
    if (counts) {
        dist.reserve(counts->counts.size());
        for (const auto& [z, c] : counts->counts)
            dist.push_back({z, static_cast<double>(c) / static_cast<double>(counts->total)});
        return dist;
    }
    for (std::uint64_t z = 0; z < state.size(); ++z) {
        const double p = state.probability(z);
        if (p > 0.0) dist.push_back({z, p});
    }
    return dist;
}

} // namespace

RunResult optimize(const QaoaConfig& config, const InstanceSpec& instance) {
    if (config.layers < 1) throw std::invalid_argument("layers must be >= 1");
    if (config.max_evaluations < 1) throw std::invalid_argument("budget must be >= 1");
    if (config.eval_mode == EvalMode::Sampled && config.shots < 1)
        throw std::invalid_argument("shots must be >= 1 in sampled mode");

    const auto t_start = std::chrono::steady_clock::now();
    const CompiledProblem problem = compile_problem(instance, config.penalty);

    const QaoaParams start = init_params(config.init, config.layers, config.gamma_max,
                                         config.beta_max, mix_seed(config.seed, kSaltInit));
    std::vector<double> x0 = start.gamma;
    x0.insert(x0.end(), start.beta.begin(), start.beta.end());

    RunResult result;
    int eval_counter = 0;
    const ObjectiveFn fn = [&](const std::vector<double>& x) {
        const QaoaParams params = unflatten(x, config.layers);
        const double value = objective(params, problem, config, eval_counter++);
        if (!std::isfinite(value)) throw std::runtime_error("optimizer diverged: non-finite objective");
        result.cost_trace.push_back(value);
        return value;
    };

    OptimOptions opt;
    opt.max_evaluations = config.max_evaluations;
    opt.seed = mix_seed(config.seed, kSaltOptimizer);
    OptimResult opt_result;
    switch (config.optimizer) {
    case OptimizerKind::NelderMead: opt_result = minimize_nelder_mead(fn, x0, opt); break;
    case OptimizerKind::Spsa: opt_result = minimize_spsa(fn, x0, opt); break;
    case OptimizerKind::CobylaStyle: opt_result = minimize_cobyla_style(fn, x0, opt); break;
    }

    result.best_params = unflatten(opt_result.best_x, config.layers);
    result.best_expectation = opt_result.best_f;
    result.evaluations = opt_result.evaluations;
    result.converged = opt_result.converged;

    // Final measurement at the best parameters.
    const StateVector state = run_circuit(result.best_params, problem);
    const ShotCounts* histogram = nullptr;
    ShotCounts final_counts;
    if (config.eval_mode == EvalMode::Sampled) {
        final_counts = sample(state, static_cast<std::uint64_t>(config.shots),
                              mix_seed(config.seed, kSaltFinalShots));
        result.histogram = final_counts;
        histogram = &final_counts;
    }
    const auto dist = state_distribution(state, histogram);

    // Marginal over first-stage vectors.
    std::map<std::vector<long long>, double> marginal;
    for (const auto& [z, prob] : dist) marginal[decode_j(z, problem.layout, instance)] += prob;
    result.decision_marginal.assign(marginal.begin(), marginal.end());
    double best_prob = -1.0;
    for (const auto& [j, prob] : result.decision_marginal) {
        if (prob > best_prob + 1e-15) { // ties keep the lexicographically smallest
            best_prob = prob;
            result.modal_j = j;
        }
    }

    // Conditional modal decision per scenario branch, checked against the
    // balance and complementarity constraints.
    for (const auto& sc : joint_scenarios(instance)) {
        const std::uint64_t scenario_bits = encode_scenario(problem.layout, instance, sc.p);
        const std::uint64_t scenario_mask =
            ((std::uint64_t{1} << problem.layout.scenario_qubits) - 1)
            << problem.layout.decision_qubits;
        BranchFeasibility branch;
        branch.p = sc.p;
        std::uint64_t modal_z = 0;
        double modal_prob = -1.0;
        for (const auto& [z, prob] : dist) {
            if ((z & scenario_mask) != scenario_bits) continue;
            branch.probability += prob;
            if (prob > modal_prob + 1e-15) {
                modal_prob = prob;
                modal_z = z;
            }
        }
        if (modal_prob < 0.0) continue; // branch unobserved (sampled mode)
        const DecodedState decoded = decode(modal_z, problem.layout, instance);
        branch.j = decoded.j;
        branch.buy = decoded.buy;
        branch.sell = decoded.sell;
        branch.balance_ok = true;
        branch.complementarity_ok = true;
        for (int t = 0; t < instance.horizon; ++t) {
            if (decoded.j[t] - decoded.buy[t] + decoded.sell[t] != sc.p[t])
                branch.balance_ok = false;
            if (decoded.buy[t] != 0 && decoded.sell[t] != 0) branch.complementarity_ok = false;
        }
        result.feasibility.push_back(std::move(branch));
    }

    result.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
    return result;
}

namespace {

nlohmann::json config_to_json(const QaoaConfig& config) {
    nlohmann::json j;
    j["layers"] = config.layers;
    j["init"] = to_string(config.init);
    j["optimizer"] = to_string(config.optimizer);
    j["eval_mode"] = to_string(config.eval_mode);
    if (config.eval_mode == EvalMode::Sampled) j["shots"] = config.shots;
    j["max_evaluations"] = config.max_evaluations;
    j["seed"] = config.seed;
    j["penalty"] = config.penalty;
    j["gamma_max"] = config.gamma_max;
    j["beta_max"] = config.beta_max;
    return j;
}

} // namespace

std::string run_result_to_json(const RunResult& result, const QaoaConfig& config,
                               std::span<const long long> oracle_j, bool include_timings,
                               int indent) {
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["best_params"]["gamma"] = result.best_params.gamma;
    j["best_params"]["beta"] = result.best_params.beta;
    j["best_expectation"] = result.best_expectation;
    j["cost_trace"] = result.cost_trace;
    auto marginal = nlohmann::json::array();
    for (const auto& [jvec, prob] : result.decision_marginal)
        marginal.push_back({{"j", jvec}, {"probability", prob}});
    j["decision_marginal"] = marginal;
    j["modal_j"] = result.modal_j;
    auto feas = nlohmann::json::array();
    for (const auto& branch : result.feasibility)
        feas.push_back({{"p", branch.p},
                        {"probability", branch.probability},
                        {"j", branch.j},
                        {"buy", branch.buy},
                        {"sell", branch.sell},
                        {"balance_ok", branch.balance_ok},
                        {"complementarity_ok", branch.complementarity_ok}});
    j["feasibility_report"] = feas;
    j["evaluations"] = result.evaluations;
    j["converged"] = result.converged;
    j["wall_time"] = include_timings ? result.wall_ms / 1000.0 : 0.0;
    if (result.histogram) {
        auto hist = nlohmann::json::object();
        for (const auto& [z, count] : result.histogram->counts)
            hist[std::to_string(z)] = count;
        j["histogram"] = hist;
        j["shots"] = result.histogram->total;
    }
    if (!oracle_j.empty()) {
        j["oracle"]["hn_j"] = std::vector<long long>(oracle_j.begin(), oracle_j.end());
        j["oracle"]["modal_matches"] =
            std::equal(oracle_j.begin(), oracle_j.end(), result.modal_j.begin(),
                       result.modal_j.end());
    }
    return j.dump(indent);
}

namespace {

double percentile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

SweepTable layer_sweep(const InstanceSpec& instance, std::span<const int> layer_counts,
                       int runs_per_layer, const QaoaConfig& base_config, int jobs) {
    if (layer_counts.empty()) throw std::invalid_argument("layer list must be nonempty");
    if (runs_per_layer < 1) throw std::invalid_argument("runs per layer must be >= 1");

    SweepTable table;
    table.oracle_j = solve_here_and_now(instance).j;

    const int total_runs = static_cast<int>(layer_counts.size()) * runs_per_layer;
    table.rows.resize(total_runs);

    auto run_one = [&](int index) {
        const int layer_index = index / runs_per_layer;
        const int run_index = index % runs_per_layer;
        QaoaConfig config = base_config;
        config.layers = layer_counts[layer_index];
        config.seed = base_config.seed + static_cast<std::uint64_t>(index);
        const RunResult run = optimize(config, instance);
        SweepRow& row = table.rows[index];
        row.layers = config.layers;
        row.run = run_index;
        row.seed = config.seed;
        row.best_expectation = run.best_expectation;
        row.modal_j = run.modal_j;
        row.success = run.modal_j == table.oracle_j;
        row.evaluations = run.evaluations;
        row.wall_ms = run.wall_ms;
        row.cost_trace = run.cost_trace;
    };

    if (jobs <= 1) {
        for (int i = 0; i < total_runs; ++i) run_one(i);
    } else {
        std::atomic<int> next{0};
        auto worker = [&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= total_runs) return;
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        const int n_threads = std::min(jobs, total_runs);
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t li = 0; li < layer_counts.size(); ++li) {
        std::vector<double> values;
        int successes = 0;
        for (int r = 0; r < runs_per_layer; ++r) {
            const SweepRow& row = table.rows[li * runs_per_layer + r];
            values.push_back(row.best_expectation);
            successes += row.success ? 1 : 0;
        }
        std::sort(values.begin(), values.end());
        LayerStats stats;
        stats.layers = layer_counts[li];
        stats.min = values.front();
        stats.q1 = percentile(values, 0.25);
        stats.median = percentile(values, 0.5);
        stats.q3 = percentile(values, 0.75);
        stats.max = values.back();
        stats.success_fraction = static_cast<double>(successes) / runs_per_layer;
        table.stats.push_back(stats);
    }
    return table;
}

namespace {

std::string format_j(const std::vector<long long>& j) {
    std::string out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(j[i]);
    }
    return out;
}

} // namespace

std::string sweep_to_csv(const SweepTable& table, bool include_timings) {
    std::string csv = "layers,run,seed,best_expectation,modal_j,success,evaluations,wall_ms\n";
    for (const SweepRow& row : table.rows) {
        csv += std::to_string(row.layers) + ',' + std::to_string(row.run) + ',' +
               std::to_string(row.seed) + ',' + format_double(row.best_expectation) + ',' +
               format_j(row.modal_j) + ',' + (row.success ? "1" : "0") + ',' +
               std::to_string(row.evaluations) + ',' +
               format_double(include_timings ? row.wall_ms : 0.0) + '\n';
    }
    return csv;
}

std::string sweep_to_json(const SweepTable& table, bool include_timings, int indent) {
    nlohmann::json j;
    j["oracle_j"] = table.oracle_j;
    auto rows = nlohmann::json::array();
    for (const SweepRow& row : table.rows)
        rows.push_back({{"layers", row.layers},
                        {"run", row.run},
                        {"seed", row.seed},
                        {"best_expectation", row.best_expectation},
                        {"modal_j", row.modal_j},
                        {"success", row.success},
                        {"evaluations", row.evaluations},
                        {"wall_ms", include_timings ? row.wall_ms : 0.0},
                        {"cost_trace", row.cost_trace}});
    j["rows"] = rows;
    auto stats = nlohmann::json::array();
    for (const LayerStats& s : table.stats)
        stats.push_back({{"layers", s.layers},
                         {"min", s.min},
                         {"q1", s.q1},
                         {"median", s.median},
                         {"q3", s.q3},
                         {"max", s.max},
                         {"success_fraction", s.success_fraction}});
    j["layer_stats"] = stats;
    return j.dump(indent);
}

} // namespace srq
