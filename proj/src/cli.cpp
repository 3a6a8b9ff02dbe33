#include "srq/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "srq/encoding.hpp"
#include "srq/instance_io.hpp"
#include "srq/model.hpp"
#include "srq/oracle.hpp"
#include "srq/qaoa.hpp"
#include "srq/util.hpp"

namespace srq {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

InstanceSpec load_validated_instance(const std::string& path, std::ostream& err) {
    InstanceSpec instance = load_instance_file(path);
    const std::vector<std::string> errors = validate(instance);
    if (!errors.empty()) {
        for (const std::string& e : errors) err << "invalid instance: " << e << "\n";
        throw ParseError("instance validation failed");
    }
    return instance;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

struct QaoaFlags {
    std::string config_path;
    int layers = 0;
    std::string init;
    std::string optimizer;
    std::string eval_mode;
    int shots = 0;
    int budget = 0;
    std::uint64_t seed = 0;
    double penalty = 0.0;
    double gamma_max = 0.0;
    double beta_max = 0.0;
};

void add_qaoa_flags(CLI::App* cmd, QaoaFlags& flags, bool with_layers = true) {
    cmd->add_option("--config", flags.config_path, "JSON config file; flags override its values");
    if (with_layers) cmd->add_option("--layers", flags.layers, "QAOA layer count p");
    cmd->add_option("--init", flags.init, "init strategy: annealing-ramp | random | constant");
    cmd->add_option("--optimizer", flags.optimizer,
                    "optimizer: nelder-mead | spsa | cobyla-style");
    cmd->add_option("--eval-mode", flags.eval_mode, "objective mode: exact | sampled");
    cmd->add_option("--shots", flags.shots, "shots per evaluation in sampled mode");
    cmd->add_option("--budget", flags.budget, "max objective evaluations");
    cmd->add_option("--seed", flags.seed, "run seed");
    cmd->add_option("--penalty", flags.penalty, "penalty weight lambda");
    cmd->add_option("--gamma-max", flags.gamma_max, "annealing-ramp gamma endpoint");
    cmd->add_option("--beta-max", flags.beta_max, "annealing-ramp beta start");
}

void apply_config_file(QaoaConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config file '" + path + "': " + e.what());
    }
    if (j.contains("layers")) config.layers = j["layers"].get<int>();
    if (j.contains("init")) config.init = parse_init_strategy(j["init"].get<std::string>());
    if (j.contains("optimizer"))
        config.optimizer = parse_optimizer_kind(j["optimizer"].get<std::string>());
    if (j.contains("eval_mode"))
        config.eval_mode = parse_eval_mode(j["eval_mode"].get<std::string>());
    if (j.contains("shots")) config.shots = j["shots"].get<int>();
    if (j.contains("budget")) config.max_evaluations = j["budget"].get<int>();
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("penalty")) config.penalty = j["penalty"].get<double>();
    if (j.contains("gamma_max")) config.gamma_max = j["gamma_max"].get<double>();
    if (j.contains("beta_max")) config.beta_max = j["beta_max"].get<double>();
}

QaoaConfig resolve_config(const CLI::App* cmd, const QaoaFlags& flags) {
    auto given = [cmd](const std::string& name) {
        const CLI::Option* option = cmd->get_option_no_throw(name);
        return option != nullptr && option->count() > 0;
    };
    QaoaConfig config;
    if (given("--config")) apply_config_file(config, flags.config_path);
    if (given("--layers")) config.layers = flags.layers;
    if (given("--init")) config.init = parse_init_strategy(flags.init);
    if (given("--optimizer")) config.optimizer = parse_optimizer_kind(flags.optimizer);
    if (given("--eval-mode")) config.eval_mode = parse_eval_mode(flags.eval_mode);
    if (given("--shots")) config.shots = flags.shots;
    if (given("--budget")) config.max_evaluations = flags.budget;
    if (given("--seed")) config.seed = flags.seed;
    if (given("--penalty")) config.penalty = flags.penalty;
    if (given("--gamma-max")) config.gamma_max = flags.gamma_max;
    if (given("--beta-max")) config.beta_max = flags.beta_max;
    return config;
}

std::vector<int> parse_layer_list(const std::string& text) {
    std::vector<int> layers;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            layers.push_back(v);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad layer list entry '" + item + "'");
        }
    }
    if (layers.empty()) throw std::invalid_argument("empty layer list");
    return layers;
}

std::string range_str(const char* name, const BitRange& range) {
    std::string s(name);
    if (range.count == 0) return s + "[-]";
    return s + "[" + std::to_string(range.first) + ".." +
           std::to_string(range.first + range.count - 1) + "]";
}

std::string layout_summary(const QubitLayout& layout) {
    std::string out = std::to_string(layout.total_qubits()) + " qubits:";
    if (layout.steps.size() == 1) {
        const TimestepBits& s = layout.steps[0];
        out += " " + range_str("j", s.j) + " " + range_str("buy", s.buy) + " " +
               range_str("sell", s.sell) + " " + range_str("p", s.p);
        return out;
    }
    for (std::size_t t = 0; t < layout.steps.size(); ++t) {
        const TimestepBits& s = layout.steps[t];
        out += "\n  t=" + std::to_string(t) + ": " + range_str("j", s.j) + " " +
               range_str("buy", s.buy) + " " + range_str("sell", s.sell) + " " +
               range_str("p", s.p);
    }
    return out;
}

std::string affine_str(const ScenarioAffine& a) {
    std::string s = format_double(a.c0);
    for (std::size_t t = 0; t < a.cp.size(); ++t) {
        if (a.cp[t] == 0.0) continue;
        s += (a.cp[t] > 0 ? " + " : " - ") + format_double(std::abs(a.cp[t])) + "*p[" +
             std::to_string(t) + "]";
    }
    return s;
}

std::string qubo_summary(const ScenarioQubo& qubo, const QubitLayout& layout) {
    auto bit_tag = [&layout](int i) {
        const DecisionBitInfo& info = layout.decision_bits[i];
        const char* kind = info.kind == VarKind::J ? "j" : info.kind == VarKind::Buy ? "buy" : "sell";
        return std::string(kind) + std::to_string(info.significance) + "@t" +
               std::to_string(info.timestep);
    };
    std::string out = "QUBO over " + std::to_string(qubo.n_bits) +
                      " decision bits, lambda = " + format_double(qubo.lambda) + "\n";
    out += "constant: " + format_double(qubo.constant0);
    for (int t = 0; t < qubo.horizon; ++t)
        out += " | t" + std::to_string(t) + ": " + format_double(qubo.constant_p_linear[t]) +
               "*p + " + format_double(qubo.constant_p_quadratic[t]) + "*p^2";
    out += "\nlinear:\n";
    for (int i = 0; i < qubo.n_bits; ++i)
        out += "  x" + std::to_string(i) + " (" + bit_tag(i) + "): " + affine_str(qubo.linear[i]) +
               "\n";
    out += "quadratic:\n";
    for (const auto& [key, coeff] : qubo.quadratic)
        out += "  x" + std::to_string(key.first) + "*x" + std::to_string(key.second) + ": " +
               affine_str(coeff) + "\n";
    return out;
}

int cmd_solve_exact(const std::string& instance_path, const std::string& out_path,
                    std::ostream& out, std::ostream& err) {
    const InstanceSpec instance = load_validated_instance(instance_path, err);
    const SolutionReport report = benchmark_report(instance);
    const std::string json = report_to_json(report) + "\n";
    out << json;
    if (!out_path.empty()) write_file(out_path, json);
    return kExitOk;
}

int cmd_solve_qaoa(const std::string& instance_path, const QaoaConfig& config,
                   const std::string& out_path, bool timings, std::ostream& out,
                   std::ostream& err) {
    const InstanceSpec instance = load_validated_instance(instance_path, err);
    const HereAndNowSolution oracle = solve_here_and_now(instance);
    const RunResult result = optimize(config, instance);
    const std::string json = run_result_to_json(result, config, oracle.j, timings) + "\n";
    out << json;
    if (!out_path.empty()) write_file(out_path, json);
    return kExitOk;
}

int cmd_sweep(const std::string& instance_path, const QaoaConfig& config,
              const std::vector<int>& layers, int runs, int jobs, const std::string& csv_path,
              const std::string& json_path, bool timings, std::ostream& out, std::ostream& err) {
    const InstanceSpec instance = load_validated_instance(instance_path, err);
    const SweepTable table = layer_sweep(instance, layers, runs, config, jobs);
    const std::string csv = sweep_to_csv(table, timings);
    if (csv_path.empty()) {
        out << csv;
    } else {
        write_file(csv_path, csv);
        out << "wrote " << table.rows.size() << " rows to " << csv_path << "\n";
        out << "layers  min       median    max       success\n";
        for (const LayerStats& s : table.stats) {
            std::ostringstream line;
            line << s.layers << "  " << format_double(s.min) << "  " << format_double(s.median)
                 << "  " << format_double(s.max) << "  " << format_double(s.success_fraction);
            out << line.str() << "\n";
        }
    }
    if (!json_path.empty()) write_file(json_path, sweep_to_json(table, timings) + "\n");
    return kExitOk;
}

int cmd_inspect(const std::string& instance_path, const std::string& what, double penalty,
                std::ostream& out, std::ostream& err) {
    const InstanceSpec instance = load_validated_instance(instance_path, err);
    const QubitLayout layout = build_layout(instance);
    if (what == "layout") {
        out << layout_summary(layout) << "\n";
        return kExitOk;
    }
    const ScenarioQubo qubo = build_qubo(instance, layout, penalty);
    if (what == "qubo") {
        out << qubo_summary(qubo, layout);
        return kExitOk;
    }
    if (what == "ising") {
        out << split_ising_to_json(qubo_to_split_ising(qubo, layout)) << "\n";
        return kExitOk;
    }
    throw std::invalid_argument("unknown --what '" + what + "' (expected layout|qubo|ising)");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"two-stage stochastic EV-charging toolkit: exact benchmarks and stochastic QAOA"};
    app.require_subcommand(1);

    std::string instance_path;
    std::string out_path;
    std::string csv_path;
    std::string json_path;
    std::string what = "layout";
    std::string layer_list = "1";
    int runs = 1;
    int jobs = 1;
    bool timings = false;
    double inspect_penalty = 1.0;
    QaoaFlags qaoa_flags;
    QaoaFlags sweep_flags;

    CLI::App* solve_exact = app.add_subcommand("solve-exact", "classical benchmark report");
    solve_exact->add_option("--instance", instance_path, "instance file")->required();
    solve_exact->add_option("--out", out_path, "also write the JSON report to this file");

    CLI::App* solve_qaoa = app.add_subcommand("solve-qaoa", "single seeded stochastic QAOA run");
    solve_qaoa->add_option("--instance", instance_path, "instance file")->required();
    solve_qaoa->add_option("--out", out_path, "also write the JSON result to this file");
    solve_qaoa->add_flag("--timings", timings, "include wall-clock timings in outputs");
    add_qaoa_flags(solve_qaoa, qaoa_flags);

    CLI::App* sweep = app.add_subcommand("sweep", "layer sweep with repeated seeded runs");
    sweep->add_option("--instance", instance_path, "instance file")->required();
    sweep->add_option("--layers", layer_list, "comma-separated layer counts, e.g. 1,5,10");
    sweep->add_option("--runs", runs, "runs per layer count");
    sweep->add_option("--jobs", jobs, "worker threads for independent runs");
    sweep->add_option("--csv", csv_path, "write the per-run CSV here (default: stdout)");
    sweep->add_option("--json", json_path, "also write rows with full cost traces as JSON");
    sweep->add_flag("--timings", timings, "include wall-clock timings in outputs");
    add_qaoa_flags(sweep, sweep_flags, /*with_layers=*/false);

    CLI::App* inspect = app.add_subcommand("inspect", "dump layout, QUBO terms or split Ising");
    inspect->add_option("--instance", instance_path, "instance file")->required();
    inspect->add_option("--what", what, "layout | qubo | ising");
    inspect->add_option("--penalty", inspect_penalty, "penalty weight for qubo/ising dumps");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (solve_exact->parsed()) return cmd_solve_exact(instance_path, out_path, out, err);
        if (solve_qaoa->parsed()) {
            const QaoaConfig config = resolve_config(solve_qaoa, qaoa_flags);
            return cmd_solve_qaoa(instance_path, config, out_path, timings, out, err);
        }
        if (sweep->parsed()) {
            const QaoaConfig config = resolve_config(sweep, sweep_flags);
            const std::vector<int> layers = parse_layer_list(layer_list);
            if (runs < 1) throw std::invalid_argument("--runs must be >= 1");
            if (jobs < 1) throw std::invalid_argument("--jobs must be >= 1");
            return cmd_sweep(instance_path, config, layers, runs, jobs, csv_path, json_path,
                             timings, out, err);
        }
        if (inspect->parsed())
            return cmd_inspect(instance_path, what, inspect_penalty, out, err);
        err << "usage error: no subcommand\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace srq
