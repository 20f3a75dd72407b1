// seedlab command line: Monte Carlo seeding experiments, parameter sweeps,
// exact small-instance oracles, and the abstract removal experiment.
//
// Exit codes: 0 success, 1 input/config error, 2 enumeration budget refusal,
// 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seedlab/seedlab.hpp"

namespace {

struct CommonFlags {
    std::string instance;
    int k = 0;
    std::string algo = "plain";
    int ell = 2;
    double eps1 = 0.0;
    double eps2 = 0.0;
    std::string strategy = "identity";
    double pmix = 0.5;
    bool greedy_first = false;
    std::int64_t trials = 100;
    std::uint64_t seed = 1;
    bool lloyd = false;
    int lloyd_iters = 100;
    double lloyd_floor = 1e-9;
    std::string out;
    std::string config_path;
    int threads = 0;
    bool no_events = false;
    std::int64_t budget = 10'000'000;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--instance", f.instance,
                    "Instance spec, e.g. simplex:k=32, three_point_line:n=1000, "
                    "gaussian:k=16,per_cluster=50,d=4,separation=20,stddev=1,seed=7, file:PATH");
    cmd->add_option("--k", f.k, "Number of centers to seed");
    cmd->add_option("--algo", f.algo, "Seeding variant: plain, greedy, noisy, moderate")
        ->check(CLI::IsMember({"plain", "greedy", "noisy", "moderate"}));
    cmd->add_option("--ell", f.ell, "Candidates per greedy iteration");
    cmd->add_option("--eps1", f.eps1, "Lower perturbation parameter, in [0,1)");
    cmd->add_option("--eps2", f.eps2, "Upper perturbation parameter, >= 0");
    cmd->add_option("--strategy", f.strategy,
                    "Adversary strategy: identity, boost_covered, boost_far, random_within_bounds")
        ->check(CLI::IsMember({"identity", "boost_covered", "boost_far", "random_within_bounds"}));
    cmd->add_option("--pmix", f.pmix, "Probability of a plain step in the moderate variant");
    cmd->add_flag("--greedy-first", f.greedy_first,
                  "Greedy variant: draw ell candidates in the first iteration too");
    cmd->add_option("--trials", f.trials, "Number of Monte Carlo trials");
    cmd->add_option("--seed", f.seed, "Base seed for the trial substreams");
    cmd->add_flag("--lloyd", f.lloyd, "Refine each seeding with Lloyd iterations");
    cmd->add_option("--lloyd-iters", f.lloyd_iters, "Lloyd iteration cap");
    cmd->add_option("--lloyd-floor", f.lloyd_floor, "Lloyd relative improvement floor");
    cmd->add_option("--out", f.out, "Output directory (rows.jsonl, summary.json, sweep.csv)");
    cmd->add_option("--config", f.config_path, "key=value file overriding the flags above");
    cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware)");
    cmd->add_flag("--no-events", f.no_events, "Skip event tracking on labeled instances");
    cmd->add_option("--budget", f.budget, "Outcome budget for exact enumeration");
}

/// key=value lines override flag values; '#' starts a comment.
void apply_config_file(CommonFlags& f) {
    if (f.config_path.empty()) return;
    std::ifstream in(f.config_path);
    if (!in) throw seedlab::IoError("cannot open config file: " + f.config_path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::string trimmed;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c)) || !trimmed.empty()) trimmed += c;
        while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
            trimmed.pop_back();
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw seedlab::ParseError("config line must be key=value", lineno);
        const std::string key = trimmed.substr(0, eq);
        const std::string value = trimmed.substr(eq + 1);
        try {
            if (key == "instance") f.instance = value;
            else if (key == "k") f.k = std::stoi(value);
            else if (key == "algo") f.algo = value;
            else if (key == "ell") f.ell = std::stoi(value);
            else if (key == "eps1") f.eps1 = std::stod(value);
            else if (key == "eps2") f.eps2 = std::stod(value);
            else if (key == "strategy") f.strategy = value;
            else if (key == "pmix" || key == "p_mix") f.pmix = std::stod(value);
            else if (key == "greedy_first") f.greedy_first = std::stoi(value) != 0;
            else if (key == "trials") f.trials = std::stoll(value);
            else if (key == "seed") f.seed = std::stoull(value);
            else if (key == "lloyd") f.lloyd = std::stoi(value) != 0;
            else if (key == "lloyd_iters") f.lloyd_iters = std::stoi(value);
            else if (key == "lloyd_floor") f.lloyd_floor = std::stod(value);
            else if (key == "out") f.out = value;
            else if (key == "threads") f.threads = std::stoi(value);
            else if (key == "no_events") f.no_events = std::stoi(value) != 0;
            else if (key == "budget") f.budget = std::stoll(value);
            else throw seedlab::ParseError("unknown config key: " + key, lineno);
        } catch (const std::invalid_argument&) {
            throw seedlab::ParseError("malformed value for " + key, lineno);
        } catch (const std::out_of_range&) {
            throw seedlab::ParseError("value out of range for " + key, lineno);
        }
    }
}

seedlab::ExperimentConfig build_experiment_config(const CommonFlags& f) {
    if (f.instance.empty()) throw seedlab::InputError("--instance is required");
    if (f.k < 1) throw seedlab::InputError("--k is required and must be at least 1");
    seedlab::ExperimentConfig cfg;
    cfg.instance = seedlab::InstanceSpec::parse(f.instance);
    if (f.algo == "plain") cfg.algo = seedlab::Algorithm::plain;
    else if (f.algo == "greedy") cfg.algo = seedlab::Algorithm::greedy;
    else if (f.algo == "noisy") cfg.algo = seedlab::Algorithm::noisy;
    else if (f.algo == "moderate") cfg.algo = seedlab::Algorithm::moderate;
    else throw seedlab::InputError("unknown algorithm: " + f.algo);
    cfg.k = f.k;
    cfg.ell = f.ell;
    cfg.p_mix = f.pmix;
    cfg.noise.eps1 = f.eps1;
    cfg.noise.eps2 = f.eps2;
    cfg.noise.strategy = seedlab::strategy_from_name(f.strategy);
    cfg.greedy_first_step = f.greedy_first;
    cfg.trials = f.trials;
    cfg.base_seed = f.seed;
    if (f.lloyd) cfg.lloyd = seedlab::LloydConfig{f.lloyd_iters, f.lloyd_floor};
    cfg.out_dir = f.out;
    cfg.threads = f.threads;
    cfg.budget.max_outcomes = f.budget;
    const seedlab::Dataset probe = cfg.instance.build();
    cfg.track_events = probe.labeled() && !f.no_events;
    return cfg;
}

int run_command(const CommonFlags& flags) {
    const seedlab::ExperimentConfig cfg = build_experiment_config(flags);
    const seedlab::ExperimentReport rep = seedlab::run_experiment(cfg);
    seedlab::print_report(std::cout, cfg, rep);
    if (!cfg.out_dir.empty())
        std::cout << "rows written:    " << cfg.out_dir << "/rows.jsonl\n";
    return 0;
}

int sweep_command(const CommonFlags& flags, const std::string& axis_text,
                  const std::string& values_text) {
    const seedlab::SweepAxis axis = seedlab::axis_from_name(axis_text);
    std::vector<double> values;
    std::stringstream ss(values_text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) values.push_back(std::stod(item));
    if (values.empty()) throw seedlab::InputError("--values must list at least one axis value");

    seedlab::ExperimentConfig base = build_experiment_config(flags);
    const std::string out_dir = base.out_dir;
    base.out_dir.clear();
    const seedlab::SweepResult result = seedlab::sweep(base, axis, values);
    const std::string csv = seedlab::sweep_to_csv(result);
    std::cout << csv;
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw seedlab::IoError("cannot create output directory: " + out_dir);
        seedlab::write_text_file(out_dir + "/sweep.csv", csv);
        for (std::size_t i = 0; i < result.values.size(); ++i) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%g", result.values[i]);
            seedlab::write_text_file(
                out_dir + "/rows_" + seedlab::axis_name(axis) + "=" + buf + ".jsonl",
                seedlab::rows_to_jsonl(result.reports[i].rows));
        }
    }
    return 0;
}

int oracle_command(const CommonFlags& flags, const std::string& what) {
    if (flags.instance.empty()) throw seedlab::InputError("--instance is required");
    if (flags.k < 1) throw seedlab::InputError("--k is required and must be at least 1");
    const seedlab::InstanceSpec spec = seedlab::InstanceSpec::parse(flags.instance);
    const seedlab::Dataset x = spec.build();
    seedlab::EnumerationBudget budget{flags.budget};

    if (what == "opt" || what == "both") {
        const seedlab::BruteForceResult opt = seedlab::brute_force_opt(x, flags.k, budget);
        std::cout << "opt_cost: " << opt.cost << "\n";
        std::cout << "opt_labels:";
        for (int lab : opt.labels) std::cout << ' ' << lab;
        std::cout << "\n";
    }
    if (what == "expect" || what == "both") {
        seedlab::OracleQuery query;
        if (flags.algo == "plain") query.variant = seedlab::OracleVariant::plain;
        else if (flags.algo == "greedy") query.variant = seedlab::OracleVariant::greedy;
        else if (flags.algo == "noisy") query.variant = seedlab::OracleVariant::noisy;
        else if (flags.algo == "moderate") query.variant = seedlab::OracleVariant::moderate;
        query.ell = flags.ell;
        query.p_mix = flags.pmix;
        query.noise.eps1 = flags.eps1;
        query.noise.eps2 = flags.eps2;
        query.noise.strategy = seedlab::strategy_from_name(flags.strategy);
        query.ell_in_first_step = flags.greedy_first;
        const double expected = seedlab::exact_expected_cost(x, flags.k, query, budget);
        std::cout << "expected_seed_cost: " << expected << "\n";
    }
    return 0;
}

int removal_command(const CommonFlags& flags, std::int64_t z, double eps, int steps,
                    const std::string& adversary, const std::string& decrement,
                    const std::string& preset, const std::string& numbers_path) {
    seedlab::RemovalExperimentConfig cfg;
    if (!numbers_path.empty()) {
        std::ifstream in(numbers_path);
        if (!in) throw seedlab::IoError("cannot open numbers file: " + numbers_path);
        double v;
        while (in >> v) cfg.numbers.push_back(v);
    } else if (preset == "ones") {
        cfg.numbers.assign(static_cast<std::size_t>(z), 1.0);
    } else if (preset == "one_heavy") {
        // One number carries half the mass; the rest split the remainder.
        const double zd = static_cast<double>(z);
        cfg.numbers.assign(static_cast<std::size_t>(z), (zd / 2.0) / (zd - 1.0));
        cfg.numbers[0] = zd / 2.0;
    } else {
        throw seedlab::InputError("unknown preset: " + preset);
    }
    cfg.eps = eps;
    cfg.steps = steps;
    if (adversary == "remove_min") cfg.adversary = seedlab::RemovalAdversary::remove_min;
    else if (adversary == "remove_max") cfg.adversary = seedlab::RemovalAdversary::remove_max;
    else if (adversary == "none") cfg.adversary = seedlab::RemovalAdversary::none;
    else throw seedlab::InputError("unknown adversary: " + adversary);
    if (decrement == "none") cfg.decrement = seedlab::DecrementRule::none;
    else if (decrement == "halve") cfg.decrement = seedlab::DecrementRule::halve_random_survivor;
    else throw seedlab::InputError("unknown decrement rule: " + decrement);
    cfg.trials = flags.trials;

    const seedlab::RemovalReport rep = seedlab::removal_experiment(cfg, flags.seed);
    std::cout << "z: " << cfg.numbers.size() << "\n";
    std::cout << "steps: " << cfg.steps << "  eps: " << cfg.eps
              << "  adversary: " << seedlab::adversary_name(cfg.adversary) << "\n";
    std::cout << "trials: " << rep.trials << "\n";
    std::cout << "mean_final_average: " << rep.mean_final_average << "\n";
    std::cout << "stddev: " << rep.stddev << "\n";
    std::cout << "min/max: " << rep.min_final_average << " / " << rep.max_final_average << "\n";
    std::cout << "regime: " << (rep.large_z_regime ? "large_z" : "small_z")
              << "  (large-regime bound " << rep.large_regime_bound << ")\n";
    std::cout << "few_steps: " << (rep.few_steps ? "yes" : "no") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"seedlab: a laboratory for k-means++ seeding variants"};
    app.require_subcommand(1);

    CommonFlags flags;

    CLI::App* run = app.add_subcommand("run", "Run Monte Carlo seeding trials");
    add_common_flags(run, flags);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per axis value");
    std::string axis_text = "ell";
    std::string values_text;
    add_common_flags(sweep_cmd, flags);
    sweep_cmd->add_option("--axis", axis_text, "Swept parameter: ell, eps1, eps2, p_mix, k");
    sweep_cmd->add_option("--values", values_text, "Comma-separated axis values");

    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "Exact optimum and exact expected seeding cost");
    std::string what = "both";
    add_common_flags(oracle_cmd, flags);
    oracle_cmd->add_option("--what", what, "opt, expect, or both")
        ->check(CLI::IsMember({"opt", "expect", "both"}));

    CLI::App* removal_cmd =
        app.add_subcommand("removal", "Abstract removal experiment on numbers of average 1");
    std::int64_t z = 1024;
    double eps = 0.1;
    int steps = 512;
    std::string adversary = "remove_min";
    std::string decrement = "none";
    std::string preset = "one_heavy";
    std::string numbers_path;
    add_common_flags(removal_cmd, flags);
    removal_cmd->add_option("--z", z, "Number count for the preset inputs");
    removal_cmd->add_option("--eps", eps, "Adversarial step probability, in [0,1)");
    removal_cmd->add_option("--steps", steps, "Removal steps (1..z-1)");
    removal_cmd->add_option("--adversary", adversary, "remove_min, remove_max, none")
        ->check(CLI::IsMember({"remove_min", "remove_max", "none"}));
    removal_cmd->add_option("--decrement", decrement, "none or halve")
        ->check(CLI::IsMember({"none", "halve"}));
    removal_cmd->add_option("--preset", preset, "ones or one_heavy")
        ->check(CLI::IsMember({"ones", "one_heavy"}));
    removal_cmd->add_option("--numbers", numbers_path, "File of whitespace-separated numbers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        apply_config_file(flags);
        if (run->parsed()) return run_command(flags);
        if (sweep_cmd->parsed()) return sweep_command(flags, axis_text, values_text);
        if (oracle_cmd->parsed()) return oracle_command(flags, what);
        if (removal_cmd->parsed())
            return removal_command(flags, z, eps, steps, adversary, decrement, preset,
                                   numbers_path);
    } catch (const seedlab::BudgetExceeded& e) {
        std::cerr << "budget refusal: " << e.what() << "\n";
        return 2;
    } catch (const seedlab::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const seedlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
