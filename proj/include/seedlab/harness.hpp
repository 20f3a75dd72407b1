#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "seedlab/core.hpp"
#include "seedlab/errors.hpp"
#include "seedlab/instances.hpp"
#include "seedlab/lloyd.hpp"
#include "seedlab/oracle.hpp"
#include "seedlab/seeding.hpp"
#include "seedlab/stats.hpp"

namespace seedlab {

// ---------------------------------------------------------------------------
// Trace event verification
// ---------------------------------------------------------------------------

struct EventSummary {
    int iterations = 0;
    int wasted_iterations = 0;
    double psi = 0.0;
    int covered_clusters = 0;
    std::vector<int> uncovered_sequence;  // u_i after each iteration
    bool choices_replay_consistent = true;

    // Simplex-instance events; meaningful only when simplex is true.
    bool simplex = false;
    std::vector<bool> light_vertex_hit;  // iteration's center at the light vertex
    std::vector<bool> centroid_hit;      // iteration's center at the simplex centroid
    bool light_vertex_first_hit = false;  // light vertex is the first center from the
                                          // mixed cluster, within iterations 1..k-1
    bool centroid_hit_mid = false;        // centroid chosen in iterations 2..k-1
    bool centroid_before_light_vertex = false;  // centroid_hit_mid and not light_vertex_first_hit
};

namespace detail {

inline void fill_simplex_events(EventSummary& s, const std::vector<int>& chosen,
                                const SimplexLayout& layout) {
    const auto k = static_cast<int>(chosen.size());
    s.simplex = true;
    s.light_vertex_hit.assign(chosen.size(), false);
    s.centroid_hit.assign(chosen.size(), false);
    bool mixed_cluster_hit = false;
    for (int i = 0; i < k; ++i) {
        const bool at_light = chosen[static_cast<std::size_t>(i)] == layout.light_vertex_site;
        const bool at_centroid = chosen[static_cast<std::size_t>(i)] == layout.centroid_site;
        s.light_vertex_hit[static_cast<std::size_t>(i)] = at_light;
        s.centroid_hit[static_cast<std::size_t>(i)] = at_centroid;
        if (i < k - 1 && at_light && !mixed_cluster_hit) s.light_vertex_first_hit = true;
        if (i >= 1 && i < k - 1 && at_centroid) s.centroid_hit_mid = true;
        if (at_light || at_centroid) mixed_cluster_hit = true;
    }
    s.centroid_before_light_vertex = s.centroid_hit_mid && !s.light_vertex_first_hit;
}

}  // namespace detail

/// Recomputes covered sets, wasted flags, uncovered counts, and the wasted
/// average-cost accumulator from a stored trace, independently of the values
/// the seeding loop recorded. On datasets with the simplex lower-bound
/// layout it also derives the per-iteration vertex/centroid event
/// indicators.
inline EventSummary verify_trace_events(const SeedingTrace& trace, const Dataset& x) {
    if (!x.labeled()) throw InputError("event verification requires a labeled dataset");
    EventSummary s;
    s.iterations = static_cast<int>(trace.iterations.size());

    CenterSet centers(x);
    std::vector<bool> covered(static_cast<std::size_t>(x.cluster_count()), false);
    int covered_count = 0;
    std::vector<int> chosen;
    chosen.reserve(trace.iterations.size());

    for (const IterationRecord& rec : trace.iterations) {
        if (rec.chosen_site < 0 || static_cast<std::size_t>(rec.chosen_site) >= x.site_count())
            throw InputError("trace references a site outside the dataset");
        if (rec.candidate_sites.empty())
            throw InputError("trace iteration carries no candidates");
        const int replayed = detail::pick_best_candidate(x, centers, rec.candidate_sites);
        if (replayed != rec.chosen_site) s.choices_replay_consistent = false;

        centers.add_center(x, x.point(static_cast<std::size_t>(rec.chosen_site)));
        chosen.push_back(rec.chosen_site);

        const int lab = x.label(static_cast<std::size_t>(rec.chosen_site));
        const bool already = covered[static_cast<std::size_t>(lab)];
        if (!already) {
            covered[static_cast<std::size_t>(lab)] = true;
            ++covered_count;
        }
        const bool wasted = chosen.size() >= 2 && already;
        const int uncovered = x.cluster_count() - covered_count;
        s.uncovered_sequence.push_back(uncovered);
        if (wasted) {
            ++s.wasted_iterations;
            if (uncovered > 0) {
                std::vector<bool> uncovered_site(x.site_count());
                for (std::size_t i = 0; i < x.site_count(); ++i)
                    uncovered_site[i] = !covered[static_cast<std::size_t>(x.label(i))];
                s.psi += cached_cost_where(x, centers, uncovered_site) /
                         static_cast<double>(uncovered);
            }
        }
    }
    s.covered_clusters = covered_count;

    if (const auto layout = match_simplex(x)) detail::fill_simplex_events(s, chosen, *layout);
    return s;
}

// ---------------------------------------------------------------------------
// Experiment configuration and reports
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    InstanceSpec instance;
    Algorithm algo = Algorithm::plain;
    int k = 0;
    int ell = 2;
    double p_mix = 0.5;
    PerturbationModel noise;
    bool greedy_first_step = false;  // greedy only: draw ell candidates in iteration 1 too
    std::int64_t trials = 100;
    std::uint64_t base_seed = 1;
    std::optional<LloydConfig> lloyd;
    bool track_events = false;
    std::string out_dir;  // empty: no files written
    int threads = 0;      // 0: hardware concurrency
    EnumerationBudget budget;

    SeedingParams seeding_params() const {
        SeedingParams p;
        p.algo = algo;
        p.k = k;
        p.ell = ell;
        p.p_mix = p_mix;
        p.noise = noise;
        p.ell_in_first_step = greedy_first_step;
        return p;
    }

    void validate(const Dataset& x) const {
        if (trials < 1) throw InputError("trials must be at least 1");
        seeding_params().validate();
        if (track_events && !x.labeled())
            throw InputError("event tracking requires a labeled instance");
        if (lloyd) lloyd->validate();
    }
};

struct TrialRow {
    std::int64_t trial = 0;
    double seed_cost = 0.0;
    std::optional<double> lloyd_cost;
    std::optional<double> ratio;  // final pipeline cost over the OPT denominator
    bool ratio_is_upper_bound = false;
    bool has_events = false;
    int wasted = 0;
    double psi = 0.0;
    bool event_light_first = false;  // JSONL "F"
    bool event_centroid_mid = false;  // JSONL "o_hit"
};

struct ExperimentReport {
    std::vector<TrialRow> rows;
    Aggregate seed_cost;
    Aggregate lloyd_cost;  // n == 0 when Lloyd disabled
    Aggregate ratio;       // n == 0 when no denominator available
    bool ratio_is_upper_bound = false;
    std::optional<double> opt_denominator;
    bool has_events = false;
    double f_rate = 0.0;
    double o_hit_rate = 0.0;
    double compound_rate = 0.0;  // o_hit and not F
    double mean_wasted = 0.0;
    double mean_psi = 0.0;
};

namespace detail {

struct RatioBasis {
    std::optional<double> denom;
    bool upper_bound = false;
};

/// Denominator policy: a stored exact cost wins; a stored upper bound is
/// used but flagged; otherwise small instances get the enumeration optimum
/// and everything else reports no ratio at all.
inline RatioBasis resolve_ratio_basis(const Dataset& x, int k, const EnumerationBudget& budget) {
    RatioBasis basis;
    if (x.optimal_cost()) {
        basis.denom = *x.optimal_cost();
        basis.upper_bound = x.optimal_cost_kind() == OptCostKind::upper_bound;
    } else if (x.site_count() <= 12) {
        try {
            basis.denom = brute_force_opt(x, k, budget).cost;
        } catch (const BudgetExceeded&) {
        }
    }
    if (basis.denom && !(*basis.denom > 0.0)) basis.denom.reset();  // ratio undefined at OPT 0
    return basis;
}

inline void run_trial_range(const Dataset& x, const ExperimentConfig& cfg,
                            const RatioBasis& basis,
                            const std::optional<SimplexLayout>& layout,
                            std::vector<TrialRow>& rows, std::atomic<std::int64_t>& next) {
    const SeedingParams params = cfg.seeding_params();
    for (;;) {
        const std::int64_t t = next.fetch_add(1);
        if (t >= cfg.trials) break;
        SubstreamRng rng(cfg.base_seed, static_cast<std::uint64_t>(t));
        SeedResult result = run_seeding(x, params, rng);

        TrialRow row;
        row.trial = t;
        row.seed_cost = result.centers.total_potential();
        double final_cost = row.seed_cost;
        if (cfg.lloyd) {
            const LloydResult refined = lloyd_refine(x, result.centers, *cfg.lloyd);
            row.lloyd_cost = refined.cost_sequence.back();
            final_cost = *row.lloyd_cost;
        }
        if (basis.denom) {
            row.ratio = final_cost / *basis.denom;
            row.ratio_is_upper_bound = basis.upper_bound;
        }
        if (cfg.track_events) {
            row.has_events = true;
            for (const IterationRecord& rec : result.trace.iterations)
                if (rec.wasted) ++row.wasted;
            row.psi = result.trace.psi;
            if (layout) {
                EventSummary ev;
                std::vector<int> chosen;
                for (const IterationRecord& rec : result.trace.iterations)
                    chosen.push_back(rec.chosen_site);
                fill_simplex_events(ev, chosen, *layout);
                row.event_light_first = ev.light_vertex_first_hit;
                row.event_centroid_mid = ev.centroid_hit_mid;
            }
        }
        rows[static_cast<std::size_t>(t)] = std::move(row);
    }
}

}  // namespace detail

inline ExperimentReport aggregate_rows(std::vector<TrialRow> rows, bool track_events) {
    ExperimentReport rep;
    rep.rows = std::move(rows);
    std::vector<double> seed_costs, lloyd_costs, ratios;
    std::int64_t f_hits = 0, o_hits = 0, compound = 0;
    double wasted_sum = 0.0, psi_sum = 0.0;
    for (const TrialRow& row : rep.rows) {
        seed_costs.push_back(row.seed_cost);
        if (row.lloyd_cost) lloyd_costs.push_back(*row.lloyd_cost);
        if (row.ratio) {
            ratios.push_back(*row.ratio);
            rep.ratio_is_upper_bound = row.ratio_is_upper_bound;
        }
        if (row.has_events) {
            wasted_sum += row.wasted;
            psi_sum += row.psi;
            f_hits += row.event_light_first ? 1 : 0;
            o_hits += row.event_centroid_mid ? 1 : 0;
            compound += (row.event_centroid_mid && !row.event_light_first) ? 1 : 0;
        }
    }
    rep.seed_cost = Aggregate::of(seed_costs);
    rep.lloyd_cost = Aggregate::of(lloyd_costs);
    rep.ratio = Aggregate::of(ratios);
    rep.has_events = track_events && !rep.rows.empty();
    if (rep.has_events) {
        const auto n = static_cast<double>(rep.rows.size());
        rep.f_rate = static_cast<double>(f_hits) / n;
        rep.o_hit_rate = static_cast<double>(o_hits) / n;
        rep.compound_rate = static_cast<double>(compound) / n;
        rep.mean_wasted = wasted_sum / n;
        rep.mean_psi = psi_sum / n;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json row_to_json(const TrialRow& row) {
    nlohmann::ordered_json j;
    j["trial"] = row.trial;
    j["seed_cost"] = row.seed_cost;
    if (row.lloyd_cost) j["lloyd_cost"] = *row.lloyd_cost;
    if (row.ratio) {
        j["ratio"] = *row.ratio;
        j["ratio_is_upper_bound"] = row.ratio_is_upper_bound;
    }
    if (row.has_events) {
        j["wasted"] = row.wasted;
        j["psi"] = row.psi;
        j["events"] = {{"F", row.event_light_first}, {"o_hit", row.event_centroid_mid}};
    }
    return j;
}

inline nlohmann::ordered_json aggregate_to_json(const Aggregate& a) {
    return {{"n", a.n}, {"mean", a.mean}, {"stddev", a.stddev}, {"ci95_half", a.ci95_half}};
}

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["instance"] = cfg.instance.describe();
    j["algo"] = algorithm_name(cfg.algo);
    j["k"] = cfg.k;
    if (cfg.algo == Algorithm::greedy || cfg.algo == Algorithm::moderate) j["ell"] = cfg.ell;
    if (cfg.algo == Algorithm::greedy) j["greedy_first_step"] = cfg.greedy_first_step;
    if (cfg.algo == Algorithm::moderate) j["p_mix"] = cfg.p_mix;
    if (cfg.algo == Algorithm::noisy) {
        j["eps1"] = cfg.noise.eps1;
        j["eps2"] = cfg.noise.eps2;
        j["strategy"] = strategy_name(cfg.noise.strategy);
    }
    j["trials"] = cfg.trials;
    j["seed"] = cfg.base_seed;
    j["lloyd"] = cfg.lloyd.has_value();
    if (cfg.lloyd) {
        j["lloyd_max_iters"] = cfg.lloyd->max_iters;
        j["lloyd_floor"] = cfg.lloyd->rel_improvement_floor;
    }
    j["track_events"] = cfg.track_events;
    return j;
}

inline nlohmann::ordered_json report_to_json(const ExperimentConfig& cfg,
                                             const ExperimentReport& rep) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(cfg);
    if (rep.opt_denominator) {
        j["opt_denominator"] = *rep.opt_denominator;
        j["opt_is_upper_bound"] = rep.ratio_is_upper_bound;
    }
    j["seed_cost"] = aggregate_to_json(rep.seed_cost);
    if (rep.lloyd_cost.n > 0) j["lloyd_cost"] = aggregate_to_json(rep.lloyd_cost);
    if (rep.ratio.n > 0) j["ratio"] = aggregate_to_json(rep.ratio);
    if (rep.has_events) {
        j["events"] = {{"F_rate", rep.f_rate},
                       {"o_hit_rate", rep.o_hit_rate},
                       {"o_without_prior_vk_rate", rep.compound_rate},
                       {"mean_wasted", rep.mean_wasted},
                       {"mean_psi", rep.mean_psi}};
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    out << contents;
    if (!out) throw IoError("failed while writing: " + path);
}

inline std::string rows_to_jsonl(const std::vector<TrialRow>& rows) {
    std::string text;
    for (const TrialRow& row : rows) {
        text += row_to_json(row).dump();
        text += '\n';
    }
    return text;
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

/// Runs cfg.trials independent seeding trials with per-trial substreams,
/// merges rows by trial id, and (when an output directory is set) writes
/// rows.jsonl plus summary.json. Deterministic for a fixed base_seed under
/// any thread count.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    const Dataset x = cfg.instance.build();
    cfg.validate(x);

    const detail::RatioBasis basis = detail::resolve_ratio_basis(x, cfg.k, cfg.budget);
    const std::optional<SimplexLayout> layout =
        cfg.track_events ? match_simplex(x) : std::nullopt;

    std::vector<TrialRow> rows(static_cast<std::size_t>(cfg.trials));
    std::atomic<std::int64_t> next{0};

    unsigned n_threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(
        std::min<std::int64_t>(cfg.trials, static_cast<std::int64_t>(n_threads)));

    if (n_threads <= 1) {
        detail::run_trial_range(x, cfg, basis, layout, rows, next);
    } else {
        std::vector<std::thread> workers;
        std::exception_ptr failure;
        std::mutex failure_mutex;
        for (unsigned w = 0; w < n_threads; ++w)
            workers.emplace_back([&] {
                try {
                    detail::run_trial_range(x, cfg, basis, layout, rows, next);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        for (std::thread& w : workers) w.join();
        if (failure) std::rethrow_exception(failure);
    }

    ExperimentReport rep = aggregate_rows(std::move(rows), cfg.track_events);
    rep.opt_denominator = basis.denom;
    rep.ratio_is_upper_bound = basis.upper_bound;

    if (!cfg.out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) throw IoError("cannot create output directory: " + cfg.out_dir);
        write_text_file(cfg.out_dir + "/rows.jsonl", rows_to_jsonl(rep.rows));
        write_text_file(cfg.out_dir + "/summary.json", report_to_json(cfg, rep).dump(2) + "\n");
    }
    return rep;
}

inline void print_report(std::ostream& os, const ExperimentConfig& cfg,
                         const ExperimentReport& rep) {
    os << "instance:        " << cfg.instance.describe() << "\n";
    os << "algorithm:       " << algorithm_name(cfg.algo);
    if (cfg.algo == Algorithm::greedy) os << " (ell=" << cfg.ell << ")";
    if (cfg.algo == Algorithm::moderate) os << " (ell=" << cfg.ell << ", p_mix=" << cfg.p_mix << ")";
    if (cfg.algo == Algorithm::noisy)
        os << " (eps1=" << cfg.noise.eps1 << ", eps2=" << cfg.noise.eps2 << ", "
           << strategy_name(cfg.noise.strategy) << ")";
    os << "\n";
    os << "k / trials:      " << cfg.k << " / " << cfg.trials << "\n";
    os << "mean seed cost:  " << rep.seed_cost.mean << "  (sd " << rep.seed_cost.stddev
       << ", ci95 +/- " << rep.seed_cost.ci95_half << ")\n";
    if (rep.lloyd_cost.n > 0) os << "mean lloyd cost: " << rep.lloyd_cost.mean << "\n";
    if (rep.opt_denominator) {
        os << "opt denominator: " << *rep.opt_denominator
           << (rep.ratio_is_upper_bound ? "  (upper bound)" : "  (exact)") << "\n";
        os << "mean ratio:      " << rep.ratio.mean << "\n";
    }
    if (rep.has_events) {
        os << "event rates:     F=" << rep.f_rate << "  o_hit=" << rep.o_hit_rate
           << "  o_without_prior_vk=" << rep.compound_rate << "\n";
        os << "mean wasted:     " << rep.mean_wasted << "   mean psi: " << rep.mean_psi << "\n";
    }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

enum class SweepAxis { ell, eps1, eps2, p_mix, k };

inline const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::ell: return "ell";
        case SweepAxis::eps1: return "eps1";
        case SweepAxis::eps2: return "eps2";
        case SweepAxis::p_mix: return "p_mix";
        case SweepAxis::k: return "k";
    }
    return "?";
}

inline SweepAxis axis_from_name(const std::string& name) {
    if (name == "ell") return SweepAxis::ell;
    if (name == "eps1") return SweepAxis::eps1;
    if (name == "eps2") return SweepAxis::eps2;
    if (name == "p_mix" || name == "pmix") return SweepAxis::p_mix;
    if (name == "k") return SweepAxis::k;
    throw InputError("unknown sweep axis: " + name);
}

struct SweepResult {
    SweepAxis axis = SweepAxis::ell;
    std::vector<double> values;
    std::vector<ExperimentReport> reports;
};

inline SweepResult sweep(const ExperimentConfig& base, SweepAxis axis,
                         const std::vector<double>& values) {
    if (values.empty()) throw InputError("sweep requires at least one axis value");
    SweepResult result;
    result.axis = axis;
    result.values = values;
    for (double v : values) {
        ExperimentConfig cfg = base;
        cfg.out_dir.clear();  // per-value row files are the caller's concern
        switch (axis) {
            case SweepAxis::ell:
            case SweepAxis::k: {
                const int iv = static_cast<int>(v);
                if (static_cast<double>(iv) != v || iv < 1)
                    throw InputError("axis values for ell/k must be positive integers");
                (axis == SweepAxis::ell ? cfg.ell : cfg.k) = iv;
                break;
            }
            case SweepAxis::eps1: cfg.noise.eps1 = v; break;
            case SweepAxis::eps2: cfg.noise.eps2 = v; break;
            case SweepAxis::p_mix: cfg.p_mix = v; break;
        }
        result.reports.push_back(run_experiment(cfg));
    }
    return result;
}

inline std::string sweep_to_csv(const SweepResult& result) {
    auto fmt = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string csv =
        "axis,value,trials,mean_seed_cost,stddev_seed_cost,mean_lloyd_cost,mean_ratio,"
        "ratio_is_upper_bound,F_rate,o_hit_rate,o_without_prior_vk_rate,mean_wasted,mean_psi\n";
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        const ExperimentReport& rep = result.reports[i];
        csv += axis_name(result.axis);
        csv += ',' + fmt(result.values[i]);
        csv += ',' + std::to_string(rep.rows.size());
        csv += ',' + fmt(rep.seed_cost.mean);
        csv += ',' + fmt(rep.seed_cost.stddev);
        csv += ',' + (rep.lloyd_cost.n > 0 ? fmt(rep.lloyd_cost.mean) : std::string());
        csv += ',' + (rep.ratio.n > 0 ? fmt(rep.ratio.mean) : std::string());
        csv += ',' + (rep.ratio.n > 0 ? std::string(rep.ratio_is_upper_bound ? "1" : "0")
                                      : std::string());
        if (rep.has_events) {
            csv += ',' + fmt(rep.f_rate);
            csv += ',' + fmt(rep.o_hit_rate);
            csv += ',' + fmt(rep.compound_rate);
            csv += ',' + fmt(rep.mean_wasted);
            csv += ',' + fmt(rep.mean_psi);
        } else {
            csv += ",,,,,";
        }
        csv += '\n';
    }
    return csv;
}

// ---------------------------------------------------------------------------
// Trace serialization (debugging and byte-level determinism checks)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json trace_to_json(const SeedingTrace& trace) {
    nlohmann::ordered_json j;
    j["algorithm"] = algorithm_name(trace.algorithm);
    j["base_seed"] = trace.base_seed;
    j["trial"] = trace.trial;
    j["labeled"] = trace.labeled;
    j["covered_clusters"] = trace.covered_clusters;
    j["psi"] = trace.psi;
    j["iterations"] = nlohmann::ordered_json::array();
    for (const IterationRecord& rec : trace.iterations) {
        nlohmann::ordered_json r;
        r["iteration"] = rec.iteration;
        r["chosen_site"] = rec.chosen_site;
        r["candidates"] = rec.candidate_sites;
        r["distribution_hash"] = rec.distribution_hash;
        r["degenerate"] = rec.degenerate;
        r["plain_branch"] = rec.plain_branch;
        if (rec.uncovered_clusters >= 0) {
            r["wasted"] = rec.wasted;
            r["uncovered_clusters"] = rec.uncovered_clusters;
            r["uncovered_avg_cost"] = rec.uncovered_avg_cost;
        }
        r["potential_after"] = rec.potential_after;
        j["iterations"].push_back(std::move(r));
    }
    return j;
}

}  // namespace seedlab
