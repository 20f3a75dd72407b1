#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "seedlab/core.hpp"
#include "seedlab/errors.hpp"
#include "seedlab/rng.hpp"
#include "seedlab/seeding.hpp"

namespace seedlab {

struct EnumerationBudget {
    std::int64_t max_outcomes = 10'000'000;

    void validate() const {
        if (max_outcomes < 1) throw InputError("enumeration budget must be positive");
    }
};

// ---------------------------------------------------------------------------
// Exact optimum by set-partition enumeration
// ---------------------------------------------------------------------------

struct BruteForceResult {
    double cost = 0.0;
    std::vector<int> labels;  // canonical restricted-growth labeling
};

namespace detail {

/// Sum over j<=k of the number of partitions of n sites into j nonempty
/// parts, computed in floating point (only used for budget refusal).
inline double partition_count_estimate(std::size_t n, int k) {
    const int parts = std::min<int>(k, static_cast<int>(n));
    std::vector<double> prev(static_cast<std::size_t>(parts) + 1, 0.0);
    prev[0] = 1.0;  // S(0,0) = 1
    for (std::size_t row = 1; row <= n; ++row) {
        std::vector<double> cur(static_cast<std::size_t>(parts) + 1, 0.0);
        for (int j = 1; j <= parts; ++j)
            cur[static_cast<std::size_t>(j)] = prev[static_cast<std::size_t>(j) - 1] +
                                               static_cast<double>(j) * prev[static_cast<std::size_t>(j)];
        prev = std::move(cur);
    }
    double total = 0.0;
    for (int j = 1; j <= parts; ++j) total += prev[static_cast<std::size_t>(j)];
    return total;
}

struct PartStats {
    double weight = 0.0;
    double sq_norm = 0.0;            // weighted sum of |x|^2
    std::vector<double> coord_sum;   // weighted coordinate sums
    double part_cost = 0.0;          // 1-means cost of the part about its mean

    void add(const Point& p, double w) {
        if (coord_sum.empty()) coord_sum.assign(p.dim(), 0.0);
        weight += w;
        double sq = 0.0;
        for (std::size_t j = 0; j < p.dim(); ++j) {
            coord_sum[j] += w * p[j];
            sq += p[j] * p[j];
        }
        sq_norm += w * sq;
        double mean_sq = 0.0;
        for (double s : coord_sum) mean_sq += s * s;
        part_cost = std::max(0.0, sq_norm - mean_sq / weight);
    }
};

}  // namespace detail

/// Exact k-means optimum over partitions of the sites into at most k
/// nonempty parts; each part is served by its weighted mean. Prunes on the
/// running cost and refuses (never approximates) when the partition count
/// exceeds the budget. The winning partition's cost is re-evaluated directly
/// from coordinates before returning.
inline BruteForceResult brute_force_opt(const Dataset& x, int k,
                                        const EnumerationBudget& budget = {}) {
    if (k < 1) throw InputError("k must be at least 1");
    budget.validate();
    const std::size_t n = x.site_count();

    if (static_cast<std::size_t>(k) >= n) {
        BruteForceResult res;
        res.labels.resize(n);
        std::iota(res.labels.begin(), res.labels.end(), 0);
        res.cost = 0.0;
        return res;
    }

    if (detail::partition_count_estimate(n, k) > static_cast<double>(budget.max_outcomes))
        throw BudgetExceeded("set-partition count exceeds the enumeration budget");

    std::vector<int> assignment(n, -1);
    std::vector<int> best_labels;
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<detail::PartStats> parts;
    parts.reserve(static_cast<std::size_t>(k));

    auto dfs = [&](auto&& self, std::size_t site, double total) -> void {
        if (total >= best_cost) return;
        if (site == n) {
            best_cost = total;
            best_labels = assignment;
            return;
        }
        const Point& p = x.point(site);
        const double w = static_cast<double>(x.weight(site));
        const std::size_t open = parts.size();
        for (std::size_t j = 0; j < open; ++j) {
            detail::PartStats saved = parts[j];
            const double before = parts[j].part_cost;
            parts[j].add(p, w);
            assignment[site] = static_cast<int>(j);
            self(self, site + 1, total + parts[j].part_cost - before);
            parts[j] = std::move(saved);
        }
        if (open < static_cast<std::size_t>(k)) {
            parts.emplace_back();
            parts.back().add(p, w);
            assignment[site] = static_cast<int>(open);
            self(self, site + 1, total);  // a singleton part costs 0
            parts.pop_back();
        }
        assignment[site] = -1;
    };
    dfs(dfs, 0, 0.0);

    // Direct re-evaluation of the winner, free of incremental identities.
    int nparts = 0;
    for (int lab : best_labels) nparts = std::max(nparts, lab + 1);
    double exact = 0.0;
    for (int j = 0; j < nparts; ++j) {
        std::vector<Point> members;
        std::vector<std::int64_t> weights;
        for (std::size_t i = 0; i < n; ++i)
            if (best_labels[i] == j) {
                members.push_back(x.point(i));
                weights.push_back(x.weight(i));
            }
        const Point mu = weighted_mean(members, weights);
        for (std::size_t i = 0; i < members.size(); ++i)
            exact += static_cast<double>(weights[i]) * squared_distance(members[i], mu);
    }
    return {exact, std::move(best_labels)};
}

// ---------------------------------------------------------------------------
// Exact expected seeding cost by outcome-tree enumeration
// ---------------------------------------------------------------------------

enum class OracleVariant { plain, greedy, noisy, moderate };

struct OracleQuery {
    OracleVariant variant = OracleVariant::plain;
    int ell = 1;                     // greedy / moderate
    double p_mix = 1.0;              // moderate
    PerturbationModel noise;         // noisy; deterministic strategies only
    bool ell_in_first_step = false;  // greedy

    void validate() const {
        if ((variant == OracleVariant::greedy || variant == OracleVariant::moderate) && ell < 1)
            throw InputError("ell must be at least 1");
        if (variant == OracleVariant::moderate && !(p_mix >= 0.0 && p_mix <= 1.0))
            throw InputError("p_mix must lie in [0,1]");
        if (variant == OracleVariant::noisy) {
            noise.validate();
            if (noise.strategy == AdversaryStrategy::random_within_bounds)
                throw InputError("exact enumeration requires a deterministic adversary");
        }
    }
};

namespace detail {

/// Probability that each site is the greedy choice among ell i.i.d. draws
/// from q: sites are ranked by (resulting potential asc, index asc); the
/// chosen site is the best-ranked one present in the sample.
inline std::vector<double> greedy_choice_probs(const Dataset& x, const CenterSet& c,
                                               const std::vector<double>& q, int ell) {
    const std::size_t n = q.size();
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
        if (q[i] > 0.0) order.push_back(i);
    std::vector<double> key(n, 0.0);
    for (std::size_t i : order)
        key[i] = c.empty() ? cost(x, std::vector<Point>{x.point(i)})
                           : -candidate_delta(x, c, x.point(i));
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return key[a] < key[b];
        return a < b;
    });

    std::vector<double> tail(order.size() + 1, 0.0);
    for (std::size_t r = order.size(); r-- > 0;) tail[r] = tail[r + 1] + q[order[r]];

    std::vector<double> probs(n, 0.0);
    for (std::size_t r = 0; r < order.size(); ++r) {
        const double p = std::pow(tail[r], ell) - std::pow(tail[r + 1], ell);
        probs[order[r]] = std::max(0.0, p);
    }
    return probs;
}

}  // namespace detail

/// Exact expectation of the final seeding potential, by enumerating every
/// center sequence with its exact probability. Uses the same distribution,
/// perturbation, and tie-breaking arithmetic as the samplers, so it is the
/// ground truth for their expectations. Refuses when the outcome tree
/// (site_count^k sequences) exceeds the budget.
inline double exact_expected_cost(const Dataset& x, int k, const OracleQuery& query,
                                  const EnumerationBudget& budget = {}) {
    if (k < 1) throw InputError("k must be at least 1");
    query.validate();
    budget.validate();
    const std::size_t n = x.site_count();
    if (std::pow(static_cast<double>(n), k) > static_cast<double>(budget.max_outcomes))
        throw BudgetExceeded("outcome tree exceeds the enumeration budget");

    const int kstar = x.cluster_count();
    std::vector<int> history;

    auto expect = [&](auto&& self, const CenterSet& c, std::vector<bool>& covered,
                      int iteration) -> double {
        if (iteration > k) return c.total_potential();
        // Zero potential: all later choices are free and the cost stays 0.
        if (!c.empty() && !(c.total_potential() > 0.0)) return 0.0;

        SamplingDistribution base =
            c.empty() ? uniform_distribution(x) : d2_distribution(x, c);

        if (query.variant == OracleVariant::noisy) {
            AdversaryContext ctx;
            ctx.dataset = &x;
            ctx.centers = c.empty() ? nullptr : &c;
            ctx.covered_clusters = x.labeled() ? &covered : nullptr;
            ctx.iteration = iteration;
            ctx.chosen_sites = &history;
            base = perturb(query.noise, base, ctx, nullptr);
        }

        std::vector<double> choice_probs;
        switch (query.variant) {
            case OracleVariant::plain:
            case OracleVariant::noisy:
                choice_probs = base.probs;
                break;
            case OracleVariant::greedy:
                if (iteration == 1 && !query.ell_in_first_step)
                    choice_probs = base.probs;
                else
                    choice_probs = detail::greedy_choice_probs(x, c, base.probs, query.ell);
                break;
            case OracleVariant::moderate: {
                if (iteration == 1) {
                    choice_probs = base.probs;
                } else {
                    const std::vector<double> greedy =
                        detail::greedy_choice_probs(x, c, base.probs, query.ell);
                    choice_probs.resize(n);
                    for (std::size_t i = 0; i < n; ++i)
                        choice_probs[i] =
                            query.p_mix * base.probs[i] + (1.0 - query.p_mix) * greedy[i];
                }
                break;
            }
        }

        double value = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (choice_probs[s] <= 0.0) continue;
            CenterSet next = c;
            next.add_center(x, x.point(s));
            const int lab = x.labeled() ? x.label(s) : -1;
            const bool newly = (lab >= 0) && !covered[static_cast<std::size_t>(lab)];
            if (newly) covered[static_cast<std::size_t>(lab)] = true;
            history.push_back(static_cast<int>(s));
            value += choice_probs[s] * self(self, next, covered, iteration + 1);
            history.pop_back();
            if (newly) covered[static_cast<std::size_t>(lab)] = false;
        }
        return value;
    };

    CenterSet empty(x);
    std::vector<bool> covered(static_cast<std::size_t>(kstar), false);
    return expect(expect, empty, covered, 1);
}

// ---------------------------------------------------------------------------
// Closed-form simplex potential
// ---------------------------------------------------------------------------

/// Potential of the simplex lower-bound instance after i-1 centers on
/// distinct vertices other than the light one: 2((k-i+1)k - 1) + 1 - 1/k.
inline double simplex_potential_closed_form(int k, int i) {
    if (k < 4) throw InputError("closed form requires k >= 4");
    if (i < 1 || i > k) throw InputError("iteration index must lie in [1, k]");
    const double kd = static_cast<double>(k);
    return 2.0 * ((kd - i + 1.0) * kd - 1.0) + 1.0 - 1.0 / kd;
}

// ---------------------------------------------------------------------------
// Abstract removal experiment
// ---------------------------------------------------------------------------

enum class RemovalAdversary { remove_min, remove_max, none };
enum class DecrementRule { none, halve_random_survivor };

inline const char* adversary_name(RemovalAdversary a) {
    switch (a) {
        case RemovalAdversary::remove_min: return "remove_min";
        case RemovalAdversary::remove_max: return "remove_max";
        case RemovalAdversary::none: return "none";
    }
    return "?";
}

/// Process on z nonnegative numbers of average 1: each step removes one
/// number, adversarially with probability eps and by proportional sampling
/// otherwise; an optional adversarial decrement follows each step.
struct RemovalExperimentConfig {
    std::vector<double> numbers;
    double eps = 0.0;
    int steps = 1;
    RemovalAdversary adversary = RemovalAdversary::remove_min;
    DecrementRule decrement = DecrementRule::none;
    std::int64_t trials = 1;

    void validate() const {
        const auto z = static_cast<std::int64_t>(numbers.size());
        if (z < 2) throw InputError("need at least two numbers");
        double sum = 0.0;
        for (double a : numbers) {
            if (!(a >= 0.0)) throw InputError("numbers must be nonnegative");
            sum += a;
        }
        if (std::abs(sum - static_cast<double>(z)) > 1e-9)
            throw InputError("numbers must have average 1");
        if (!(eps >= 0.0 && eps < 1.0)) throw InputError("eps must lie in [0,1)");
        if (steps < 1 || steps > z - 1) throw InputError("steps must lie in [1, z-1]");
        if (trials < 1) throw InputError("trials must be at least 1");
    }
};

struct RemovalTrial {
    std::vector<double> remaining;  // surviving values after the last step
    std::vector<double> removed;    // removed values, at their value when removed
    double final_average = 0.0;
    int adversarial_steps = 0;
};

inline RemovalTrial removal_trial(const RemovalExperimentConfig& cfg, std::mt19937_64& rng) {
    std::vector<double> values = cfg.numbers;
    std::vector<bool> alive(values.size(), true);
    std::size_t alive_count = values.size();
    RemovalTrial out;

    auto remove_at = [&](std::size_t idx) {
        out.removed.push_back(values[idx]);
        alive[idx] = false;
        --alive_count;
    };

    for (int step = 0; step < cfg.steps; ++step) {
        const bool adversarial = canonical_double(rng) < cfg.eps;
        bool handled = false;
        if (adversarial && cfg.adversary != RemovalAdversary::none) {
            ++out.adversarial_steps;
            std::size_t pick = values.size();
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!alive[i]) continue;
                if (pick == values.size() ||
                    (cfg.adversary == RemovalAdversary::remove_min && values[i] < values[pick]) ||
                    (cfg.adversary == RemovalAdversary::remove_max && values[i] > values[pick]))
                    pick = i;
            }
            remove_at(pick);
            handled = true;
        }
        if (!handled) {
            double sum = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i)
                if (alive[i]) sum += values[i];
            std::size_t pick = values.size();
            if (sum > 0.0) {
                const double u = canonical_double(rng) * sum;
                double cum = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    if (!alive[i] || values[i] <= 0.0) continue;
                    cum += values[i];
                    pick = i;
                    if (u < cum) break;
                }
            }
            if (pick == values.size())
                for (std::size_t i = 0; i < values.size(); ++i)
                    if (alive[i]) { pick = i; break; }  // all zero: index order
            remove_at(pick);
        }
        if (cfg.decrement == DecrementRule::halve_random_survivor && alive_count > 0) {
            auto target = static_cast<std::size_t>(canonical_double(rng) *
                                                   static_cast<double>(alive_count));
            if (target >= alive_count) target = alive_count - 1;
            std::size_t seen = 0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!alive[i]) continue;
                if (seen++ == target) {
                    values[i] *= 0.5;
                    break;
                }
            }
        }
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (alive[i]) {
            out.remaining.push_back(values[i]);
            sum += values[i];
        }
    out.final_average = sum / static_cast<double>(out.remaining.size());
    return out;
}

struct RemovalReport {
    std::int64_t trials = 0;
    double mean_final_average = 0.0;
    double stddev = 0.0;
    double min_final_average = 0.0;
    double max_final_average = 0.0;
    bool large_z_regime = false;   // z / ln z >= max{18, 24 eps / (1-eps)^2}
    double large_regime_bound = 0.0;  // 4/(1-eps) ln z + 2
    bool few_steps = false;        // steps < z/2
};

inline RemovalReport removal_experiment(const RemovalExperimentConfig& cfg,
                                        std::uint64_t base_seed) {
    cfg.validate();
    RemovalReport rep;
    rep.trials = cfg.trials;
    double sum = 0.0, sum_sq = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::int64_t t = 0; t < cfg.trials; ++t) {
        auto engine = SubstreamRng(base_seed, static_cast<std::uint64_t>(t)).engine(0);
        const RemovalTrial trial = removal_trial(cfg, engine);
        sum += trial.final_average;
        sum_sq += trial.final_average * trial.final_average;
        mn = std::min(mn, trial.final_average);
        mx = std::max(mx, trial.final_average);
    }
    const auto nt = static_cast<double>(cfg.trials);
    rep.mean_final_average = sum / nt;
    const double var = std::max(0.0, (sum_sq - sum * sum / nt) / std::max(1.0, nt - 1.0));
    rep.stddev = std::sqrt(var);
    rep.min_final_average = mn;
    rep.max_final_average = mx;

    const auto z = static_cast<double>(cfg.numbers.size());
    const double threshold =
        std::max(18.0, 24.0 * cfg.eps / ((1.0 - cfg.eps) * (1.0 - cfg.eps)));
    rep.large_z_regime = z / std::log(z) >= threshold;
    rep.large_regime_bound = 4.0 / (1.0 - cfg.eps) * std::log(z) + 2.0;
    rep.few_steps = static_cast<double>(cfg.steps) < z / 2.0;
    return rep;
}

}  // namespace seedlab
