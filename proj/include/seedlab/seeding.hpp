#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "seedlab/core.hpp"
#include "seedlab/errors.hpp"
#include "seedlab/rng.hpp"

namespace seedlab {

enum class Algorithm { plain, greedy, noisy, moderate };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::plain: return "plain";
        case Algorithm::greedy: return "greedy";
        case Algorithm::noisy: return "noisy";
        case Algorithm::moderate: return "moderate";
    }
    return "?";
}

/// A per-site probability vector: entries nonnegative, summing to 1 within
/// 1e-12 absolute.
struct SamplingDistribution {
    std::vector<double> probs;

    void validate() const {
        double s = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0)) throw InputError("sampling probabilities must be nonnegative");
            s += p;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw InputError("sampling probabilities must sum to 1");
    }
};

/// Weighted-uniform distribution over sites (uniform over underlying points).
inline SamplingDistribution uniform_distribution(const Dataset& x) {
    SamplingDistribution d;
    d.probs.resize(x.site_count());
    const double total = static_cast<double>(x.total_weight());
    for (std::size_t i = 0; i < x.site_count(); ++i)
        d.probs[i] = static_cast<double>(x.weight(i)) / total;
    return d;
}

/// D^2-sampling distribution: probability proportional to the weighted
/// squared distance to the nearest chosen center.
inline SamplingDistribution d2_distribution(const Dataset& x, const CenterSet& c) {
    if (c.empty()) throw InputError("d2_distribution requires at least one center");
    const double total = c.total_potential();
    if (!(total > 0.0)) throw DegeneratePotential();
    SamplingDistribution d;
    d.probs.resize(x.site_count());
    for (std::size_t i = 0; i < x.site_count(); ++i)
        d.probs[i] = static_cast<double>(x.weight(i)) * c.min_dist_sq()[i] / total;
    return d;
}

/// Draws one site index by inverse-CDF walk; consumes exactly one engine
/// step, so substream positions are predictable across variants.
inline int sample(const SamplingDistribution& dist, std::mt19937_64& rng) {
    const double u = canonical_double(rng);
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
        const double p = dist.probs[i];
        if (p <= 0.0) continue;
        cum += p;
        last_positive = static_cast<int>(i);
        if (u < cum) return last_positive;
    }
    if (last_positive < 0) throw InputError("cannot sample from an all-zero distribution");
    return last_positive;
}

// ---------------------------------------------------------------------------
// Perturbation adversary
// ---------------------------------------------------------------------------

enum class AdversaryStrategy { identity, boost_covered, boost_far, random_within_bounds, custom };

inline const char* strategy_name(AdversaryStrategy s) {
    switch (s) {
        case AdversaryStrategy::identity: return "identity";
        case AdversaryStrategy::boost_covered: return "boost_covered";
        case AdversaryStrategy::boost_far: return "boost_far";
        case AdversaryStrategy::random_within_bounds: return "random_within_bounds";
        case AdversaryStrategy::custom: return "custom";
    }
    return "?";
}

inline AdversaryStrategy strategy_from_name(const std::string& name) {
    if (name == "identity") return AdversaryStrategy::identity;
    if (name == "boost_covered") return AdversaryStrategy::boost_covered;
    if (name == "boost_far") return AdversaryStrategy::boost_far;
    if (name == "random_within_bounds") return AdversaryStrategy::random_within_bounds;
    throw InputError("unknown adversary strategy: " + name);
}

/// What the adversary may look at when shaping multipliers. Built-in
/// strategies read only the current state; custom strategies additionally
/// receive the full center history.
struct AdversaryContext {
    const Dataset* dataset = nullptr;
    const CenterSet* centers = nullptr;               // null before the first center
    const std::vector<bool>* covered_clusters = nullptr;  // null when unlabeled
    int iteration = 1;                                // 1-based seeding iteration
    const std::vector<int>* chosen_sites = nullptr;   // history, oldest first
};

using MultiplierFn =
    std::function<std::vector<double>(const SamplingDistribution&, const AdversaryContext&)>;

/// An adversary that maps a sampling distribution p to a feasible perturbed
/// distribution q with (1-eps1) p_x <= q_x <= (1+eps2) p_x and sum 1.
struct PerturbationModel {
    double eps1 = 0.0;  // in [0,1)
    double eps2 = 0.0;  // >= 0
    AdversaryStrategy strategy = AdversaryStrategy::identity;
    MultiplierFn custom;

    void validate() const {
        if (!(eps1 >= 0.0 && eps1 < 1.0)) throw InputError("eps1 must lie in [0,1)");
        if (!(eps2 >= 0.0)) throw InputError("eps2 must be nonnegative");
        if (strategy == AdversaryStrategy::custom && !custom)
            throw InputError("custom strategy requires a multiplier function");
    }
};

namespace detail {

inline std::vector<double> builtin_multipliers(const PerturbationModel& model,
                                               const SamplingDistribution& p,
                                               const AdversaryContext& ctx,
                                               std::mt19937_64* adversary_rng) {
    const std::size_t n = p.probs.size();
    std::vector<double> m(n, 1.0);
    const double lo = 1.0 - model.eps1;
    const double hi = 1.0 + model.eps2;
    switch (model.strategy) {
        case AdversaryStrategy::identity:
            break;
        case AdversaryStrategy::boost_covered: {
            if (!ctx.dataset || !ctx.covered_clusters)
                throw InputError("boost_covered requires a labeled dataset");
            const Dataset& x = *ctx.dataset;
            for (std::size_t i = 0; i < n; ++i) {
                const bool covered = (*ctx.covered_clusters)[static_cast<std::size_t>(x.label(i))];
                m[i] = covered ? hi : lo;
            }
            break;
        }
        case AdversaryStrategy::boost_far: {
            // No distances exist before the first center; leave p untouched.
            if (!ctx.dataset || !ctx.centers || ctx.centers->empty()) break;
            const CenterSet& c = *ctx.centers;
            double max_cost = 0.0;
            for (std::size_t i = 0; i < n; ++i) max_cost = std::max(max_cost, c.min_dist_sq()[i]);
            if (max_cost <= 0.0) break;
            for (std::size_t i = 0; i < n; ++i)
                m[i] = (c.min_dist_sq()[i] >= max_cost * (1.0 - 1e-12)) ? hi : lo;
            break;
        }
        case AdversaryStrategy::random_within_bounds: {
            if (!adversary_rng)
                throw InputError("random_within_bounds requires adversary randomness");
            for (std::size_t i = 0; i < n; ++i)
                m[i] = lo + (hi - lo) * canonical_double(*adversary_rng);
            break;
        }
        case AdversaryStrategy::custom:
            return model.custom(p, ctx);
    }
    return m;
}

}  // namespace detail

/// Applies the adversary: the strategy proposes per-site multipliers inside
/// [1-eps1, 1+eps2]; if the proposal does not sum to 1, the residual is
/// redistributed proportionally to each entry's remaining slack toward the
/// violated side. Feasible for every p since p itself lies in the band.
/// The identity strategy returns p verbatim.
inline SamplingDistribution perturb(const PerturbationModel& model, const SamplingDistribution& p,
                                    const AdversaryContext& ctx = {},
                                    std::mt19937_64* adversary_rng = nullptr) {
    model.validate();
    if (model.strategy == AdversaryStrategy::identity) return p;

    const double lo = 1.0 - model.eps1;
    const double hi = 1.0 + model.eps2;
    std::vector<double> m = detail::builtin_multipliers(model, p, ctx, adversary_rng);
    if (m.size() != p.probs.size())
        throw InputError("strategy returned a multiplier list of the wrong length");

    const std::size_t n = p.probs.size();
    std::vector<double> q(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i] < lo - 1e-12 || m[i] > hi + 1e-12)
            throw InputError("strategy proposed a multiplier outside the band");
        q[i] = std::clamp(m[i], lo, hi) * p.probs[i];
        sum += q[i];
    }

    if (sum < 1.0) {
        double headroom = 0.0;
        for (std::size_t i = 0; i < n; ++i) headroom += hi * p.probs[i] - q[i];
        const double deficit = 1.0 - sum;
        if (headroom > 0.0)
            for (std::size_t i = 0; i < n; ++i) q[i] += deficit * (hi * p.probs[i] - q[i]) / headroom;
    } else if (sum > 1.0) {
        double footroom = 0.0;
        for (std::size_t i = 0; i < n; ++i) footroom += q[i] - lo * p.probs[i];
        const double excess = sum - 1.0;
        if (footroom > 0.0)
            for (std::size_t i = 0; i < n; ++i) q[i] -= excess * (q[i] - lo * p.probs[i]) / footroom;
    }

    SamplingDistribution out;
    out.probs = std::move(q);
    return out;
}

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct IterationRecord {
    int iteration = 0;  // 1-based
    int chosen_site = -1;
    std::vector<int> candidate_sites;  // every draw of this iteration, in draw order
    std::uint64_t distribution_hash = 0;  // fingerprint of the distribution sampled from
    bool degenerate = false;           // weighted-uniform fallback (zero potential)
    bool plain_branch = false;         // moderate only: took the single-draw branch
    bool wasted = false;               // labeled datasets only
    int uncovered_clusters = -1;       // u_i after this iteration; -1 when unlabeled
    double uncovered_avg_cost = 0.0;   // uncovered cost / u_i, 0 when u_i == 0
    double potential_after = 0.0;

    bool operator==(const IterationRecord&) const = default;
};

struct SeedingTrace {
    Algorithm algorithm = Algorithm::plain;
    std::uint64_t base_seed = 0;
    std::uint64_t trial = 0;
    bool labeled = false;
    std::vector<IterationRecord> iterations;
    int covered_clusters = 0;  // final count of reference clusters hit
    double psi = 0.0;          // sum over wasted iterations of the uncovered average cost

    bool operator==(const SeedingTrace&) const = default;
};

struct SeedResult {
    CenterSet centers;
    SeedingTrace trace;
};

struct SeedingParams {
    Algorithm algo = Algorithm::plain;
    int k = 1;
    int ell = 1;                     // greedy / moderate
    double p_mix = 1.0;              // moderate: probability of a plain step
    PerturbationModel noise;         // noisy
    bool ell_in_first_step = false;  // greedy: sample ell candidates in iteration 1 too

    void validate() const {
        if (k < 1) throw InputError("k must be at least 1");
        if ((algo == Algorithm::greedy || algo == Algorithm::moderate) && ell < 1)
            throw InputError("ell must be at least 1");
        if (algo == Algorithm::moderate && !(p_mix >= 0.0 && p_mix <= 1.0))
            throw InputError("p_mix must lie in [0,1]");
        if (algo == Algorithm::noisy) noise.validate();
    }
};

namespace detail {

/// Greedy selection among sampled candidates: minimize the resulting
/// potential, ties broken by lowest site index. Works for the first
/// iteration (no centers yet) by minimizing the single-center cost.
inline int pick_best_candidate(const Dataset& x, const CenterSet& c,
                               const std::vector<int>& candidates) {
    int best_site = -1;
    double best_key = std::numeric_limits<double>::infinity();
    std::vector<int> seen;
    for (int site : candidates) {
        bool dup = false;
        for (int s : seen)
            if (s == site) { dup = true; break; }
        if (dup) continue;
        seen.push_back(site);
        const double key = c.empty() ? cost(x, std::vector<Point>{x.point(static_cast<std::size_t>(site))})
                                     : -candidate_delta(x, c, x.point(static_cast<std::size_t>(site)));
        if (key < best_key || (key == best_key && site < best_site)) {
            best_key = key;
            best_site = site;
        }
    }
    return best_site;
}

}  // namespace detail

/// One iteration's draw bundle: every sampled candidate in draw order plus
/// the selected site.
struct StepDraw {
    int chosen = -1;
    std::vector<int> candidates;
    bool plain_branch = false;  // moderate only
};

/// A single greedy step: ell i.i.d. draws from dist, keep the candidate
/// whose addition leaves the lowest potential (lowest site index on ties).
inline StepDraw greedy_choice(const Dataset& x, const CenterSet& c,
                              const SamplingDistribution& dist, int ell, std::mt19937_64& rng) {
    if (ell < 1) throw InputError("ell must be at least 1");
    StepDraw step;
    step.candidates.reserve(static_cast<std::size_t>(ell));
    for (int j = 0; j < ell; ++j) step.candidates.push_back(sample(dist, rng));
    step.chosen = detail::pick_best_candidate(x, c, step.candidates);
    return step;
}

/// A single moderately-greedy step: with probability p_mix one plain draw,
/// otherwise a greedy ell-candidate step. The branch decision consumes one
/// draw before any sampling.
inline StepDraw moderate_choice(const Dataset& x, const CenterSet& c,
                                const SamplingDistribution& dist, int ell, double p_mix,
                                std::mt19937_64& rng) {
    if (!(p_mix >= 0.0 && p_mix <= 1.0)) throw InputError("p_mix must lie in [0,1]");
    if (canonical_double(rng) < p_mix) {
        StepDraw step;
        step.plain_branch = true;
        step.chosen = sample(dist, rng);
        step.candidates.push_back(step.chosen);
        return step;
    }
    return greedy_choice(x, c, dist, ell, rng);
}

/// Common engine behind the four seeding procedures. Each iteration draws
/// from one named substream; greedy iterations consume ell draws from it, a
/// moderate iteration consumes one branch draw first. Adversary randomness
/// lives on a separate lane so perturbation never shifts the sampling
/// stream.
inline SeedResult run_seeding(const Dataset& x, const SeedingParams& params,
                              const SubstreamRng& rng) {
    params.validate();

    CenterSet centers(x);
    SeedingTrace trace;
    trace.algorithm = params.algo;
    trace.base_seed = rng.base_seed();
    trace.trial = rng.trial();
    trace.labeled = x.labeled();

    const int kstar = x.cluster_count();
    std::vector<bool> covered(static_cast<std::size_t>(kstar), false);
    int covered_count = 0;
    std::vector<int> history;

    for (int it = 1; it <= params.k; ++it) {
        auto engine = rng.engine(static_cast<std::uint64_t>(it), 0);

        IterationRecord rec;
        rec.iteration = it;

        SamplingDistribution dist;
        if (centers.empty()) {
            dist = uniform_distribution(x);
        } else if (centers.total_potential() > 0.0) {
            dist = d2_distribution(x, centers);
        } else {
            dist = uniform_distribution(x);
            rec.degenerate = true;
        }

        if (params.algo == Algorithm::noisy) {
            AdversaryContext ctx;
            ctx.dataset = &x;
            ctx.centers = centers.empty() ? nullptr : &centers;
            ctx.covered_clusters = x.labeled() ? &covered : nullptr;
            ctx.iteration = it;
            ctx.chosen_sites = &history;
            auto adversary = rng.engine(static_cast<std::uint64_t>(it), 1);
            dist = perturb(params.noise, dist, ctx, &adversary);
        }

        StepDraw step;
        if (params.algo == Algorithm::greedy && ((it > 1) || params.ell_in_first_step)) {
            step = greedy_choice(x, centers, dist, params.ell, engine);
        } else if (params.algo == Algorithm::moderate && it > 1) {
            step = moderate_choice(x, centers, dist, params.ell, params.p_mix, engine);
            rec.plain_branch = step.plain_branch;
        } else {
            step.chosen = sample(dist, engine);
            step.candidates.push_back(step.chosen);
        }
        const int chosen = step.chosen;
        rec.candidate_sites = std::move(step.candidates);

        centers.add_center(x, x.point(static_cast<std::size_t>(chosen)));
        history.push_back(chosen);
        rec.chosen_site = chosen;
        rec.distribution_hash = hash_doubles(dist.probs);
        rec.potential_after = centers.total_potential();

        if (x.labeled()) {
            const int lab = x.label(static_cast<std::size_t>(chosen));
            const bool already = covered[static_cast<std::size_t>(lab)];
            if (!already) {
                covered[static_cast<std::size_t>(lab)] = true;
                ++covered_count;
            }
            rec.wasted = (it >= 2) && already;
            rec.uncovered_clusters = kstar - covered_count;
            if (rec.uncovered_clusters > 0) {
                std::vector<bool> uncovered_site(x.site_count());
                for (std::size_t i = 0; i < x.site_count(); ++i)
                    uncovered_site[i] = !covered[static_cast<std::size_t>(x.label(i))];
                rec.uncovered_avg_cost = cached_cost_where(x, centers, uncovered_site) /
                                         static_cast<double>(rec.uncovered_clusters);
            }
            if (rec.wasted) trace.psi += rec.uncovered_avg_cost;
        }

        trace.iterations.push_back(std::move(rec));
    }

    trace.covered_clusters = covered_count;
    return {std::move(centers), std::move(trace)};
}

inline SeedResult kmeanspp_seed(const Dataset& x, int k, const SubstreamRng& rng) {
    SeedingParams p;
    p.algo = Algorithm::plain;
    p.k = k;
    return run_seeding(x, p, rng);
}

inline SeedResult greedy_seed(const Dataset& x, int k, int ell, const SubstreamRng& rng,
                              bool ell_in_first_step = false) {
    SeedingParams p;
    p.algo = Algorithm::greedy;
    p.k = k;
    p.ell = ell;
    p.ell_in_first_step = ell_in_first_step;
    return run_seeding(x, p, rng);
}

inline SeedResult noisy_seed(const Dataset& x, int k, const PerturbationModel& model,
                             const SubstreamRng& rng) {
    SeedingParams p;
    p.algo = Algorithm::noisy;
    p.k = k;
    p.noise = model;
    return run_seeding(x, p, rng);
}

inline SeedResult moderately_greedy_seed(const Dataset& x, int k, int ell, double p_mix,
                                         const SubstreamRng& rng) {
    SeedingParams p;
    p.algo = Algorithm::moderate;
    p.k = k;
    p.ell = ell;
    p.p_mix = p_mix;
    return run_seeding(x, p, rng);
}

}  // namespace seedlab
