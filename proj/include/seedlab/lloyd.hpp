#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "seedlab/core.hpp"
#include "seedlab/errors.hpp"

namespace seedlab {

struct LloydConfig {
    int max_iters = 100;
    double rel_improvement_floor = 1e-9;  // stop when (prev-new)/prev falls to or below this

    void validate() const {
        if (max_iters < 1) throw InputError("max_iters must be at least 1");
        if (rel_improvement_floor < 0.0)
            throw InputError("rel_improvement_floor must be nonnegative");
    }
};

struct LloydResult {
    std::vector<Point> centers;
    std::vector<int> assignment;       // per-site cluster index into centers
    int iterations_used = 0;
    std::vector<double> cost_sequence;  // cost after each assign+update round
};

namespace detail {

inline int nearest_center(const Point& p, const std::vector<Point>& centers) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double d = squared_distance(p, centers[j]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

}  // namespace detail

/// Alternates nearest-center assignment with weighted mean updates until the
/// relative improvement drops to the floor or max_iters is reached. A center
/// that loses all its sites is respawned at the site with the largest current
/// weighted cost, which cannot increase the total cost.
inline LloydResult lloyd_refine(const Dataset& x, const CenterSet& seed, const LloydConfig& cfg = {}) {
    cfg.validate();
    if (seed.empty()) throw InputError("lloyd_refine requires at least one center");

    LloydResult res;
    res.centers = seed.centers();
    const std::size_t k = res.centers.size();
    res.assignment.assign(x.site_count(), 0);

    double prev_cost = seed.total_potential();
    for (int round = 1; round <= cfg.max_iters; ++round) {
        for (std::size_t i = 0; i < x.site_count(); ++i)
            res.assignment[i] = detail::nearest_center(x.point(i), res.centers);

        // Respawn empty clusters one at a time, reassigning after each move.
        for (;;) {
            std::vector<std::int64_t> cluster_weight(k, 0);
            for (std::size_t i = 0; i < x.site_count(); ++i)
                cluster_weight[static_cast<std::size_t>(res.assignment[i])] += x.weight(i);
            std::size_t empty = k;
            for (std::size_t j = 0; j < k; ++j)
                if (cluster_weight[j] == 0) { empty = j; break; }
            if (empty == k) break;

            std::size_t worst_site = 0;
            double worst_cost = -1.0;
            for (std::size_t i = 0; i < x.site_count(); ++i) {
                const double d = squared_distance(x.point(i), res.centers[static_cast<std::size_t>(res.assignment[i])]);
                const double site_cost = static_cast<double>(x.weight(i)) * d;
                if (site_cost > worst_cost) {
                    worst_cost = site_cost;
                    worst_site = i;
                }
            }
            res.centers[empty] = x.point(worst_site);
            for (std::size_t i = 0; i < x.site_count(); ++i)
                res.assignment[i] = detail::nearest_center(x.point(i), res.centers);
        }

        std::vector<Point> sums(k);
        std::vector<double> weights(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) sums[j].coords.assign(x.dim(), 0.0);
        for (std::size_t i = 0; i < x.site_count(); ++i) {
            const auto j = static_cast<std::size_t>(res.assignment[i]);
            const double w = static_cast<double>(x.weight(i));
            for (std::size_t dd = 0; dd < x.dim(); ++dd) sums[j][dd] += w * x.point(i)[dd];
            weights[j] += w;
        }
        for (std::size_t j = 0; j < k; ++j)
            for (std::size_t dd = 0; dd < x.dim(); ++dd) res.centers[j][dd] = sums[j][dd] / weights[j];

        double round_cost = 0.0;
        for (std::size_t i = 0; i < x.site_count(); ++i)
            round_cost += static_cast<double>(x.weight(i)) *
                          squared_distance(x.point(i), res.centers[static_cast<std::size_t>(res.assignment[i])]);

        res.cost_sequence.push_back(round_cost);
        res.iterations_used = round;

        if (prev_cost <= 0.0) break;
        if ((prev_cost - round_cost) <= cfg.rel_improvement_floor * prev_cost) break;
        prev_cost = round_cost;
    }
    return res;
}

}  // namespace seedlab
