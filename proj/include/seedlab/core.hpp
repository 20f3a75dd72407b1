#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "seedlab/errors.hpp"

namespace seedlab {

/// A point in R^d. Coordinates must be finite; d >= 1.
struct Point {
    std::vector<double> coords;

    Point() = default;
    Point(std::initializer_list<double> c) : coords(c) {}
    explicit Point(std::vector<double> c) : coords(std::move(c)) {}

    std::size_t dim() const { return coords.size(); }
    double operator[](std::size_t i) const { return coords[i]; }
    double& operator[](std::size_t i) { return coords[i]; }

    bool operator==(const Point&) const = default;
};

/// Squared Euclidean distance, computed directly from coordinate
/// differences. The expanded |a|^2+|b|^2-2ab form cancels catastrophically
/// on near-coincident points, so it is not used anywhere.
inline double squared_distance(const Point& a, const Point& b) {
    if (a.dim() != b.dim()) throw InputError("dimension mismatch in squared_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.coords.size(); ++i) {
        const double d = a.coords[i] - b.coords[i];
        s += d * d;
    }
    return s;
}

/// How a stored optimal cost is to be interpreted when forming ratios.
enum class OptCostKind { exact, upper_bound };

/// A weighted point set. Coincident input points are represented as one site
/// with an integer multiplicity, which keeps exact enumeration tractable.
/// Optionally carries a reference clustering (labels 0..k*-1, one per site)
/// and its cost. Immutable after construction; safe to share across threads.
class Dataset {
public:
    static Dataset create(std::vector<Point> points, std::vector<std::int64_t> weights,
                          std::optional<std::vector<int>> labels = std::nullopt,
                          std::optional<double> optimal_cost = std::nullopt,
                          OptCostKind cost_kind = OptCostKind::exact) {
        Dataset x;
        if (points.empty()) throw InputError("dataset must contain at least one site");
        if (weights.empty()) weights.assign(points.size(), 1);
        if (weights.size() != points.size())
            throw InputError("weights length must match number of sites");
        const std::size_t d = points.front().dim();
        if (d < 1) throw InputError("points must have dimension >= 1");
        for (const Point& p : points) {
            if (p.dim() != d) throw InputError("all sites must share one dimension");
            for (double c : p.coords)
                if (!std::isfinite(c)) throw InputError("coordinates must be finite");
        }
        std::int64_t total = 0;
        for (std::int64_t w : weights) {
            if (w <= 0) throw InputError("site weights must be positive integers");
            total += w;
        }
        if (labels) {
            if (labels->size() != points.size())
                throw InputError("label list length must match number of sites");
            int kstar = 0;
            for (int lab : *labels) {
                if (lab < 0) throw InputError("labels must be nonnegative");
                kstar = std::max(kstar, lab + 1);
            }
            std::vector<bool> seen(static_cast<std::size_t>(kstar), false);
            for (int lab : *labels) seen[static_cast<std::size_t>(lab)] = true;
            for (bool s : seen)
                if (!s) throw InputError("labels must form a contiguous range 0..k*-1");
            x.cluster_count_ = kstar;
        }
        if (optimal_cost && *optimal_cost < 0)
            throw InputError("optimal cost must be nonnegative");
        x.points_ = std::move(points);
        x.weights_ = std::move(weights);
        x.labels_ = std::move(labels);
        x.optimal_cost_ = optimal_cost;
        x.cost_kind_ = cost_kind;
        x.dim_ = d;
        x.total_weight_ = total;
        return x;
    }

    const std::vector<Point>& points() const { return points_; }
    const Point& point(std::size_t i) const { return points_[i]; }
    const std::vector<std::int64_t>& weights() const { return weights_; }
    std::int64_t weight(std::size_t i) const { return weights_[i]; }
    std::size_t site_count() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    std::int64_t total_weight() const { return total_weight_; }

    bool labeled() const { return labels_.has_value(); }
    const std::vector<int>& labels() const {
        if (!labels_) throw InputError("dataset carries no reference labels");
        return *labels_;
    }
    int label(std::size_t i) const { return labels()[i]; }
    /// Number of reference clusters k* (0 when unlabeled).
    int cluster_count() const { return cluster_count_; }

    std::optional<double> optimal_cost() const { return optimal_cost_; }
    OptCostKind optimal_cost_kind() const { return cost_kind_; }

    /// Site identity (points, weights, labels); stored costs are derived data
    /// and do not participate in equality.
    bool operator==(const Dataset& other) const {
        return points_ == other.points_ && weights_ == other.weights_ &&
               labels_ == other.labels_;
    }

private:
    std::vector<Point> points_;
    std::vector<std::int64_t> weights_;
    std::optional<std::vector<int>> labels_;
    std::optional<double> optimal_cost_;
    OptCostKind cost_kind_ = OptCostKind::exact;
    std::size_t dim_ = 0;
    std::int64_t total_weight_ = 0;
    int cluster_count_ = 0;
};

/// An ordered center list bound to one dataset, with a cached per-site
/// squared distance to the nearest center. Appending a center updates the
/// cache in O(n d); the cache always matches a full recomputation.
class CenterSet {
public:
    explicit CenterSet(const Dataset& x)
        : min_dist_sq_(x.site_count(), std::numeric_limits<double>::infinity()),
          total_potential_(std::numeric_limits<double>::infinity()) {}

    const std::vector<Point>& centers() const { return centers_; }
    std::size_t size() const { return centers_.size(); }
    bool empty() const { return centers_.empty(); }

    const std::vector<double>& min_dist_sq() const { return min_dist_sq_; }
    double total_potential() const { return total_potential_; }

    void add_center(const Dataset& x, Point c) {
        if (c.dim() != x.dim()) throw InputError("center dimension mismatch");
        if (min_dist_sq_.size() != x.site_count())
            throw InputError("center set bound to a different dataset");
        double total = 0.0;
        for (std::size_t i = 0; i < x.site_count(); ++i) {
            const double d = squared_distance(x.point(i), c);
            if (d < min_dist_sq_[i]) min_dist_sq_[i] = d;
            total += static_cast<double>(x.weight(i)) * min_dist_sq_[i];
        }
        centers_.push_back(std::move(c));
        total_potential_ = total;
    }

private:
    std::vector<Point> centers_;
    std::vector<double> min_dist_sq_;
    double total_potential_;
};

/// Weighted k-means cost of X under an explicit center list, recomputed from
/// scratch. This is the independent route against the CenterSet cache.
inline double cost(const Dataset& x, const std::vector<Point>& centers) {
    if (centers.empty()) throw InputError("cost requires at least one center");
    double total = 0.0;
    for (std::size_t i = 0; i < x.site_count(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& c : centers) best = std::min(best, squared_distance(x.point(i), c));
        total += static_cast<double>(x.weight(i)) * best;
    }
    return total;
}

inline double cost(const Dataset& x, const CenterSet& c) { return cost(x, c.centers()); }

/// Weighted cost restricted to the sites where `selected` is true, read from
/// the center set's cache.
inline double cached_cost_where(const Dataset& x, const CenterSet& c,
                                const std::vector<bool>& selected) {
    if (c.empty()) throw InputError("cost requires at least one center");
    double total = 0.0;
    for (std::size_t i = 0; i < x.site_count(); ++i)
        if (selected[i]) total += static_cast<double>(x.weight(i)) * c.min_dist_sq()[i];
    return total;
}

inline Point weighted_mean(const std::vector<Point>& pts, const std::vector<std::int64_t>& weights) {
    if (pts.empty()) throw InputError("mean of an empty point set");
    if (!weights.empty() && weights.size() != pts.size())
        throw InputError("weights length must match number of points");
    Point m;
    m.coords.assign(pts.front().dim(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
        if (pts[i].dim() != m.dim()) throw InputError("dimension mismatch in mean");
        for (std::size_t j = 0; j < m.dim(); ++j) m[j] += w * pts[i][j];
        total += w;
    }
    for (std::size_t j = 0; j < m.dim(); ++j) m[j] /= total;
    return m;
}

inline Point weighted_mean(const Dataset& x) { return weighted_mean(x.points(), x.weights()); }

struct CostDecomposition {
    double cluster_cost;       // 1-means cost of the set about its mean
    double displacement_term;  // total weight times squared mean-to-z distance
};

/// Splits the cost of serving a point set from a single center z into the
/// set's own 1-means cost plus the displacement term; the two add up to the
/// direct cost of z.
inline CostDecomposition cost_decomposition(const std::vector<Point>& cluster,
                                            const std::vector<std::int64_t>& weights,
                                            const Point& z) {
    if (cluster.empty()) throw InputError("cost_decomposition of an empty set");
    const Point mu = weighted_mean(cluster, weights);
    if (z.dim() != mu.dim()) throw InputError("dimension mismatch in cost_decomposition");
    double about_mean = 0.0;
    double total_weight = 0.0;
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        const double w = weights.empty() ? 1.0 : static_cast<double>(weights[i]);
        about_mean += w * squared_distance(cluster[i], mu);
        total_weight += w;
    }
    return {about_mean, total_weight * squared_distance(z, mu)};
}

inline CostDecomposition cost_decomposition(const std::vector<Point>& cluster, const Point& z) {
    return cost_decomposition(cluster, {}, z);
}

/// Potential reduction from appending u, without mutating C. O(n d).
inline double candidate_delta(const Dataset& x, const CenterSet& c, const Point& u) {
    if (c.empty()) throw InputError("candidate_delta requires a nonempty center set");
    if (u.dim() != x.dim()) throw InputError("candidate dimension mismatch");
    double delta = 0.0;
    for (std::size_t i = 0; i < x.site_count(); ++i) {
        const double d = squared_distance(x.point(i), u);
        const double cur = c.min_dist_sq()[i];
        if (d < cur) delta += static_cast<double>(x.weight(i)) * (cur - d);
    }
    return delta;
}

}  // namespace seedlab
