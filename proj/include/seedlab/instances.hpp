#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "seedlab/core.hpp"
#include "seedlab/errors.hpp"
#include "seedlab/oracle.hpp"

namespace seedlab {

/// Adversarial instance: a regular (k-1)-simplex with side sqrt(2), embedded
/// in R^k via unit vectors. The first k-1 vertices carry k coincident points
/// each, the last vertex k-1 points, and the centroid (1/k,...,1/k) one
/// point. The reference clustering groups the light vertex with the
/// centroid; its cost is stored exactly.
inline Dataset simplex_lower_bound(int k) {
    if (k < 4) throw InputError("simplex_lower_bound requires k >= 4");
    const auto ku = static_cast<std::size_t>(k);
    std::vector<Point> points;
    std::vector<std::int64_t> weights;
    std::vector<int> labels;
    points.reserve(ku + 1);
    for (std::size_t i = 0; i < ku; ++i) {
        Point v;
        v.coords.assign(ku, 0.0);
        v[i] = 1.0;
        points.push_back(std::move(v));
        weights.push_back(i + 1 < ku ? k : k - 1);
        labels.push_back(static_cast<int>(i));
    }
    Point centroid;
    centroid.coords.assign(ku, 1.0 / static_cast<double>(k));
    points.push_back(std::move(centroid));
    weights.push_back(1);
    labels.push_back(k - 1);

    const Point mu = weighted_mean({points[ku - 1], points[ku]}, {k - 1, 1});
    const double opt = static_cast<double>(k - 1) * squared_distance(points[ku - 1], mu) +
                       squared_distance(points[ku], mu);
    return Dataset::create(std::move(points), std::move(weights), std::move(labels), opt,
                           OptCostKind::exact);
}

/// Site layout of simplex_lower_bound, recognized structurally so that event
/// bookkeeping also works on such datasets loaded from files.
struct SimplexLayout {
    int k = 0;
    int heavy_vertex_count = 0;  // sites 0..k-2
    int light_vertex_site = 0;   // the k-1 weighted vertex
    int centroid_site = 0;       // the single-point centroid
};

inline std::optional<SimplexLayout> match_simplex(const Dataset& x) {
    const auto k = static_cast<int>(x.dim());
    if (k < 4) return std::nullopt;
    const auto ku = static_cast<std::size_t>(k);
    if (x.site_count() != ku + 1 || !x.labeled()) return std::nullopt;
    for (std::size_t i = 0; i < ku; ++i) {
        const Point& p = x.point(i);
        for (std::size_t j = 0; j < ku; ++j)
            if (p[j] != (i == j ? 1.0 : 0.0)) return std::nullopt;
        if (x.weight(i) != (i + 1 < ku ? k : k - 1)) return std::nullopt;
        if (x.label(i) != static_cast<int>(std::min(i, ku - 1))) return std::nullopt;
    }
    const Point& o = x.point(ku);
    for (std::size_t j = 0; j < ku; ++j)
        if (o[j] != 1.0 / static_cast<double>(k)) return std::nullopt;
    if (x.weight(ku) != 1 || x.label(ku) != k - 1) return std::nullopt;
    return SimplexLayout{k, k - 1, k - 1, k};
}

/// The deterministic-heuristic trap: sites a=-1 and c=+1 with n points each
/// and b=0 with a single point. The stored reference clustering and cost are
/// the exact 2-means optimum from enumeration.
inline Dataset three_point_line(std::int64_t n) {
    if (n < 1) throw InputError("three_point_line requires n >= 1");
    std::vector<Point> points{Point{-1.0}, Point{0.0}, Point{1.0}};
    std::vector<std::int64_t> weights{n, 1, n};
    Dataset unlabeled = Dataset::create(points, weights);
    const BruteForceResult opt = brute_force_opt(unlabeled, 2);
    return Dataset::create(std::move(points), std::move(weights), opt.labels, opt.cost,
                           OptCostKind::exact);
}

/// Benign instances: k spherical clusters centered on a grid with the given
/// spacing. The stored cost is the generating labeling's cost, an upper
/// bound on the optimum, and is flagged as such.
inline Dataset gaussian_mixture(int k, int per_cluster, int d, double separation, double stddev,
                                std::uint64_t seed) {
    if (k < 1 || per_cluster < 1 || d < 1) throw InputError("k, per_cluster, d must be positive");
    if (!(stddev > 0.0)) throw InputError("stddev must be positive");
    if (!(separation >= 0.0)) throw InputError("separation must be nonnegative");

    int side = 1;
    auto cells = [&](int s) {
        double c = 1.0;
        for (int j = 0; j < d; ++j) c *= s;
        return c;
    };
    while (cells(side) < static_cast<double>(k)) ++side;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, stddev);
    std::vector<Point> points;
    std::vector<std::int64_t> weights;
    std::vector<int> labels;
    std::vector<Point> cluster_centers;
    for (int c = 0; c < k; ++c) {
        Point center;
        center.coords.assign(static_cast<std::size_t>(d), 0.0);
        int rem = c;
        for (int j = 0; j < d; ++j) {
            center[static_cast<std::size_t>(j)] = separation * static_cast<double>(rem % side);
            rem /= side;
        }
        cluster_centers.push_back(center);
        for (int i = 0; i < per_cluster; ++i) {
            Point p = center;
            for (int j = 0; j < d; ++j) p[static_cast<std::size_t>(j)] += gauss(rng);
            points.push_back(std::move(p));
            weights.push_back(1);
            labels.push_back(c);
        }
    }

    double labeling_cost = 0.0;
    for (int c = 0; c < k; ++c) {
        std::vector<Point> members;
        for (std::size_t i = 0; i < points.size(); ++i)
            if (labels[i] == c) members.push_back(points[i]);
        const Point mu = weighted_mean(members, {});
        for (const Point& p : members) labeling_cost += squared_distance(p, mu);
    }
    return Dataset::create(std::move(points), std::move(weights), std::move(labels),
                           labeling_cost, OptCostKind::upper_bound);
}

// ---------------------------------------------------------------------------
// Dataset text format
// ---------------------------------------------------------------------------
//
//   # comment lines and trailing comments are ignored
//   d n_sites has_labels
//   coord_1 ... coord_d weight [label]
//
// Coordinates are written with 17 significant digits, so write/read
// round-trips are exact.

namespace detail {

inline double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number '" + tok + "'", line);
    return v;
}

inline std::int64_t parse_int(const std::string& tok, int line) {
    std::int64_t v = 0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed integer '" + tok + "'", line);
    return v;
}

}  // namespace detail

inline Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file: " + path);

    std::vector<std::vector<std::string>> rows;
    std::vector<int> row_lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ss >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        rows.push_back(std::move(toks));
        row_lines.push_back(lineno);
    }
    if (rows.empty()) throw ParseError("missing header", lineno == 0 ? 1 : lineno);

    const auto& header = rows.front();
    if (header.size() != 3) throw ParseError("header must be 'd n_sites has_labels'", row_lines[0]);
    const std::int64_t d = detail::parse_int(header[0], row_lines[0]);
    const std::int64_t n = detail::parse_int(header[1], row_lines[0]);
    const std::int64_t has_labels = detail::parse_int(header[2], row_lines[0]);
    if (d < 1) throw ParseError("dimension must be positive", row_lines[0]);
    if (n < 1) throw ParseError("site count must be positive", row_lines[0]);
    if (has_labels != 0 && has_labels != 1) throw ParseError("has_labels must be 0 or 1", row_lines[0]);
    if (static_cast<std::int64_t>(rows.size()) - 1 != n)
        throw ParseError("expected " + std::to_string(n) + " site lines, found " +
                             std::to_string(rows.size() - 1),
                         row_lines.back());

    std::vector<Point> points;
    std::vector<std::int64_t> weights;
    std::vector<int> labels;
    const std::size_t want = static_cast<std::size_t>(d) + 1 + (has_labels ? 1 : 0);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& toks = rows[r];
        const int ln = row_lines[r];
        if (toks.size() != want)
            throw ParseError("expected " + std::to_string(want) + " fields, found " +
                                 std::to_string(toks.size()),
                             ln);
        Point p;
        p.coords.reserve(static_cast<std::size_t>(d));
        for (std::int64_t j = 0; j < d; ++j)
            p.coords.push_back(detail::parse_double(toks[static_cast<std::size_t>(j)], ln));
        const std::int64_t w = detail::parse_int(toks[static_cast<std::size_t>(d)], ln);
        if (w <= 0) throw ParseError("weight must be a positive integer", ln);
        points.push_back(std::move(p));
        weights.push_back(w);
        if (has_labels) {
            const std::int64_t lab = detail::parse_int(toks[static_cast<std::size_t>(d) + 1], ln);
            if (lab < 0) throw ParseError("label must be nonnegative", ln);
            labels.push_back(static_cast<int>(lab));
        }
    }
    return Dataset::create(std::move(points), std::move(weights),
                           has_labels ? std::optional<std::vector<int>>(std::move(labels))
                                      : std::nullopt);
}

inline void write_dataset(const Dataset& x, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write dataset file: " + path);
    const bool labeled = x.labeled();
    out << x.dim() << ' ' << x.site_count() << ' ' << (labeled ? 1 : 0) << '\n';
    char buf[64];
    for (std::size_t i = 0; i < x.site_count(); ++i) {
        for (std::size_t j = 0; j < x.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", x.point(i)[j]);
            out << buf << ' ';
        }
        out << x.weight(i);
        if (labeled) out << ' ' << x.label(i);
        out << '\n';
    }
    if (!out) throw IoError("failed while writing dataset file: " + path);
}

// ---------------------------------------------------------------------------
// Instance specifications
// ---------------------------------------------------------------------------

/// Parsed form of the CLI --instance argument, e.g.
///   simplex:k=32
///   three_point_line:n=1000
///   gaussian:k=16,per_cluster=50,d=4,separation=20,stddev=1,seed=7
///   file:datasets/points.txt
struct InstanceSpec {
    enum class Kind { simplex_lower_bound, three_point_line, gaussian_mixture, from_file };

    Kind kind = Kind::simplex_lower_bound;
    int k = 4;
    std::int64_t n = 1;
    int per_cluster = 50;
    int d = 4;
    double separation = 10.0;
    double stddev = 1.0;
    std::uint64_t seed = 0;
    std::string path;

    static InstanceSpec parse(const std::string& text) {
        InstanceSpec spec;
        const auto colon = text.find(':');
        const std::string name = text.substr(0, colon);
        const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
        if (name == "simplex" || name == "simplex_lower_bound")
            spec.kind = Kind::simplex_lower_bound;
        else if (name == "three_point_line" || name == "three_point")
            spec.kind = Kind::three_point_line;
        else if (name == "gaussian" || name == "gaussian_mixture")
            spec.kind = Kind::gaussian_mixture;
        else if (name == "file" || name == "from_file") {
            spec.kind = Kind::from_file;
            if (rest.empty()) throw InputError("file instance requires a path");
            spec.path = rest;
            return spec;
        } else
            throw InputError("unknown instance kind: " + name);

        std::istringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw InputError("instance parameter must be key=value: " + item);
            const std::string key = item.substr(0, eq);
            const std::string value = item.substr(eq + 1);
            try {
                if (key == "k") spec.k = std::stoi(value);
                else if (key == "n") spec.n = std::stoll(value);
                else if (key == "per_cluster" || key == "per") spec.per_cluster = std::stoi(value);
                else if (key == "d") spec.d = std::stoi(value);
                else if (key == "separation" || key == "sep") spec.separation = std::stod(value);
                else if (key == "stddev" || key == "std") spec.stddev = std::stod(value);
                else if (key == "seed") spec.seed = std::stoull(value);
                else throw InputError("unknown instance parameter: " + key);
            } catch (const std::invalid_argument&) {
                throw InputError("malformed instance parameter value: " + item);
            } catch (const std::out_of_range&) {
                throw InputError("instance parameter out of range: " + item);
            }
        }
        return spec;
    }

    Dataset build() const {
        switch (kind) {
            case Kind::simplex_lower_bound: return simplex_lower_bound(k);
            case Kind::three_point_line: return three_point_line(n);
            case Kind::gaussian_mixture:
                return gaussian_mixture(k, per_cluster, d, separation, stddev, seed);
            case Kind::from_file: return read_dataset(path);
        }
        throw InputError("unreachable instance kind");
    }

    std::string describe() const {
        std::ostringstream ss;
        switch (kind) {
            case Kind::simplex_lower_bound: ss << "simplex:k=" << k; break;
            case Kind::three_point_line: ss << "three_point_line:n=" << n; break;
            case Kind::gaussian_mixture:
                ss << "gaussian:k=" << k << ",per_cluster=" << per_cluster << ",d=" << d
                   << ",separation=" << separation << ",stddev=" << stddev << ",seed=" << seed;
                break;
            case Kind::from_file: ss << "file:" << path; break;
        }
        return ss.str();
    }
};

}  // namespace seedlab
