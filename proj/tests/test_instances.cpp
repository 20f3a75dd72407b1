#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "seedlab/instances.hpp"
#include "seedlab/oracle.hpp"
#include "test_util.hpp"

using namespace seedlab;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("seedlab_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("simplex lower-bound geometry") {
    const Dataset x = simplex_lower_bound(4);
    CHECK(x.dim() == 4);
    CHECK(x.site_count() == 5);
    CHECK(x.total_weight() == 16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j)
            CHECK(squared_distance(x.point(i), x.point(j)) == 2.0);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(squared_distance(x.point(4), x.point(i)) == Catch::Approx(0.75).epsilon(1e-12));
    REQUIRE(x.optimal_cost().has_value());
    CHECK(*x.optimal_cost() <= 0.75);
    CHECK(*x.optimal_cost() == Catch::Approx(9.0 / 16.0).epsilon(1e-12));
    CHECK(x.optimal_cost_kind() == OptCostKind::exact);

    // One heavy vertex covered: the closed-form potential at the anchor value.
    CHECK(cost(x, {x.point(0)}) == Catch::Approx(22.75).epsilon(1e-12));

    CHECK_THROWS_AS(simplex_lower_bound(3), InputError);
}

TEST_CASE("simplex structure for a range of k") {
    for (int k = 4; k <= 10; ++k) {
        const Dataset x = simplex_lower_bound(k);
        CHECK(x.total_weight() == static_cast<std::int64_t>(k) * k);
        CHECK(x.cluster_count() == k);
        const auto ku = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i < ku; ++i) {
            CHECK(squared_distance(x.point(ku), x.point(i)) ==
                  Catch::Approx((k - 1.0) / k).epsilon(1e-12));
            for (std::size_t j = i + 1; j < ku; ++j)
                CHECK(squared_distance(x.point(i), x.point(j)) == 2.0);
        }
        const auto layout = match_simplex(x);
        REQUIRE(layout.has_value());
        CHECK(layout->k == k);
        CHECK(layout->light_vertex_site == k - 1);
        CHECK(layout->centroid_site == k);
    }
    CHECK_FALSE(match_simplex(three_point_line(5)).has_value());
}

TEST_CASE("three-point line stores the exact optimum") {
    const Dataset x = three_point_line(5);
    CHECK(x.site_count() == 3);
    CHECK(x.total_weight() == 11);
    CHECK(cost(x, {x.point(1), x.point(0)}) == 5.0);
    REQUIRE(x.optimal_cost().has_value());
    CHECK(*x.optimal_cost() < 1.0);
    CHECK(*x.optimal_cost() == Catch::Approx(5.0 / 6.0).epsilon(1e-12));
    CHECK(x.optimal_cost_kind() == OptCostKind::exact);
    CHECK(x.labeled());

    CHECK_THROWS_AS(three_point_line(0), InputError);
}

TEST_CASE("the whole-dataset greedy first pick is the middle site") {
    for (std::int64_t n : {2LL, 5LL, 50LL, 1000LL}) {
        const Dataset x = three_point_line(n);
        std::size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < x.site_count(); ++s) {
            const double c = cost(x, {x.point(s)});
            if (c < best_cost) {
                best_cost = c;
                best = s;
            }
        }
        CHECK(best == 1);
    }
}

TEST_CASE("gaussian mixture generator") {
    const Dataset blob = gaussian_mixture(1, 20, 3, 5.0, 1.0, 42);
    CHECK(blob.site_count() == 20);
    for (std::size_t i = 0; i < blob.site_count(); ++i) CHECK(blob.label(i) == 0);

    const Dataset flat = gaussian_mixture(3, 10, 2, 0.0, 0.5, 7);
    CHECK(flat.site_count() == 30);
    CHECK(flat.cluster_count() == 3);

    const Dataset a = gaussian_mixture(4, 10, 2, 8.0, 0.5, 11);
    const Dataset b = gaussian_mixture(4, 10, 2, 8.0, 0.5, 11);
    CHECK(a == b);
    const Dataset c = gaussian_mixture(4, 10, 2, 8.0, 0.5, 12);
    CHECK_FALSE(a == c);

    REQUIRE(a.optimal_cost().has_value());
    CHECK(a.optimal_cost_kind() == OptCostKind::upper_bound);

    CHECK_THROWS_AS(gaussian_mixture(0, 10, 2, 1.0, 1.0, 1), InputError);
    CHECK_THROWS_AS(gaussian_mixture(2, 0, 2, 1.0, 1.0, 1), InputError);
    CHECK_THROWS_AS(gaussian_mixture(2, 10, 2, 1.0, 0.0, 1), InputError);
    CHECK_THROWS_AS(gaussian_mixture(2, 10, 2, -1.0, 1.0, 1), InputError);
}

TEST_CASE("well-separated mixtures seed near the reference cost") {
    const Dataset x = gaussian_mixture(8, 25, 3, 200.0, 1.0, 5);
    double ratio_sum = 0.0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        const SeedResult r = kmeanspp_seed(x, 8, SubstreamRng(321, static_cast<std::uint64_t>(t)));
        ratio_sum += r.centers.total_potential() / *x.optimal_cost();
    }
    CHECK(ratio_sum / trials < 3.0);
}

TEST_CASE("dataset files round-trip exactly") {
    TempDir tmp;
    const Dataset simplex = simplex_lower_bound(4);
    write_dataset(simplex, tmp.file("simplex.txt"));
    const Dataset back = read_dataset(tmp.file("simplex.txt"));
    CHECK(back == simplex);
    CHECK(match_simplex(back).has_value());

    // Awkward coordinates survive the 17-digit format.
    const Dataset gnarly = Dataset::create(
        {Point{1.0 / 3.0, std::sqrt(2.0)}, Point{-1e-17, 12345.678901234567}}, {3, 7});
    write_dataset(gnarly, tmp.file("gnarly.txt"));
    CHECK(read_dataset(tmp.file("gnarly.txt")) == gnarly);

    const Dataset unlabeled = testutil::line({0.0, 1.0, 3.0});
    write_dataset(unlabeled, tmp.file("plain.txt"));
    const Dataset unlabeled_back = read_dataset(tmp.file("plain.txt"));
    CHECK(unlabeled_back == unlabeled);
    CHECK_FALSE(unlabeled_back.labeled());
}

TEST_CASE("dataset parser reports offending lines") {
    TempDir tmp;
    auto write_file = [&](const std::string& name, const std::string& body) {
        std::ofstream out(tmp.file(name));
        out << body;
    };

    write_file("negweight.txt", "1 2 0\n0.0 1\n1.0 -2\n");
    try {
        read_dataset(tmp.file("negweight.txt"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    write_file("shortline.txt", "2 2 0\n0.0 1.0 1\n1.0 1\n");
    try {
        read_dataset(tmp.file("shortline.txt"));
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    write_file("badheader.txt", "# only a comment\n1 2\n");
    CHECK_THROWS_AS(read_dataset(tmp.file("badheader.txt")), ParseError);
    write_file("fracweight.txt", "1 1 0\n0.0 2.5\n");
    CHECK_THROWS_AS(read_dataset(tmp.file("fracweight.txt")), ParseError);
    write_file("count.txt", "1 3 0\n0.0 1\n1.0 1\n");
    CHECK_THROWS_AS(read_dataset(tmp.file("count.txt")), ParseError);
    CHECK_THROWS_AS(read_dataset(tmp.file("missing_file.txt")), IoError);

    // Comments and blank lines are fine.
    write_file("comments.txt", "# header\n1 2 1  # d n labels\n\n0.0 1 0\n# middle\n1.0 2 1\n");
    const Dataset ok = read_dataset(tmp.file("comments.txt"));
    CHECK(ok.site_count() == 2);
    CHECK(ok.labeled());
}

TEST_CASE("instance specs parse and build") {
    const InstanceSpec simplex = InstanceSpec::parse("simplex:k=5");
    CHECK(simplex.kind == InstanceSpec::Kind::simplex_lower_bound);
    CHECK(simplex.build().site_count() == 6);

    const InstanceSpec line = InstanceSpec::parse("three_point_line:n=10");
    CHECK(line.build().total_weight() == 21);

    const InstanceSpec gauss =
        InstanceSpec::parse("gaussian:k=2,per_cluster=5,d=2,separation=4,stddev=0.5,seed=3");
    CHECK(gauss.build().site_count() == 10);

    CHECK_THROWS_AS(InstanceSpec::parse("mystery:k=2"), InputError);
    CHECK_THROWS_AS(InstanceSpec::parse("simplex:k"), InputError);
    CHECK_THROWS_AS(InstanceSpec::parse("simplex:q=2"), InputError);
    CHECK_THROWS_AS(InstanceSpec::parse("file:"), InputError);
}
