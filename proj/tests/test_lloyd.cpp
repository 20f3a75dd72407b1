#include <catch2/catch_amalgamated.hpp>

#include "seedlab/lloyd.hpp"
#include "seedlab/seeding.hpp"
#include "test_util.hpp"

using namespace seedlab;

TEST_CASE("a fixed point is recognized after one round") {
    const Dataset x = testutil::line({0.0, 1.0, 10.0, 11.0});
    CenterSet c(x);
    c.add_center(x, Point{0.5});
    c.add_center(x, Point{10.5});
    const LloydResult r = lloyd_refine(x, c);
    CHECK(r.iterations_used == 1);
    CHECK(r.centers == std::vector<Point>{Point{0.5}, Point{10.5}});
    CHECK(r.cost_sequence == std::vector<double>{1.0});
}

TEST_CASE("hand-simulated refinement on three sites") {
    const Dataset x = testutil::line({0.0, 1.0, 3.0});
    CenterSet c(x);
    c.add_center(x, Point{0.0});
    c.add_center(x, Point{3.0});
    const LloydResult r = lloyd_refine(x, c);
    CHECK(r.assignment == std::vector<int>{0, 0, 1});
    CHECK(r.centers == std::vector<Point>{Point{0.5}, Point{3.0}});
    CHECK(r.cost_sequence.front() == 0.5);
    CHECK(r.cost_sequence.back() == 0.5);
    CHECK(r.iterations_used == 2);  // one improving round, one to confirm the fixed point
}

TEST_CASE("cost sequence is nonincreasing on random instances") {
    std::mt19937_64 mix(11);
    for (int rep = 0; rep < 100; ++rep) {
        const Dataset x = testutil::random_dataset(mix, 30, 2, 5.0);
        const SeedResult seeded =
            kmeanspp_seed(x, 4, SubstreamRng(1000, static_cast<std::uint64_t>(rep)));
        const LloydResult r = lloyd_refine(x, seeded.centers);
        CHECK(r.cost_sequence.front() <= seeded.centers.total_potential() + 1e-9);
        for (std::size_t i = 1; i < r.cost_sequence.size(); ++i)
            CHECK(r.cost_sequence[i] <= r.cost_sequence[i - 1] * (1.0 + 1e-9) + 1e-12);
        CHECK(r.iterations_used <= 100);
    }
}

TEST_CASE("final centers are the means of their clusters") {
    std::mt19937_64 mix(12);
    for (int rep = 0; rep < 25; ++rep) {
        const Dataset x = testutil::random_dataset(mix, 40, 3, 2.0);
        const SeedResult seeded =
            kmeanspp_seed(x, 5, SubstreamRng(2000, static_cast<std::uint64_t>(rep)));
        const LloydResult r = lloyd_refine(x, seeded.centers);
        for (std::size_t j = 0; j < r.centers.size(); ++j) {
            std::vector<Point> members;
            std::vector<std::int64_t> weights;
            for (std::size_t i = 0; i < x.site_count(); ++i)
                if (r.assignment[i] == static_cast<int>(j)) {
                    members.push_back(x.point(i));
                    weights.push_back(x.weight(i));
                }
            REQUIRE_FALSE(members.empty());
            const Point mu = weighted_mean(members, weights);
            CHECK(squared_distance(mu, r.centers[j]) <= 1e-18);
        }
    }
}

TEST_CASE("an empty cluster respawns at the costliest site without raising cost") {
    const Dataset x = testutil::line({0.0, 1.0, 10.0});
    CenterSet c(x);
    c.add_center(x, Point{0.5});
    c.add_center(x, Point{100.0});  // captures nothing
    const double before = c.total_potential();
    const LloydResult r = lloyd_refine(x, c);
    CHECK(r.cost_sequence.front() <= before);
    // The respawned center adopts the far site.
    CHECK(r.cost_sequence.back() == 0.5);
    std::vector<int> cluster_sizes(2, 0);
    for (int a : r.assignment) ++cluster_sizes[static_cast<std::size_t>(a)];
    CHECK(cluster_sizes[0] > 0);
    CHECK(cluster_sizes[1] > 0);
}

TEST_CASE("configuration validation") {
    const Dataset x = testutil::line({0.0, 1.0});
    CenterSet c(x);
    c.add_center(x, Point{0.0});
    CHECK_THROWS_AS(lloyd_refine(x, c, LloydConfig{0, 1e-9}), InputError);
    CHECK_THROWS_AS(lloyd_refine(x, c, LloydConfig{10, -1.0}), InputError);
    CHECK_THROWS_AS(lloyd_refine(x, CenterSet(x), LloydConfig{}), InputError);
    // max_iters caps the rounds even with a zero floor.
    const LloydResult r = lloyd_refine(x, c, LloydConfig{3, 0.0});
    CHECK(r.iterations_used <= 3);
}
