#include <catch2/catch_amalgamated.hpp>

#include "seedlab/instances.hpp"
#include "test_util.hpp"

using namespace seedlab;

TEST_CASE("cost evaluates the weighted nearest-center sum") {
    const Dataset x = testutil::line({0.0, 2.0});
    CHECK(cost(x, {Point{0.0}}) == 4.0);

    const Dataset y = testutil::line({0.0, 1.0, 3.0});
    CHECK(cost(y, {Point{0.0}, Point{3.0}}) == 1.0);

    const Dataset fig = three_point_line(5);
    CHECK(cost(fig, {Point{-1.0}, Point{1.0}}) == 1.0);
}

TEST_CASE("cost input validation") {
    const Dataset x = testutil::line({0.0, 2.0});
    CHECK_THROWS_AS(cost(x, std::vector<Point>{}), InputError);
    CHECK_THROWS_AS(cost(x, {Point{0.0, 1.0}}), InputError);
}

TEST_CASE("weighted mean") {
    CHECK(weighted_mean({Point{0.0, 0.0}, Point{2.0, 0.0}}, {}) == Point{1.0, 0.0});
    CHECK(weighted_mean({Point{1.0, 1.0}}, {}) == Point{1.0, 1.0});
    CHECK(weighted_mean({Point{0.0}, Point{4.0}}, {3, 1}) == Point{1.0});
    CHECK_THROWS_AS(weighted_mean({}, {}), InputError);
}

TEST_CASE("cost decomposition splits into cluster cost plus displacement") {
    const auto [own, disp] = cost_decomposition({Point{0.0}, Point{2.0}}, Point{3.0});
    CHECK(own == 2.0);
    CHECK(disp == 8.0);
    const Dataset as_data = testutil::line({0.0, 2.0});
    CHECK(own + disp == cost(as_data, {Point{3.0}}));

    const auto [z_own, z_disp] = cost_decomposition({Point{5.0}}, Point{5.0});
    CHECK(z_own == 0.0);
    CHECK(z_disp == 0.0);

    CHECK_THROWS_AS(cost_decomposition({}, Point{0.0}), InputError);
}

TEST_CASE("cost decomposition matches direct evaluation on random sets") {
    std::mt19937_64 rng(2024);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(canonical_double(rng) * 100);
        std::vector<Point> pts;
        for (std::size_t i = 0; i < n; ++i) pts.push_back(testutil::random_point(rng, 3));
        const Point z = testutil::random_point(rng, 3, 2.0);
        const auto [own, disp] = cost_decomposition(pts, z);
        const Dataset as_data = Dataset::create(pts, {});
        const double direct = cost(as_data, {z});
        CHECK(testutil::rel_err(own + disp, direct) <= 1e-9);
    }
}

TEST_CASE("incremental center updates match full recomputation") {
    const Dataset x = testutil::line({0.0, 1.0, 3.0});
    CenterSet c(x);
    c.add_center(x, Point{0.0});
    c.add_center(x, Point{3.0});
    CHECK(c.min_dist_sq() == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(c.total_potential() == 1.0);

    c.add_center(x, Point{3.0});  // duplicate center changes nothing
    CHECK(c.total_potential() == 1.0);

    std::mt19937_64 rng(7);
    const Dataset big = testutil::random_dataset(rng, 200, 5);
    CenterSet inc(big);
    for (int step = 0; step < 20; ++step) {
        inc.add_center(big, testutil::random_point(rng, 5));
        CHECK(testutil::rel_err(inc.total_potential(), cost(big, inc)) <= 1e-9);
    }
}

TEST_CASE("incremental update validates dimensions") {
    const Dataset x = testutil::line({0.0, 1.0});
    CenterSet c(x);
    CHECK_THROWS_AS(c.add_center(x, Point{0.0, 0.0}), InputError);
}

TEST_CASE("candidate delta without mutation") {
    const Dataset x = testutil::line({0.0, 1.0, 3.0});
    CenterSet c(x);
    c.add_center(x, Point{0.0});
    CHECK(candidate_delta(x, c, Point{3.0}) == 9.0);
    CHECK(candidate_delta(x, c, Point{0.0}) == 0.0);
    CHECK(c.total_potential() == 10.0);  // unchanged

    const Dataset simplex = simplex_lower_bound(4);
    CenterSet sc(simplex);
    sc.add_center(simplex, simplex.point(0));
    const double delta = candidate_delta(simplex, sc, simplex.point(4));
    CHECK(delta == Catch::Approx(14.5).epsilon(1e-12));
    CHECK(delta > 8.0);
}

TEST_CASE("appending a center never increases cost") {
    std::mt19937_64 rng(99);
    for (int rep = 0; rep < 50; ++rep) {
        const Dataset x = testutil::random_dataset(rng, 40, 3);
        CenterSet c(x);
        c.add_center(x, testutil::random_point(rng, 3));
        double prev = c.total_potential();
        for (int step = 0; step < 8; ++step) {
            c.add_center(x, testutil::random_point(rng, 3));
            CHECK(c.total_potential() <= prev + 1e-12);
            prev = c.total_potential();
        }
    }
}

TEST_CASE("cost is translation invariant and scales quadratically") {
    std::mt19937_64 rng(31337);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t d = 1 + static_cast<std::size_t>(canonical_double(rng) * 4);
        const Dataset x = testutil::random_dataset(rng, 30, d);
        std::vector<Point> centers;
        for (int j = 0; j < 3; ++j) centers.push_back(testutil::random_point(rng, d));
        const double base = cost(x, centers);

        const Point shift = testutil::random_point(rng, d, 10.0);
        const double s = 0.25 + 3.0 * canonical_double(rng);

        std::vector<Point> shifted_pts, scaled_pts;
        for (const Point& p : x.points()) {
            Point sp = p, cp = p;
            for (std::size_t jj = 0; jj < d; ++jj) {
                sp[jj] += shift[jj];
                cp[jj] *= s;
            }
            shifted_pts.push_back(sp);
            scaled_pts.push_back(cp);
        }
        std::vector<Point> shifted_centers, scaled_centers;
        for (const Point& p : centers) {
            Point sp = p, cp = p;
            for (std::size_t jj = 0; jj < d; ++jj) {
                sp[jj] += shift[jj];
                cp[jj] *= s;
            }
            shifted_centers.push_back(sp);
            scaled_centers.push_back(cp);
        }
        const Dataset shifted = Dataset::create(shifted_pts, {});
        const Dataset scaled = Dataset::create(scaled_pts, {});
        CHECK(testutil::rel_err(cost(shifted, shifted_centers), base) <= 1e-9);
        CHECK(testutil::rel_err(cost(scaled, scaled_centers), s * s * base) <= 1e-9);
    }
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset::create({}, {}), InputError);
    CHECK_THROWS_AS(Dataset::create({Point{0.0}, Point{0.0, 1.0}}, {}), InputError);
    CHECK_THROWS_AS(Dataset::create({Point{0.0}}, {0}), InputError);
    CHECK_THROWS_AS(Dataset::create({Point{0.0}}, {-2}), InputError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Dataset::create({Point{nan}}, {}), InputError);
    // Labels must cover a contiguous range.
    CHECK_THROWS_AS(Dataset::create({Point{0.0}, Point{1.0}}, {}, std::vector<int>{0, 2}),
                    InputError);
    CHECK_NOTHROW(Dataset::create({Point{0.0}, Point{1.0}}, {}, std::vector<int>{1, 0}));
}
