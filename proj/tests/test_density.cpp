#include "cdfts/density.hpp"
#include "cdfts/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace cdfts;

namespace {

DistanceMatrix line(std::vector<double> v) {
    const std::size_t n = v.size();
    return pairwise_distances(Matrix(n, 1, std::move(v)));
}

const DistanceMatrix& four_points() {
    static const DistanceMatrix s = line({0, 0.1, 0.2, 1.0});
    return s;
}

} // namespace

TEST_CASE("eps_neighbourhood enumerates the closed ball") {
    const auto& s = four_points();
    CHECK(eps_neighbourhood(s, 0, 0.3) == std::vector<std::size_t>{0, 1, 2});
    CHECK(eps_neighbourhood(s, 0, 1.0).size() == 4);
    CHECK(eps_neighbourhood(s, 3, 0.05) == std::vector<std::size_t>{3});
    CHECK(neighbourhood_count(s, 0, 0.3) == 3);
}

TEST_CASE("ball_volume drops the unit-ball constant") {
    CHECK(ball_volume(1, 0.3) == doctest::Approx(0.3));
    CHECK(ball_volume(2, 0.5) == doctest::Approx(0.25));
    for (std::size_t d = 1; d <= 6; ++d) {
        CHECK(ball_volume(d, 1.0) == 1.0);
    }
}

TEST_CASE("pdf_eps") {
    const auto& s = four_points();
    CHECK(pdf_eps(s, 0, 0.3) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(pdf_eps(s, 3, 0.3) == doctest::Approx(1.0 / (4 * 0.3)).epsilon(1e-12));
    CHECK(pdf_eps(s, 1, 1.5) == doctest::Approx(1.0 / 1.5).epsilon(1e-12));
}

TEST_CASE("knn_distance excludes the query point") {
    const auto& s = four_points();
    CHECK(knn_distance(s, 0, 2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(knn_distance(s, 0, 3) == 1.0);
    CHECK_THROWS_AS(knn_distance(s, 0, 0), ValidationError);
    CHECK_THROWS_AS(knn_distance(s, 0, 4), ValidationError);

    const DistanceMatrix dup = line({0.5, 0.5, 0.9});
    CHECK(knn_distance(dup, 0, 1) == 0.0);
}

TEST_CASE("pdf_knn") {
    CHECK(pdf_knn(four_points(), 0, 2) == doctest::Approx(2.5).epsilon(1e-12));
    const DistanceMatrix pair = line({0, 1});
    CHECK(pdf_knn(pair, 0, 1) == doctest::Approx(0.5));
    CHECK(pdf_knn(pair, 1, 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(pdf_knn(line({0.5, 0.5, 0.9}), 0, 1), DegenerateDataError);
}

TEST_CASE("density_ratio") {
    std::vector<double> grid(101);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = static_cast<double>(i) / 100.0;
    }
    const DistanceMatrix g = line(grid);
    CHECK(density_ratio(g, 50, 0.05, 0.1) == doctest::Approx(1.0).epsilon(0.1));

    // Only self in both balls: (λ/γ)^d.
    const DistanceMatrix sparse = pairwise_distances(Matrix(2, 2, {0, 0, 1, 1}));
    CHECK(density_ratio(sparse, 0, 0.1, 0.4) == doctest::Approx(16.0));

    CHECK_THROWS_AS(density_ratio(g, 0, 0.2, 0.2), ValidationError);
    CHECK_THROWS_AS(density_ratio(g, 0, 0.3, 0.2), ValidationError);
}

TEST_CASE("neighbourhood counts grow with eps") {
    const DistanceMatrix s = pairwise_distances(oracle::random_points(40, 2, 3));
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t prev = 0;
        for (double eps = 0.05; eps <= 1.5; eps += 0.05) {
            const std::size_t c = neighbourhood_count(s, i, eps);
            REQUIRE(c >= prev);
            REQUIRE(c == eps_neighbourhood(s, i, eps).size());
            prev = c;
        }
    }
}

TEST_CASE("density estimates are permutation invariant") {
    const Matrix pts = oracle::random_points(30, 3, 11);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + 7, perm.end());
    Matrix shuffled(30, 3);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t k = 0; k < 3; ++k) {
            shuffled(i, k) = pts(perm[i], k);
        }
    }
    const DistanceMatrix a = pairwise_distances(pts);
    const DistanceMatrix b = pairwise_distances(shuffled);
    for (std::size_t i = 0; i < 30; ++i) {
        CHECK(pdf_eps(b, i, 0.3) == pdf_eps(a, perm[i], 0.3));
        CHECK(pdf_knn(b, i, 4) == pdf_knn(a, perm[i], 4));
    }
}

TEST_CASE("the densest mixture point has density ratio at least one") {
    int hits = 0;
    for (unsigned seed = 1; seed <= 100; ++seed) {
        const DistanceMatrix s = pairwise_distances(oracle::two_scale_mixture(120, 2, seed));
        const double lambda = 0.2;
        std::size_t best = 0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (pdf_eps(s, i, lambda) > pdf_eps(s, best, lambda)) {
                best = i;
            }
        }
        hits += density_ratio(s, best, lambda / 2, lambda) >= 1.0 ? 1 : 0;
    }
    CHECK(hits >= 95);
}

TEST_CASE("estimate_density follows the bandwidth kind") {
    const auto& s = four_points();
    const DensityEstimate fixed = estimate_density(s, FixedBandwidth{0.3});
    CHECK(fixed.density[0] == doctest::Approx(2.5));
    CHECK(fixed.radius[3] == 0.3);
    const DensityEstimate knn = estimate_density(s, KNearestBandwidth{2});
    CHECK(knn.radius[0] == doctest::Approx(0.2));
    CHECK(knn.density[0] == doctest::Approx(2.5));

    CHECK_THROWS_AS(validate_bandwidth(FixedBandwidth{0.0}, s), ValidationError);
    CHECK_THROWS_AS(validate_bandwidth(KNearestBandwidth{4}, s), ValidationError);
    CHECK_NOTHROW(validate_bandwidth(KNearestBandwidth{3}, s));
}
