#include "cdfts/dscale.hpp"
#include "cdfts/error.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace cdfts;

namespace {

DistanceMatrix line(std::vector<double> v) {
    const std::size_t n = v.size();
    return pairwise_distances(Matrix(n, 1, std::move(v)));
}

} // namespace

TEST_CASE("scaling factors on the four-point line") {
    const DistanceMatrix s = line({0, 0.1, 0.2, 1.0});
    const PointScaling p0 = scaling_factor(s, 0, FixedBandwidth{0.3});
    CHECK(p0.count == 3);
    CHECK(p0.factor == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(scaling_factor(s, 3, FixedBandwidth{0.3}).factor ==
          doctest::Approx(1.0 / 1.2).epsilon(1e-12));

    const DistanceMatrix pair = line({0, 1});
    CHECK(scaling_factor(pair, 0, FixedBandwidth{0.5}).factor == doctest::Approx(1.0));
    CHECK(scaling_factor(pair, 1, FixedBandwidth{0.5}).factor == doctest::Approx(1.0));
}

TEST_CASE("dscale applies the near and far branches") {
    const DistanceMatrix s = line({0, 0.1, 0.2, 1.0});
    const ScaledDistanceMatrix t = dscale(s, FixedBandwidth{0.3});
    CHECK(t(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t(0, 3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t(3, 2) == doctest::Approx(0.5 * 0.75 / 0.7 + 0.25).epsilon(1e-12));
    CHECK(t(3, 2) != doctest::Approx(t(2, 3)));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(t(i, i) == 0.0);
    }
    CHECK(t.max == 1.0);
}

TEST_CASE("unit scaling factors leave distances untouched") {
    const DistanceMatrix s = line({0, 1});
    const ScaledDistanceMatrix t = dscale(s, FixedBandwidth{0.5});
    CHECK(t.values == s.values);
}

TEST_CASE("dscale rejects unusable bandwidths") {
    const DistanceMatrix s = line({0, 0.1, 0.2, 1.0});
    CHECK_THROWS_AS(dscale(s, FixedBandwidth{1.0}), ValidationError);
    CHECK_THROWS_AS(dscale(s, FixedBandwidth{-0.1}), ValidationError);
    CHECK_THROWS_AS(dscale(line({0.4, 0.4, 0.9}), KNearestBandwidth{1}), DegenerateDataError);
    CHECK_THROWS_AS(dscale(line({0.3}), FixedBandwidth{0.1}), DegenerateDataError);
    CHECK_THROWS_AS(dscale(line({0.3, 0.3}), FixedBandwidth{0.1}), DegenerateDataError);
}

TEST_CASE("k-NN bandwidth uses the k-th neighbour radius per point") {
    const DistanceMatrix s = line({0, 0.1, 0.2, 1.0});
    const ScalingProfile p = scaling_profile(s, KNearestBandwidth{1});
    CHECK(p.bandwidth[0] == doctest::Approx(0.1));
    CHECK(p.count[0] == 2);
    CHECK(p.bandwidth[1] == doctest::Approx(0.1));
    CHECK(p.count[1] == 3); // both neighbours tie at 0.1
    CHECK(p.factor[1] == doctest::Approx((1.0 / 0.1) * 0.75));
    // Point 1.0 has its nearest neighbour at 0.8 < m.
    CHECK(p.bandwidth[3] == doctest::Approx(0.8));
}

TEST_CASE("dscale preserves counts, order and the maximum on random data") {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const std::size_t d = 1 + seed % 4;
        const DistanceMatrix s = pairwise_distances(oracle::random_points(40, d, seed));
        const double lambda = 0.1 + 0.1 * (seed % 4);
        const ScaledDistanceMatrix t = dscale(s, FixedBandwidth{lambda});
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double r = t.profile.factor[i];
            for (double g : {lambda / 4, lambda / 2, 0.9 * lambda}) {
                std::size_t before = 0, after = 0;
                for (std::size_t j = 0; j < s.size(); ++j) {
                    before += s(i, j) <= g ? 1 : 0;
                    after += t(i, j) <= g * r ? 1 : 0;
                }
                REQUIRE(before == after);
            }
            for (std::size_t j = 0; j < s.size(); ++j) {
                REQUIRE(t(i, j) <= s.max);
                if (s(i, j) == s.max) {
                    REQUIRE(t(i, j) == s.max);
                }
                for (std::size_t k = 0; k < s.size(); ++k) {
                    if (s(i, j) < s(i, k)) {
                        REQUIRE(t(i, j) <= t(i, k));
                    }
                }
            }
        }
    }
}

TEST_CASE("scaled bandwidths equalise the density") {
    const DistanceMatrix s = pairwise_distances(oracle::two_scale_mixture(80, 2, 5));
    const ScalingProfile p = scaling_profile(s, FixedBandwidth{0.2});
    const double n = 80.0;
    for (std::size_t i = 0; i < 80; ++i) {
        const double lhs = static_cast<double>(p.count[i]) / std::pow(p.scaled_bandwidth[i], 2);
        CHECK(lhs == doctest::Approx(n / (s.max * s.max)).epsilon(1e-9));
    }
}
