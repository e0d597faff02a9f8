#pragma once

#include "cdfts/dataset.hpp"

#include <cstddef>
#include <variant>
#include <vector>

namespace cdfts {

/// Uniform kernel with a fixed radius λ (normalised units).
struct FixedBandwidth {
    double radius;
};

/// Uniform kernel whose radius at x is the distance to x's k-th nearest
/// neighbour.
struct KNearestBandwidth {
    std::size_t k;
};

using Bandwidth = std::variant<FixedBandwidth, KNearestBandwidth>;

/// Throws ValidationError unless 0 < λ <= m (fixed) or 1 <= k <= n-1.
void validate_bandwidth(const Bandwidth& bw, const DistanceMatrix& s);

std::string describe(const Bandwidth& bw);

/// Volume of a d-ball of radius r, up to the unit-ball constant: r^d.
/// Every consumer compares volumes at equal d, so the constant cancels.
double ball_volume(std::size_t d, double r);

/// Indices j with s[i,j] <= eps, in increasing order. Always contains i.
std::vector<std::size_t> eps_neighbourhood(const DistanceMatrix& s, std::size_t i, double eps);

/// |eps_neighbourhood(s, i, eps)| without materialising the set.
std::size_t neighbourhood_count(const DistanceMatrix& s, std::size_t i, double eps);

/// |N(i; eps)| / (n * eps^d).
double pdf_eps(const DistanceMatrix& s, std::size_t i, double eps);

/// k-th smallest distance from i to the other n-1 points (i itself is
/// excluded, duplicates of i are not).
double knn_distance(const DistanceMatrix& s, std::size_t i, std::size_t k);

/// k / (n * eps_k(i)^d). Throws DegenerateDataError when eps_k(i) == 0.
double pdf_knn(const DistanceMatrix& s, std::size_t i, std::size_t k);

/// pdf_eps(i, gamma) / pdf_eps(i, lambda); requires 0 < gamma < lambda.
double density_ratio(const DistanceMatrix& s, std::size_t i, double gamma, double lambda);

/// Per-point density under a bandwidth, with the radius used at each point.
struct DensityEstimate {
    std::vector<double> density;
    std::vector<double> radius;
};

DensityEstimate estimate_density(const DistanceMatrix& s, const Bandwidth& bw);

} // namespace cdfts
