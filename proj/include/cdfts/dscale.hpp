#pragma once

#include "cdfts/density.hpp"

#include <vector>

namespace cdfts {

/// Per-point quantities behind the distance rescaling. For point i:
///   factor[i]          r_i = (m / λ_i) * (count_i / n)^(1/d)
///   bandwidth[i]       λ_i (λ, or the k-NN distance under KNearestBandwidth)
///   count[i]           |{j : s[i,j] <= λ_i}|, self and ties included
///   scaled_bandwidth[i] λ'_i = λ_i * r_i  (never above m)
struct ScalingProfile {
    std::vector<double> factor;
    std::vector<double> bandwidth;
    std::vector<std::size_t> count;
    std::vector<double> scaled_bandwidth;
};

/// Row-referenced rescaled distances: row i holds s'(x_i, ·). Not symmetric
/// in general.
struct ScaledDistanceMatrix {
    Matrix values;
    double max = 0.0;
    ScalingProfile profile;

    std::size_t size() const noexcept { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values(i, j); }
};

/// Bandwidth, neighbourhood count and scaling factor for point i.
struct PointScaling {
    double factor;
    double bandwidth;
    std::size_t count;
};

/// Throws DegenerateDataError when the point's bandwidth is zero.
PointScaling scaling_factor(const DistanceMatrix& s, std::size_t i, const Bandwidth& bw);

ScalingProfile scaling_profile(const DistanceMatrix& s, const Bandwidth& bw);

/// Rescales every row of s. Near entries (s[i,j] <= λ_i) are multiplied by
/// r_i; far entries are mapped affinely from [λ_i, m] onto [λ'_i, m], so
/// each row keeps its ordering and the maximum distance stays m.
///
/// Requires n >= 2 and m > 0. A bandwidth λ_i >= m is rejected
/// (ValidationError for a fixed λ, DegenerateDataError for a k-NN radius).
ScaledDistanceMatrix dscale(const DistanceMatrix& s, const Bandwidth& bw);

} // namespace cdfts
