#include "cdfts/dscale.hpp"

#include "cdfts/error.hpp"
#include "cdfts/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdfts {

PointScaling scaling_factor(const DistanceMatrix& s, std::size_t i, const Bandwidth& bw) {
    const double lambda = std::holds_alternative<FixedBandwidth>(bw)
                              ? std::get<FixedBandwidth>(bw).radius
                              : knn_distance(s, i, std::get<KNearestBandwidth>(bw).k);
    if (!(lambda > 0.0)) {
        throw DegenerateDataError("zero bandwidth at point " + std::to_string(i) +
                                  " (duplicate points); deduplicate or jitter the data");
    }
    const std::size_t count = neighbourhood_count(s, i, lambda);
    const double fraction = static_cast<double>(count) / static_cast<double>(s.size());
    const double factor =
        (s.max / lambda) * std::pow(fraction, 1.0 / static_cast<double>(s.dim));
    return {factor, lambda, count};
}

ScalingProfile scaling_profile(const DistanceMatrix& s, const Bandwidth& bw) {
    validate_bandwidth(bw, s);
    const std::size_t n = s.size();
    ScalingProfile p{std::vector<double>(n), std::vector<double>(n), std::vector<std::size_t>(n),
                     std::vector<double>(n)};
    parallel_for(0, n, [&](std::size_t i) {
        const PointScaling ps = scaling_factor(s, i, bw);
        p.factor[i] = ps.factor;
        p.bandwidth[i] = ps.bandwidth;
        p.count[i] = ps.count;
        p.scaled_bandwidth[i] = std::min(ps.bandwidth * ps.factor, s.max);
    });
    return p;
}

ScaledDistanceMatrix dscale(const DistanceMatrix& s, const Bandwidth& bw) {
    const std::size_t n = s.size();
    if (n < 2 || !(s.max > 0.0)) {
        throw DegenerateDataError("distance rescaling needs at least two distinct points");
    }
    if (const auto* fixed = std::get_if<FixedBandwidth>(&bw); fixed && !(fixed->radius < s.max)) {
        throw ValidationError("bandwidth lambda = " + format_number(fixed->radius) +
                              " must be below the maximum distance " + format_number(s.max));
    }

    ScaledDistanceMatrix out;
    out.profile = scaling_profile(s, bw);
    out.values = Matrix(n, n);
    out.max = s.max;
    const double m = s.max;

    for (std::size_t i = 0; i < n; ++i) {
        if (!(out.profile.bandwidth[i] < m)) {
            throw DegenerateDataError("k-NN bandwidth at point " + std::to_string(i) +
                                      " reaches the maximum distance; use a smaller k");
        }
    }

    parallel_for(0, n, [&](std::size_t i) {
        const double lambda = out.profile.bandwidth[i];
        const double r = out.profile.factor[i];
        const double scaled = out.profile.scaled_bandwidth[i];
        const double slope = (m - scaled) / (m - lambda);
        const auto src = s.row(i);
        auto dst = out.values.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double v = src[j];
            double mapped;
            if (v == m) {
                mapped = m;
            } else if (v <= lambda) {
                mapped = v * r;
            } else {
                mapped = (v - lambda) * slope + scaled;
            }
            // Rounding can push an entry a few ulps past m; clamping keeps the
            // row monotone and m the row maximum.
            dst[j] = std::min(mapped, m);
        }
        dst[i] = 0.0;
    });
    return out;
}

} // namespace cdfts
