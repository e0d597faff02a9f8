#pragma once

#include "cdfts/dscale.hpp"

#include <functional>
#include <string_view>
#include <vector>

namespace cdfts {

/// Moves every point y to the mean of its per-reference translations
///   y_x = x + (s'(x,y) / s(x,y)) * (y - x)
/// over all reference points x. References at zero distance from y
/// (including y itself) contribute y unchanged. No renormalisation.
Matrix shift_once(const Matrix& points, const ScaledDistanceMatrix& scaled,
                  const DistanceMatrix& original);

enum class StopReason { converged, iteration_cap };

std::string_view to_string(StopReason reason);

struct TransformTrace {
    /// Mean absolute per-entry change of each iteration, measured after
    /// renormalisation.
    std::vector<double> deltas;
    std::size_t iterations = 0;
    StopReason reason = StopReason::converged;
};

struct TransformOptions {
    Bandwidth bandwidth = FixedBandwidth{0.1};
    double delta = 0.015;
    std::size_t max_iterations = 100;
};

struct TransformResult {
    Dataset data;
    TransformTrace trace;
};

/// Iterated rescale-and-shift. Normalises the input, then repeats
/// {distances, dscale, shift_once, min-max normalise} until the mean
/// absolute change is at most options.delta or max_iterations is reached.
/// The optional observer sees the dataset after each iteration.
TransformResult cdf_transform_shift(
    Dataset ds, const TransformOptions& options,
    const std::function<void(std::size_t iteration, const Dataset&)>& observer = {});

} // namespace cdfts
