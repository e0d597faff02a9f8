#include "cdfts/transform_shift.hpp"

#include "cdfts/error.hpp"
#include "cdfts/parallel.hpp"

#include <cmath>

namespace cdfts {

Matrix shift_once(const Matrix& points, const ScaledDistanceMatrix& scaled,
                  const DistanceMatrix& original) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (original.size() != n || scaled.size() != n) {
        throw ValidationError("distance matrices do not match the point count");
    }

    Matrix out(n, d);
    parallel_for(0, n, [&](std::size_t y) {
        const auto target = points.row(y);
        auto acc = out.row(y);
        for (std::size_t x = 0; x < n; ++x) {
            const double dist = original(x, y);
            if (x == y || dist == 0.0) {
                for (std::size_t k = 0; k < d; ++k) {
                    acc[k] += target[k];
                }
                continue;
            }
            const double ratio = scaled(x, y) / dist;
            const auto ref = points.row(x);
            for (std::size_t k = 0; k < d; ++k) {
                acc[k] += ref[k] + ratio * (target[k] - ref[k]);
            }
        }
        for (std::size_t k = 0; k < d; ++k) {
            acc[k] /= static_cast<double>(n);
        }
    });
    return out;
}

std::string_view to_string(StopReason reason) {
    return reason == StopReason::converged ? "converged" : "iteration-cap";
}

TransformResult cdf_transform_shift(
    Dataset ds, const TransformOptions& options,
    const std::function<void(std::size_t, const Dataset&)>& observer) {
    if (!(options.delta > 0.0)) {
        throw ValidationError("delta must be positive");
    }
    if (options.max_iterations < 1) {
        throw ValidationError("max_iterations must be at least 1");
    }

    TransformResult result;
    result.data = minmax_normalize(std::move(ds));
    const auto initial_warnings = result.data.warnings;
    const double cells = static_cast<double>(result.data.size() * result.data.dims());

    for (std::size_t t = 1;; ++t) {
        const DistanceMatrix s = pairwise_distances(result.data);
        const ScaledDistanceMatrix scaled = dscale(s, options.bandwidth);

        Dataset next = result.data;
        next.values = shift_once(result.data.values, scaled, s);
        next = minmax_normalize(std::move(next));
        next.warnings = initial_warnings;

        double change = 0.0;
        const auto before = result.data.values.flat();
        const auto after = next.values.flat();
        for (std::size_t k = 0; k < before.size(); ++k) {
            change += std::abs(before[k] - after[k]);
        }
        change /= cells;

        result.data = std::move(next);
        result.trace.deltas.push_back(change);
        result.trace.iterations = t;
        if (observer) {
            observer(t, result.data);
        }
        if (change <= options.delta) {
            result.trace.reason = StopReason::converged;
            break;
        }
        if (t >= options.max_iterations) {
            result.trace.reason = StopReason::iteration_cap;
            break;
        }
    }
    return result;
}

} // namespace cdfts
