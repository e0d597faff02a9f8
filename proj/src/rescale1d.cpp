#include "cdfts/rescale1d.hpp"

#include "cdfts/error.hpp"

#include <algorithm>

namespace cdfts {

double CdfGrid::operator()(double x) const {
    if (x <= knots.front()) {
        return cdf.front();
    }
    if (x >= knots.back()) {
        return cdf.back();
    }
    const auto hi = std::upper_bound(knots.begin(), knots.end(), x);
    const auto k = static_cast<std::size_t>(hi - knots.begin());
    const double t = (x - knots[k - 1]) / (knots[k] - knots[k - 1]);
    return cdf[k - 1] + t * (cdf[k] - cdf[k - 1]);
}

CdfGrid fit_cdf_1d(std::span<const double> column, double lambda, std::size_t psi) {
    if (psi < 2) {
        throw ValidationError("psi must be at least 2");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw ValidationError("rescale lambda must lie in (0, 1)");
    }
    if (column.empty()) {
        throw ValidationError("cannot fit a cdf to an empty column");
    }

    CdfGrid grid;
    grid.knots.resize(psi);
    grid.cdf.assign(psi, 0.0);
    for (std::size_t k = 0; k < psi; ++k) {
        grid.knots[k] = static_cast<double>(k) / static_cast<double>(psi - 1);
    }
    grid.knots.back() = 1.0;

    for (double x : column) {
        const double v = std::clamp(x, 0.0, 1.0);
        const double lo = std::max(0.0, v - lambda);
        const double hi = std::min(1.0, v + lambda);
        const double width = hi - lo;
        for (std::size_t k = 0; k < psi; ++k) {
            const double g = grid.knots[k];
            if (g >= hi) {
                grid.cdf[k] += 1.0;
            } else if (g > lo) {
                grid.cdf[k] += (g - lo) / width;
            }
        }
    }
    const double n = static_cast<double>(column.size());
    for (double& c : grid.cdf) {
        c /= n;
    }
    // Accumulated rounding must not leave the last knot short of 1 or break
    // monotonicity.
    grid.cdf.back() = 1.0;
    for (std::size_t k = 1; k < psi; ++k) {
        grid.cdf[k] = std::clamp(grid.cdf[k], grid.cdf[k - 1], 1.0);
    }
    return grid;
}

Dataset rescale(Dataset ds, double lambda, std::size_t psi) {
    std::vector<double> column(ds.size());
    for (std::size_t j = 0; j < ds.dims(); ++j) {
        for (std::size_t i = 0; i < ds.size(); ++i) {
            column[i] = ds.values(i, j);
        }
        const CdfGrid grid = fit_cdf_1d(column, lambda, psi);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            ds.values(i, j) = grid(column[i]);
        }
    }
    return minmax_normalize(std::move(ds));
}

} // namespace cdfts
