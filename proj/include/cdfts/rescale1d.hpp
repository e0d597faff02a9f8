#pragma once

#include "cdfts/dataset.hpp"

#include <span>
#include <vector>

namespace cdfts {

/// Smoothed empirical cdf of one attribute, sampled at evenly spaced knots
/// over [0,1]. cdf is nondecreasing and ends at exactly 1.
struct CdfGrid {
    std::vector<double> knots;
    std::vector<double> cdf;

    /// Piecewise-linear interpolation, clamped to [0,1] outside the grid.
    double operator()(double x) const;
};

/// Estimates the cdf of a column in [0,1] with a uniform kernel of half-width
/// lambda around every value. Kernels are truncated at 0 and 1 and
/// renormalised so each point keeps unit mass. psi is the number of knots.
CdfGrid fit_cdf_1d(std::span<const double> column, double lambda, std::size_t psi = 100);

/// Maps every attribute through its own smoothed cdf, then min-max
/// normalises the result.
Dataset rescale(Dataset ds, double lambda, std::size_t psi = 100);

} // namespace cdfts
