#pragma once

#include "cdfts/dataset.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace cdfts {

enum class Family { three_lines, four_clusters, anomaly_2d, anomaly_1d, gaussian_mixture };

std::string_view to_string(Family f);
Family parse_family(std::string_view name);

/// Desk-scale stand-ins for the benchmark shapes. Coordinates are produced
/// by the generator, not copied from any published dataset.
struct SynthSpec {
    Family family = Family::three_lines;
    std::uint64_t seed = 1;
    /// Point count; 0 picks the family default (560, 1250, 520, 860, 200).
    std::size_t size = 0;
    /// three-lines: relative densities of the three strips.
    std::vector<double> density_ratios = {10.0, 3.0, 1.0};
    /// anomaly families: share of anomalies, in (0, 0.5).
    double anomaly_fraction = 0.0385;
    /// gaussian-mixture: dimensionality, component spreads and weights.
    std::size_t dims = 2;
    std::vector<double> spreads = {0.03, 0.15};
    std::vector<double> weights = {0.5, 0.5};
};

std::size_t default_size(Family f);

/// Generates a min-max normalised dataset with ground truth: class ids
/// 1..c for the clustering families, 0/1 anomaly flags for the anomaly
/// families, component ids for gaussian-mixture. Deterministic per spec.
Dataset generate(const SynthSpec& spec);

} // namespace cdfts
