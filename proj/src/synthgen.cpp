#include "cdfts/synthgen.hpp"

#include "cdfts/error.hpp"
#include "cdfts/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace cdfts {

namespace {

struct Builder {
    std::vector<double> values;
    std::vector<int> labels;
    std::size_t dims;

    void add(std::initializer_list<double> point, int label) {
        values.insert(values.end(), point.begin(), point.end());
        labels.push_back(label);
    }

    Dataset finish() {
        const std::size_t n = labels.size();
        Dataset ds = make_dataset(Matrix(n, dims, std::move(values)), std::move(labels));
        return minmax_normalize(std::move(ds));
    }
};

/// Splits total into parts proportional to weights, largest remainders first.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<std::size_t> out(weights.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        const double exact = static_cast<double>(total) * weights[c] / sum;
        out[c] = static_cast<std::size_t>(std::floor(exact));
        used += out[c];
        remainders.emplace_back(exact - std::floor(exact), c);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; used < total; ++r, ++used) {
        ++out[remainders[r % remainders.size()].second];
    }
    return out;
}

// Three parallel diagonal strips of equal length. Strip c holds points in
// proportion to counts, with widths chosen so the densities follow
// density_ratios. Their projections onto either axis overlap almost fully.
Dataset three_lines(const SynthSpec& spec, Random& rng) {
    if (spec.density_ratios.size() != 3) {
        throw ValidationError("three-lines needs exactly three density ratios");
    }
    const std::vector<double> shares = {0.5, 0.3, 0.2};
    const auto counts = apportion(spec.size, shares);
    std::array<double, 3> width{};
    for (std::size_t c = 0; c < 3; ++c) {
        width[c] = shares[c] / spec.density_ratios[c];
    }
    const double widest = *std::max_element(width.begin(), width.end());
    constexpr double max_width = 0.16;
    constexpr double length = 0.9;
    // Perpendicular centre offsets: dense strip in the middle.
    const std::array<double, 3> offset = {0.0, -0.1, 0.12};

    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Builder b{{}, {}, 2};
    for (std::size_t c = 0; c < 3; ++c) {
        const double w = width[c] / widest * max_width;
        for (std::size_t i = 0; i < counts[c]; ++i) {
            const double along = rng.uniform(-length / 2, length / 2);
            const double across = offset[c] + rng.uniform(-w / 2, w / 2);
            b.add({0.5 + (along - across) * inv_sqrt2, 0.5 + (along + across) * inv_sqrt2},
                  static_cast<int>(c + 1));
        }
    }
    return b.finish();
}

// Two dense Gaussian blobs whose tails touch, one broad sparse blob and an
// elongated horizontal cluster.
Dataset four_clusters(const SynthSpec& spec, Random& rng) {
    const auto counts = apportion(spec.size, {0.3, 0.3, 0.2, 0.2});
    Builder b{{}, {}, 2};
    struct Blob {
        double x, y, sd;
    };
    const std::array<Blob, 3> blobs = {{{0.3, 0.7, 0.04}, {0.45, 0.7, 0.04}, {0.75, 0.35, 0.12}}};
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            b.add({rng.normal(blobs[c].x, blobs[c].sd), rng.normal(blobs[c].y, blobs[c].sd)},
                  static_cast<int>(c + 1));
        }
    }
    for (std::size_t i = 0; i < counts[3]; ++i) {
        b.add({rng.uniform(0.1, 0.6), rng.normal(0.25, 0.02)}, 4);
    }
    return b.finish();
}

std::size_t anomaly_count(const SynthSpec& spec) {
    if (!(spec.anomaly_fraction > 0.0 && spec.anomaly_fraction < 0.5)) {
        throw ValidationError("anomaly fraction must lie in (0, 0.5)");
    }
    return std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(spec.anomaly_fraction * static_cast<double>(spec.size))));
}

// A dense and a sparse normal cluster; anomalies form two small tight groups
// just outside the dense cluster.
Dataset anomaly_2d(const SynthSpec& spec, Random& rng) {
    const std::size_t anomalies = anomaly_count(spec);
    const auto normal = apportion(spec.size - anomalies, {0.5, 0.5});
    const auto groups = apportion(anomalies, {0.5, 0.5});
    Builder b{{}, {}, 2};
    for (std::size_t i = 0; i < normal[0]; ++i) {
        b.add({rng.normal(0.3, 0.04), rng.normal(0.35, 0.04)}, 0);
    }
    for (std::size_t i = 0; i < normal[1]; ++i) {
        b.add({rng.normal(0.7, 0.12), rng.normal(0.65, 0.12)}, 0);
    }
    const std::array<std::array<double, 2>, 2> centres = {{{0.3, 0.55}, {0.5, 0.3}}};
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t i = 0; i < groups[g]; ++i) {
            b.add({rng.normal(centres[g][0], 0.012), rng.normal(centres[g][1], 0.012)}, 1);
        }
    }
    return b.finish();
}

// One-dimensional analogue: dense and sparse normal modes, anomalies as a
// small tight group beside the dense mode.
Dataset anomaly_1d(const SynthSpec& spec, Random& rng) {
    const std::size_t anomalies = anomaly_count(spec);
    const auto normal = apportion(spec.size - anomalies, {0.5, 0.5});
    const auto groups = apportion(anomalies, {0.5, 0.5});
    Builder b{{}, {}, 1};
    for (std::size_t i = 0; i < normal[0]; ++i) {
        b.add({rng.normal(0.3, 0.03)}, 0);
    }
    for (std::size_t i = 0; i < normal[1]; ++i) {
        b.add({rng.normal(0.7, 0.12)}, 0);
    }
    const std::array<double, 2> centres = {0.19, 0.41};
    for (std::size_t g = 0; g < 2; ++g) {
        for (std::size_t i = 0; i < groups[g]; ++i) {
            b.add({rng.normal(centres[g], 0.006)}, 1);
        }
    }
    return b.finish();
}

// Isotropic components with the given spreads, centres spaced along the
// main diagonal of the unit cube.
Dataset gaussian_mixture(const SynthSpec& spec, Random& rng) {
    if (spec.spreads.empty() || spec.spreads.size() != spec.weights.size()) {
        throw ValidationError("gaussian-mixture needs matching spreads and weights");
    }
    if (spec.dims < 1) {
        throw ValidationError("gaussian-mixture needs at least one dimension");
    }
    const std::size_t components = spec.spreads.size();
    const auto counts = apportion(spec.size, spec.weights);
    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t c = 0; c < components; ++c) {
        const double centre =
            components == 1 ? 0.5 : 0.3 + 0.4 * static_cast<double>(c) / static_cast<double>(components - 1);
        for (std::size_t i = 0; i < counts[c]; ++i) {
            for (std::size_t k = 0; k < spec.dims; ++k) {
                values.push_back(rng.normal(centre, spec.spreads[c]));
            }
            labels.push_back(static_cast<int>(c + 1));
        }
    }
    const std::size_t n = labels.size();
    return minmax_normalize(make_dataset(Matrix(n, spec.dims, std::move(values)), std::move(labels)));
}

} // namespace

std::string_view to_string(Family f) {
    switch (f) {
    case Family::three_lines: return "three-lines";
    case Family::four_clusters: return "four-clusters";
    case Family::anomaly_2d: return "anomaly-2d";
    case Family::anomaly_1d: return "anomaly-1d";
    case Family::gaussian_mixture: return "gaussian-mixture";
    }
    return "?";
}

Family parse_family(std::string_view name) {
    for (Family f : {Family::three_lines, Family::four_clusters, Family::anomaly_2d,
                     Family::anomaly_1d, Family::gaussian_mixture}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw ValidationError("unknown family '" + std::string(name) + "'");
}

std::size_t default_size(Family f) {
    switch (f) {
    case Family::three_lines: return 560;
    case Family::four_clusters: return 1250;
    case Family::anomaly_2d: return 520;
    case Family::anomaly_1d: return 860;
    case Family::gaussian_mixture: return 200;
    }
    return 0;
}

Dataset generate(const SynthSpec& input) {
    SynthSpec spec = input;
    if (spec.size == 0) {
        spec.size = default_size(spec.family);
    }
    if (spec.size < 4) {
        throw ValidationError("synthetic datasets need at least 4 points");
    }
    Random rng(spec.seed);
    switch (spec.family) {
    case Family::three_lines: return three_lines(spec, rng);
    case Family::four_clusters: return four_clusters(spec, rng);
    case Family::anomaly_2d: return anomaly_2d(spec, rng);
    case Family::anomaly_1d: return anomaly_1d(spec, rng);
    case Family::gaussian_mixture: return gaussian_mixture(spec, rng);
    }
    throw ValidationError("unknown family");
}

} // namespace cdfts
