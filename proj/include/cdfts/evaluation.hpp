#pragma once

#include "cdfts/anomaly.hpp"
#include "cdfts/clustering.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cdfts {

/// Maximum-weight one-to-one assignment between rows and columns of a
/// rectangular weight matrix. Returns, per row, the matched column or -1.
std::vector<int> max_weight_assignment(const Matrix& weights);

/// Macro F-measure against ground-truth classes. Predicted clusters and truth
/// classes are matched one-to-one to maximise the summed per-pair F; noise
/// points belong to no cluster; the sum is averaged over truth classes, so
/// unmatched classes count as 0.
double f_measure(std::span<const int> predicted, std::span<const int> truth);

/// ROC AUC: probability that a random anomaly outscores a random normal
/// point, ties counting one half. Nonzero flags mark anomalies.
double auc(std::span<const double> scores, std::span<const int> flags);

enum class Scaler { none, rescale, dscale, cdfts };
enum class Algorithm { dbscan, dp, knn, lof };
/// Density estimator driving dscale / cdfts inside a sweep.
enum class Estimator { eps, knn };

std::string_view to_string(Scaler s);
std::string_view to_string(Algorithm a);
std::string_view to_string(Estimator e);
Scaler parse_scaler(std::string_view name);
Algorithm parse_algorithm(std::string_view name);
Estimator parse_estimator(std::string_view name);

/// Parameter ranges for a sweep. Only the fields relevant to the chosen
/// scaler and algorithm are read.
struct SweepGrid {
    std::vector<double> lambdas;
    std::size_t psi = 100;
    double delta = 0.015;
    std::size_t max_iterations = 100;
    /// With Estimator::knn the scaler reuses the detector's k as its k-NN
    /// bandwidth and `lambdas` is ignored (anomaly algorithms only).
    Estimator estimator = Estimator::eps;
    std::vector<double> eps_values;
    std::vector<std::size_t> minpts;
    std::vector<std::size_t> clusters;
    std::vector<double> k_fractions;
};

/// Clustering ranges: minpts 2..10, k 2..10, eps 0.01..1 step 0.01,
/// lambda 0.1..0.5, psi 100, delta 0.015.
SweepGrid table4_grid();
/// Anomaly ranges: k in {5%, 10%, ..., 50%} of n, lambda 0.1..0.5, psi 100,
/// delta 0.015.
SweepGrid table7_grid();
SweepGrid grid_preset(std::string_view name);

using ParamList = std::vector<std::pair<std::string, double>>;

struct SweepCell {
    ParamList params;
    std::optional<double> score;
    std::string error;
};

struct EvaluationReport {
    std::string metric;
    Scaler scaler = Scaler::none;
    Algorithm algorithm = Algorithm::dbscan;
    std::vector<SweepCell> cells;
    std::optional<std::size_t> best;

    std::optional<double> best_score() const;
};

/// Evaluates every grid cell in a fixed order (scaler parameters outer,
/// algorithm parameters inner). Degenerate-data failures mark cells as failed
/// instead of aborting. Uses F-measure for clustering algorithms and AUC for
/// anomaly detectors, so the dataset must carry labels.
EvaluationReport sweep(const Dataset& ds, Scaler scaler, Algorithm algorithm,
                       const SweepGrid& grid);

} // namespace cdfts
