#pragma once

#include "cdfts/dscale.hpp"

#include <string>
#include <vector>

namespace cdfts {

/// Per-point anomaly scores; larger means more anomalous.
struct AnomalyScores {
    std::vector<double> scores;
    std::string scorer;
    std::size_t k = 0;

    /// 1-based ranks, 1 = most anomalous; ties resolved by lower index.
    std::vector<std::size_t> ranking() const;
};

/// k from a fraction of n: round(fraction * n), clamped to [1, n-1].
std::size_t k_from_fraction(double fraction, std::size_t n);

/// Distance from each point to its k-th nearest neighbour (row i measured
/// from point i).
AnomalyScores knn_scores(const Matrix& distances, std::size_t k);
AnomalyScores knn_scores(const DistanceMatrix& s, std::size_t k);

/// Local outlier factor with reachability distances. The k-neighbourhood of
/// a point holds every other point within its k-distance, ties included.
/// Throws DegenerateDataError when a local reachability density is infinite
/// (duplicate points).
AnomalyScores lof_scores(const Matrix& distances, std::size_t k);
AnomalyScores lof_scores(const DistanceMatrix& s, std::size_t k);

/// Sorted off-diagonal rows, for scoring many k values over one matrix.
class KnnTable {
public:
    explicit KnnTable(const Matrix& distances);

    std::size_t size() const noexcept { return rows_.size(); }
    double distance(std::size_t i, std::size_t k) const { return rows_[i][k - 1]; }
    AnomalyScores knn_scores(std::size_t k) const;

private:
    std::vector<std::vector<double>> rows_;
};

} // namespace cdfts
