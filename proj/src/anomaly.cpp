#include "cdfts/anomaly.hpp"

#include "cdfts/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdfts {

namespace {

void check_k(std::size_t n, std::size_t k) {
    if (k < 1 || k + 1 > n) {
        throw ValidationError("k = " + std::to_string(k) + " outside [1, n-1] for n = " +
                              std::to_string(n));
    }
}

void check_square(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("anomaly scoring needs a non-empty square distance matrix");
    }
}

} // namespace

std::vector<std::size_t> AnomalyScores::ranking() const {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<std::size_t> rank(scores.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = r + 1;
    }
    return rank;
}

std::size_t k_from_fraction(double fraction, std::size_t n) {
    if (!(fraction > 0.0 && fraction <= 1.0)) {
        throw ValidationError("k fraction must lie in (0, 1]");
    }
    if (n < 2) {
        throw ValidationError("k-NN scoring needs at least two points");
    }
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    return std::clamp<std::size_t>(k, 1, n - 1);
}

KnnTable::KnnTable(const Matrix& distances) {
    check_square(distances);
    const std::size_t n = distances.rows();
    rows_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = rows_[i];
        row.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                row.push_back(distances(i, j));
            }
        }
        std::sort(row.begin(), row.end());
    }
}

AnomalyScores KnnTable::knn_scores(std::size_t k) const {
    check_k(size(), k);
    AnomalyScores out{std::vector<double>(size()), "knn", k};
    for (std::size_t i = 0; i < size(); ++i) {
        out.scores[i] = distance(i, k);
    }
    return out;
}

AnomalyScores knn_scores(const Matrix& distances, std::size_t k) {
    check_square(distances);
    check_k(distances.rows(), k);
    const std::size_t n = distances.rows();
    AnomalyScores out{std::vector<double>(n), "knn", k};
    std::vector<double> others;
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                others.push_back(distances(i, j));
            }
        }
        auto kth = others.begin() + static_cast<std::ptrdiff_t>(k - 1);
        std::nth_element(others.begin(), kth, others.end());
        out.scores[i] = *kth;
    }
    return out;
}

AnomalyScores knn_scores(const DistanceMatrix& s, std::size_t k) {
    return knn_scores(s.values, k);
}

AnomalyScores lof_scores(const Matrix& distances, std::size_t k) {
    const KnnTable table(distances);
    check_k(table.size(), k);
    const std::size_t n = table.size();

    std::vector<double> k_distance(n);
    for (std::size_t i = 0; i < n; ++i) {
        k_distance[i] = table.distance(i, k);
    }

    std::vector<std::vector<std::size_t>> neighbours(n);
    std::vector<double> lrd(n);
    for (std::size_t i = 0; i < n; ++i) {
        double reach_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && distances(i, j) <= k_distance[i]) {
                neighbours[i].push_back(j);
                reach_sum += std::max(k_distance[j], distances(i, j));
            }
        }
        if (!(reach_sum > 0.0)) {
            throw DegenerateDataError("infinite local reachability density at point " +
                                      std::to_string(i) +
                                      " (duplicate points); deduplicate or increase k");
        }
        lrd[i] = static_cast<double>(neighbours[i].size()) / reach_sum;
    }

    AnomalyScores out{std::vector<double>(n), "lof", k};
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j : neighbours[i]) {
            sum += lrd[j];
        }
        out.scores[i] = sum / static_cast<double>(neighbours[i].size()) / lrd[i];
    }
    return out;
}

AnomalyScores lof_scores(const DistanceMatrix& s, std::size_t k) {
    return lof_scores(s.values, k);
}

} // namespace cdfts
