#pragma once

#include "cdfts/dscale.hpp"

#include <vector>

namespace cdfts {

inline constexpr int kNoise = -1;

/// Cluster ids run 1..cluster_count; kNoise marks unclustered points.
struct Clustering {
    std::vector<int> labels;
    int cluster_count = 0;
    /// Highest-density point of each cluster (index c-1 for cluster c).
    std::vector<std::size_t> modes;
};

/// DBSCAN over a square distance matrix whose row i holds distances measured
/// from point i (it may be asymmetric, as produced by dscale).
///
/// A point is core when |{j : d[i,j] <= eps}| >= minpts, self included. Two
/// cores are connected when either lies in the other's neighbourhood.
/// Clusters are numbered by their lowest-index core. A non-core point inside
/// some core's neighbourhood joins the lowest-numbered such cluster; the
/// rest are noise.
Clustering dbscan(const Matrix& distances, double eps, std::size_t minpts);
Clustering dbscan(const DistanceMatrix& s, double eps, std::size_t minpts);

/// Density peaks with uniform-kernel density rho_i = |N(i; eps)|.
/// A point outranks another when its density is higher, or equal with a
/// lower index. delta_i is the distance to the nearest outranking point
/// (the top point takes the matrix maximum); the k points with the largest
/// rho * delta become centers and every other point inherits the label of
/// its nearest outranking neighbour. Requires 2 <= k <= n.
Clustering density_peaks(const Matrix& distances, double eps, std::size_t k);
Clustering density_peaks(const DistanceMatrix& s, double eps, std::size_t k);

/// density_peaks for several k at one eps, sharing the O(n^2) work.
std::vector<Clustering> density_peaks(const Matrix& distances, double eps,
                                      std::span<const std::size_t> ks);

/// Evaluates DBSCAN for many (eps, minpts) pairs over one matrix far faster
/// than repeated dbscan() calls, with identical output.
class DbscanSweep {
public:
    explicit DbscanSweep(const Matrix& distances);

    /// Runs every eps in `eps_values` (any order) for a single minpts and
    /// returns the clusterings in the same order as `eps_values`.
    std::vector<Clustering> run(std::span<const double> eps_values, std::size_t minpts) const;

private:
    const Matrix& distances_;
    std::size_t n_;
    /// Row i's off-diagonal distances, ascending.
    std::vector<std::vector<double>> sorted_rows_;
    /// For column j, the points i != j ordered by distances_(i, j).
    std::vector<std::vector<std::size_t>> column_order_;
};

} // namespace cdfts
