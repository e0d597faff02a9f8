#include "cdfts/clustering.hpp"

#include "cdfts/error.hpp"

#include <algorithm>
#include <climits>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

namespace cdfts {

namespace {

void check_square(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw ValidationError("clustering needs a non-empty square distance matrix");
    }
}

void check_eps(double eps) {
    if (!(eps > 0.0)) {
        throw ValidationError("eps must be positive");
    }
}

std::vector<std::size_t> neighbour_counts(const Matrix& dist, double eps) {
    std::vector<std::size_t> counts(dist.rows());
    for (std::size_t i = 0; i < dist.rows(); ++i) {
        const auto row = dist.row(i);
        counts[i] = static_cast<std::size_t>(
            std::count_if(row.begin(), row.end(), [eps](double v) { return v <= eps; }));
    }
    return counts;
}

/// Fills modes with the highest-count member of each cluster.
void assign_modes(Clustering& c, const std::vector<std::size_t>& counts) {
    c.modes.assign(static_cast<std::size_t>(c.cluster_count), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < c.labels.size(); ++i) {
        const int label = c.labels[i];
        if (label == kNoise) {
            continue;
        }
        auto& mode = c.modes[static_cast<std::size_t>(label - 1)];
        if (mode == std::numeric_limits<std::size_t>::max() || counts[i] > counts[mode]) {
            mode = i;
        }
    }
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

} // namespace

Clustering dbscan(const Matrix& dist, double eps, std::size_t minpts) {
    check_square(dist);
    check_eps(eps);
    if (minpts < 1) {
        throw ValidationError("minpts must be at least 1");
    }
    const std::size_t n = dist.rows();
    const auto counts = neighbour_counts(dist, eps);
    std::vector<char> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        core[i] = counts[i] >= minpts;
    }

    Clustering out;
    out.labels.assign(n, 0);
    std::deque<std::size_t> frontier;
    for (std::size_t seed = 0; seed < n; ++seed) {
        if (!core[seed] || out.labels[seed] != 0) {
            continue;
        }
        const int id = ++out.cluster_count;
        out.labels[seed] = id;
        frontier.push_back(seed);
        while (!frontier.empty()) {
            const std::size_t u = frontier.front();
            frontier.pop_front();
            for (std::size_t v = 0; v < n; ++v) {
                if (core[v] && out.labels[v] == 0 && (dist(u, v) <= eps || dist(v, u) <= eps)) {
                    out.labels[v] = id;
                    frontier.push_back(v);
                }
            }
        }
    }

    for (std::size_t j = 0; j < n; ++j) {
        if (core[j]) {
            continue;
        }
        int best = INT_MAX;
        for (std::size_t i = 0; i < n; ++i) {
            if (core[i] && dist(i, j) <= eps) {
                best = std::min(best, out.labels[i]);
            }
        }
        out.labels[j] = best == INT_MAX ? kNoise : best;
    }
    assign_modes(out, counts);
    return out;
}

Clustering dbscan(const DistanceMatrix& s, double eps, std::size_t minpts) {
    return dbscan(s.values, eps, minpts);
}

std::vector<Clustering> density_peaks(const Matrix& dist, double eps,
                                      std::span<const std::size_t> ks) {
    check_square(dist);
    check_eps(eps);
    const std::size_t n = dist.rows();
    for (std::size_t k : ks) {
        if (k < 2 || k > n) {
            throw ValidationError("density peaks needs 2 <= k <= n, got k = " + std::to_string(k));
        }
    }

    const auto counts = neighbour_counts(dist, eps);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return counts[a] != counts[b] ? counts[a] > counts[b] : a < b;
    });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) {
        rank[order[r]] = r;
    }

    const auto flat = dist.flat();
    const double max_distance = *std::max_element(flat.begin(), flat.end());
    std::vector<double> separation(n, max_distance);
    std::vector<std::size_t> parent(n, n);
    for (std::size_t r = 1; r < n; ++r) {
        const std::size_t i = order[r];
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = n;
        for (std::size_t q = 0; q < r; ++q) {
            const std::size_t j = order[q];
            const double v = dist(i, j);
            if (v < best || (v == best && j < best_j)) {
                best = v;
                best_j = j;
            }
        }
        separation[i] = best;
        parent[i] = best_j;
    }

    std::vector<std::size_t> by_score(n);
    std::iota(by_score.begin(), by_score.end(), std::size_t{0});
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) {
        score[i] = static_cast<double>(counts[i]) * separation[i];
    }
    std::sort(by_score.begin(), by_score.end(), [&](std::size_t a, std::size_t b) {
        return score[a] != score[b] ? score[a] > score[b] : rank[a] < rank[b];
    });

    std::vector<Clustering> results;
    results.reserve(ks.size());
    std::vector<char> is_center(n);
    for (std::size_t k : ks) {
        std::fill(is_center.begin(), is_center.end(), 0);
        for (std::size_t c = 0; c < k; ++c) {
            is_center[by_score[c]] = 1;
        }
        // The top-ranked point always has the largest score, so every chain
        // ends at a center.
        Clustering out;
        out.labels.assign(n, kNoise);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = order[r];
            if (is_center[i]) {
                out.labels[i] = ++out.cluster_count;
                out.modes.push_back(i);
            } else {
                out.labels[i] = out.labels[parent[i]];
            }
        }
        results.push_back(std::move(out));
    }
    return results;
}

Clustering density_peaks(const Matrix& dist, double eps, std::size_t k) {
    const std::size_t ks[] = {k};
    return std::move(density_peaks(dist, eps, ks).front());
}

Clustering density_peaks(const DistanceMatrix& s, double eps, std::size_t k) {
    return density_peaks(s.values, eps, k);
}

DbscanSweep::DbscanSweep(const Matrix& distances)
    : distances_(distances), n_(distances.rows()) {
    check_square(distances);
    sorted_rows_.resize(n_);
    column_order_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        auto& row = sorted_rows_[i];
        row.reserve(n_ - 1);
        for (std::size_t j = 0; j < n_; ++j) {
            if (j != i) {
                row.push_back(distances(i, j));
            }
        }
        std::sort(row.begin(), row.end());

        auto& col = column_order_[i];
        col.reserve(n_ - 1);
        for (std::size_t r = 0; r < n_; ++r) {
            if (r != i) {
                col.push_back(r);
            }
        }
        std::stable_sort(col.begin(), col.end(), [&](std::size_t a, std::size_t b) {
            return distances(a, i) < distances(b, i);
        });
    }
}

std::vector<Clustering> DbscanSweep::run(std::span<const double> eps_values,
                                         std::size_t minpts) const {
    if (minpts < 1) {
        throw ValidationError("minpts must be at least 1");
    }
    for (double eps : eps_values) {
        check_eps(eps);
    }
    const std::size_t n = n_;
    const double inf = std::numeric_limits<double>::infinity();
    const Matrix& dist = distances_;

    // Core distance: smallest eps at which the point is core.
    std::vector<double> core_distance(n, 0.0);
    if (minpts >= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            core_distance[i] = minpts - 2 < sorted_rows_[i].size() ? sorted_rows_[i][minpts - 2] : inf;
        }
    }

    // Minimum spanning tree of the core-linkage weights; thresholding it at
    // eps yields exactly the connected components of the core graph.
    struct Edge {
        double weight;
        std::size_t a;
        std::size_t b;
    };
    std::vector<Edge> tree;
    tree.reserve(n);
    {
        std::vector<double> best(n, inf);
        std::vector<std::size_t> link(n, n);
        std::vector<char> in_tree(n, 0);
        std::size_t current = 0;
        in_tree[0] = 1;
        for (std::size_t added = 1; added < n; ++added) {
            for (std::size_t v = 0; v < n; ++v) {
                if (in_tree[v]) {
                    continue;
                }
                const double w = std::max({core_distance[current], core_distance[v],
                                           std::min(dist(current, v), dist(v, current))});
                if (w < best[v]) {
                    best[v] = w;
                    link[v] = current;
                }
            }
            std::size_t next = n;
            for (std::size_t v = 0; v < n; ++v) {
                if (!in_tree[v] && (next == n || best[v] < best[next])) {
                    next = v;
                }
            }
            in_tree[next] = 1;
            tree.push_back({best[next], link[next], next});
            current = next;
        }
    }
    std::sort(tree.begin(), tree.end(),
              [](const Edge& x, const Edge& y) { return x.weight < y.weight; });

    std::vector<std::size_t> eps_order(eps_values.size());
    std::iota(eps_order.begin(), eps_order.end(), std::size_t{0});
    std::stable_sort(eps_order.begin(), eps_order.end(),
                     [&](std::size_t a, std::size_t b) { return eps_values[a] < eps_values[b]; });

    std::vector<Clustering> results(eps_values.size());
    DisjointSets sets(n);
    std::size_t next_edge = 0;
    std::vector<int> root_label(n);
    std::vector<std::size_t> counts(n);
    for (std::size_t slot : eps_order) {
        const double eps = eps_values[slot];
        while (next_edge < tree.size() && tree[next_edge].weight <= eps) {
            sets.unite(tree[next_edge].a, tree[next_edge].b);
            ++next_edge;
        }

        Clustering out;
        out.labels.assign(n, kNoise);
        std::fill(root_label.begin(), root_label.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = sorted_rows_[i];
            counts[i] = 1 + static_cast<std::size_t>(
                                std::upper_bound(row.begin(), row.end(), eps) - row.begin());
            if (core_distance[i] <= eps) {
                int& label = root_label[sets.find(i)];
                if (label == 0) {
                    label = ++out.cluster_count;
                }
                out.labels[i] = label;
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (core_distance[j] <= eps) {
                continue;
            }
            int best = INT_MAX;
            for (std::size_t i : column_order_[j]) {
                if (dist(i, j) > eps) {
                    break;
                }
                if (core_distance[i] <= eps) {
                    best = std::min(best, out.labels[i]);
                }
            }
            if (best != INT_MAX) {
                out.labels[j] = best;
            }
        }
        assign_modes(out, counts);
        results[slot] = std::move(out);
    }
    return results;
}

} // namespace cdfts
