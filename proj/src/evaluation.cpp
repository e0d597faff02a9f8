#include "cdfts/evaluation.hpp"

#include "cdfts/error.hpp"
#include "cdfts/rescale1d.hpp"
#include "cdfts/transform_shift.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace cdfts {

std::vector<int> max_weight_assignment(const Matrix& weights) {
    const std::size_t rows = weights.rows();
    const std::size_t cols = weights.cols();
    if (rows == 0 || cols == 0) {
        return std::vector<int>(rows, -1);
    }
    const bool transposed = rows > cols;
    const std::size_t n = transposed ? cols : rows;
    const std::size_t m = transposed ? rows : cols;
    auto cost = [&](std::size_t i, std::size_t j) {
        return transposed ? -weights(j, i) : -weights(i, j);
    };

    // Shortest augmenting path Hungarian method, 1-based with a sentinel
    // column 0, for n <= m.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> match(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) {
                    continue;
                }
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> result(rows, -1);
    for (std::size_t j = 1; j <= m; ++j) {
        if (match[j] == 0) {
            continue;
        }
        if (transposed) {
            result[j - 1] = static_cast<int>(match[j] - 1);
        } else {
            result[match[j] - 1] = static_cast<int>(j - 1);
        }
    }
    return result;
}

double f_measure(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw ValidationError("predicted and truth label counts differ");
    }
    if (truth.empty()) {
        throw ValidationError("f_measure needs at least one labelled point");
    }
    std::map<int, std::size_t> class_index;
    std::map<int, std::size_t> cluster_index;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        class_index.emplace(truth[i], 0);
        if (predicted[i] != kNoise) {
            cluster_index.emplace(predicted[i], 0);
        }
    }
    std::size_t next = 0;
    for (auto& [label, idx] : class_index) {
        idx = next++;
    }
    next = 0;
    for (auto& [label, idx] : cluster_index) {
        idx = next++;
    }
    if (cluster_index.empty()) {
        return 0.0;
    }

    const std::size_t classes = class_index.size();
    const std::size_t clusters = cluster_index.size();
    std::vector<std::size_t> overlap(classes * clusters, 0);
    std::vector<std::size_t> class_size(classes, 0);
    std::vector<std::size_t> cluster_size(clusters, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const std::size_t c = class_index[truth[i]];
        ++class_size[c];
        if (predicted[i] != kNoise) {
            const std::size_t p = cluster_index[predicted[i]];
            ++cluster_size[p];
            ++overlap[c * clusters + p];
        }
    }

    Matrix f(classes, clusters);
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t p = 0; p < clusters; ++p) {
            const auto tp = static_cast<double>(overlap[c * clusters + p]);
            if (tp == 0.0) {
                continue;
            }
            const double precision = tp / static_cast<double>(cluster_size[p]);
            const double recall = tp / static_cast<double>(class_size[c]);
            f(c, p) = 2.0 * precision * recall / (precision + recall);
        }
    }

    const auto matching = max_weight_assignment(f);
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        if (matching[c] >= 0) {
            total += f(c, static_cast<std::size_t>(matching[c]));
        }
    }
    return total / static_cast<double>(classes);
}

double auc(std::span<const double> scores, std::span<const int> flags) {
    if (scores.size() != flags.size()) {
        throw ValidationError("score and flag counts differ");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start;
        while (end < n && scores[order[end]] == scores[order[start]]) {
            ++end;
        }
        // Ranks start..end-1 (0-based) share the midrank.
        const double midrank = 0.5 * static_cast<double>(start + end + 1);
        for (std::size_t r = start; r < end; ++r) {
            if (flags[order[r]] != 0) {
                positive_rank_sum += midrank;
                ++positives;
            }
        }
        start = end;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw ValidationError("auc needs at least one anomaly and one normal point");
    }
    const double p = static_cast<double>(positives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(negatives));
}

std::string_view to_string(Scaler s) {
    switch (s) {
    case Scaler::none: return "none";
    case Scaler::rescale: return "rescale";
    case Scaler::dscale: return "dscale";
    case Scaler::cdfts: return "cdfts";
    }
    return "?";
}

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::dbscan: return "dbscan";
    case Algorithm::dp: return "dp";
    case Algorithm::knn: return "knn";
    case Algorithm::lof: return "lof";
    }
    return "?";
}

std::string_view to_string(Estimator e) { return e == Estimator::eps ? "eps" : "knn"; }

Scaler parse_scaler(std::string_view name) {
    for (Scaler s : {Scaler::none, Scaler::rescale, Scaler::dscale, Scaler::cdfts}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw ValidationError("unknown scaler '" + std::string(name) + "'");
}

Algorithm parse_algorithm(std::string_view name) {
    for (Algorithm a : {Algorithm::dbscan, Algorithm::dp, Algorithm::knn, Algorithm::lof}) {
        if (to_string(a) == name) {
            return a;
        }
    }
    throw ValidationError("unknown algorithm '" + std::string(name) + "'");
}

Estimator parse_estimator(std::string_view name) {
    if (name == "eps") {
        return Estimator::eps;
    }
    if (name == "knn") {
        return Estimator::knn;
    }
    throw ValidationError("unknown estimator '" + std::string(name) + "'");
}

namespace {

std::vector<double> lambda_range() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<std::size_t> int_range(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> out;
    for (std::size_t v = lo; v <= hi; ++v) {
        out.push_back(v);
    }
    return out;
}

bool is_clustering(Algorithm a) { return a == Algorithm::dbscan || a == Algorithm::dp; }

} // namespace

SweepGrid table4_grid() {
    SweepGrid g;
    g.lambdas = lambda_range();
    for (int step = 1; step <= 100; ++step) {
        g.eps_values.push_back(step / 100.0);
    }
    g.minpts = int_range(2, 10);
    g.clusters = int_range(2, 10);
    return g;
}

SweepGrid table7_grid() {
    SweepGrid g;
    g.lambdas = lambda_range();
    for (int pct = 5; pct <= 50; pct += 5) {
        g.k_fractions.push_back(pct / 100.0);
    }
    return g;
}

SweepGrid grid_preset(std::string_view name) {
    if (name == "table4") {
        return table4_grid();
    }
    if (name == "table7") {
        return table7_grid();
    }
    throw ValidationError("unknown grid preset '" + std::string(name) + "'");
}

std::optional<double> EvaluationReport::best_score() const {
    if (!best) {
        return std::nullopt;
    }
    return cells[*best].score;
}

namespace {

struct SweepContext {
    const Dataset& data;
    Algorithm algorithm;
    const SweepGrid& grid;
    std::vector<int> truth;
    EvaluationReport& report;
};

/// Algorithm parameter lists in the order cells are emitted.
std::vector<ParamList> algorithm_params(const SweepContext& ctx,
                                        std::optional<double> only_fraction) {
    std::vector<ParamList> out;
    switch (ctx.algorithm) {
    case Algorithm::dbscan:
        for (std::size_t minpts : ctx.grid.minpts) {
            for (double eps : ctx.grid.eps_values) {
                out.push_back({{"minpts", static_cast<double>(minpts)}, {"eps", eps}});
            }
        }
        break;
    case Algorithm::dp:
        for (double eps : ctx.grid.eps_values) {
            for (std::size_t k : ctx.grid.clusters) {
                out.push_back({{"eps", eps}, {"k", static_cast<double>(k)}});
            }
        }
        break;
    case Algorithm::knn:
    case Algorithm::lof:
        for (double fraction : ctx.grid.k_fractions) {
            if (!only_fraction || *only_fraction == fraction) {
                out.push_back({{"k_frac", fraction},
                               {"k", static_cast<double>(k_from_fraction(fraction, ctx.data.size()))}});
            }
        }
        break;
    }
    return out;
}

ParamList join(const ParamList& a, const ParamList& b) {
    ParamList out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

void push_failed(SweepContext& ctx, const ParamList& base, std::optional<double> only_fraction,
                 const std::string& error) {
    for (const auto& p : algorithm_params(ctx, only_fraction)) {
        ctx.report.cells.push_back({join(base, p), std::nullopt, error});
    }
}

void evaluate(SweepContext& ctx, const Matrix& dist, const ParamList& base,
              std::optional<double> only_fraction) {
    auto& cells = ctx.report.cells;
    const std::size_t n = dist.rows();
    switch (ctx.algorithm) {
    case Algorithm::dbscan: {
        const DbscanSweep runner(dist);
        for (std::size_t minpts : ctx.grid.minpts) {
            const auto results = runner.run(ctx.grid.eps_values, minpts);
            for (std::size_t e = 0; e < results.size(); ++e) {
                cells.push_back({join(base, {{"minpts", static_cast<double>(minpts)},
                                             {"eps", ctx.grid.eps_values[e]}}),
                                 f_measure(results[e].labels, ctx.truth), {}});
            }
        }
        break;
    }
    case Algorithm::dp: {
        std::vector<std::size_t> ks;
        for (std::size_t k : ctx.grid.clusters) {
            if (k >= 2 && k <= n) {
                ks.push_back(k);
            }
        }
        for (double eps : ctx.grid.eps_values) {
            const auto results = density_peaks(dist, eps, ks);
            std::size_t r = 0;
            for (std::size_t k : ctx.grid.clusters) {
                ParamList p = join(base, {{"eps", eps}, {"k", static_cast<double>(k)}});
                if (k >= 2 && k <= n) {
                    cells.push_back({std::move(p), f_measure(results[r++].labels, ctx.truth), {}});
                } else {
                    cells.push_back({std::move(p), std::nullopt, "k outside [2, n]"});
                }
            }
        }
        break;
    }
    case Algorithm::knn:
    case Algorithm::lof: {
        const KnnTable table(dist);
        for (const auto& p : algorithm_params(ctx, only_fraction)) {
            const auto k = static_cast<std::size_t>(p.back().second);
            try {
                const AnomalyScores scores =
                    ctx.algorithm == Algorithm::knn ? table.knn_scores(k) : lof_scores(dist, k);
                cells.push_back({join(base, p), auc(scores.scores, ctx.truth), {}});
            } catch (const DegenerateDataError& e) {
                cells.push_back({join(base, p), std::nullopt, e.what()});
            }
        }
        break;
    }
    }
}

} // namespace

EvaluationReport sweep(const Dataset& ds, Scaler scaler, Algorithm algorithm,
                       const SweepGrid& grid) {
    if (!ds.labels) {
        throw ValidationError("sweep needs ground-truth labels");
    }
    const bool clustering = is_clustering(algorithm);
    if (grid.estimator == Estimator::knn && clustering && scaler != Scaler::none &&
        scaler != Scaler::rescale) {
        throw ValidationError("the knn estimator is only available for anomaly algorithms");
    }

    EvaluationReport report;
    report.metric = clustering ? "f_measure" : "auc";
    report.scaler = scaler;
    report.algorithm = algorithm;

    const Dataset data = minmax_normalize(ds);
    SweepContext ctx{data, algorithm, grid, *ds.labels, report};
    if (algorithm_params(ctx, std::nullopt).empty()) {
        throw ValidationError("sweep grid has no cells for algorithm '" +
                              std::string(to_string(algorithm)) + "'");
    }

    // Runs one scaler setting; failures mark its cells instead of aborting.
    auto run_setting = [&](const ParamList& base, std::optional<double> only_fraction,
                           const std::function<Matrix()>& distances) {
        Matrix dist;
        try {
            dist = distances();
        } catch (const DegenerateDataError& e) {
            push_failed(ctx, base, only_fraction, e.what());
            return;
        } catch (const ValidationError& e) {
            push_failed(ctx, base, only_fraction, e.what());
            return;
        }
        evaluate(ctx, dist, base, only_fraction);
    };

    auto scaled_distances = [&](const Bandwidth& bw) -> Matrix {
        if (scaler == Scaler::dscale) {
            return dscale(pairwise_distances(data), bw).values;
        }
        const TransformResult result =
            cdf_transform_shift(data, {bw, grid.delta, grid.max_iterations});
        return pairwise_distances(result.data).values;
    };

    switch (scaler) {
    case Scaler::none:
        run_setting({}, std::nullopt, [&] { return pairwise_distances(data).values; });
        break;
    case Scaler::rescale:
        for (double lambda : grid.lambdas) {
            run_setting({{"lambda", lambda}, {"psi", static_cast<double>(grid.psi)}}, std::nullopt,
                        [&] { return pairwise_distances(rescale(data, lambda, grid.psi)).values; });
        }
        break;
    case Scaler::dscale:
    case Scaler::cdfts:
        if (grid.estimator == Estimator::knn) {
            for (double fraction : grid.k_fractions) {
                const std::size_t k = k_from_fraction(fraction, data.size());
                run_setting({{"bandwidth_k", static_cast<double>(k)}}, fraction,
                            [&] { return scaled_distances(KNearestBandwidth{k}); });
            }
        } else {
            for (double lambda : grid.lambdas) {
                run_setting({{"lambda", lambda}}, std::nullopt,
                            [&] { return scaled_distances(FixedBandwidth{lambda}); });
            }
        }
        break;
    }

    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        const auto& score = report.cells[c].score;
        if (score && (!report.best || *score > *report.cells[*report.best].score)) {
            report.best = c;
        }
    }
    return report;
}

} // namespace cdfts
