#include "cdfts/pipeline.hpp"

#include "cdfts/error.hpp"
#include "cdfts/random.hpp"
#include "cdfts/rescale1d.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace cdfts {

using nlohmann::json;

int exit_code_for(const std::exception& error) {
    if (dynamic_cast<const ValidationError*>(&error)) {
        return kExitValidation;
    }
    if (dynamic_cast<const DegenerateDataError*>(&error)) {
        return kExitDegenerate;
    }
    if (dynamic_cast<const IoError*>(&error) || dynamic_cast<const ParseError*>(&error)) {
        return kExitIo;
    }
    return 1;
}

Dataset jitter(Dataset ds, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0)) {
        throw ValidationError("jitter amplitude must be nonnegative");
    }
    if (amplitude == 0.0) {
        return ds;
    }
    Random rng(seed);
    for (double& v : ds.values.flat()) {
        v += rng.uniform(-amplitude, amplitude);
    }
    return ds;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& rule) {
    throw ValidationError("invalid config: " + field + " " + rule);
}

bool anomaly_algorithm(Algorithm a) { return a == Algorithm::knn || a == Algorithm::lof; }

} // namespace

void validate(const PipelineConfig& c) {
    if (!c.input && !c.generate) {
        invalid("input", "is required (or set generate)");
    }
    if (c.input && c.generate) {
        invalid("input", "and generate are mutually exclusive");
    }
    if (c.generate) {
        const auto& g = *c.generate;
        if (g.size != 0 && g.size < 4) {
            invalid("generate.n", "must be at least 4");
        }
        if (!(g.anomaly_fraction > 0.0 && g.anomaly_fraction < 0.5)) {
            invalid("generate.anomaly_fraction", "must lie in (0, 0.5)");
        }
    }
    if (!(c.jitter >= 0.0)) {
        invalid("jitter", "must be nonnegative");
    }
    const auto& s = c.scaler;
    if (s.kind != Scaler::none) {
        if (s.estimator == Estimator::eps || s.kind == Scaler::rescale) {
            if (!(s.lambda > 0.0)) {
                invalid("scaler.lambda", "must be > 0");
            }
            if (s.kind == Scaler::rescale && !(s.lambda < 1.0)) {
                invalid("scaler.lambda", "must be < 1 for rescale");
            }
        } else if (s.k < 1) {
            invalid("scaler.k", "must be >= 1");
        }
        if (s.kind == Scaler::rescale && s.psi < 2) {
            invalid("scaler.psi", "must be >= 2");
        }
        if (s.kind == Scaler::cdfts) {
            if (!(s.delta > 0.0)) {
                invalid("scaler.delta", "must be > 0");
            }
            if (s.max_iterations < 1) {
                invalid("scaler.max_iter", "must be >= 1");
            }
        }
    }
    if (c.algorithm) {
        const auto& a = *c.algorithm;
        if (!anomaly_algorithm(a.kind) && !(a.eps > 0.0)) {
            invalid("algorithm.eps", "must be > 0");
        }
        if (a.kind == Algorithm::dbscan && a.minpts < 1) {
            invalid("algorithm.minpts", "must be >= 1");
        }
        if (a.kind == Algorithm::dp && a.clusters < 2) {
            invalid("algorithm.k", "must be >= 2");
        }
        if (anomaly_algorithm(a.kind) && !(a.k_fraction > 0.0 && a.k_fraction <= 1.0)) {
            invalid("algorithm.k_frac", "must lie in (0, 1]");
        }
    }
}

json to_json(const PipelineConfig& c) {
    json j;
    if (c.input) {
        j["input"] = c.input->string();
    }
    if (c.generate) {
        j["generate"] = {{"family", to_string(c.generate->family)},
                         {"n", c.generate->size},
                         {"seed", c.generate->seed},
                         {"anomaly_fraction", c.generate->anomaly_fraction}};
    }
    j["label_column"] = c.label_column;
    j["jitter"] = c.jitter;
    j["seed"] = c.seed;
    j["scaler"] = {{"kind", to_string(c.scaler.kind)},     {"lambda", c.scaler.lambda},
                   {"psi", c.scaler.psi},                  {"delta", c.scaler.delta},
                   {"max_iter", c.scaler.max_iterations},  {"estimator", to_string(c.scaler.estimator)},
                   {"k", c.scaler.k}};
    if (c.algorithm) {
        j["algorithm"] = {{"kind", to_string(c.algorithm->kind)},
                          {"eps", c.algorithm->eps},
                          {"minpts", c.algorithm->minpts},
                          {"k", c.algorithm->clusters},
                          {"k_frac", c.algorithm->k_fraction}};
    }
    j["output"] = {{"transformed", c.output.transformed.string()},
                   {"result", c.output.result.string()},
                   {"report", c.output.report.string()}};
    return j;
}

namespace {

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) {
        invalid(where.empty() ? "config" : where, "must be a JSON object");
    }
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            invalid((where.empty() ? "" : where + ".") + item.key(), "is not a known field");
        }
    }
}

template <typename T>
void read(const json& j, const char* key, const std::string& field, T& out) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        invalid(field, "has the wrong type");
    }
}

} // namespace

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    reject_unknown(j, "", {"input", "generate", "label_column", "jitter", "seed", "scaler",
                           "algorithm", "output"});
    if (j.contains("input")) {
        std::string path;
        read(j, "input", "input", path);
        c.input = path;
    }
    if (j.contains("generate")) {
        const json& g = j.at("generate");
        reject_unknown(g, "generate", {"family", "n", "seed", "anomaly_fraction"});
        SynthSpec spec;
        std::string family = "three-lines";
        read(g, "family", "generate.family", family);
        spec.family = parse_family(family);
        read(g, "n", "generate.n", spec.size);
        read(g, "seed", "generate.seed", spec.seed);
        read(g, "anomaly_fraction", "generate.anomaly_fraction", spec.anomaly_fraction);
        c.generate = spec;
    }
    read(j, "label_column", "label_column", c.label_column);
    read(j, "jitter", "jitter", c.jitter);
    read(j, "seed", "seed", c.seed);
    if (j.contains("scaler")) {
        const json& s = j.at("scaler");
        reject_unknown(s, "scaler", {"kind", "lambda", "psi", "delta", "max_iter", "estimator", "k"});
        std::string kind = "none";
        std::string estimator = "eps";
        read(s, "kind", "scaler.kind", kind);
        read(s, "estimator", "scaler.estimator", estimator);
        c.scaler.kind = parse_scaler(kind);
        c.scaler.estimator = parse_estimator(estimator);
        read(s, "lambda", "scaler.lambda", c.scaler.lambda);
        read(s, "psi", "scaler.psi", c.scaler.psi);
        read(s, "delta", "scaler.delta", c.scaler.delta);
        read(s, "max_iter", "scaler.max_iter", c.scaler.max_iterations);
        read(s, "k", "scaler.k", c.scaler.k);
    }
    if (j.contains("algorithm")) {
        const json& a = j.at("algorithm");
        reject_unknown(a, "algorithm", {"kind", "eps", "minpts", "k", "k_frac"});
        AlgorithmConfig algo;
        std::string kind = "dbscan";
        read(a, "kind", "algorithm.kind", kind);
        algo.kind = parse_algorithm(kind);
        read(a, "eps", "algorithm.eps", algo.eps);
        read(a, "minpts", "algorithm.minpts", algo.minpts);
        read(a, "k", "algorithm.k", algo.clusters);
        read(a, "k_frac", "algorithm.k_frac", algo.k_fraction);
        c.algorithm = algo;
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, "output", {"transformed", "result", "report"});
        std::string path;
        read(o, "transformed", "output.transformed", path);
        c.output.transformed = path;
        path.clear();
        read(o, "result", "output.result", path);
        c.output.result = path;
        path.clear();
        read(o, "report", "output.report", path);
        c.output.report = path;
    }
    return c;
}

json to_json(const TransformTrace& trace) {
    return {{"iterations", trace.iterations},
            {"deltas", trace.deltas},
            {"reason", to_string(trace.reason)}};
}

json to_json(const EvaluationReport& report) {
    json cells = json::array();
    for (const auto& cell : report.cells) {
        json params = json::object();
        for (const auto& [key, value] : cell.params) {
            params[key] = value;
        }
        json entry = {{"params", params}};
        if (cell.score) {
            entry["score"] = *cell.score;
        } else {
            entry["error"] = cell.error;
        }
        cells.push_back(std::move(entry));
    }
    json best = nullptr;
    if (report.best) {
        json params = json::object();
        for (const auto& [key, value] : report.cells[*report.best].params) {
            params[key] = value;
        }
        best = {{"score", *report.cells[*report.best].score}, {"params", params}};
    }
    return {{"metric", report.metric},
            {"scaler", to_string(report.scaler)},
            {"algorithm", to_string(report.algorithm)},
            {"best", best},
            {"cells", cells}};
}

namespace {

Bandwidth bandwidth_of(const ScalerConfig& s) {
    if (s.estimator == Estimator::knn) {
        return KNearestBandwidth{s.k};
    }
    return FixedBandwidth{s.lambda};
}

} // namespace

ScaledData apply_scaler(const Dataset& ds, const ScalerConfig& scaler) {
    Dataset data = minmax_normalize(ds);
    switch (scaler.kind) {
    case Scaler::none:
    case Scaler::dscale:
        return {std::move(data), std::nullopt};
    case Scaler::rescale:
        return {rescale(std::move(data), scaler.lambda, scaler.psi), std::nullopt};
    case Scaler::cdfts: {
        TransformResult r = cdf_transform_shift(
            std::move(data), {bandwidth_of(scaler), scaler.delta, scaler.max_iterations});
        return {std::move(r.data), std::move(r.trace)};
    }
    }
    throw ValidationError("unknown scaler");
}

Matrix algorithm_distances(const ScaledData& scaled, const ScalerConfig& scaler) {
    const DistanceMatrix s = pairwise_distances(scaled.data);
    if (scaler.kind == Scaler::dscale) {
        return dscale(s, bandwidth_of(scaler)).values;
    }
    return s.values;
}

namespace {

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

} // namespace

json run(const PipelineConfig& config) {
    validate(config);
    Dataset ds = config.generate
                     ? generate(*config.generate)
                     : load_csv(*config.input, CsvReadOptions{config.label_column, false});
    ds = jitter(minmax_normalize(std::move(ds)), config.jitter, config.seed);

    json report;
    report["config"] = to_json(config);
    report["n"] = ds.size();
    report["d"] = ds.dims();

    const ScaledData scaled = apply_scaler(ds, config.scaler);
    if (scaled.trace) {
        report["trace"] = to_json(*scaled.trace);
    }
    report["warnings"] = scaled.data.warnings;
    if (!config.output.transformed.empty()) {
        save_csv(config.output.transformed, scaled.data);
    }

    if (config.algorithm) {
        const Matrix dist = algorithm_distances(scaled, config.scaler);
        const AlgorithmConfig& algo = *config.algorithm;
        json result = {{"algorithm", to_string(algo.kind)}};
        std::ostringstream table;
        if (anomaly_algorithm(algo.kind)) {
            const std::size_t k = k_from_fraction(algo.k_fraction, ds.size());
            const AnomalyScores scores =
                algo.kind == Algorithm::knn ? knn_scores(dist, k) : lof_scores(dist, k);
            const auto rank = scores.ranking();
            table << "index,score,rank\n";
            for (std::size_t i = 0; i < ds.size(); ++i) {
                table << i << ',' << format_number(scores.scores[i]) << ',' << rank[i] << '\n';
            }
            result["k"] = k;
            if (ds.labels) {
                report["metric"] = {{"name", "auc"}, {"value", auc(scores.scores, *ds.labels)}};
            }
        } else {
            const Clustering c = algo.kind == Algorithm::dbscan
                                     ? dbscan(dist, algo.eps, algo.minpts)
                                     : density_peaks(dist, algo.eps, algo.clusters);
            table << "index,label\n";
            std::size_t noise = 0;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                table << i << ',' << c.labels[i] << '\n';
                noise += c.labels[i] == kNoise;
            }
            result["cluster_count"] = c.cluster_count;
            result["noise"] = noise;
            if (ds.labels) {
                report["metric"] = {{"name", "f_measure"},
                                    {"value", f_measure(c.labels, *ds.labels)}};
            }
        }
        report["result"] = result;
        if (!config.output.result.empty()) {
            std::ofstream out(config.output.result);
            if (!out) {
                throw IoError("cannot write '" + config.output.result.string() + "'");
            }
            out << table.str();
        }
    }

    if (!config.output.report.empty()) {
        write_json(config.output.report, report);
    }
    return report;
}

} // namespace cdfts
