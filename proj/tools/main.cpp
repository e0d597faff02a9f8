// Command-line front end: gen, normalize, transform, cluster, detect, eval,
// sweep and run.

#include "cdfts/error.hpp"
#include "cdfts/parallel.hpp"
#include "cdfts/pipeline.hpp"
#include "cdfts/rescale1d.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

using namespace cdfts;
using nlohmann::json;

namespace {

void emit_json(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

void print_warnings(const Dataset& ds) {
    for (const auto& w : ds.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
}

std::vector<double> read_column(const std::string& path, const std::string& name) {
    const Dataset ds = load_csv(path, CsvReadOptions{"", false});
    for (std::size_t j = 0; j < ds.columns.size(); ++j) {
        if (ds.columns[j] == name) {
            std::vector<double> out(ds.size());
            for (std::size_t i = 0; i < ds.size(); ++i) {
                out[i] = ds.values(i, j);
            }
            return out;
        }
    }
    throw ParseError("column '" + name + "' not found in '" + path + "'", 1);
}

std::vector<int> read_truth(const std::string& path, const std::string& label_column) {
    const Dataset ds = load_csv(path, CsvReadOptions{label_column, true});
    return *ds.labels;
}

struct DataArgs {
    std::string input;
    std::string label_column = "label";
    double jitter = 0.0;
    std::uint64_t seed = 1;

    void attach(CLI::App* cmd, bool with_jitter) {
        cmd->add_option("--in", input, "Input CSV (header row)")->required();
        cmd->add_option("--label-column", label_column, "Ground-truth column, split off when present");
        if (with_jitter) {
            cmd->add_option("--jitter", jitter,
                            "Add uniform noise of this amplitude (breaks duplicate points)");
            cmd->add_option("--seed", seed, "Seed for --jitter");
        }
    }

    Dataset load() const {
        Dataset ds = load_csv(input, CsvReadOptions{label_column, false});
        return jitter > 0.0 ? jitter_dataset(minmax_normalize(std::move(ds))) : ds;
    }

    Dataset jitter_dataset(Dataset ds) const { return cdfts::jitter(std::move(ds), jitter, seed); }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Density equalisation by CDF transform-shift, with density-based clustering "
                 "and anomaly detection.\nThread count: CDFTS_THREADS environment variable."};
    app.require_subcommand(1);
    app.set_version_flag("--version", "cdfts 1.0.0");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic benchmark dataset");
    std::string family = "three-lines";
    SynthSpec spec;
    std::string gen_out;
    gen->add_option("--family", family,
                    "three-lines | four-clusters | anomaly-2d | anomaly-1d | gaussian-mixture");
    gen->add_option("--n", spec.size, "Point count (0 = family default)");
    gen->add_option("--seed", spec.seed, "Generator seed");
    gen->add_option("--anomaly-fraction", spec.anomaly_fraction, "Anomaly share for anomaly families");
    gen->add_option("--dims", spec.dims, "Dimensionality for gaussian-mixture");
    gen->add_option("--out", gen_out, "Output CSV")->required();

    // normalize
    auto* norm = app.add_subcommand("normalize", "Min-max normalise every attribute to [0,1]");
    DataArgs norm_args;
    std::string norm_out;
    norm_args.attach(norm, false);
    norm->add_option("--out", norm_out, "Output CSV")->required();

    // transform
    auto* transform = app.add_subcommand("transform", "Equalise density (cdfts) or ReScale");
    DataArgs tf_args;
    ScalerConfig tf;
    tf.kind = Scaler::cdfts;
    std::string tf_scaler = "cdfts";
    std::size_t tf_knn = 0;
    std::string tf_out, tf_trace, tf_distances, tf_scaled;
    tf_args.attach(transform, true);
    transform->add_option("--scaler", tf_scaler, "cdfts | rescale");
    transform->add_option("--lambda", tf.lambda, "Bandwidth lambda (normalised units)");
    transform->add_option("--knn-k", tf_knn, "Use a k-NN bandwidth with this k instead of lambda");
    transform->add_option("--delta", tf.delta, "Mean-shift threshold delta");
    transform->add_option("--max-iter", tf.max_iterations, "Iteration cap");
    transform->add_option("--psi", tf.psi, "ReScale grid size psi");
    transform->add_option("--out", tf_out, "Transformed CSV")->required();
    transform->add_option("--trace", tf_trace, "Trace JSON {iterations, deltas, reason}");
    transform->add_option("--export-distances", tf_distances,
                          "Write the output's Euclidean distance matrix (CSV, no header)");
    transform->add_option("--export-scaled", tf_scaled,
                          "Write the input's rescaled (dscale) distance matrix (CSV, no header)");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Density-based clustering");
    cluster->require_subcommand(1);
    DataArgs cl_args;
    AlgorithmConfig cl;
    std::string cl_out, cl_report;
    auto* cl_dbscan = cluster->add_subcommand("dbscan", "DBSCAN");
    auto* cl_dp = cluster->add_subcommand("dp", "Density peaks");
    for (auto* cmd : {cl_dbscan, cl_dp}) {
        cl_args.attach(cmd, false);
        cmd->add_option("--eps", cl.eps, "Neighbourhood radius eps")->required();
        cmd->add_option("--out", cl_out, "Labels CSV (index,label; -1 = noise)")->required();
        cmd->add_option("--report", cl_report, "Summary JSON (stdout when omitted)");
    }
    cl_dbscan->add_option("--minpts", cl.minpts, "Core threshold, self included")->required();
    cl_dp->add_option("--k", cl.clusters, "Number of clusters")->required();

    // detect
    auto* detect = app.add_subcommand("detect", "Distance-based anomaly scoring");
    detect->require_subcommand(1);
    DataArgs dt_args;
    AlgorithmConfig dt;
    std::string dt_out, dt_report;
    auto* dt_knn = detect->add_subcommand("knn", "k-th nearest neighbour distance");
    auto* dt_lof = detect->add_subcommand("lof", "Local outlier factor");
    for (auto* cmd : {dt_knn, dt_lof}) {
        dt_args.attach(cmd, true);
        cmd->add_option("--k-frac", dt.k_fraction, "k as a fraction of n (rounded, at least 1)")
            ->required();
        cmd->add_option("--out", dt_out, "Scores CSV (index,score,rank)")->required();
        cmd->add_option("--report", dt_report, "Summary JSON (stdout when omitted)");
    }

    // eval
    auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
    eval->require_subcommand(1);
    std::string ev_pred, ev_truth, ev_label = "label", ev_out;
    auto* ev_f = eval->add_subcommand("fmeasure", "Macro F-measure of a labels CSV");
    auto* ev_auc = eval->add_subcommand("auc", "ROC AUC of a scores CSV");
    ev_f->add_option("--pred", ev_pred, "Labels CSV from `cluster`")->required();
    ev_auc->add_option("--scores", ev_pred, "Scores CSV from `detect`")->required();
    for (auto* cmd : {ev_f, ev_auc}) {
        cmd->add_option("--truth", ev_truth, "CSV carrying the ground-truth column")->required();
        cmd->add_option("--label-column", ev_label, "Ground-truth column name");
        cmd->add_option("--out", ev_out, "Result JSON (stdout when omitted)");
    }

    // sweep
    auto* sw = app.add_subcommand("sweep", "Grid search reporting the best parameters");
    std::string sw_in, sw_family, sw_scaler = "none", sw_algo = "dbscan", sw_preset, sw_estimator = "eps";
    std::string sw_label = "label", sw_out;
    SynthSpec sw_spec;
    double sw_jitter = 0.0;
    auto* sw_in_opt = sw->add_option("--in", sw_in, "Labelled input CSV");
    sw->add_option("--family", sw_family, "Generate the input instead of reading it")
        ->excludes(sw_in_opt);
    sw->add_option("--n", sw_spec.size, "Generated point count");
    sw->add_option("--seed", sw_spec.seed, "Generator / jitter seed");
    sw->add_option("--label-column", sw_label, "Ground-truth column");
    sw->add_option("--scaler", sw_scaler, "none | rescale | dscale | cdfts");
    sw->add_option("--algo", sw_algo, "dbscan | dp | knn | lof");
    sw->add_option("--grid-preset", sw_preset, "table4 | table7 (default by algorithm)");
    sw->add_option("--estimator", sw_estimator,
                   "eps | knn: density estimator inside dscale/cdfts (knn ties it to the detector k)");
    sw->add_option("--jitter", sw_jitter, "Add uniform noise of this amplitude first");
    sw->add_option("--out", sw_out, "Report JSON (stdout when omitted)");

    // run
    auto* runcmd = app.add_subcommand("run", "Execute a pipeline described by a JSON config");
    std::string run_config;
    runcmd->add_option("--config", run_config, "Pipeline config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*gen) {
            spec.family = parse_family(family);
            const Dataset ds = generate(spec);
            save_csv(gen_out, ds);
        } else if (*norm) {
            const Dataset ds = minmax_normalize(norm_args.load());
            print_warnings(ds);
            save_csv(norm_out, ds);
        } else if (*transform) {
            tf.kind = parse_scaler(tf_scaler);
            if (tf.kind != Scaler::cdfts && tf.kind != Scaler::rescale) {
                throw ValidationError("transform --scaler must be cdfts or rescale");
            }
            if (tf_knn > 0) {
                tf.estimator = Estimator::knn;
                tf.k = tf_knn;
            }
            PipelineConfig probe;
            probe.input = tf_args.input;
            probe.scaler = tf;
            validate(probe);

            const Dataset ds = minmax_normalize(tf_args.load());
            if (!tf_scaled.empty()) {
                const Bandwidth bw = tf.estimator == Estimator::knn ? Bandwidth{KNearestBandwidth{tf.k}}
                                                                     : Bandwidth{FixedBandwidth{tf.lambda}};
                save_matrix_csv(tf_scaled, dscale(pairwise_distances(ds), bw).values);
            }
            const ScaledData out = apply_scaler(ds, tf);
            print_warnings(out.data);
            save_csv(tf_out, out.data);
            if (out.trace) {
                std::cerr << "iterations=" << out.trace->iterations
                          << " reason=" << to_string(out.trace->reason) << '\n';
                if (!tf_trace.empty()) {
                    emit_json(to_json(*out.trace), tf_trace);
                }
            }
            if (!tf_distances.empty()) {
                save_matrix_csv(tf_distances, pairwise_distances(out.data).values);
            }
        } else if (*cluster || *detect) {
            const bool clustering = static_cast<bool>(*cluster);
            PipelineConfig config;
            config.input = clustering ? cl_args.input : dt_args.input;
            config.label_column = clustering ? cl_args.label_column : dt_args.label_column;
            config.jitter = clustering ? 0.0 : dt_args.jitter;
            config.seed = clustering ? 1 : dt_args.seed;
            config.algorithm = clustering ? cl : dt;
            config.algorithm->kind = clustering ? (*cl_dbscan ? Algorithm::dbscan : Algorithm::dp)
                                                : (*dt_knn ? Algorithm::knn : Algorithm::lof);
            config.output.result = clustering ? cl_out : dt_out;
            const json report = run(config);
            emit_json(report, clustering ? cl_report : dt_report);
        } else if (*eval) {
            const auto truth = read_truth(ev_truth, ev_label);
            json result;
            if (*ev_f) {
                const auto pred = read_column(ev_pred, "label");
                std::vector<int> labels(pred.begin(), pred.end());
                result = {{"metric", "f_measure"}, {"value", f_measure(labels, truth)}};
            } else {
                const auto scores = read_column(ev_pred, "score");
                result = {{"metric", "auc"}, {"value", auc(scores, truth)}};
            }
            emit_json(result, ev_out);
        } else if (*sw) {
            const Algorithm algo = parse_algorithm(sw_algo);
            const bool clustering = algo == Algorithm::dbscan || algo == Algorithm::dp;
            SweepGrid grid = grid_preset(sw_preset.empty() ? (clustering ? "table4" : "table7") : sw_preset);
            grid.estimator = parse_estimator(sw_estimator);
            Dataset ds;
            json source;
            if (!sw_family.empty()) {
                sw_spec.family = parse_family(sw_family);
                ds = generate(sw_spec);
                source = {{"family", sw_family}, {"n", ds.size()}, {"seed", sw_spec.seed}};
            } else if (!sw_in.empty()) {
                ds = load_csv(sw_in, CsvReadOptions{sw_label, true});
                source = {{"input", sw_in}};
            } else {
                throw ValidationError("sweep needs --in or --family");
            }
            if (sw_jitter > 0.0) {
                ds = jitter(minmax_normalize(std::move(ds)), sw_jitter, sw_spec.seed);
            }
            const EvaluationReport report = sweep(ds, parse_scaler(sw_scaler), algo, grid);
            json j = to_json(report);
            j["config"] = {{"source", source},
                           {"scaler", sw_scaler},
                           {"algo", sw_algo},
                           {"grid_preset", sw_preset.empty() ? (clustering ? "table4" : "table7") : sw_preset},
                           {"estimator", sw_estimator},
                           {"jitter", sw_jitter}};
            emit_json(j, sw_out);
        } else if (*runcmd) {
            std::ifstream in(run_config);
            if (!in) {
                throw IoError("cannot open '" + run_config + "'");
            }
            json config_json;
            try {
                config_json = json::parse(in);
            } catch (const json::parse_error& e) {
                throw ValidationError(std::string("config is not valid JSON: ") + e.what());
            }
            const PipelineConfig config = config_from_json(config_json);
            const json report = run(config);
            if (report.contains("trace")) {
                std::cerr << "trace: " << report["trace"].dump() << '\n';
            }
            if (config.output.report.empty()) {
                std::cout << report.dump(2) << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitOk;
}
