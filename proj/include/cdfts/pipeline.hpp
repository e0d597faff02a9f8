#pragma once

#include "cdfts/evaluation.hpp"
#include "cdfts/synthgen.hpp"
#include "cdfts/transform_shift.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <optional>
#include <string>

namespace cdfts {

/// Process exit codes shared by every CLI command.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 2,
    kExitDegenerate = 3,
    kExitIo = 4,
};

/// Maps a library exception onto its exit code (unknown errors map to 1).
int exit_code_for(const std::exception& error);

/// Adds seeded uniform noise in [-amplitude, amplitude] to every coordinate;
/// the usual remedy for duplicate points under k-NN bandwidths.
Dataset jitter(Dataset ds, double amplitude, std::uint64_t seed);

struct ScalerConfig {
    Scaler kind = Scaler::none;
    double lambda = 0.1;
    std::size_t psi = 100;
    double delta = 0.015;
    std::size_t max_iterations = 100;
    Estimator estimator = Estimator::eps;
    /// k-NN bandwidth for Estimator::knn.
    std::size_t k = 10;
};

struct AlgorithmConfig {
    Algorithm kind = Algorithm::dbscan;
    double eps = 0.05;
    std::size_t minpts = 5;
    std::size_t clusters = 2;
    double k_fraction = 0.05;
};

struct OutputConfig {
    std::filesystem::path transformed;
    std::filesystem::path result;
    std::filesystem::path report;
};

struct PipelineConfig {
    std::optional<std::filesystem::path> input;
    std::optional<SynthSpec> generate;
    std::string label_column = "label";
    double jitter = 0.0;
    std::uint64_t seed = 1;
    ScalerConfig scaler;
    std::optional<AlgorithmConfig> algorithm;
    OutputConfig output;
};

/// Throws ValidationError naming the offending field.
void validate(const PipelineConfig& config);

nlohmann::json to_json(const PipelineConfig& config);
/// Unknown keys are rejected; missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TransformTrace& trace);
nlohmann::json to_json(const EvaluationReport& report);

/// Loads (or generates) the data, normalises it, applies the scaler.
/// The trace is set when the scaler is cdfts.
struct ScaledData {
    Dataset data;
    std::optional<TransformTrace> trace;
};
ScaledData apply_scaler(const Dataset& ds, const ScalerConfig& scaler);

/// Distances the algorithm should see: dscale yields row-referenced scaled
/// distances of the normalised data; everything else Euclidean distances.
Matrix algorithm_distances(const ScaledData& scaled, const ScalerConfig& scaler);

/// Runs the whole pipeline, writes every configured artifact and returns the
/// JSON report (config embedded). Errors propagate as library exceptions.
nlohmann::json run(const PipelineConfig& config);

} // namespace cdfts
