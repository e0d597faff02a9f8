#pragma once

#include "cdfts/matrix.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cdfts {

/// n points in d dimensions, optionally carrying per-point ground truth
/// (class ids for clustering, 0/1 flags for anomaly detection).
struct Dataset {
    Matrix values;
    std::vector<std::string> columns;
    std::optional<std::vector<int>> labels;
    std::string label_column = "label";
    /// Non-fatal notes produced along the way (e.g. constant attributes).
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return values.rows(); }
    std::size_t dims() const noexcept { return values.cols(); }
};

/// Builds a dataset after checking n >= 1, d >= 1, all entries finite and the
/// label count. Column names default to x1..xd.
Dataset make_dataset(Matrix values, std::optional<std::vector<int>> labels = std::nullopt,
                     std::vector<std::string> columns = {});

struct CsvReadOptions {
    /// Column holding ground truth. Empty disables label extraction.
    std::string label_column = "label";
    /// When false a missing label column is silently ignored.
    bool require_label = false;
};

/// Parses CSV text: header row, comma separated, decimal-point floats.
/// Labels may be integers or arbitrary strings; strings are mapped to ids in
/// order of first appearance.
Dataset parse_csv(std::istream& in, const CsvReadOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const CsvReadOptions& options = {});

/// Writes header + rows; the label column is appended last when present.
/// Numbers use the shortest representation that round-trips.
void write_csv(std::ostream& out, const Dataset& ds);
void save_csv(const std::filesystem::path& path, const Dataset& ds);

/// Headerless row-major dump, for distance matrices and similar.
void write_matrix_csv(std::ostream& out, const Matrix& m);
void save_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Shortest round-trip decimal form of a double.
std::string format_number(double value);

/// Maps every attribute onto [0,1] via (v - min) / (max - min). Constant
/// attributes become 0 and add a warning.
Dataset minmax_normalize(Dataset ds);

/// Symmetric Euclidean distances with zero diagonal.
struct DistanceMatrix {
    Matrix values;
    double max = 0.0;
    /// Dimensionality of the points the distances were computed from.
    std::size_t dim = 0;

    std::size_t size() const noexcept { return values.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values(i, j); }
    std::span<const double> row(std::size_t i) const noexcept { return values.row(i); }
};

DistanceMatrix pairwise_distances(const Matrix& points);
DistanceMatrix pairwise_distances(const Dataset& ds);

} // namespace cdfts
