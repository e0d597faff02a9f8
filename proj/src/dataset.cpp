#include "cdfts/dataset.hpp"

#include "cdfts/error.hpp"
#include "cdfts/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace cdfts {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::optional<double> parse_double(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    if (text.empty()) {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::optional<int> parse_int(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

bool blank(std::string_view line) { return trim(line).empty(); }

} // namespace

Dataset make_dataset(Matrix values, std::optional<std::vector<int>> labels,
                     std::vector<std::string> columns) {
    if (values.rows() == 0 || values.cols() == 0) {
        throw ValidationError("dataset needs at least one point and one attribute");
    }
    for (double v : values.flat()) {
        if (!std::isfinite(v)) {
            throw ValidationError("dataset contains a non-finite value");
        }
    }
    if (labels && labels->size() != values.rows()) {
        throw ValidationError("label count does not match point count");
    }
    if (columns.empty()) {
        for (std::size_t j = 0; j < values.cols(); ++j) {
            columns.push_back("x" + std::to_string(j + 1));
        }
    } else if (columns.size() != values.cols()) {
        throw ValidationError("column name count does not match dimensionality");
    }
    Dataset ds;
    ds.values = std::move(values);
    ds.labels = std::move(labels);
    ds.columns = std::move(columns);
    return ds;
}

Dataset parse_csv(std::istream& in, const CsvReadOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!blank(line)) {
            have_header = true;
            break;
        }
    }
    if (!have_header) {
        throw ParseError("empty CSV file");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }

    const auto header = split_fields(line);
    std::optional<std::size_t> label_index;
    std::vector<std::string> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!options.label_column.empty() && header[c] == options.label_column && !label_index) {
            label_index = c;
        } else {
            columns.emplace_back(header[c]);
        }
    }
    if (options.require_label && !label_index) {
        throw ParseError("label column '" + options.label_column + "' not found", 1);
    }

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError("row " + std::to_string(line_no) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             line_no);
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (label_index && c == *label_index) {
                raw_labels.emplace_back(fields[c]);
                continue;
            }
            const auto value = parse_double(fields[c]);
            if (!value || !std::isfinite(*value)) {
                throw ParseError("non-numeric value '" + std::string(fields[c]) + "' at row " +
                                     std::to_string(line_no) + ", column " +
                                     std::to_string(c + 1) + " (" + std::string(header[c]) + ")",
                                 line_no, c + 1);
            }
            values.push_back(*value);
        }
        ++rows;
    }
    if (rows == 0) {
        throw ParseError("CSV file has a header but no data rows", 1);
    }
    if (columns.empty()) {
        throw ParseError("CSV file has no attribute columns", 1);
    }

    std::optional<std::vector<int>> labels;
    if (label_index) {
        std::vector<int> ids;
        ids.reserve(raw_labels.size());
        const bool numeric = std::all_of(raw_labels.begin(), raw_labels.end(),
                                         [](const std::string& s) { return parse_int(s).has_value(); });
        if (numeric) {
            for (const auto& s : raw_labels) {
                ids.push_back(*parse_int(s));
            }
        } else {
            std::map<std::string, int> seen;
            for (const auto& s : raw_labels) {
                const auto [it, inserted] = seen.emplace(s, static_cast<int>(seen.size()));
                ids.push_back(it->second);
            }
        }
        labels = std::move(ids);
    }

    const std::size_t dims = columns.size();
    Dataset ds = make_dataset(Matrix(rows, dims, std::move(values)), std::move(labels),
                              std::move(columns));
    if (label_index) {
        ds.label_column = options.label_column;
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const CsvReadOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_csv(in, options);
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (std::size_t j = 0; j < ds.columns.size(); ++j) {
        out << (j ? "," : "") << ds.columns[j];
    }
    if (ds.labels) {
        out << ',' << ds.label_column;
    }
    out << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t j = 0; j < ds.dims(); ++j) {
            out << (j ? "," : "") << format_number(ds.values(i, j));
        }
        if (ds.labels) {
            out << ',' << (*ds.labels)[i];
        }
        out << '\n';
    }
}

namespace {

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    writer(out);
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

} // namespace

void save_csv(const std::filesystem::path& path, const Dataset& ds) {
    write_file(path, [&](std::ostream& out) { write_csv(out, ds); });
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out << (j ? "," : "") << format_number(m(i, j));
        }
        out << '\n';
    }
}

void save_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    write_file(path, [&](std::ostream& out) { write_matrix_csv(out, m); });
}

Dataset minmax_normalize(Dataset ds) {
    const std::size_t n = ds.size();
    for (std::size_t j = 0; j < ds.dims(); ++j) {
        double lo = ds.values(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, ds.values(i, j));
            hi = std::max(hi, ds.values(i, j));
        }
        const double range = hi - lo;
        if (!(range > 0.0)) {
            for (std::size_t i = 0; i < n; ++i) {
                ds.values(i, j) = 0.0;
            }
            ds.warnings.push_back("attribute '" + ds.columns[j] + "' is constant; mapped to 0");
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            ds.values(i, j) = (ds.values(i, j) - lo) / range;
        }
    }
    return ds;
}

DistanceMatrix pairwise_distances(const Matrix& points) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    DistanceMatrix out;
    out.values = Matrix(n, n);
    out.dim = d;

    // Upper triangle per row, mirrored afterwards so s[i,j] and s[j,i] are
    // bitwise equal.
    parallel_for(0, n, [&](std::size_t i) {
        const auto xi = points.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto xj = points.row(j);
            double sum = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = xi[k] - xj[k];
                sum += diff * diff;
            }
            out.values(i, j) = std::sqrt(sum);
        }
    });
    double max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out.values(j, i) = out.values(i, j);
            max = std::max(max, out.values(i, j));
        }
    }
    out.max = max;
    return out;
}

DistanceMatrix pairwise_distances(const Dataset& ds) { return pairwise_distances(ds.values); }

} // namespace cdfts
