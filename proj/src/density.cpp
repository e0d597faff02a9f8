#include "cdfts/density.hpp"

#include "cdfts/error.hpp"
#include "cdfts/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cdfts {

namespace {

void check_index(const DistanceMatrix& s, std::size_t i) {
    if (i >= s.size()) {
        throw ValidationError("point index " + std::to_string(i) + " out of range");
    }
}

void check_k(const DistanceMatrix& s, std::size_t k) {
    if (k < 1 || k + 1 > s.size()) {
        throw ValidationError("k = " + std::to_string(k) + " outside [1, n-1] for n = " +
                              std::to_string(s.size()));
    }
}

void check_radius(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) {
        throw ValidationError("neighbourhood radius must be positive and finite");
    }
}

} // namespace

void validate_bandwidth(const Bandwidth& bw, const DistanceMatrix& s) {
    if (const auto* fixed = std::get_if<FixedBandwidth>(&bw)) {
        if (!(fixed->radius > 0.0) || fixed->radius > s.max) {
            throw ValidationError("bandwidth lambda = " + format_number(fixed->radius) +
                                  " outside (0, m] with m = " + format_number(s.max));
        }
    } else {
        check_k(s, std::get<KNearestBandwidth>(bw).k);
    }
}

std::string describe(const Bandwidth& bw) {
    if (const auto* fixed = std::get_if<FixedBandwidth>(&bw)) {
        return "lambda=" + format_number(fixed->radius);
    }
    return "k=" + std::to_string(std::get<KNearestBandwidth>(bw).k);
}

double ball_volume(std::size_t d, double r) { return std::pow(r, static_cast<double>(d)); }

std::vector<std::size_t> eps_neighbourhood(const DistanceMatrix& s, std::size_t i, double eps) {
    check_index(s, i);
    check_radius(eps);
    std::vector<std::size_t> out;
    const auto row = s.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j] <= eps) {
            out.push_back(j);
        }
    }
    return out;
}

std::size_t neighbourhood_count(const DistanceMatrix& s, std::size_t i, double eps) {
    check_index(s, i);
    const auto row = s.row(i);
    return static_cast<std::size_t>(
        std::count_if(row.begin(), row.end(), [eps](double v) { return v <= eps; }));
}

double pdf_eps(const DistanceMatrix& s, std::size_t i, double eps) {
    check_radius(eps);
    const double count = static_cast<double>(neighbourhood_count(s, i, eps));
    return count / (static_cast<double>(s.size()) * ball_volume(s.dim, eps));
}

double knn_distance(const DistanceMatrix& s, std::size_t i, std::size_t k) {
    check_index(s, i);
    check_k(s, k);
    std::vector<double> others;
    others.reserve(s.size() - 1);
    const auto row = s.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (j != i) {
            others.push_back(row[j]);
        }
    }
    auto kth = others.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(others.begin(), kth, others.end());
    return *kth;
}

double pdf_knn(const DistanceMatrix& s, std::size_t i, std::size_t k) {
    const double radius = knn_distance(s, i, k);
    if (!(radius > 0.0)) {
        throw DegenerateDataError("zero k-NN distance at point " + std::to_string(i) +
                                  " (duplicate points); deduplicate or jitter the data");
    }
    return static_cast<double>(k) / (static_cast<double>(s.size()) * ball_volume(s.dim, radius));
}

double density_ratio(const DistanceMatrix& s, std::size_t i, double gamma, double lambda) {
    check_radius(gamma);
    if (!(gamma < lambda)) {
        throw ValidationError("density ratio needs gamma < lambda");
    }
    return pdf_eps(s, i, gamma) / pdf_eps(s, i, lambda);
}

DensityEstimate estimate_density(const DistanceMatrix& s, const Bandwidth& bw) {
    validate_bandwidth(bw, s);
    const std::size_t n = s.size();
    DensityEstimate out{std::vector<double>(n), std::vector<double>(n)};
    if (const auto* fixed = std::get_if<FixedBandwidth>(&bw)) {
        parallel_for(0, n, [&](std::size_t i) {
            out.density[i] = pdf_eps(s, i, fixed->radius);
            out.radius[i] = fixed->radius;
        });
    } else {
        const std::size_t k = std::get<KNearestBandwidth>(bw).k;
        parallel_for(0, n, [&](std::size_t i) {
            out.radius[i] = knn_distance(s, i, k);
            out.density[i] = pdf_knn(s, i, k);
        });
    }
    return out;
}

} // namespace cdfts
