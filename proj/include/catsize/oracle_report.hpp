#pragma once

// Runs the closed-form oracle cases through the full distance pipeline and
// reports each check with its measured deviation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "catsize/distance.hpp"
#include "catsize/oracles.hpp"

namespace catsize {

/// `measured` must lie below `limit` (relation "<") or above it (">").
/// For closeness checks `measured` is the deviation from the oracle.
struct OracleCheck {
    std::string name;
    double measured = 0.0;
    std::string relation = "<";
    double limit = 0.0;
    bool passed = false;
};

struct OracleReport {
    std::vector<OracleCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
    }

    void add(std::string name, double deviation, double tolerance) {
        checks.push_back({std::move(name), deviation, "<", tolerance, deviation < tolerance});
    }

    void add_above(std::string name, double value, double bound) {
        checks.push_back({std::move(name), value, ">", bound, value > bound});
    }

    nlohmann::ordered_json json() const {
        nlohmann::ordered_json out;
        out["command"] = "oracles";
        out["passed"] = passed();
        out["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : checks)
            out["checks"].push_back({{"name", c.name},
                                     {"passed", c.passed},
                                     {"measured", c.measured},
                                     {"relation", c.relation},
                                     {"limit", c.limit}});
        return out;
    }
};

namespace detail {

inline std::string theta_label(double theta) {
    if (theta == std::numbers::pi / 4) return "pi/4";
    if (theta == std::numbers::pi / 2) return "pi/2";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", theta);
    return buf;
}

/// Largest per-entry gap between the pipeline distribution and lambda_d^2.
inline double bec_deviation(int n, double theta, double* mean_error = nullptr) {
    const auto [a, b] = bec_pair({n, theta});
    const auto dist = distance(a, b, boson_hops(a.basis()), {n + 2, 1e-10, 1e-12});
    const auto lambda = ghz_lambda({n, theta});
    double worst = 0.0;
    for (std::size_t d = 0; d < std::max(lambda.size(), dist.weights.size()); ++d) {
        const double expected = d < lambda.size() ? lambda[d] * lambda[d] : 0.0;
        worst = std::max(worst, std::abs(dist.at(d) - expected));
    }
    if (mean_error) *mean_error = std::abs(dist.mean - n * std::pow(std::sin(theta), 2));
    return worst;
}

}  // namespace detail

inline const std::vector<double>& oracle_angles() {
    static const std::vector<double> angles{0.1, 0.3, std::numbers::pi / 4, 1.0, std::numbers::pi / 2};
    return angles;
}

inline OracleReport run_oracles() {
    OracleReport report;

    double norm_dev = 0.0, mean_dev = 0.0;
    for (int n = 1; n <= 30; ++n)
        for (int k = 0; k < 20; ++k) {
            const double theta = k * (std::numbers::pi / 2) / 19.0;
            const auto lambda = ghz_lambda({n, theta});
            double norm = 0.0, mean = 0.0;
            for (std::size_t d = 0; d < lambda.size(); ++d) {
                norm += lambda[d] * lambda[d];
                mean += static_cast<double>(d) * lambda[d] * lambda[d];
            }
            norm_dev = std::max(norm_dev, std::abs(norm - 1.0));
            mean_dev = std::max(mean_dev, std::abs(mean / norm - n * std::pow(std::sin(theta), 2)));
        }
    report.add("ghz_lambda_normalization", norm_dev, 1e-12);
    report.add("ghz_lambda_mean", mean_dev, 1e-10);

    for (double theta : oracle_angles()) {
        double mean_error = 0.0;
        const double dev = detail::bec_deviation(10, theta, &mean_error);
        report.add("bec_n10_theta_" + detail::theta_label(theta), dev, 1e-8);
        report.add("bec_n10_theta_" + detail::theta_label(theta) + "_mean", mean_error, 1e-8);
    }

    double grid_dev = 0.0, grid_mean = 0.0;
    for (int n = 1; n <= 12; ++n)
        for (double theta : oracle_angles()) {
            double mean_error = 0.0;
            grid_dev = std::max(grid_dev, detail::bec_deviation(n, theta, &mean_error));
            grid_mean = std::max(grid_mean, mean_error);
        }
    report.add("bec_grid_n1_to_12", grid_dev, 1e-8);
    report.add("bec_grid_n1_to_12_mean", grid_mean, 1e-8);

    {
        const auto [a, b] = persistent_current_pair(6, {0, 1, 2}, {3, 4, 5});
        const auto dist = distance(a, b, fermion_bilinears(a.basis()), {12, 1e-10, 1e-12});
        report.add("fermion_three_moved", std::abs(dist.at(3) - 1.0), 1e-10);
    }

    {
        const auto [a, b] = asymmetric_pair(3);
        const auto ops = boson_bilinears(a.basis());
        const auto forward = distance(a, b, ops, {12, 1e-10, 1e-12});
        const auto backward = distance(b, a, ops, {12, 1e-10, 1e-12});
        report.add("asymmetric_forward_p1", std::abs(forward.at(1) - 1.0), 1e-10);
        report.add("asymmetric_backward_p1_below_one", backward.at(1), 1.0 - 1e-6);
        report.add_above("asymmetric_backward_p2_nonzero", backward.at(2), 1e-6);
    }

    {
        std::mt19937_64 rng(20070101);
        std::normal_distribution<double> g;
        const auto [a, b] = bec_pair({8, 0.7});
        const auto reference = distance(a, b, boson_bilinears(a.basis()), {12, 1e-10, 1e-12});
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::Matrix2cd m;
            for (auto& x : m.reshaped()) x = {g(rng), g(rng)};
            const Eigen::Matrix2cd u = Eigen::HouseholderQR<Eigen::Matrix2cd>(m).householderQ();
            const auto dist = distance(a, b, rotated_boson_bilinears(a.basis(), u), {12, 1e-10, 1e-12});
            for (std::size_t d = 0; d < std::max(dist.weights.size(), reference.weights.size()); ++d)
                worst = std::max(worst, std::abs(dist.at(d) - reference.at(d)));
        }
        report.add("basis_independence", worst, 1e-8);
    }
    return report;
}

}  // namespace catsize
