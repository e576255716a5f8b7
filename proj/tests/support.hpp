#pragma once

// Test-only helpers: random generators and an independent reference for the
// subspace chain (sequential Gram-Schmidt, one candidate at a time).

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "catsize/basis.hpp"
#include "catsize/operators.hpp"

namespace catsize::support {

inline StateVector random_state(const BasisPtr& basis, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(basis->size()));
    for (auto& x : v) x = {g(rng), g(rng)};
    return StateVector(basis, v.normalized());
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (auto& x : a.reshaped()) x = {g(rng), g(rng)};
    return 0.5 * (a + a.adjoint());
}

inline Eigen::Matrix2cd random_unitary2(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::Matrix2cd a;
    for (auto& x : a.reshaped()) x = {g(rng), g(rng)};
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(a);
    return qr.householderQ();
}

/// Weights P(D = d) computed by growing each level with modified Gram-Schmidt
/// over single candidate vectors. A candidate is accepted when its residual
/// norm exceeds `tol` times its original norm.
inline std::vector<double> reference_weights(const StateVector& a, const StateVector& b,
                                             const std::vector<LinearOperator>& ops, int d_max,
                                             double tol = 1e-9) {
    std::vector<Eigen::VectorXcd> all{a.amplitudes().normalized()};
    std::vector<Eigen::VectorXcd> level{all.front()};
    std::vector<double> weights{std::norm(all.front().dot(b.amplitudes()))};
    for (int d = 1; d <= d_max && !level.empty(); ++d) {
        std::vector<Eigen::VectorXcd> next;
        for (const auto& v : level)
            for (const auto& op : ops) {
                Eigen::VectorXcd w = op.matrix() * v;
                const double original = w.norm();
                if (original == 0.0) continue;
                for (int pass = 0; pass < 2; ++pass)
                    for (const auto& q : all) w -= q * q.dot(w);
                if (w.norm() <= tol * original) continue;
                w.normalize();
                all.push_back(w);
                next.push_back(w);
            }
        if (next.empty()) break;
        double weight = 0.0;
        for (const auto& q : next) weight += std::norm(q.dot(b.amplitudes()));
        weights.push_back(weight);
        level = std::move(next);
    }
    return weights;
}

}  // namespace catsize::support
