#pragma once

/* Closed-form reference cases for the distance measure.
 *
 * - Two Bose condensates in single-particle states with overlap cos(theta):
 *   lambda_d = sqrt(C(N, d)) sin^d(theta) cos^(N-d)(theta), a binomial law with
 *   p = sin^2(theta) and mean N p.
 * - (|N,0> + |0,N>)/sqrt(2) versus |N-1,1>, where the distance is not symmetric.
 * - Two Slater determinants differing in k occupied modes, at distance k.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "catsize/basis.hpp"
#include "catsize/errors.hpp"

namespace catsize {

struct GhzParams {
    int n_particles = 1;
    double theta = 0.0;

    void validate() const {
        if (n_particles < 1) throw ParameterError("GHZ oracle: particle number must be positive");
        if (!(theta >= 0.0 && theta <= std::acos(-1.0) / 2.0 + 1e-15))
            throw ParameterError("GHZ oracle: theta must lie in [0, pi/2]");
    }
};

/// C(n, k) as a double; exact integer arithmetic up to n = 20, log-gamma above.
inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n <= 20) {
        std::uint64_t c = 1;
        k = std::min(k, n - k);
        for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
        return static_cast<double>(c);
    }
    return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

inline std::vector<double> ghz_lambda(const GhzParams& p) {
    p.validate();
    const double s = std::sin(p.theta), c = std::cos(p.theta);
    std::vector<double> lambda(static_cast<std::size_t>(p.n_particles) + 1);
    for (int d = 0; d <= p.n_particles; ++d)
        lambda[static_cast<std::size_t>(d)] =
            std::sqrt(binomial(p.n_particles, d)) * std::pow(s, d) * std::pow(c, p.n_particles - d);
    return lambda;
}

struct StatePair {
    StateVector a;
    StateVector b;
};

/// A = |N, 0>, B = (cos(theta) c_0^dagger + sin(theta) c_1^dagger)^N |vac> / sqrt(N!).
inline StatePair bec_pair(const GhzParams& p) {
    const std::vector<double> lambda = ghz_lambda(p);
    const BasisPtr basis = boson2_basis(p.n_particles);
    const int n = p.n_particles;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
    for (int d = 0; d <= n; ++d) b(static_cast<Eigen::Index>(basis->index({n - d, d}))) = lambda[static_cast<std::size_t>(d)];
    return {basis_state(basis, {n, 0}), StateVector(basis, std::move(b))};
}

/// A = (|N,0> + |0,N>)/sqrt(2), B = |N-1, 1>.
inline StatePair asymmetric_pair(int n) {
    if (n < 2) throw ParameterError("asymmetric_pair: need N >= 2");
    const BasisPtr basis = boson2_basis(n);
    const double h = 1.0 / std::sqrt(2.0);
    return {superposition(basis, {{{n, 0}, h}, {{0, n}, h}}), basis_state(basis, {n - 1, 1})};
}

/// Slater determinants over `modes` fermionic modes with the given occupied sets.
inline StatePair persistent_current_pair(int modes, const std::vector<int>& occupied_a,
                                         const std::vector<int>& occupied_b) {
    const std::set<int> sa(occupied_a.begin(), occupied_a.end());
    const std::set<int> sb(occupied_b.begin(), occupied_b.end());
    if (sa.size() != occupied_a.size() || sb.size() != occupied_b.size())
        throw ParameterError("persistent_current_pair: repeated mode index");
    if (sa.size() != sb.size()) throw ParameterError("persistent_current_pair: unequal particle numbers");
    auto occupation = [modes](const std::set<int>& s) {
        Config c(static_cast<std::size_t>(modes), 0);
        for (int k : s) {
            if (k < 0 || k >= modes) throw ParameterError("persistent_current_pair: mode index out of range");
            c[static_cast<std::size_t>(k)] = 1;
        }
        return c;
    };
    const Config ca = occupation(sa), cb = occupation(sb);
    const BasisPtr basis = fermion_basis(modes, static_cast<int>(sa.size()));
    return {basis_state(basis, ca), basis_state(basis, cb)};
}

/// Number of particles that must change mode to turn one determinant into the other.
inline int slater_distance(const std::vector<int>& occupied_a, const std::vector<int>& occupied_b) {
    const std::set<int> sb(occupied_b.begin(), occupied_b.end());
    return static_cast<int>(std::count_if(occupied_a.begin(), occupied_a.end(), [&](int k) { return !sb.count(k); }));
}

}  // namespace catsize
