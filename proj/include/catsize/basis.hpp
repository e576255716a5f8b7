#pragma once

/* Finite occupation-number bases and states over them.
 *
 * Three flavors are supported:
 *   charge3   excess Cooper-pair numbers (n0, n1, n2) on three islands with
 *             n2 = -n0 - n1 and |n0|, |n1| <= delta_n;
 *   boson2    N bosons on two modes, (n, N - n);
 *   fermion   N fermions on M modes, one bit per mode.
 *
 * Mode and island indices are zero-based. Configurations are ordered
 * lexicographically on the occupation tuple.
 */

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "catsize/errors.hpp"

namespace catsize {

using cplx = std::complex<double>;
using Config = std::vector<int>;

enum class Flavor { charge3, boson2, fermion };

inline std::string to_string(Flavor flavor) {
    switch (flavor) {
        case Flavor::charge3: return "charge3";
        case Flavor::boson2: return "boson2";
        case Flavor::fermion: return "fermion";
    }
    return "unknown";
}

inline std::string to_string(const Config& config) {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < config.size(); ++k) {
        if (k) os << ',';
        os << config[k];
    }
    os << ')';
    return os.str();
}

/// Flavor-specific sizes. `delta_n` is used by charge3, `particles` by boson2
/// and fermion, `modes` by fermion only.
struct BasisParams {
    int delta_n = 0;
    int particles = 0;
    int modes = 0;

    friend bool operator==(const BasisParams&, const BasisParams&) = default;
};

class OccupationBasis {
public:
    static OccupationBasis charge3(int delta_n) {
        if (delta_n < 0) throw ParameterError("charge3 basis: delta_n must be >= 0");
        OccupationBasis b(Flavor::charge3, {delta_n, 0, 3});
        for (int n0 = -delta_n; n0 <= delta_n; ++n0)
            for (int n1 = -delta_n; n1 <= delta_n; ++n1) b.push({n0, n1, -n0 - n1});
        return b;
    }

    static OccupationBasis boson2(int particles) {
        if (particles < 0) throw ParameterError("boson2 basis: particle number must be >= 0");
        OccupationBasis b(Flavor::boson2, {0, particles, 2});
        for (int n = 0; n <= particles; ++n) b.push({n, particles - n});
        return b;
    }

    static OccupationBasis fermion(int modes, int particles) {
        if (modes < 0 || particles < 0 || particles > modes)
            throw ParameterError("fermion basis: need 0 <= N <= M");
        OccupationBasis b(Flavor::fermion, {0, particles, modes});
        Config bits(static_cast<std::size_t>(modes), 0);
        std::fill(bits.end() - particles, bits.end(), 1);
        do {
            b.push(bits);
        } while (std::next_permutation(bits.begin(), bits.end()));
        return b;
    }

    Flavor flavor() const noexcept { return flavor_; }
    const BasisParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return configs_.size(); }
    int modes() const noexcept { return params_.modes; }
    const std::vector<Config>& configs() const noexcept { return configs_; }
    const Config& config(std::size_t k) const { return configs_.at(k); }

    bool contains(const Config& config) const { return index_.count(config) != 0; }

    std::size_t index(const Config& config) const {
        auto it = index_.find(config);
        if (it == index_.end())
            throw LookupError("configuration " + to_string(config) + " not in " +
                              to_string(flavor_) + " basis");
        return it->second;
    }

    /// Two bases are interchangeable iff flavor and parameters agree.
    friend bool operator==(const OccupationBasis& a, const OccupationBasis& b) {
        return a.flavor_ == b.flavor_ && a.params_ == b.params_;
    }

private:
    OccupationBasis(Flavor flavor, BasisParams params) : flavor_(flavor), params_(params) {}

    void push(Config config) {
        index_.emplace(config, configs_.size());
        configs_.push_back(std::move(config));
    }

    Flavor flavor_;
    BasisParams params_;
    std::vector<Config> configs_;
    std::map<Config, std::size_t> index_;
};

using BasisPtr = std::shared_ptr<const OccupationBasis>;

inline BasisPtr enumerate_basis(Flavor flavor, const BasisParams& params) {
    switch (flavor) {
        case Flavor::charge3:
            return std::make_shared<const OccupationBasis>(OccupationBasis::charge3(params.delta_n));
        case Flavor::boson2:
            return std::make_shared<const OccupationBasis>(OccupationBasis::boson2(params.particles));
        case Flavor::fermion:
            return std::make_shared<const OccupationBasis>(
                OccupationBasis::fermion(params.modes, params.particles));
    }
    throw ParameterError("unknown basis flavor");
}

inline BasisPtr charge3_basis(int delta_n) { return enumerate_basis(Flavor::charge3, {delta_n, 0, 3}); }
inline BasisPtr boson2_basis(int particles) { return enumerate_basis(Flavor::boson2, {0, particles, 2}); }
inline BasisPtr fermion_basis(int modes, int particles) {
    return enumerate_basis(Flavor::fermion, {0, particles, modes});
}

inline bool same_basis(const BasisPtr& a, const BasisPtr& b) {
    return a == b || (a && b && *a == *b);
}

/// Complex amplitudes over an occupation basis.
class StateVector {
public:
    StateVector(BasisPtr basis, Eigen::VectorXcd amplitudes)
        : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
        if (!basis_) throw ContractError("state without basis");
        if (static_cast<std::size_t>(amplitudes_.size()) != basis_->size())
            throw ContractError("amplitude vector length does not match basis size");
    }

    static StateVector zero(BasisPtr basis) {
        const auto n = static_cast<Eigen::Index>(basis->size());
        return StateVector(std::move(basis), Eigen::VectorXcd::Zero(n));
    }

    const BasisPtr& basis() const noexcept { return basis_; }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
    std::size_t size() const noexcept { return basis_->size(); }
    cplx operator[](std::size_t k) const { return amplitudes_(static_cast<Eigen::Index>(k)); }

    double norm() const { return amplitudes_.norm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(amplitudes_.squaredNorm() - 1.0) <= tol; }

    StateVector normalized() const {
        const double n = norm();
        if (n == 0.0) throw ContractError("cannot normalize the zero vector");
        return StateVector(basis_, amplitudes_ / n);
    }

    StateVector conjugate() const { return StateVector(basis_, amplitudes_.conjugate()); }

private:
    BasisPtr basis_;
    Eigen::VectorXcd amplitudes_;
};

inline StateVector basis_state(const BasisPtr& basis, const Config& config) {
    auto state = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size())).eval();
    state(static_cast<Eigen::Index>(basis->index(config))) = 1.0;
    return StateVector(basis, std::move(state));
}

/// Builds a state from (config, amplitude) pairs. Not normalized.
inline StateVector superposition(const BasisPtr& basis,
                                 const std::vector<std::pair<Config, cplx>>& terms) {
    auto state = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size())).eval();
    for (const auto& [config, amp] : terms) state(static_cast<Eigen::Index>(basis->index(config))) += amp;
    return StateVector(basis, std::move(state));
}

/// <a|b>, conjugate-linear in `a`.
inline cplx inner(const StateVector& a, const StateVector& b) {
    if (!same_basis(a.basis(), b.basis())) throw BasisMismatchError("inner: states live in different bases");
    return a.amplitudes().dot(b.amplitudes());
}

}  // namespace catsize
