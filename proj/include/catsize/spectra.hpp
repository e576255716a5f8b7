#pragma once

/* Dense hermitian diagonalization and the flux-qubit diagnostics built on it:
 * counterpropagating current states, charge fluctuation, current
 * distribution, and energy levels as a function of frustration.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "catsize/basis.hpp"
#include "catsize/errors.hpp"
#include "catsize/operators.hpp"
#include "catsize/parallel.hpp"

namespace catsize {

/// Relative tolerance under which two amplitude magnitudes count as tied when
/// choosing the phase reference.
inline constexpr double kPhaseTieTolerance = 1e-8;

/// Eigenvalues closer than this (absolute, current units) form one eigenspace.
inline constexpr double kCurrentMergeTolerance = 1e-9;

/// Rotates `v` so that its largest-magnitude amplitude is real positive.
/// Ties within kPhaseTieTolerance go to the lowest index.
inline void fix_phase(Eigen::Ref<Eigen::VectorXcd> v) {
    if (v.size() == 0) return;
    const double largest = v.cwiseAbs().maxCoeff();
    if (largest == 0.0) return;
    Eigen::Index ref = 0;
    while (std::abs(v(ref)) < largest * (1.0 - kPhaseTieTolerance)) ++ref;
    const cplx phase = std::conj(v(ref)) / std::abs(v(ref));
    v *= phase;
    v(ref) = std::abs(v(ref));
}

inline StateVector phase_fixed(const StateVector& s) {
    Eigen::VectorXcd v = s.amplitudes();
    fix_phase(v);
    return StateVector(s.basis(), std::move(v));
}

struct EigenDecomposition {
    BasisPtr basis;
    Eigen::VectorXd eigenvalues;   ///< ascending
    Eigen::MatrixXcd eigenvectors; ///< column k belongs to eigenvalues(k)

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    StateVector vector(std::size_t k) const {
        return StateVector(basis, eigenvectors.col(static_cast<Eigen::Index>(k)));
    }
};

/// Full dense decomposition of a hermitian operator with phase-fixed
/// eigenvectors. Real matrices go through the real solver.
inline EigenDecomposition eig_hermitian(const LinearOperator& h) {
    if (!h.hermitian()) throw ContractError("eig_hermitian: operator is not flagged hermitian");
    const Eigen::MatrixXcd dense = h.dense();
    EigenDecomposition out{h.basis(), {}, {}};
    if (dense.imag().cwiseAbs().maxCoeff() == 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense.real());
        if (solver.info() != Eigen::Success) throw InternalError("eig_hermitian: real solver failed");
        out.eigenvalues = solver.eigenvalues();
        out.eigenvectors = solver.eigenvectors().cast<cplx>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense);
        if (solver.info() != Eigen::Success) throw InternalError("eig_hermitian: complex solver failed");
        out.eigenvalues = solver.eigenvalues();
        out.eigenvectors = solver.eigenvectors();
    }
    for (Eigen::Index k = 0; k < out.eigenvectors.cols(); ++k) fix_phase(out.eigenvectors.col(k));
    return out;
}

/// The two counterpropagating current states. `current` is the positive-branch
/// expectation value, `current_minus` the other one (equal to -current at
/// half flux). `excluded_weight` is the zero-current weight dropped by the
/// filter method and stays 0 for the two-level method.
struct CurrentStatePair {
    StateVector plus;
    StateVector minus;
    double current = 0.0;
    double current_minus = 0.0;
    double excluded_weight = 0.0;
};

/// Diagonalizes the current operator inside span{ground, first excited}.
inline CurrentStatePair current_states_2d(const EigenDecomposition& eig, const LinearOperator& current_op) {
    if (eig.size() < 2) throw ContractError("current_states_2d: need at least two eigenvectors");
    if (!same_basis(eig.basis, current_op.basis()))
        throw BasisMismatchError("current_states_2d: eigenvectors and current operator bases differ");
    const Eigen::MatrixXcd low = eig.eigenvectors.leftCols(2);
    Eigen::Matrix2cd m = low.adjoint() * (current_op.matrix() * low);
    m = (0.5 * (m + m.adjoint())).eval();
    m(0, 0) = m(0, 0).real();
    m(1, 1) = m(1, 1).real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m);
    const double lo = solver.eigenvalues()(0);
    const double hi = solver.eigenvalues()(1);
    if (0.5 * (hi - lo) < 1e-10)
        throw DegenerateCurrentError("current_states_2d: current splitting below 1e-10");
    Eigen::VectorXcd plus = low * solver.eigenvectors().col(1);
    Eigen::VectorXcd minus = low * solver.eigenvectors().col(0);
    plus.normalize();
    minus.normalize();
    fix_phase(plus);
    fix_phase(minus);
    return {StateVector(eig.basis, std::move(plus)), StateVector(eig.basis, std::move(minus)), hi, lo, 0.0};
}

/// Spectral decomposition of the current operator, eigenvalues clustered
/// into eigenspaces.
class CurrentEigenbasis {
public:
    explicit CurrentEigenbasis(const LinearOperator& current_op) : eig_(eig_hermitian(current_op)) {
        const auto n = static_cast<Eigen::Index>(eig_.size());
        for (Eigen::Index k = 0; k < n;) {
            Eigen::Index end = k + 1;
            while (end < n && eig_.eigenvalues(end) - eig_.eigenvalues(end - 1) <= kCurrentMergeTolerance) ++end;
            clusters_.push_back({k, end, eig_.eigenvalues.segment(k, end - k).mean()});
            k = end;
        }
    }

    struct Cluster {
        Eigen::Index begin;
        Eigen::Index end;
        double value;
    };

    const EigenDecomposition& decomposition() const noexcept { return eig_; }
    const std::vector<Cluster>& clusters() const noexcept { return clusters_; }

    /// Coefficients of `state` in the current eigenbasis.
    Eigen::VectorXcd coefficients(const StateVector& state) const {
        if (!same_basis(eig_.basis, state.basis())) throw BasisMismatchError("current eigenbasis: basis mismatch");
        return eig_.eigenvectors.adjoint() * state.amplitudes();
    }

private:
    EigenDecomposition eig_;
    std::vector<Cluster> clusters_;
};

/// Keeps the positive- and negative-current components of the ground state.
/// The zero-current eigenspace is assigned to neither branch; its weight is
/// reported in `excluded_weight`.
inline CurrentStatePair current_states_filter(const StateVector& ground, const CurrentEigenbasis& currents,
                                              double weight_floor) {
    if (!ground.is_normalized(1e-10)) throw ContractError("current_states_filter: ground state not normalized");
    const Eigen::VectorXcd coeff = currents.coefficients(ground);
    const EigenDecomposition& eig = currents.decomposition();
    Eigen::VectorXcd pos = Eigen::VectorXcd::Zero(coeff.size());
    Eigen::VectorXcd neg = Eigen::VectorXcd::Zero(coeff.size());
    double excluded = 0.0;
    for (const auto& c : currents.clusters()) {
        for (Eigen::Index k = c.begin; k < c.end; ++k) {
            if (std::abs(c.value) <= kCurrentMergeTolerance)
                excluded += std::norm(coeff(k));
            else if (c.value > 0.0)
                pos(k) = coeff(k);
            else
                neg(k) = coeff(k);
        }
    }
    const double wp = pos.squaredNorm();
    const double wm = neg.squaredNorm();
    if (wp < weight_floor || wm < weight_floor)
        throw InsufficientWeightError("current_states_filter: a current branch carries too little weight");
    Eigen::VectorXcd plus = eig.eigenvectors * pos / std::sqrt(wp);
    Eigen::VectorXcd minus = eig.eigenvectors * neg / std::sqrt(wm);
    fix_phase(plus);
    fix_phase(minus);
    // The eigenbasis is diagonal for the current, so evaluate <I> there.
    double ip = 0.0, im = 0.0;
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
        ip += eig.eigenvalues(k) * std::norm(pos(k));
        im += eig.eigenvalues(k) * std::norm(neg(k));
    }
    return {StateVector(ground.basis(), std::move(plus)), StateVector(ground.basis(), std::move(minus)),
            ip / wp, im / wm, excluded};
}

inline CurrentStatePair current_states_filter(const StateVector& ground, const LinearOperator& current_op,
                                              double weight_floor) {
    return current_states_filter(ground, CurrentEigenbasis(current_op), weight_floor);
}

struct CurrentWeight {
    double current;
    double weight;
};

/// Weight of `state` in each eigenspace of the current operator, ascending.
inline std::vector<CurrentWeight> current_distribution(const StateVector& state, const CurrentEigenbasis& currents) {
    const Eigen::VectorXcd coeff = currents.coefficients(state);
    std::vector<CurrentWeight> out;
    out.reserve(currents.clusters().size());
    for (const auto& c : currents.clusters())
        out.push_back({c.value, coeff.segment(c.begin, c.end - c.begin).squaredNorm()});
    return out;
}

inline std::vector<CurrentWeight> current_distribution(const StateVector& state, const LinearOperator& current_op) {
    return current_distribution(state, CurrentEigenbasis(current_op));
}

/// Root-mean-square island charge fluctuation,
///   dN^2 = (1/3) sum_j ( <n_j^2> - <n_j>^2 ).
inline double charge_fluctuation(const StateVector& state) {
    const OccupationBasis& basis = *state.basis();
    if (basis.flavor() != Flavor::charge3) throw ParameterError("charge_fluctuation: requires a charge3 basis");
    double variance = 0.0;
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0, second = 0.0;
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const double p = std::norm(state[k]);
            const double n = basis.config(k)[j];
            mean += p * n;
            second += p * n * n;
        }
        variance += second - mean * mean;
    }
    return std::sqrt(std::max(0.0, variance / 3.0));
}

struct SpectrumTable {
    std::vector<double> f;
    std::vector<std::vector<double>> levels; ///< levels[row][k] = E_k(f[row])
};

/// The `levels` lowest eigenvalues of the flux-qubit Hamiltonian on `f_grid`;
/// `params.f` is ignored.
inline SpectrumTable spectrum_vs_frustration(const FluxQubitParams& params, const std::vector<double>& f_grid,
                                             std::size_t levels, unsigned jobs = 1) {
    if (f_grid.empty()) throw ParameterError("spectrum_vs_frustration: empty frustration grid");
    params.validate();
    const BasisPtr basis = charge3_basis(params.delta_n);
    levels = std::min(levels, basis->size());
    SpectrumTable table{f_grid, std::vector<std::vector<double>>(f_grid.size())};
    parallel_for(f_grid.size(), jobs, [&](std::size_t row) {
        FluxQubitParams p = params;
        p.f = f_grid[row];
        const EigenDecomposition eig = eig_hermitian(flux_qubit_hamiltonian(p, basis));
        table.levels[row].assign(eig.eigenvalues.data(), eig.eigenvalues.data() + levels);
    });
    return table;
}

}  // namespace catsize
