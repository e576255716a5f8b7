#pragma once

/* Sparse second-quantized operators over an OccupationBasis.
 *
 * Hop images that leave the basis (charge truncation window, Pauli blocking,
 * empty source mode) are dropped, so every operator is the truncation of its
 * infinite-space counterpart.
 *
 * Flux-qubit units: energies in units of E_J, currents in units of
 * 2*pi*E_J/Phi_0. Island k of the three-junction loop is index k - 1 here.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "catsize/basis.hpp"
#include "catsize/errors.hpp"

namespace catsize {

using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

/// Largest entry of |M - M^dagger|.
inline double hermitian_defect(const SparseMatrix& m) {
    const SparseMatrix diff = m - SparseMatrix(m.adjoint());
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

class LinearOperator {
public:
    LinearOperator(BasisPtr basis, SparseMatrix matrix, bool hermitian = false)
        : basis_(std::move(basis)), matrix_(std::move(matrix)), hermitian_(hermitian) {
        const auto n = static_cast<Eigen::Index>(basis_->size());
        if (matrix_.rows() != n || matrix_.cols() != n)
            throw ContractError("operator matrix does not match basis size");
        matrix_.makeCompressed();
        if (hermitian_ && hermitian_defect(matrix_) > 1e-12)
            throw ContractError("operator flagged hermitian but M != M^dagger");
    }

    static LinearOperator from_triplets(BasisPtr basis, const std::vector<Triplet>& entries,
                                        bool hermitian = false) {
        const auto n = static_cast<Eigen::Index>(basis->size());
        SparseMatrix m(n, n);
        m.setFromTriplets(entries.begin(), entries.end());
        return LinearOperator(std::move(basis), std::move(m), hermitian);
    }

    const BasisPtr& basis() const noexcept { return basis_; }
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    bool hermitian() const noexcept { return hermitian_; }
    std::size_t size() const noexcept { return basis_->size(); }

    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

    std::vector<Triplet> entries() const {
        std::vector<Triplet> out;
        out.reserve(static_cast<std::size_t>(matrix_.nonZeros()));
        for (int k = 0; k < matrix_.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it)
                out.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        return out;
    }

    cplx element(std::size_t row, std::size_t col) const {
        return matrix_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
    }

    LinearOperator adjoint() const { return {basis_, SparseMatrix(matrix_.adjoint()), hermitian_}; }

    StateVector apply(const StateVector& state) const {
        if (!same_basis(basis_, state.basis())) throw BasisMismatchError("apply: operator and state bases differ");
        return StateVector(basis_, matrix_ * state.amplitudes());
    }

    StateVector operator()(const StateVector& state) const { return apply(state); }

    /// <a|O|b>
    cplx matrix_element(const StateVector& a, const StateVector& b) const { return inner(a, apply(b)); }
    cplx expectation(const StateVector& s) const { return matrix_element(s, s); }

    friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
        if (!same_basis(a.basis_, b.basis_)) throw BasisMismatchError("operator sum over different bases");
        return {a.basis_, SparseMatrix(a.matrix_ + b.matrix_), a.hermitian_ && b.hermitian_};
    }

    friend LinearOperator operator*(cplx s, const LinearOperator& a) {
        const bool herm = a.hermitian_ && s.imag() == 0.0;
        return {a.basis_, SparseMatrix(s * a.matrix_), herm};
    }

    friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
        if (!same_basis(a.basis_, b.basis_)) throw BasisMismatchError("operator product over different bases");
        return {a.basis_, SparseMatrix(a.matrix_ * b.matrix_), false};
    }

private:
    BasisPtr basis_;
    SparseMatrix matrix_;
    bool hermitian_;
};

namespace detail {

inline void require_flavor(const BasisPtr& basis, Flavor flavor, const char* what) {
    if (basis->flavor() != flavor)
        throw ParameterError(std::string(what) + ": requires a " + to_string(flavor) + " basis");
}

inline void require_mode(const BasisPtr& basis, int j, const char* what) {
    if (j < 0 || j >= basis->modes())
        throw ParameterError(std::string(what) + ": mode index " + std::to_string(j) + " out of range");
}

inline void require_distinct(int i, int j, const char* what) {
    if (i == j) throw ParameterError(std::string(what) + ": source and target must differ");
}

}  // namespace detail

/// e^{i(phi_i - phi_j)}: moves one Cooper pair from island j to island i with
/// matrix element 1.
inline LinearOperator pair_hop(const BasisPtr& basis, int i, int j) {
    detail::require_flavor(basis, Flavor::charge3, "pair_hop");
    detail::require_mode(basis, i, "pair_hop");
    detail::require_mode(basis, j, "pair_hop");
    detail::require_distinct(i, j, "pair_hop");
    std::vector<Triplet> entries;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        Config image = basis->config(col);
        ++image[static_cast<std::size_t>(i)];
        --image[static_cast<std::size_t>(j)];
        if (!basis->contains(image)) continue;
        entries.emplace_back(static_cast<int>(basis->index(image)), static_cast<int>(col), 1.0);
    }
    return LinearOperator::from_triplets(basis, entries);
}

/// Occupation of mode (or island) j, for any flavor.
inline LinearOperator number_op(const BasisPtr& basis, int j) {
    detail::require_mode(basis, j, "number_op");
    std::vector<Triplet> entries;
    for (std::size_t k = 0; k < basis->size(); ++k) {
        const int n = basis->config(k)[static_cast<std::size_t>(j)];
        if (n != 0) entries.emplace_back(static_cast<int>(k), static_cast<int>(k), static_cast<double>(n));
    }
    return LinearOperator::from_triplets(basis, entries, true);
}

/// c_i^dagger c_j on two bosonic modes, with ladder amplitude sqrt((n_i + 1) n_j).
inline LinearOperator boson_hop(const BasisPtr& basis, int i, int j) {
    detail::require_flavor(basis, Flavor::boson2, "boson_hop");
    detail::require_mode(basis, i, "boson_hop");
    detail::require_mode(basis, j, "boson_hop");
    detail::require_distinct(i, j, "boson_hop");
    std::vector<Triplet> entries;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const Config& from = basis->config(col);
        const int ni = from[static_cast<std::size_t>(i)];
        const int nj = from[static_cast<std::size_t>(j)];
        if (nj == 0) continue;
        Config image = from;
        ++image[static_cast<std::size_t>(i)];
        --image[static_cast<std::size_t>(j)];
        entries.emplace_back(static_cast<int>(basis->index(image)), static_cast<int>(col),
                             std::sqrt(static_cast<double>((ni + 1) * nj)));
    }
    return LinearOperator::from_triplets(basis, entries);
}

/// c_i^dagger c_j on M fermionic modes.
///
/// Sign convention: modes are ordered by index and the matrix element is
/// (-1)^(number of occupied modes strictly between i and j) in the source
/// configuration. Pauli-blocked or vacant-source configurations map to zero.
inline LinearOperator fermion_hop(const BasisPtr& basis, int i, int j) {
    detail::require_flavor(basis, Flavor::fermion, "fermion_hop");
    detail::require_mode(basis, i, "fermion_hop");
    detail::require_mode(basis, j, "fermion_hop");
    detail::require_distinct(i, j, "fermion_hop");
    const auto ui = static_cast<std::size_t>(i);
    const auto uj = static_cast<std::size_t>(j);
    std::vector<Triplet> entries;
    for (std::size_t col = 0; col < basis->size(); ++col) {
        const Config& from = basis->config(col);
        if (from[uj] == 0 || from[ui] == 1) continue;
        int between = 0;
        for (std::size_t k = std::min(ui, uj) + 1; k < std::max(ui, uj); ++k) between += from[k];
        Config image = from;
        image[ui] = 1;
        image[uj] = 0;
        entries.emplace_back(static_cast<int>(basis->index(image)), static_cast<int>(col),
                             between % 2 == 0 ? 1.0 : -1.0);
    }
    return LinearOperator::from_triplets(basis, entries);
}

struct FluxQubitParams {
    double ej_over_ec = 20.0;
    double alpha = 1.0;
    double f = 0.5;
    int delta_n = 6;

    void validate() const {
        if (!(ej_over_ec > 0.0) || !std::isfinite(ej_over_ec))
            throw ParameterError("E_J/E_C must be positive");
        if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be in (0, 1]");
        if (!std::isfinite(f)) throw ParameterError("frustration must be finite");
        if (delta_n < 1) throw ParameterError("delta_n must be >= 1");
        if (alpha > 1.0) std::cerr << "warning: alpha = " << alpha << " > 1\n";
    }
};

/// e^{2 pi i f}, exact at multiples of a quarter flux quantum.
inline cplx flux_phase(double f) {
    const double r = f - std::floor(f);
    if (r == 0.0) return {1.0, 0.0};
    if (r == 0.25) return {0.0, 1.0};
    if (r == 0.5) return {-1.0, 0.0};
    if (r == 0.75) return {0.0, -1.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * r);
}

/// Josephson tunneling term, with the flux phase on the alpha junction:
///   H_J = -1/2 [ hop(1,0) + hop(2,1) + alpha e^{i theta} hop(0,2) + h.c. ].
/// The alpha check is skipped so that alpha = 0 (broken ring) can be built.
inline LinearOperator josephson_hamiltonian(const FluxQubitParams& p, const BasisPtr& basis) {
    detail::require_flavor(basis, Flavor::charge3, "josephson_hamiltonian");
    const LinearOperator h10 = pair_hop(basis, 1, 0);
    const LinearOperator h21 = pair_hop(basis, 2, 1);
    SparseMatrix m = h10.matrix() + h21.matrix();
    if (p.alpha != 0.0) m += p.alpha * flux_phase(p.f) * pair_hop(basis, 0, 2).matrix();
    const SparseMatrix full = -0.5 * (m + SparseMatrix(m.adjoint()));
    return LinearOperator(basis, full, true);
}

/// Diagonal charging term in units of E_J.
///
/// With Q_k = 2e n_k and E_C = e^2 / 2C the energy of |n0, n1, n2> is
///   (4 / (E_J/E_C)) * [ n0^2 + n2^2 - (n0 - n2)^2 / (2 + 1/alpha) ].
inline double charging_energy(const FluxQubitParams& p, int n0, int n2) {
    if (p.alpha == 0.0) throw ParameterError("charging energy: alpha = 0 divides by zero");
    const double a = n0, c = n2;
    return 4.0 / p.ej_over_ec * (a * a + c * c - (a - c) * (a - c) / (2.0 + 1.0 / p.alpha));
}

inline LinearOperator charging_hamiltonian(const FluxQubitParams& p, const BasisPtr& basis) {
    detail::require_flavor(basis, Flavor::charge3, "charging_hamiltonian");
    if (p.alpha == 0.0) throw ParameterError("charging_hamiltonian: alpha = 0 divides by zero");
    std::vector<Triplet> entries;
    for (std::size_t k = 0; k < basis->size(); ++k) {
        const Config& c = basis->config(k);
        const double e = charging_energy(p, c[0], c[2]);
        if (e != 0.0) entries.emplace_back(static_cast<int>(k), static_cast<int>(k), e);
    }
    return LinearOperator::from_triplets(basis, entries, true);
}

inline LinearOperator flux_qubit_hamiltonian(const FluxQubitParams& p, const BasisPtr& basis) {
    return josephson_hamiltonian(p, basis) + charging_hamiltonian(p, basis);
}

/// I = -dH/dPhi. Only the alpha junction carries the flux phase, so
///   I = (i alpha / 2) [ e^{i theta} hop(0,2) - e^{-i theta} hop(2,0) ]
/// in units of 2 pi E_J / Phi_0. Purely off-diagonal in the charge basis.
inline LinearOperator current_operator(const FluxQubitParams& p, const BasisPtr& basis) {
    detail::require_flavor(basis, Flavor::charge3, "current_operator");
    const cplx u = flux_phase(p.f);
    const SparseMatrix x = u * pair_hop(basis, 0, 2).matrix();
    const SparseMatrix m = cplx(0.0, 0.5 * p.alpha) * (x - SparseMatrix(x.adjoint()));
    return LinearOperator(basis, m, true);
}

/// Loop-averaged current (1/3) sum_k I_k over the three junctions, each I_k
/// taken in the same circulation sense as current_operator. Gauge covariant,
/// and equal to current_operator in expectation on any eigenstate of H.
inline LinearOperator loop_current_operator(const FluxQubitParams& p, const BasisPtr& basis) {
    detail::require_flavor(basis, Flavor::charge3, "loop_current_operator");
    const SparseMatrix x10 = pair_hop(basis, 1, 0).matrix();
    const SparseMatrix x21 = pair_hop(basis, 2, 1).matrix();
    const SparseMatrix plain = cplx(0.0, 0.5) * (x10 - SparseMatrix(x10.adjoint()) + x21 - SparseMatrix(x21.adjoint()));
    const SparseMatrix m = (plain + current_operator(p, basis).matrix()) / 3.0;
    return LinearOperator(basis, m, true);
}

enum class CurrentKind { alpha_junction, loop };

inline LinearOperator current_operator(const FluxQubitParams& p, const BasisPtr& basis, CurrentKind kind) {
    return kind == CurrentKind::loop ? loop_current_operator(p, basis) : current_operator(p, basis);
}

}  // namespace catsize
