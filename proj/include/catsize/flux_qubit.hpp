#pragma once

/* One point of the flux-qubit study: diagonalize, extract |+I> and |-I>, and
 * measure the distance from |+I> to |-I>.
 */

#include <string>

#include "catsize/basis.hpp"
#include "catsize/distance.hpp"
#include "catsize/operators.hpp"
#include "catsize/spectra.hpp"

namespace catsize {

enum class Extraction { two_level, filter };

inline std::string to_string(Extraction e) { return e == Extraction::two_level ? "two_level" : "filter"; }
inline std::string to_string(FluxOperatorChoice c) {
    return c == FluxOperatorChoice::hops_only ? "hops_only" : "hops_and_numbers";
}
inline std::string to_string(CurrentKind k) { return k == CurrentKind::loop ? "loop" : "junction"; }

struct FluxQubitOptions {
    ChainOptions chain{};
    FluxOperatorChoice operators = FluxOperatorChoice::hops_and_numbers;
    Extraction extraction = Extraction::two_level;
    CurrentKind current = CurrentKind::alpha_junction;
    double weight_floor = 1e-6; ///< filter method only
    bool reverse = false;       ///< measure |-I> -> |+I> instead
};

struct FluxQubitPoint {
    FluxQubitParams params;
    BasisPtr basis;
    EigenDecomposition spectrum;
    CurrentStatePair states;
    double charge_fluctuation = 0.0; ///< ground state
    double gap = 0.0;                ///< E_1 - E_0
};

/// Diagonalization and current-state extraction, without the distance.
inline FluxQubitPoint prepare_flux_qubit(const FluxQubitParams& params, const FluxQubitOptions& opt = {}) {
    params.validate();
    const BasisPtr basis = charge3_basis(params.delta_n);
    EigenDecomposition eig = eig_hermitian(flux_qubit_hamiltonian(params, basis));
    const LinearOperator current = current_operator(params, basis, opt.current);
    CurrentStatePair states = opt.extraction == Extraction::two_level
                                  ? current_states_2d(eig, current)
                                  : current_states_filter(eig.vector(0), current, opt.weight_floor);
    const double dn = charge_fluctuation(eig.vector(0));
    const double gap = eig.eigenvalues(1) - eig.eigenvalues(0);
    return {params, basis, std::move(eig), std::move(states), dn, gap};
}

inline DistanceDistribution flux_qubit_distance(const FluxQubitPoint& point, const FluxQubitOptions& opt = {}) {
    const OperatorSet ops = flux_qubit_operator_set(point.basis, opt.operators);
    const StateVector& from = opt.reverse ? point.states.minus : point.states.plus;
    const StateVector& to = opt.reverse ? point.states.plus : point.states.minus;
    return distance(from, to, ops, opt.chain);
}

}  // namespace catsize
