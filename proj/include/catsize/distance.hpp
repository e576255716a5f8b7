#pragma once

/* Many-body distance between two states with equal particle number.
 *
 * Starting from H_0 = span{|A>}, every operator of an OperatorSet is applied
 * to every basis vector of H_d; the span of the results, with everything in
 * H_0 + ... + H_d projected out, is H_{d+1}. Expanding |B> over the chain gives
 * weights P(D = d) = |lambda_d|^2 and the mean distance.
 *
 * Numerical rank of each new block is decided by a thin SVD of the projected
 * candidate matrix: left singular vectors with
 *     sigma > max(rank_tol * sigma_max, noise floor)
 * are kept, and an empty block (sigma_max < rank_tol) ends the chain. The noise
 * floor is the rounding level of the projection, sqrt(n) * eps * |C|_F, with C
 * the unprojected candidates.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "catsize/basis.hpp"
#include "catsize/errors.hpp"
#include "catsize/operators.hpp"

namespace catsize {

struct OperatorSet {
    std::vector<LinearOperator> ops;
    std::string label;

    const BasisPtr& basis() const {
        if (ops.empty()) throw ContractError("operator set '" + label + "' is empty");
        return ops.front().basis();
    }

    void validate() const {
        const BasisPtr& b = basis();
        for (const auto& op : ops)
            if (!same_basis(op.basis(), b))
                throw BasisMismatchError("operator set '" + label + "' mixes bases");
    }

    std::size_t size() const noexcept { return ops.size(); }
};

struct ChainOptions {
    int d_max = 12;
    double rank_tol = 1e-10;
    double weight_tol = 1e-6;
};

struct SubspaceChain {
    BasisPtr basis;
    std::vector<Eigen::MatrixXcd> blocks; ///< orthonormal columns spanning H_d
    bool exhausted = false;

    std::vector<std::size_t> dims() const {
        std::vector<std::size_t> out;
        out.reserve(blocks.size());
        for (const auto& b : blocks) out.push_back(static_cast<std::size_t>(b.cols()));
        return out;
    }

    std::size_t total_dim() const {
        std::size_t n = 0;
        for (const auto& b : blocks) n += static_cast<std::size_t>(b.cols());
        return n;
    }

    StateVector vector(std::size_t block, std::size_t k) const {
        return StateVector(basis, blocks.at(block).col(static_cast<Eigen::Index>(k)));
    }
};

/// Grows a SubspaceChain one level at a time.
class ChainBuilder {
public:
    ChainBuilder(const StateVector& source, const OperatorSet& ops, double rank_tol)
        : ops_(&ops), rank_tol_(rank_tol) {
        ops.validate();
        if (!same_basis(source.basis(), ops.basis()))
            throw BasisMismatchError("generate_chain: source state and operators use different bases");
        if (!source.is_normalized(1e-10)) throw ContractError("generate_chain: source state not normalized");
        if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw ParameterError("generate_chain: rank_tol must be in (0, 1)");
        chain_.basis = source.basis();
        chain_.blocks.push_back(source.amplitudes().normalized());
        span_ = chain_.blocks.front();
    }

    const SubspaceChain& chain() const noexcept { return chain_; }
    SubspaceChain release() && { return std::move(chain_); }
    bool exhausted() const noexcept { return chain_.exhausted; }
    std::size_t depth() const noexcept { return chain_.blocks.size() - 1; }

    /// Appends H_{d+1}. Returns false, and marks the chain exhausted, if the
    /// new block is empty.
    bool extend() {
        if (chain_.exhausted) return false;
        const Eigen::MatrixXcd& last = chain_.blocks.back();
        const Eigen::Index n = last.rows();
        const Eigen::Index k = last.cols();
        Eigen::MatrixXcd cand(n, k * static_cast<Eigen::Index>(ops_->size()));
        for (std::size_t o = 0; o < ops_->size(); ++o)
            cand.middleCols(static_cast<Eigen::Index>(o) * k, k) = ops_->ops[o].matrix() * last;

        const double noise = std::sqrt(static_cast<double>(n)) * std::numeric_limits<double>::epsilon() * cand.norm();
        for (int pass = 0; pass < 2; ++pass) cand -= span_ * (span_.adjoint() * cand);

        Eigen::BDCSVD<Eigen::MatrixXcd> svd(cand, Eigen::ComputeThinU);
        const Eigen::VectorXd& sigma = svd.singularValues();
        const double sigma_max = sigma.size() ? sigma(0) : 0.0;
        if (sigma_max < rank_tol_ || sigma_max <= noise) {
            chain_.exhausted = true;
            return false;
        }
        const double cut = std::max(rank_tol_ * sigma_max, noise);
        Eigen::Index rank = 0;
        while (rank < sigma.size() && sigma(rank) > cut) ++rank;

        if (span_.cols() + rank > n)
            throw InternalError("generate_chain: chain dimension exceeds basis size; rank_tol too small");

        Eigen::MatrixXcd block = svd.matrixU().leftCols(rank);
        block -= span_ * (span_.adjoint() * block);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
        block = qr.householderQ() * Eigen::MatrixXcd::Identity(n, rank);

        Eigen::MatrixXcd grown(n, span_.cols() + rank);
        grown << span_, block;
        span_ = std::move(grown);
        chain_.blocks.push_back(std::move(block));
        return true;
    }

private:
    const OperatorSet* ops_;
    double rank_tol_;
    SubspaceChain chain_;
    Eigen::MatrixXcd span_; ///< all blocks side by side
};

inline SubspaceChain generate_chain(const StateVector& source, const OperatorSet& ops, int d_max,
                                    double rank_tol = 1e-10) {
    if (d_max < 0) throw ParameterError("generate_chain: d_max must be >= 0");
    ChainBuilder builder(source, ops, rank_tol);
    while (static_cast<int>(builder.depth()) < d_max && builder.extend()) {
    }
    return std::move(builder).release();
}

struct DistanceDistribution {
    std::vector<double> weights; ///< P(D = d), d = 0 .. size - 1
    double residual = 0.0;       ///< weight of the target outside the chain
    double mean = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::size_t> dims; ///< dimension of each generated H_d
    bool exhausted = false;

    double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
    double at(std::size_t d) const { return d < weights.size() ? weights[d] : 0.0; }
};

inline double average_distance(const std::vector<double>& weights) {
    double total = 0.0, moment = 0.0;
    for (std::size_t d = 0; d < weights.size(); ++d) {
        total += weights[d];
        moment += static_cast<double>(d) * weights[d];
    }
    if (!(total > 0.0)) throw ContractError("average_distance: all weights are zero");
    return moment / total;
}

inline double average_distance(const DistanceDistribution& dist) { return average_distance(dist.weights); }

namespace detail {

inline double block_weight(const Eigen::MatrixXcd& block, const Eigen::VectorXcd& target) {
    return (block.adjoint() * target).squaredNorm();
}

inline double clamp_residual(double residual) {
    if (residual < -1e-12) throw InternalError("distance: weights exceed unit norm");
    return std::max(0.0, residual);
}

inline void finish(DistanceDistribution& dist) {
    dist.residual = clamp_residual(1.0 - dist.total());
    if (dist.total() > 0.0) dist.mean = average_distance(dist.weights);
}

}  // namespace detail

/// Expands `target` over an already generated chain.
inline DistanceDistribution decompose(const StateVector& target, const SubspaceChain& chain) {
    if (!same_basis(target.basis(), chain.basis)) throw BasisMismatchError("decompose: basis mismatch");
    if (!target.is_normalized(1e-10)) throw ContractError("decompose: target state not normalized");
    DistanceDistribution dist;
    const Eigen::VectorXcd b = target.amplitudes().normalized();
    for (const auto& block : chain.blocks) dist.weights.push_back(detail::block_weight(block, b));
    dist.dims = chain.dims();
    dist.exhausted = chain.exhausted;
    detail::finish(dist);
    return dist;
}

/// Distance distribution from `source` to `target`, generating levels only
/// until the weight found reaches 1 - weight_tol, the chain exhausts, or
/// d_max is reached.
inline DistanceDistribution distance(const StateVector& source, const StateVector& target, const OperatorSet& ops,
                                     const ChainOptions& opt = {}) {
    if (opt.d_max < 0) throw ParameterError("distance: d_max must be >= 0");
    if (!same_basis(source.basis(), target.basis())) throw BasisMismatchError("distance: states in different bases");
    if (!target.is_normalized(1e-10)) throw ContractError("distance: target state not normalized");
    ChainBuilder builder(source, ops, opt.rank_tol);
    const Eigen::VectorXcd b = target.amplitudes().normalized();
    DistanceDistribution dist;
    double found = detail::block_weight(builder.chain().blocks.back(), b);
    dist.weights.push_back(found);
    while (found < 1.0 - opt.weight_tol && static_cast<int>(builder.depth()) < opt.d_max && builder.extend()) {
        const double w = detail::block_weight(builder.chain().blocks.back(), b);
        dist.weights.push_back(w);
        found += w;
    }
    dist.dims = builder.chain().dims();
    dist.exhausted = builder.exhausted();
    detail::finish(dist);
    if (dist.exhausted && dist.residual > opt.weight_tol)
        throw UnreachableTargetError("distance: target has weight " + std::to_string(dist.residual) +
                                         " outside every reachable space",
                                     dist.residual);
    return dist;
}

// Operator sets ------------------------------------------------------------

enum class FluxOperatorChoice { hops_and_numbers, hops_only };

/// All six ordered Cooper-pair hops, optionally followed by the three island
/// number operators.
inline OperatorSet flux_qubit_operator_set(const BasisPtr& basis,
                                           FluxOperatorChoice choice = FluxOperatorChoice::hops_and_numbers) {
    OperatorSet set{{}, choice == FluxOperatorChoice::hops_only ? "hops_only" : "hops_and_numbers"};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) set.ops.push_back(pair_hop(basis, i, j));
    if (choice == FluxOperatorChoice::hops_and_numbers)
        for (int j = 0; j < 3; ++j) set.ops.push_back(number_op(basis, j));
    return set;
}

/// {c_1^dagger c_0, c_0^dagger c_1}.
inline OperatorSet boson_hops(const BasisPtr& basis) {
    return {{boson_hop(basis, 1, 0), boson_hop(basis, 0, 1)}, "boson_hops"};
}

/// c_i^dagger c_j for all i, j on a two-mode basis, in the mode frame
/// c'_i = sum_j U_ij c_j. The identity rotation gives the plain bilinears.
inline OperatorSet rotated_boson_bilinears(const BasisPtr& basis, const Eigen::Matrix2cd& u) {
    auto bilinear = [&](int k, int l) { return k == l ? number_op(basis, k) : boson_hop(basis, k, l); };
    OperatorSet set{{}, "boson_bilinears"};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const auto n = static_cast<Eigen::Index>(basis->size());
            SparseMatrix m(n, n);
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) m += std::conj(u(i, k)) * u(j, l) * bilinear(k, l).matrix();
            set.ops.emplace_back(basis, std::move(m), false);
        }
    return set;
}

inline OperatorSet boson_bilinears(const BasisPtr& basis) {
    return rotated_boson_bilinears(basis, Eigen::Matrix2cd::Identity());
}

/// c_i^dagger c_j for all mode pairs, diagonal terms included.
inline OperatorSet fermion_bilinears(const BasisPtr& basis) {
    OperatorSet set{{}, "fermion_bilinears"};
    for (int i = 0; i < basis->modes(); ++i)
        for (int j = 0; j < basis->modes(); ++j)
            set.ops.push_back(i == j ? number_op(basis, i) : fermion_hop(basis, i, j));
    return set;
}

}  // namespace catsize
