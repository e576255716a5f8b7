#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "catsize/distance.hpp"
#include "catsize/flux_qubit.hpp"
#include "catsize/oracles.hpp"
#include "support.hpp"

using namespace catsize;

namespace {

ChainOptions exact_options(int d_max) { return {d_max, 1e-10, 1e-12}; }

void expect_orthonormal_chain(const SubspaceChain& chain) {
    std::vector<Eigen::MatrixXcd> blocks = chain.blocks;
    Eigen::Index cols = 0;
    for (const auto& b : blocks) cols += b.cols();
    Eigen::MatrixXcd all(blocks.front().rows(), cols);
    Eigen::Index at = 0;
    for (const auto& b : blocks) {
        all.middleCols(at, b.cols()) = b;
        at += b.cols();
    }
    const Eigen::MatrixXcd gram = all.adjoint() * all;
    EXPECT_LT((gram - Eigen::MatrixXcd::Identity(cols, cols)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(static_cast<std::size_t>(cols), chain.basis->size());
}

}  // namespace

TEST(Chain, BosonLadderGrowsOneStatePerLevel) {
    const auto b = boson2_basis(2);
    const auto chain = generate_chain(basis_state(b, {2, 0}), boson_hops(b), 10);
    EXPECT_EQ(chain.dims(), (std::vector<std::size_t>{1, 1, 1}));
    EXPECT_TRUE(chain.exhausted);
    expect_orthonormal_chain(chain);
}

TEST(Chain, DiagonalOperatorsAddNothing) {
    const auto b = charge3_basis(2);
    const OperatorSet numbers{{number_op(b, 0), number_op(b, 1)}, "numbers"};
    const auto chain = generate_chain(basis_state(b, {1, -2, 1}), numbers, 5);
    EXPECT_EQ(chain.dims(), (std::vector<std::size_t>{1}));
    EXPECT_TRUE(chain.exhausted);
}

TEST(Chain, FluxQubitChainBoundedByBasis) {
    FluxQubitOptions opt;
    const auto point = prepare_flux_qubit({20.0, 1.0, 0.5, 1}, opt);
    const auto ops = flux_qubit_operator_set(point.basis);
    const auto chain = generate_chain(point.states.plus, ops, 20);
    EXPECT_LE(chain.total_dim(), 9u);
    expect_orthonormal_chain(chain);
    const auto dims = chain.dims();
    for (std::size_t d = 0; d + 1 < dims.size(); ++d) EXPECT_LE(dims[d + 1], dims[d] * ops.size());
    EXPECT_EQ(chain.blocks.front(), point.states.plus.amplitudes());
}

TEST(Chain, Contracts) {
    const auto b = boson2_basis(3);
    const StateVector unnormalized(b, 2.0 * basis_state(b, {3, 0}).amplitudes());
    EXPECT_THROW(generate_chain(unnormalized, boson_hops(b), 3), ContractError);
    EXPECT_THROW(generate_chain(basis_state(boson2_basis(4), {4, 0}), boson_hops(b), 3), BasisMismatchError);
    EXPECT_THROW(generate_chain(basis_state(b, {3, 0}), OperatorSet{{}, "empty"}, 3), ContractError);
    EXPECT_THROW(generate_chain(basis_state(b, {3, 0}), boson_hops(b), 3, 0.0), ParameterError);
}

TEST(Chain, MatchesSequentialGramSchmidtReference) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const auto b = charge3_basis(2);
        const auto ops = flux_qubit_operator_set(b);
        const StateVector a = support::random_state(b, rng);
        const StateVector t = support::random_state(b, rng);
        const auto ours = decompose(t, generate_chain(a, ops, 12));
        const auto ref = support::reference_weights(a, t, ops.ops, 12);
        ASSERT_EQ(ours.weights.size(), ref.size());
        for (std::size_t d = 0; d < ref.size(); ++d) EXPECT_NEAR(ours.weights[d], ref[d], 1e-8) << d;
    }
    const auto point = prepare_flux_qubit({10.0, 0.8, 0.5, 3});
    const auto ops = flux_qubit_operator_set(point.basis);
    const auto ours = decompose(point.states.minus, generate_chain(point.states.plus, ops, 12));
    const auto ref = support::reference_weights(point.states.plus, point.states.minus, ops.ops, 12);
    for (std::size_t d = 0; d < std::min(ref.size(), ours.weights.size()); ++d)
        EXPECT_NEAR(ours.weights[d], ref[d], 1e-8) << d;
}

TEST(Decompose, IdenticalStates) {
    const auto b = boson2_basis(4);
    const StateVector a = basis_state(b, {4, 0});
    const auto dist = decompose(a, generate_chain(a, boson_hops(b), 4));
    EXPECT_NEAR(dist.weights[0], 1.0, 1e-15);
    EXPECT_NEAR(dist.mean, 0.0, 1e-15);
}

TEST(Decompose, BinomialPairAtQuarterPi) {
    const auto [a, bstate] = bec_pair({2, std::numbers::pi / 4});
    const auto dist = decompose(bstate, generate_chain(a, boson_hops(a.basis()), 5));
    ASSERT_EQ(dist.weights.size(), 3u);
    EXPECT_NEAR(dist.weights[0], 0.25, 1e-12);
    EXPECT_NEAR(dist.weights[1], 0.5, 1e-12);
    EXPECT_NEAR(dist.weights[2], 0.25, 1e-12);
    EXPECT_NEAR(dist.mean, 1.0, 1e-12);
    EXPECT_NEAR(dist.total() + dist.residual, 1.0, 1e-10);
}

TEST(Decompose, OrthogonalSectorGivesFullResidual) {
    const auto b = charge3_basis(2);
    const OperatorSet numbers{{number_op(b, 0)}, "numbers"};
    const auto chain = generate_chain(basis_state(b, {0, 0, 0}), numbers, 3);
    const auto dist = decompose(basis_state(b, {1, -1, 0}), chain);
    EXPECT_EQ(dist.weights, (std::vector<double>{0.0}));
    EXPECT_EQ(dist.residual, 1.0);
    EXPECT_TRUE(std::isnan(dist.mean));
    EXPECT_THROW(distance(basis_state(b, {0, 0, 0}), basis_state(b, {1, -1, 0}), numbers), UnreachableTargetError);
}

TEST(Distance, MaximalForOrthogonalCondensates) {
    const auto [a, bstate] = bec_pair({10, std::numbers::pi / 2});
    const auto dist = distance(a, bstate, boson_hops(a.basis()), exact_options(12));
    EXPECT_NEAR(dist.at(10), 1.0, 1e-10);
    EXPECT_NEAR(dist.mean, 10.0, 1e-9);
}

TEST(Distance, EarlyStopHonoursWeightTolerance) {
    const auto [a, bstate] = bec_pair({12, 0.3});
    const auto lazy = distance(a, bstate, boson_hops(a.basis()), {12, 1e-10, 1e-6});
    const auto full = decompose(bstate, generate_chain(a, boson_hops(a.basis()), 12));
    EXPECT_LT(lazy.weights.size(), full.weights.size());
    EXPECT_LE(lazy.residual, 1e-6);
    for (std::size_t d = 0; d < lazy.weights.size(); ++d) EXPECT_NEAR(lazy.weights[d], full.weights[d], 1e-14);
    // d_max caps the chain without raising.
    const auto capped = distance(a, bstate, boson_hops(a.basis()), {1, 1e-10, 1e-12});
    EXPECT_EQ(capped.weights.size(), 2u);
    EXPECT_GT(capped.residual, 0.0);
}

TEST(AverageDistance, ClosedForms) {
    EXPECT_EQ(average_distance(std::vector<double>{1.0}), 0.0);
    EXPECT_DOUBLE_EQ(average_distance(std::vector<double>{0.25, 0.5, 0.25}), 1.0);
    std::vector<double> binom;
    for (int d = 0; d <= 10; ++d) binom.push_back(binomial(10, d) * std::pow(0.25, d) * std::pow(0.75, 10 - d));
    EXPECT_NEAR(average_distance(binom), 2.5, 1e-12);
    EXPECT_THROW(average_distance(std::vector<double>{0.0, 0.0}), ContractError);
}

TEST(Distance, BasisIndependenceUnderModeRotation) {
    std::mt19937_64 rng(2024);
    const auto [a, bstate] = bec_pair({8, 0.7});
    const auto reference = distance(a, bstate, boson_bilinears(a.basis()), exact_options(12));
    for (int trial = 0; trial < 5; ++trial) {
        const auto rotated = rotated_boson_bilinears(a.basis(), support::random_unitary2(rng));
        const auto dist = distance(a, bstate, rotated, exact_options(12));
        ASSERT_EQ(dist.weights.size(), reference.weights.size());
        for (std::size_t d = 0; d < dist.weights.size(); ++d) EXPECT_NEAR(dist.weights[d], reference.weights[d], 1e-8);
    }
}

TEST(Distance, OperatorOrderIndependence) {
    std::mt19937_64 rng(99);
    const auto point = prepare_flux_qubit({20.0, 0.8, 0.5, 4});
    OperatorSet ops = flux_qubit_operator_set(point.basis);
    const auto reference = flux_qubit_distance(point);
    for (int trial = 0; trial < 3; ++trial) {
        std::shuffle(ops.ops.begin(), ops.ops.end(), rng);
        const auto dist = distance(point.states.plus, point.states.minus, ops, ChainOptions{});
        ASSERT_EQ(dist.weights.size(), reference.weights.size());
        for (std::size_t d = 0; d < dist.weights.size(); ++d) EXPECT_NEAR(dist.weights[d], reference.weights[d], 1e-8);
    }
}

TEST(Distance, TimeReversedPairIsSymmetric) {
    for (auto extraction : {Extraction::two_level, Extraction::filter}) {
        FluxQubitOptions opt;
        opt.extraction = extraction;
        const auto point = prepare_flux_qubit({20.0, 0.8, 0.5, 5}, opt);
        const auto forward = flux_qubit_distance(point, opt);
        opt.reverse = true;
        const auto backward = flux_qubit_distance(point, opt);
        ASSERT_EQ(forward.weights.size(), backward.weights.size());
        for (std::size_t d = 0; d < forward.weights.size(); ++d)
            EXPECT_NEAR(forward.weights[d], backward.weights[d], 1e-8);
        EXPECT_LT(forward.at(0), 1e-10);
        EXPECT_GE(forward.mean, 1.0);
    }
}

TEST(Distance, HopsOnlyOperatorSetIsSupported) {
    FluxQubitOptions opt;
    opt.operators = FluxOperatorChoice::hops_only;
    const auto point = prepare_flux_qubit({20.0, 1.0, 0.5, 4}, opt);
    const auto dist = flux_qubit_distance(point, opt);
    EXPECT_NEAR(dist.total() + dist.residual, 1.0, 1e-10);
    EXPECT_GE(dist.mean, 1.0);
}

TEST(Distance, NormalizationOverRandomPairs) {
    std::mt19937_64 rng(5);
    const auto b = charge3_basis(2);
    const auto ops = flux_qubit_operator_set(b, FluxOperatorChoice::hops_only);
    for (int trial = 0; trial < 20; ++trial) {
        const auto dist = distance(support::random_state(b, rng), support::random_state(b, rng), ops);
        EXPECT_NEAR(dist.total() + dist.residual, 1.0, 1e-10);
        for (double w : dist.weights) EXPECT_GE(w, 0.0);
    }
}
