#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "catsize/distance.hpp"
#include "catsize/oracles.hpp"

using namespace catsize;

TEST(Binomial, ExactAndLogGammaBranches) {
    EXPECT_EQ(binomial(4, 2), 6.0);
    EXPECT_EQ(binomial(20, 10), 184756.0);
    EXPECT_NEAR(binomial(30, 15) / 155117520.0, 1.0, 1e-12);
    EXPECT_EQ(binomial(5, 7), 0.0);
}

TEST(GhzLambda, LimitingAngles) {
    const auto same = ghz_lambda({6, 0.0});
    EXPECT_EQ(same[0], 1.0);
    for (std::size_t d = 1; d < same.size(); ++d) EXPECT_EQ(same[d], 0.0);

    for (int n : {1, 5, 17}) {
        const auto orth = ghz_lambda({n, std::numbers::pi / 2});
        EXPECT_NEAR(orth.back(), 1.0, 1e-15);
        for (std::size_t d = 0; d + 1 < orth.size(); ++d) EXPECT_LT(orth[d], 1e-15);
    }

    const auto quarter = ghz_lambda({2, std::numbers::pi / 4});
    EXPECT_NEAR(quarter[0], 0.5, 1e-15);
    EXPECT_NEAR(quarter[1], 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(quarter[2], 0.5, 1e-15);
}

TEST(GhzLambda, NormalizationAndMeanOverGrid) {
    for (int n = 1; n <= 30; ++n)
        for (int k = 0; k < 20; ++k) {
            const double theta = k * (std::numbers::pi / 2) / 19.0;
            const auto lambda = ghz_lambda({n, theta});
            double norm = 0.0;
            std::vector<double> p;
            for (double l : lambda) {
                norm += l * l;
                p.push_back(l * l);
            }
            EXPECT_NEAR(norm, 1.0, 1e-12) << n << " " << theta;
            EXPECT_NEAR(average_distance(p), n * std::pow(std::sin(theta), 2), 1e-10);
        }
}

TEST(GhzLambda, RejectsBadParameters) {
    EXPECT_THROW(ghz_lambda({0, 0.1}), ParameterError);
    EXPECT_THROW(ghz_lambda({3, 2.0}), ParameterError);
}

TEST(BecPair, OverlapAndSingleParticle) {
    const double theta = 0.6;
    for (int n : {1, 4, 9}) {
        const auto [a, b] = bec_pair({n, theta});
        EXPECT_TRUE(a.is_normalized());
        EXPECT_TRUE(b.is_normalized());
        EXPECT_NEAR(std::abs(inner(a, b) - std::pow(std::cos(theta), n)), 0.0, 1e-14);
    }
    const auto [a, b] = bec_pair({1, theta});
    EXPECT_NEAR(b[b.basis()->index({1, 0})].real(), std::cos(theta), 1e-15);
    EXPECT_NEAR(b[b.basis()->index({0, 1})].real(), std::sin(theta), 1e-15);
}

TEST(BecPair, PipelineReproducesBinomialForTenParticles) {
    for (double theta : {0.1, 0.3, std::numbers::pi / 4, 1.0, std::numbers::pi / 2}) {
        const auto [a, b] = bec_pair({10, theta});
        const auto dist = distance(a, b, boson_hops(a.basis()), {12, 1e-10, 1e-12});
        const auto lambda = ghz_lambda({10, theta});
        for (std::size_t d = 0; d < lambda.size(); ++d) EXPECT_NEAR(dist.at(d), lambda[d] * lambda[d], 1e-8) << theta;
    }
}

TEST(AsymmetricPair, DistanceDependsOnDirection) {
    for (int n : {3, 4, 6}) {
        const auto [a, b] = asymmetric_pair(n);
        const auto ops = boson_bilinears(a.basis());
        const auto forward = distance(a, b, ops, {12, 1e-10, 1e-12});
        const auto backward = distance(b, a, ops, {12, 1e-10, 1e-12});
        EXPECT_NEAR(forward.at(1), 1.0, 1e-10) << n;
        EXPECT_LT(backward.at(1), 1.0 - 1e-6) << n;
        EXPECT_GT(backward.at(static_cast<std::size_t>(n - 1)), 1e-6) << n;
    }
    // Two particles: |1,1> reaches both |2,0> and |0,2> in one step.
    const auto [a, b] = asymmetric_pair(2);
    EXPECT_NEAR(distance(b, a, boson_bilinears(a.basis())).at(1), 1.0, 1e-10);
    EXPECT_THROW(asymmetric_pair(1), ParameterError);
}

TEST(PersistentCurrentPair, DistanceCountsMovedParticles) {
    struct Case {
        std::vector<int> a, b;
        int expected;
    };
    for (const auto& c : {Case{{0, 1, 2}, {3, 4, 5}, 3}, Case{{0, 1, 2}, {0, 1, 2}, 0}, Case{{0, 1, 2}, {0, 1, 4}, 1},
                          Case{{1, 2, 3}, {0, 2, 5}, 2}}) {
        const auto [a, b] = persistent_current_pair(6, c.a, c.b);
        EXPECT_EQ(slater_distance(c.a, c.b), c.expected);
        const auto dist = distance(a, b, fermion_bilinears(a.basis()), {12, 1e-10, 1e-12});
        EXPECT_NEAR(dist.at(static_cast<std::size_t>(c.expected)), 1.0, 1e-10);
        EXPECT_NEAR(dist.mean, c.expected, 1e-10);
    }
    EXPECT_THROW(persistent_current_pair(6, {0, 1}, {0, 1, 2}), ParameterError);
    EXPECT_THROW(persistent_current_pair(4, {0, 5}, {0, 1}), ParameterError);
}
