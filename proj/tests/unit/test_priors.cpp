#include <gtest/gtest.h>
#include <netprice/oracle/brute_force.hpp>
#include <netprice/priors.hpp>
#include <cmath>
#include <numbers>

using namespace netprice;

namespace {

std::vector<Vector> line_embeddings(int n) {
    std::vector<Vector> g;
    for (int i = 0; i < n; ++i) g.push_back(Vector::Constant(1, -1.0 + 0.45 * i));
    return g;
}

}  // namespace

TEST(GammaDensity, NormalizedAndSupported) {
    const auto se = GammaDensity::shifted_exponential();
    EXPECT_NEAR(se.total_mass(), 1.0, 1e-6);
    EXPECT_EQ(se.log_pdf(0.5), -std::numeric_limits<double>::infinity());
    EXPECT_DOUBLE_EQ(se.log_pdf(2.0), -1.0);
    const auto un = GammaDensity::uniform();
    EXPECT_NEAR(un.total_mass(), 1.0, 1e-6);
    Rng rng = make_rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_GE(se.sample(rng), 1.0);
        const double g = un.sample(rng);
        EXPECT_GT(g, 0.0);
        EXPECT_LE(g, 1.0);
    }
    EXPECT_THROW(GammaDensity::uniform(1.0, 0.0), ParameterError);
}

TEST(PriorSpec, Validation) {
    EXPECT_THROW(PriorSpec(0, 1.0, L0Prior{}), ParameterError);
    EXPECT_THROW(PriorSpec(2, 0.0, L0Prior{}), ParameterError);
    EXPECT_THROW(PriorSpec(2, 1.0, L0Prior{1.0}), ParameterError);
    EXPECT_THROW(PriorSpec(2, 1.0, SpectralScalingPrior{}), ParameterError);
    auto ks = std::make_shared<KernelSystem>(1.0, 4);
    EXPECT_THROW(PriorSpec(2, 1.0, SpectralScalingPrior{ks, GammaDensity::uniform(0.0, 1.0)}), ParameterError);
    EXPECT_THROW(PriorSpec(2, 1.0, SpectralPowersPrior{ks, GammaDensity::shifted_exponential()}), ParameterError);
    const PriorSpec spec(2, 1.0, SpectralPowersPrior{ks});
    Rng rng = make_rng(2);
    EXPECT_THROW(sample_prior(spec, {}, rng), ParameterError);
    EXPECT_THROW(log_mixing_weight(spec, 1), ParameterError);
}

TEST(LogMixingWeight, Examples) {
    EXPECT_NEAR(log_mixing_weight(PriorSpec(1, 1.0, L0Prior{0.5}), 1), std::log(1.0 / 3.0), 1e-14);
    EXPECT_NEAR(log_mixing_weight(PriorSpec(1, 1.0, OffDiagPrior{}), 1), 0.0, 1e-14);
    EXPECT_NEAR(log_mixing_weight(PriorSpec(2, 1.0, L0Prior{0.5}), 2), -3.83945231259331063, 1e-12);
    EXPECT_EQ(log_mixing_weight(PriorSpec(2, 1.0, OffDiagPrior{}), 0), -std::numeric_limits<double>::infinity());
    EXPECT_THROW(log_mixing_weight(PriorSpec(2, 1.0, L0Prior{}), 5), ParameterError);
}

TEST(LogMixingWeight, AggregatedWeightsSumToOne) {
    for (int n = 1; n <= 4; ++n)
        for (const PriorKind& kind : {PriorKind{L0Prior{0.3}}, PriorKind{L0Prior{0.8}}, PriorKind{OffDiagPrior{}}}) {
            const PriorSpec spec(n, 1.0, kind);
            double total = 0.0, total_agg = 0.0;
            for (int j = 0; j <= n * n; ++j) {
                total += std::exp(log_binomial(n * n, j) + log_mixing_weight(spec, j));
                total_agg += std::exp(log_support_size_weight(spec, j));
            }
            EXPECT_NEAR(total, 1.0, 1e-10) << spec.name() << " n=" << n;
            EXPECT_NEAR(total_agg, 1.0, 1e-10);
        }
}

TEST(SamplePrior, L0ScalarSupportProbabilities) {
    const PriorSpec spec(1, 1.0, L0Prior{0.5});
    const auto probs = oracle::support_size_probabilities(spec);
    EXPECT_NEAR(probs[0], 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(probs[1], 1.0 / 3.0, 1e-14);
    Rng rng = make_rng(3);
    const int draws = 60000;
    int empty = 0;
    for (int i = 0; i < draws; ++i) empty += sample_prior(spec, {}, rng).support.empty();
    EXPECT_NEAR(static_cast<double>(empty) / draws, 2.0 / 3.0, 4.0 * std::sqrt(2.0 / 9.0 / draws));
}

TEST(SamplePrior, OffDiagScalarIsHalfNormal) {
    const PriorSpec spec(1, 1.0, OffDiagPrior{DiagonalSign::positive});
    Rng rng = make_rng(4);
    const int draws = 100000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        const auto d = sample_prior(spec, {}, rng);
        ASSERT_EQ(d.support.size(), 1u);
        ASSERT_GE(d.theta(0, 0), 0.0);
        sum += d.theta(0, 0);
    }
    EXPECT_NEAR(sum / draws, std::sqrt(2.0 / std::numbers::pi), 0.01);
}

TEST(SamplePrior, L0DrawsStayInFrobeniusBallOnSupport) {
    Rng rng = make_rng(5);
    for (int n = 1; n <= 4; ++n) {
        const PriorSpec spec(n, 1.5, L0Prior{0.6});
        for (int i = 0; i < 2000; ++i) {
            const auto d = sample_prior(spec, {}, rng);
            EXPECT_LE(d.theta.norm(), spec.frobenius_radius() + 1e-12);
            Index nz = 0;
            for (Index c = 0; c < d.theta.size(); ++c) nz += d.theta.data()[c] != 0.0;
            EXPECT_EQ(nz, static_cast<Index>(d.support.size()));
            for (Index c : d.support) EXPECT_NE(d.theta.data()[c], 0.0);
        }
    }
}

TEST(SamplePrior, L0SupportSizeChiSquare) {
    const PriorSpec spec(2, 1.0, L0Prior{0.5});
    Rng rng = make_rng(6);
    std::vector<double> counts(5, 0.0);
    for (int i = 0; i < 100000; ++i) counts[sample_prior(spec, {}, rng).support.size()] += 1.0;
    const auto chi = oracle::chi_square(counts, oracle::support_size_probabilities(spec));
    EXPECT_GE(chi.p_value, 0.01) << "statistic " << chi.statistic;
}

TEST(SamplePrior, OffDiagSecondMoment) {
    for (int n : {2, 8}) {
        Rng rng = make_rng(7 + n);
        const int draws = 100000;
        double acc = 0.0;
        for (int i = 0; i < draws; ++i) acc += std::pow(offdiag_sample_component(n, false, DiagonalSign::symmetric, rng), 2);
        EXPECT_NEAR(acc / draws, 1.0 / n, 0.05 / n);
    }
}

TEST(SamplePrior, OffDiagComponentDensityIntegrates) {
    for (int n : {1, 3}) {
        for (bool diagonal : {true, false}) {
            // Substitute v = sign·u² on the off-diagonal (integrable singularity at 0).
            double mass = 0.0;
            const int grid = 200000;
            const double hi = 8.0, h = hi / grid;
            for (int k = 0; k < grid; ++k) {
                const double u = (k + 0.5) * h;
                if (diagonal) {
                    mass += 2.0 * std::exp(offdiag_log_component_density(n, true, DiagonalSign::symmetric, u)) * h;
                } else {
                    mass += 2.0 * std::exp(offdiag_log_component_density(n, false, DiagonalSign::symmetric, u * u)) *
                            2.0 * u * h;
                }
            }
            EXPECT_NEAR(mass, 1.0, 1e-3) << "n=" << n << " diagonal=" << diagonal;
        }
    }
}

TEST(SamplePrior, SpectralEntriesDependOnDifferences) {
    auto ks = std::make_shared<KernelSystem>(1.0, 6);
    // Equally spaced points: pairs with the same offset must share entries.
    std::vector<Vector> g;
    for (int i = 0; i < 4; ++i) g.push_back(Vector::Constant(1, 0.4 * i));
    Rng rng = make_rng(8);
    for (const PriorKind& kind : {PriorKind{SpectralScalingPrior{ks}}, PriorKind{SpectralPowersPrior{ks}}}) {
        const PriorSpec spec(4, 1.0, kind);
        for (int trial = 0; trial < 20; ++trial) {
            const auto d = sample_prior(spec, g, rng);
            EXPECT_TRUE(std::isfinite(d.gamma));
            for (int i = 0; i + 1 < 4; ++i)
                for (int j = 0; j + 1 < 4; ++j) EXPECT_NEAR(d.theta(i + 1, j + 1), d.theta(i, j), 1e-12);
            const Vector b = spectral_coefficients(spec, d.gamma, d.kl_coords);
            const SeriesFunction kappa(ks, b);
            EXPECT_NEAR(d.theta(2, 0), kappa(g[2] - g[0]), 1e-12);
        }
    }
}

TEST(SamplePrior, SpectralPowersSingleTerm) {
    auto ks = std::make_shared<KernelSystem>(0.7, 1);
    const PriorSpec spec(3, 1.0, SpectralPowersPrior{ks});
    const auto g = line_embeddings(3);
    Rng rng = make_rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = sample_prior(spec, g, rng);
        const double scale = std::pow(ks->eigenvalue(0), d.gamma / 2.0) * d.kl_coords(0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) EXPECT_NEAR(d.theta(i, j), scale * ks->basis(0, g[i] - g[j]), 1e-14);
    }
}

TEST(SamplePrior, ExcludeDiagonalZeroesIt) {
    auto ks = std::make_shared<KernelSystem>(1.0, 5);
    const PriorSpec spec(3, 1.0, SpectralScalingPrior{ks, GammaDensity::shifted_exponential(), true});
    Rng rng = make_rng(10);
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(sample_prior(spec, line_embeddings(3), rng).theta.diagonal().isZero(0.0));
}

TEST(UniformBall, RadialLawAndDensity) {
    Rng rng = make_rng(11);
    const int k = 3, draws = 50000;
    const double r = 2.0;
    int inner = 0;
    for (int i = 0; i < draws; ++i) {
        const double norm = sample_uniform_ball(k, r, rng).norm();
        ASSERT_LE(norm, r);
        inner += norm <= r / 2.0;
    }
    EXPECT_NEAR(static_cast<double>(inner) / draws, 1.0 / 8.0, 4.0 * std::sqrt(0.125 * 0.875 / draws));
    EXPECT_NEAR(log_uniform_ball_density(3, 2.0), -std::log(4.0 / 3.0 * std::numbers::pi * 8.0), 1e-12);
    EXPECT_NEAR(log_uniform_ball_density(2, 1.0), -std::log(std::numbers::pi), 1e-12);
}

TEST(SamplePrior, Deterministic) {
    const PriorSpec spec(3, 1.0, L0Prior{0.5});
    Rng a = make_rng(12), b = make_rng(12);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_prior(spec, {}, a).theta, sample_prior(spec, {}, b).theta);
}
