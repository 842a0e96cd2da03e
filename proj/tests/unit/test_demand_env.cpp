#include <gtest/gtest.h>
#include <netprice/demand_env.hpp>
#include <Eigen/SVD>
#include <cmath>

using namespace netprice;

namespace {

double svd_norm(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues()(0); }

Matrix random_matrix(Index n, Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(n, n);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    return m;
}

}  // namespace

TEST(PriceSensitivityMatrix, RejectsNonSquareAndNonFinite) {
    EXPECT_THROW(PriceSensitivityMatrix(Matrix::Zero(2, 3)), ParameterError);
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = std::nan("");
    EXPECT_THROW(PriceSensitivityMatrix{m}, ParameterError);
    m(0, 1) = INFINITY;
    EXPECT_THROW(PriceSensitivityMatrix{m}, ParameterError);
}

TEST(EnvSpec, ValidatesConstruction) {
    const auto theta = PriceSensitivityMatrix(Matrix::Identity(2, 2) * 0.5);
    EXPECT_NO_THROW(EnvSpec(Vector::Ones(2), theta, 0.1, 0.1, 1.0, 1.0));
    EXPECT_THROW(EnvSpec(Vector::Ones(2), theta, 0.1, 0.1, 1.0, 0.4), ParameterError);
    EXPECT_THROW(EnvSpec(Vector::Constant(2, -1.0), theta, 0.1, 0.1, 1.0, 1.0), ParameterError);
    EXPECT_THROW(EnvSpec(Vector::Ones(2), theta, 0.0, 0.1, 1.0, 1.0), ParameterError);
    EXPECT_THROW(EnvSpec(Vector::Ones(3), theta, 0.1, 0.1, 1.0, 1.0), ParameterError);
}

TEST(GenThetaL0, ZeroSupportGivesZeroMatrix) {
    EXPECT_TRUE(gen_theta_l0(2, 0, 1.0, 5).entries().isZero(0.0));
}

TEST(GenThetaL0, ScalarCase) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const double v = gen_theta_l0(1, 1, 0.5, seed)(0, 0);
        EXPECT_NE(v, 0.0);
        EXPECT_LE(std::abs(v), 0.5 + 1e-15);
    }
}

TEST(GenThetaL0, ScalarRescalesOnlyWhenAboveCap) {
    // With a generous cap the raw draw survives, and the capped version has magnitude min(|raw|, cap).
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const double raw = gen_theta_l0(1, 1, 10.0, seed)(0, 0);
        const double capped = gen_theta_l0(1, 1, 0.5, seed)(0, 0);
        EXPECT_NEAR(std::abs(capped), std::min(std::abs(raw), 0.5), 1e-15);
        EXPECT_EQ(std::signbit(raw), std::signbit(capped));
    }
}

TEST(GenThetaL0, SpotCase) {
    const auto theta = gen_theta_l0(3, 4, 1.0, 7);
    EXPECT_EQ(theta.nonzeros(), 4);
    EXPECT_LE(svd_norm(theta.entries()), 1.0 + 1e-12);
}

TEST(GenThetaL0, ExactSupportSizeProperty) {
    Rng gen = make_rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 6)(gen);
        const int s = std::uniform_int_distribution<int>(0, n * n)(gen);
        const double k = std::uniform_real_distribution<double>(0.1, 3.0)(gen);
        const auto theta = gen_theta_l0(n, s, k, gen());
        EXPECT_EQ(theta.nonzeros(), s) << "n=" << n << " s=" << s;
        EXPECT_LE(svd_norm(theta.entries()), k + 1e-12);
        EXPECT_NO_THROW(EnvSpec(Vector::Ones(n), theta, 0.1, 0.1, 1.0, k));
    }
}

TEST(GenThetaL0, RejectsBadSupport) {
    EXPECT_THROW(gen_theta_l0(2, 5, 1.0, 1), ParameterError);
    EXPECT_THROW(gen_theta_l0(2, -1, 1.0, 1), ParameterError);
}

TEST(GenThetaOffdiag, ScalarHasOnlyDiagonal) {
    const auto theta = gen_theta_offdiag(1, 1.0, 3);
    EXPECT_EQ(theta.dimension(), 1);
    EXPECT_GE(theta(0, 0), -2.0);
    EXPECT_LE(theta(0, 0), -0.5);
}

TEST(GenThetaOffdiag, OffDiagonalBound) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto theta = gen_theta_offdiag(4, 1.0, seed);
        for (Index i = 0; i < 4; ++i)
            for (Index j = 0; j < 4; ++j) {
                if (i == j) {
                    EXPECT_GE(theta(i, i), -2.0);
                    EXPECT_LE(theta(i, i), -0.5);
                } else {
                    EXPECT_LE(std::abs(theta(i, j)), 0.25);
                }
            }
    }
}

TEST(GenThetaOffdiag, GershgorinNormBound) {
    const auto theta = gen_theta_offdiag(8, 1.0, 3);
    const double max_diag = theta.entries().diagonal().cwiseAbs().maxCoeff();
    EXPECT_LE(svd_norm(theta.entries()), max_diag + 1.0);
    EXPECT_NEAR(theta.operator_norm(), svd_norm(theta.entries()), 1e-10);
}

TEST(GenThetaSpectral, SingleTermExpansion) {
    auto ks = std::make_shared<KernelSystem>(1.0, 1);
    const std::vector<Vector> g{Vector::Constant(1, 0.0), Vector::Constant(1, 0.7), Vector::Constant(1, -1.1)};
    const auto truth = gen_theta_spectral(g, ks, 0.6, 9);
    const double a1 = std::abs(truth.kappa_star.coeffs()(0)) / std::pow(ks->eigenvalue(0), 0.3);
    EXPECT_NEAR(a1, 1.0, 1e-12);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j)
            if (i != j) {
                EXPECT_NEAR(std::abs(truth.theta(i, j)),
                            std::pow(ks->eigenvalue(0), 0.3) * std::abs(ks->basis(0, g[i] - g[j])), 1e-12);
            }
}

TEST(GenThetaSpectral, UnitInterpolationNorm) {
    auto ks = std::make_shared<KernelSystem>(1.0, 12);
    std::vector<Vector> g;
    for (int i = 0; i < 4; ++i) g.push_back(Vector::Constant(1, -2.0 + i));
    for (double alpha : {1.0, 0.7, 0.3})
        EXPECT_NEAR(power_norm(gen_theta_spectral(g, ks, alpha, 4).kappa_star, alpha), 1.0, 1e-12);
}

TEST(GenThetaSpectral, EvenBasisGivesSymmetricOffDiagonal) {
    auto ks = std::make_shared<KernelSystem>(1.0, 8);
    std::vector<Vector> g;
    for (int i = 0; i < 5; ++i) g.push_back(Vector::Constant(1, -2.5 + 1.1 * i));
    const auto truth = gen_theta_spectral(g, ks, 0.7, 11);
    // Keep only the even (constant and cosine) modes of κ*.
    Vector even = truth.kappa_star.coeffs();
    for (int i = 2; i < ks->truncation(); i += 2) even(i) = 0.0;
    const SeriesFunction f(ks, even);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) EXPECT_NEAR(f(g[i] - g[j]), f(g[j] - g[i]), 1e-12);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (i != j) { EXPECT_NEAR(truth.theta(i, j), truth.kappa_star(g[i] - g[j]), 1e-14); }
}

TEST(GenThetaSpectral, RejectsBadInput) {
    auto ks = std::make_shared<KernelSystem>(1.0, 4);
    EXPECT_THROW(gen_theta_spectral({}, ks, 0.5, 1), ParameterError);
    const std::vector<Vector> dup{Vector::Zero(1), Vector::Zero(1)};
    EXPECT_THROW(gen_theta_spectral(dup, ks, 0.5, 1), ParameterError);
}

TEST(Step, NoiselessLimit) {
    Rng rng = make_rng(1);
    const auto theta = gen_theta_l0(3, 5, 1.0, 2);
    const EnvSpec env(Vector::Ones(3), theta, 1e-12, 1e-12, 1.0, 1.0);
    const Vector p = Vector::Constant(3, 0.5);
    const auto sample = step(env, p, rng, 4);
    EXPECT_EQ(sample.period, 4);
    EXPECT_TRUE(sample.demand.isApprox(theta.entries() * p, 1e-9));
}

TEST(Step, ZeroPriceIsPureNoise) {
    Rng rng = make_rng(2);
    const EnvSpec env(Vector::Ones(2), gen_theta_l0(2, 3, 1.0, 3), 0.3, 0.3, 1.0, 1.0);
    const int draws = 100000;
    Vector sum = Vector::Zero(2);
    for (int i = 0; i < draws; ++i) sum += step(env, Vector::Zero(2), rng).demand;
    const Vector mean = sum / draws;
    for (Index i = 0; i < 2; ++i) EXPECT_LE(std::abs(mean(i)), 4.0 * 0.3 / std::sqrt(draws));
}

TEST(Step, IdentityMean) {
    Rng rng = make_rng(3);
    const EnvSpec env(Vector::Ones(3), PriceSensitivityMatrix(Matrix::Identity(3, 3)), 0.2, 0.2, 2.0, 1.0);
    const Vector p = Vector::Unit(3, 0) * 2.0;
    const int draws = 100000;
    Vector sum = Vector::Zero(3);
    for (int i = 0; i < draws; ++i) sum += step(env, p, rng).demand;
    EXPECT_NEAR(sum(0) / draws, 2.0, 4.0 * 0.2 / std::sqrt(draws));
}

TEST(Step, MeanZeroNoiseAtFixedPrice) {
    Rng rng = make_rng(4);
    const auto theta = gen_theta_offdiag(3, 1.0, 5);
    const EnvSpec env(Vector::Ones(3), theta, 0.5, 0.5, 1.0, 3.0);
    const Vector p = Vector(Vector::LinSpaced(3, -0.5, 0.5));
    const int draws = 100000;
    Vector sum = Vector::Zero(3);
    double revenue = 0.0;
    for (int i = 0; i < draws; ++i) {
        const Vector d = step(env, p, rng).demand;
        sum += d;
        revenue += p.dot(d) + p.dot(env.baseline_demand());
    }
    const Vector expected = theta.entries() * p;
    for (Index i = 0; i < 3; ++i) EXPECT_NEAR(sum(i) / draws, expected(i), 4.0 * 0.5 / std::sqrt(draws));
    EXPECT_NEAR(revenue / draws, expected_revenue(theta, env.baseline_demand(), p),
                4.0 * 1.0 * 0.5 * std::sqrt(3.0) / std::sqrt(draws));
}

TEST(Step, RejectsPriceOutsideBall) {
    Rng rng = make_rng(5);
    const EnvSpec env(Vector::Ones(2), PriceSensitivityMatrix::zero(2), 0.1, 0.1, 1.0, 1.0);
    EXPECT_THROW(step(env, Vector::Constant(2, 1.0), rng), DomainError);
    EXPECT_NO_THROW(step(env, Vector::Unit(2, 0), rng));
}

TEST(Step, DeterministicGivenSeed) {
    const EnvSpec env(Vector::Ones(3), gen_theta_l0(3, 4, 1.0, 8), 0.1, 0.1, 1.0, 1.0);
    Rng a = make_rng(77, 1), b = make_rng(77, 1);
    for (int t = 0; t < 100; ++t) {
        const Vector p = Vector::Constant(3, 0.1 * (t % 5));
        const Vector da = step(env, p, a).demand, db = step(env, p, b).demand;
        for (Index i = 0; i < 3; ++i) EXPECT_EQ(da(i), db(i));
    }
    EXPECT_EQ(gen_theta_l0(4, 6, 1.0, 99).entries(), gen_theta_l0(4, 6, 1.0, 99).entries());
    EXPECT_EQ(gen_theta_offdiag(4, 1.0, 99).entries(), gen_theta_offdiag(4, 1.0, 99).entries());
}

TEST(ExpectedRevenue, Examples) {
    const Vector d0 = (Vector(2) << 2.0, 1.0).finished();
    EXPECT_DOUBLE_EQ(expected_revenue(PriceSensitivityMatrix::zero(2), d0, Vector::Unit(2, 0)), 2.0);
    EXPECT_DOUBLE_EQ(expected_revenue(PriceSensitivityMatrix(-Matrix::Identity(2, 2)), Vector::Ones(2), Vector::Ones(2)),
                     0.0);
    EXPECT_THROW(expected_revenue(PriceSensitivityMatrix::zero(2), Vector::Ones(3), Vector::Ones(2)), ParameterError);
}

TEST(ExpectedRevenue, MatchesScalarLoop) {
    Rng rng = make_rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix theta = random_matrix(3, rng);
        Vector d0(3), p(3);
        for (int i = 0; i < 3; ++i) {
            d0(i) = 1.0 + u(rng);
            p(i) = u(rng);
        }
        double ref = 0.0;
        for (int i = 0; i < 3; ++i) {
            ref += p(i) * d0(i);
            for (int j = 0; j < 3; ++j) ref += p(i) * theta(i, j) * p(j);
        }
        EXPECT_NEAR(expected_revenue(PriceSensitivityMatrix(theta), d0, p), ref, 1e-12);
    }
}

TEST(OperatorNorm, ExactAndPowerAgreeWithSvd) {
    Rng rng = make_rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 1 + trial % 7;
        const Matrix a = random_matrix(n, rng);
        const double ref = svd_norm(a);
        EXPECT_NEAR(operator_norm(a), ref, 1e-10 * (1.0 + ref));
        EXPECT_NEAR(operator_norm_power(a), ref, 1e-6 * (1.0 + ref));
    }
}

TEST(UniformOnSphere, HasRequestedRadius) {
    Rng rng = make_rng(8);
    for (int i = 0; i < 100; ++i) EXPECT_NEAR(uniform_on_sphere(4, 2.5, rng).norm(), 2.5, 1e-12);
}
