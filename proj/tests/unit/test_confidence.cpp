#include <gtest/gtest.h>
#include <netprice/confidence.hpp>
#include <netprice/oracle/brute_force.hpp>
#include <cmath>

using namespace netprice;

namespace {

RadiusConstants unit_constants() { return RadiusConstants{}; }

TheoremInputs inputs(int n, int horizon) {
    TheoremInputs in;
    in.n = n;
    in.horizon = horizon;
    in.l = 1.0;
    in.k_cap = 1.0;
    in.c1 = 2.0;
    in.epsilon = 0.1;
    in.j_star = 2;
    in.alpha_mix = 0.5;
    in.theta_min = 0.5;
    in.kappa_norm = 1.0;
    return in;
}

}  // namespace

TEST(GramState, AccumulatesOuterProducts) {
    GramState g(3);
    Rng rng = make_rng(1);
    Matrix ref = Matrix::Zero(3, 3);
    for (int s = 0; s < 10; ++s) {
        const Vector p = uniform_on_sphere(3, 1.0, rng);
        g.append(p);
        ref += p * p.transpose();
    }
    EXPECT_EQ(g.t(), 10);
    EXPECT_TRUE(g.v().isApprox(ref, 1e-14));
    EXPECT_TRUE(g.v_reg().isApprox(ref + Matrix::Identity(3, 3), 1e-14));
    EXPECT_TRUE(g.v().isApprox(g.v().transpose(), 0.0));
}

TEST(ConfidenceEllipsoid, RejectsCenterOutsideBall) {
    EXPECT_THROW(ConfidenceEllipsoid(PriceSensitivityMatrix(2.0 * Matrix::Identity(2, 2)), GramState(2), 1.0, 1.0),
                 ParameterError);
    EXPECT_THROW(ConfidenceEllipsoid(PriceSensitivityMatrix::zero(2), GramState(2), -1.0, 1.0), ParameterError);
}

TEST(RadiusL0, FrozenValue) {
    EXPECT_NEAR(radius_l0(1, 0.2, 1, 1, 0.0, 0.5, 2.0, 1.0), 78.0220712658229808, 1e-9 * 78.0);
}

TEST(RadiusL0, Monotonicity) {
    // Only the 3L²/t term is compared: the t-dependent log term is removed.
    const double a = radius_l0(1, 0.2, 2, 3, 1.0, 0.5, 1.0, 1.0);
    const double b = radius_l0(10, 0.2, 2, 3, 1.0, 0.5, 1.0, 1.0);
    const double log_growth = 8.0 * 1.0 * 2.0 * std::log(10.0);
    EXPECT_LT(b - log_growth, a);
    for (double eps = 0.01; eps < 0.5; eps *= 2.0)
        EXPECT_GE(radius_l0(5, eps, 2, 3, 1.0, 0.5, 1.0, 1.0), radius_l0(5, 2.0 * eps, 2, 3, 1.0, 0.5, 1.0, 1.0));
}

TEST(RadiusL0, ZeroSupportFloorsToOne) {
    EXPECT_DOUBLE_EQ(radius_l0(3, 0.1, 0, 2, 1.0, 0.5, 1.0, 1.0), radius_l0(3, 0.1, 1, 2, 1.0, 0.5, 1.0, 1.0));
}

TEST(RadiusOffdiag, FrozenValueAndProperties) {
    EXPECT_NEAR(radius_offdiag(2, 0.5, 0.5, 4, 1.0, 2.0, 1.0), 338.506722174550924, 1e-9 * 338.5);
    // θ = 1, t = 1: the (2n − 1) log(t/θ) term vanishes.
    const double v = radius_offdiag(1, 0.1, 1.0, 3, 1.0, 1.0, 1.0);
    EXPECT_NEAR(v, 3.0 + 8.0 * (3.0 + 4.0 * std::log(3.0) + std::log(M_PI * M_PI / 6.0) + std::log(20.0)), 1e-10);
    for (int n = 1; n < 10; ++n)
        EXPECT_LT(radius_offdiag(5, 0.1, 0.3, n, 1.0, 1.0, 1.0), radius_offdiag(5, 0.1, 0.3, n + 1, 1.0, 1.0, 1.0));
    EXPECT_THROW(radius_offdiag(5, 0.1, 0.0, 2, 1.0, 1.0, 1.0), ParameterError);
}

TEST(RadiusSpectralScaling, FrozenValues) {
    RadiusConstants rc = unit_constants();
    EXPECT_NEAR(radius_spectral_scaling(1, 0.2, 1, rc, 1.0, 2.0, 1.0), 72.9270265420871453, 1e-9 * 72.9);
    rc.scaling_exponent = ScalingExponent::proof;
    EXPECT_NEAR(radius_spectral_scaling(1, 0.2, 1, rc, 1.0, 2.0, 1.0), 79.5286097105959537, 1e-9 * 79.5);
}

TEST(RadiusSpectralScaling, CorrectlySpecifiedTermIsConstant) {
    // α = 1: the (4n²t) power drops out, leaving c·‖κ‖^{2(1−β)/(1−β)} = c·‖κ‖².
    RadiusConstants rc = unit_constants();
    rc.alpha_smooth = 1.0;
    rc.c_alpha_beta = 3.0;
    for (int t : {1, 10, 1000}) {
        const double lg = std::log(2.0 * 2.0 * std::sqrt(static_cast<double>(t)));
        const double expected = 3.0 + 8.0 * (3.0 * 1.7 * 1.7 + lg * lg + std::log(2.0 / 0.1));
        EXPECT_NEAR(radius_spectral_scaling(t, 0.1, 2, rc, 1.7, 1.0, 1.0), expected, 1e-10);
    }
}

TEST(RadiusSpectralScaling, NondecreasingInT) {
    const RadiusConstants rc = unit_constants();
    double prev = 0.0;
    for (int t = 1; t < 2000; t += 37) {
        const double v = radius_spectral_scaling(t, 0.1, 3, rc, 1.0, 1.0, 1.0);
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(RadiusConstants, Validation) {
    RadiusConstants rc;
    rc.beta_embed = rc.alpha_smooth;
    EXPECT_THROW(rc.validate(), ParameterError);
    EXPECT_THROW(radius_spectral_scaling(1, 0.1, 1, rc, 1.0, 1.0, 1.0), ParameterError);
    rc = {};
    rc.alpha_smooth = 1.2;
    EXPECT_THROW(rc.validate(), ParameterError);
}

TEST(RadiusSpectralPowers, FrozenValuesAndGrowth) {
    const RadiusConstants rc = unit_constants();
    EXPECT_NEAR(radius_spectral_powers(1, 0.2, 1, rc, 1.0, 2.0, 1.0), 55.8413614879047309, 1e-9 * 55.8);
    EXPECT_NEAR(radius_spectral_powers(1, 0.2, 1, rc, 2.5, 2.0, 1.0), 3.0 + 16.0 * (2.5 + std::log(10.0)), 1e-10);
    const double ratio = radius_spectral_powers(10000, 0.05, 4, rc, 1.0, 1.0, 1.0) /
                         radius_spectral_powers(100, 0.05, 4, rc, 1.0, 1.0, 1.0);
    EXPECT_LT(ratio, 4.0);
    EXPECT_NEAR(ratio, 2.50794291786393, 1e-9);
}

TEST(Radii, NonincreasingInEpsilonAndNonnegativeProperty) {
    Rng rng = make_rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const int t = 1 + static_cast<int>(1000 * u(rng));
        const int n = 1 + static_cast<int>(6 * u(rng));
        const double e1 = 0.01 + 0.9 * u(rng), e2 = std::min(0.99, e1 + 0.09 * u(rng) + 1e-3);
        const double k = 0.1 + 3 * u(rng), c1 = 0.1 + 5 * u(rng), l = 0.1 + 3 * u(rng), th = 0.05 + u(rng);
        RadiusConstants rc;
        rc.alpha_smooth = 0.3 + 0.7 * u(rng);
        rc.beta_embed = rc.alpha_smooth * (0.1 + 0.8 * u(rng));
        const int j = 1 + static_cast<int>(n * n * u(rng) * 0.999);
        const double r1[] = {radius_l0(t, e1, j, n, k, 0.5, c1, l), radius_offdiag(t, e1, th, n, k, c1, l),
                             radius_spectral_scaling(t, e1, n, rc, 1.0, c1, l),
                             radius_spectral_powers(t, e1, n, rc, 1.0, c1, l)};
        const double r2[] = {radius_l0(t, e2, j, n, k, 0.5, c1, l), radius_offdiag(t, e2, th, n, k, c1, l),
                             radius_spectral_scaling(t, e2, n, rc, 1.0, c1, l),
                             radius_spectral_powers(t, e2, n, rc, 1.0, c1, l)};
        for (int r = 0; r < 4; ++r) {
            EXPECT_GE(r1[r], r2[r]);
            EXPECT_GE(r2[r], 0.0);
        }
    }
}

TEST(Contains, Examples) {
    Rng rng = make_rng(3);
    const PriceSensitivityMatrix center(Matrix::Identity(3, 3) * 0.2);
    GramState g(3);
    for (int s = 0; s < 5; ++s) g.append(uniform_on_sphere(3, 1.0, rng));
    EXPECT_TRUE(contains(ConfidenceEllipsoid(center, g, 1e-6, 1.0), center));
    // Empty data: every Θ in the K-ball belongs.
    const ConfidenceEllipsoid empty(center, GramState(3), 1e-6, 1.0);
    for (int i = 0; i < 50; ++i) {
        Matrix a = Matrix::Random(3, 3);
        a /= operator_norm(a);
        EXPECT_TRUE(contains(empty, PriceSensitivityMatrix(a * 0.99)));
        EXPECT_FALSE(contains(empty, PriceSensitivityMatrix(a * 1.01)));
    }
}

TEST(Contains, TraceIdentityProperty) {
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 5, t = 1 + (trial * 7) % 20;
        GramState g(n);
        std::vector<Vector> prices;
        for (int s = 0; s < t; ++s) {
            prices.push_back(uniform_on_sphere(n, 1.0 + s % 3, rng));
            g.append(prices.back());
        }
        Matrix c = Matrix::Random(n, n);
        c *= 0.5 / operator_norm(c);
        const Matrix theta = Matrix::Random(n, n);
        const ConfidenceEllipsoid ell(PriceSensitivityMatrix(c), g, 1.0, 1.0);
        const double loop = oracle::trace_identity_loop(theta, c, prices);
        EXPECT_NEAR(quadratic_form(ell, theta), loop, 1e-10 * std::max(1.0, loop));
        const ConfidenceEllipsoid wide(PriceSensitivityMatrix(c), g, loop * 1.001 + 1e-12, 1e9);
        EXPECT_TRUE(contains(wide, PriceSensitivityMatrix(theta)));
        const ConfidenceEllipsoid narrow(PriceSensitivityMatrix(c), g, loop * 0.999, 1e9);
        EXPECT_FALSE(contains(narrow, PriceSensitivityMatrix(theta)));
    }
}

TEST(RegretBoundLemma1, Examples) {
    EXPECT_NEAR(regret_bound_lemma1(1, 1, 1.0, 1.0, {1.0}), 5.13485101322663817, 1e-12);
    EXPECT_DOUBLE_EQ(regret_bound_lemma1(3, 4, 1.0, 0.0, {0.0, 0.0, 0.0, 0.0}), 0.0);
    EXPECT_THROW(regret_bound_lemma1(1, 2, 1.0, 1.0, {1.0}), ParameterError);
}

TEST(RegretBoundLemma1, DoublingRadiiProperty) {
    Rng rng = make_rng(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int t = 1 + trial % 30;
        std::vector<double> radii(static_cast<std::size_t>(t)), doubled;
        for (double& r : radii) {
            r = u(rng);
            doubled.push_back(2.0 * r);
        }
        const double a = regret_bound_lemma1(3, t, 1.5, 0.7, radii), b = regret_bound_lemma1(3, t, 1.5, 0.7, doubled);
        EXPECT_GE(b, a);
        EXPECT_LE(b, std::sqrt(2.0) * a * (1.0 + 1e-14));
    }
}

TEST(TheoremBound, ComposedBoundAtOnePeriodIsLemma1) {
    for (Regime r : {Regime::l0, Regime::offdiag, Regime::spectral_scaling, Regime::spectral_powers}) {
        TheoremInputs in = inputs(3, 1);
        in.rc.radius_scale = 0.7;
        const double radius = in.rc.radius_scale * regime_radius(r, 1, in);
        EXPECT_NEAR(composed_bound(r, in), regret_bound_lemma1(3, 1, in.l, in.k_cap, {radius}),
                    1e-9 * composed_bound(r, in))
            << regime_name(r);
    }
}

TEST(TheoremBound, ComposedBoundSumsRegimeRadii) {
    TheoremInputs in = inputs(2, 50);
    std::vector<double> radii;
    for (int t = 1; t <= 50; ++t) radii.push_back(regime_radius(Regime::offdiag, t, in));
    EXPECT_NEAR(composed_bound(Regime::offdiag, in), regret_bound_lemma1(2, 50, 1.0, 1.0, radii), 1e-9);
}

TEST(TheoremBound, OffdiagNearlyLinearInN) {
    TheoremInputs in = inputs(2, 1000);
    for (int n = 2; n <= 8; n *= 2) {
        in.n = n;
        const double a = theorem_bound(Regime::offdiag, in);
        in.n = 2 * n;
        const double b = theorem_bound(Regime::offdiag, in);
        const double t = 1000.0;
        const double ln_ratio = std::log(1.0 + 2.0 * t / (2.0 * n)) / std::log(1.0 + 2.0 * t / n);
        EXPECT_LE(b / a, 2.0 * std::sqrt(2.0 * ln_ratio) + 0.1) << "n=" << n;
    }
}

TEST(TheoremBound, PowersGrowLikeRootT) {
    // √T times a log² factor: RHS(4T)/RHS(T) falls toward 2 and stays under 2.8 from T = 100.
    TheoremInputs in = inputs(4, 100);
    in.c1 = 1.0;
    in.epsilon = 0.05;
    double prev = 4.0;
    for (int t = 100; t <= 409600; t *= 4) {
        in.horizon = t;
        const double a = theorem_bound(Regime::spectral_powers, in);
        in.horizon = 4 * t;
        const double ratio = theorem_bound(Regime::spectral_powers, in) / a;
        EXPECT_LT(ratio, prev) << "T=" << t;
        EXPECT_LT(ratio, 2.8) << "T=" << t;
        if (t >= 6400) { EXPECT_LE(ratio, 2.5) << "T=" << t; }
        prev = ratio;
    }
}

TEST(TheoremBound, AllRegimesPositiveAndIncreasingInT) {
    for (Regime r : {Regime::l0, Regime::offdiag, Regime::spectral_scaling, Regime::spectral_powers}) {
        double prev = 0.0;
        for (int t : {1, 10, 100, 1000}) {
            const double v = theorem_bound(r, inputs(3, t));
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GT(v, prev);
            prev = v;
        }
    }
}

TEST(Regime, ParseAndName) {
    for (Regime r : {Regime::l0, Regime::offdiag, Regime::spectral_scaling, Regime::spectral_powers})
        EXPECT_EQ(parse_regime(regime_name(r)), r);
    EXPECT_THROW(parse_regime("dense"), ParameterError);
}
