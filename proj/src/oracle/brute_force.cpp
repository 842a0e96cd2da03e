#include <netprice/oracle/brute_force.hpp>
#include <Eigen/Cholesky>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

namespace netprice::oracle {

namespace {

// 2 × (angles·radii + 1) matrix of polar grid prices, including the origin.
Matrix polar_prices(double l, int angles, int radii) {
    Matrix p(2, angles * radii + 1);
    p.col(0).setZero();
    Index c = 1;
    for (int a = 0; a < angles; ++a) {
        const double phi = 2.0 * std::numbers::pi * a / angles;
        for (int r = 1; r <= radii; ++r) {
            const double rho = l * r / radii;
            p(0, c) = rho * std::cos(phi);
            p(1, c) = rho * std::sin(phi);
            ++c;
        }
    }
    return p;
}

double grid_max(const Matrix& theta, const Vector& d0, const Matrix& prices) {
    const Matrix tp = theta * prices;
    const Eigen::RowVectorXd vals = d0.transpose() * prices + prices.cwiseProduct(tp).colwise().sum();
    return vals.maxCoeff();
}

std::string describe(const char* what, int i) {
    std::ostringstream s;
    s << what << " #" << i;
    return s.str();
}

}  // namespace

double polar_grid_best(const PriceSensitivityMatrix& theta, const Vector& d0, double l, int angles, int radii) {
    if (theta.dimension() != 2) throw ParameterError("polar_grid_best: N must be 2");
    return grid_max(theta.entries(), d0, polar_prices(l, angles, radii));
}

double boundary_sample_best(const ConfidenceEllipsoid& ell, const Vector& price, int samples, Rng& rng) {
    const Index n = ell.shape().n();
    const Eigen::LLT<Matrix> llt(ell.shape().v_reg());
    const Matrix lt = llt.matrixU();  // V̄ = Uᵀ U
    std::normal_distribution<double> normal(0.0, 1.0);
    double best = -std::numeric_limits<double>::infinity();
    const double root = std::sqrt(ell.radius_sq());
    for (int s = 0; s < samples; ++s) {
        Matrix u(n, n);
        for (Index k = 0; k < u.size(); ++k) u.data()[k] = normal(rng);
        u *= root / u.norm();
        // tr(ΔV̄Δᵀ) = ‖UΔᵀ‖²_F, so Δ = (U⁻¹uᵀ)ᵀ puts Θ̂ + Δ on the boundary.
        const Matrix delta = lt.triangularView<Eigen::Upper>().solve(u.transpose()).transpose();
        const Matrix theta = ell.center().entries() + delta;
        best = std::max(best, price.dot(theta * price));
    }
    return best;
}

double joint_grid_best(const ConfidenceEllipsoid& search, const Vector& d0, double l, int sphere_res, int angles,
                       int radii) {
    if (search.shape().n() != 2) throw ParameterError("joint_grid_best: N must be 2");
    const Matrix prices = polar_prices(l, angles, radii);
    const Eigen::LLT<Matrix> llt(search.shape().v_reg());
    const Matrix lt = llt.matrixU();
    const double root = std::sqrt(search.radius_sq());
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a <= sphere_res; ++a) {
        const double psi1 = std::numbers::pi * a / sphere_res;
        for (int b = 0; b <= sphere_res; ++b) {
            const double psi2 = std::numbers::pi * b / sphere_res;
            for (int c = 0; c < 2 * sphere_res; ++c) {
                const double phi = std::numbers::pi * c / sphere_res;
                Matrix u(2, 2);
                u(0, 0) = std::cos(psi1);
                u(1, 0) = std::sin(psi1) * std::cos(psi2);
                u(0, 1) = std::sin(psi1) * std::sin(psi2) * std::cos(phi);
                u(1, 1) = std::sin(psi1) * std::sin(psi2) * std::sin(phi);
                Matrix theta = search.center().entries() +
                                lt.triangularView<Eigen::Upper>().solve(root * u.transpose()).transpose();
                const double norm = operator_norm(theta);
                if (norm > search.k_cap()) theta *= search.k_cap() / norm;
                best = std::max(best, grid_max(theta, d0, prices));
            }
        }
    }
    return best;
}

double trace_identity_loop(const Matrix& theta, const Matrix& center, const std::vector<Vector>& prices) {
    double sum = 0.0;
    for (const auto& p : prices) {
        for (Index i = 0; i < theta.rows(); ++i) {
            double row = 0.0;
            for (Index j = 0; j < theta.cols(); ++j) row += (theta(i, j) - center(i, j)) * p(j);
            sum += row * row;
        }
    }
    return sum;
}

PriorMonteCarlo direct_prior_mc(const PriorSpec& spec, const std::vector<Vector>& embeddings, long draws, Rng& rng,
                                ZMode mode) {
    const int n = spec.n();
    Matrix sum = Matrix::Zero(n, n), sum_sq = Matrix::Zero(n, n);
    PriorMonteCarlo out;
    out.size_counts.assign(static_cast<std::size_t>(n * n + 1), 0.0);
    for (long d = 0; d < draws; ++d) {
        const PriorDraw draw = sample_prior(spec, embeddings, rng);
        const Matrix z = scale_Z(PriceSensitivityMatrix(draw.theta), spec.k_cap(), mode).entries();
        sum += z;
        sum_sq += z.cwiseProduct(z);
        if (spec.has_support()) out.size_counts[draw.support.size()] += 1.0;
    }
    const double nd = static_cast<double>(draws);
    out.draws = draws;
    out.mean = sum / nd;
    const Matrix var = (sum_sq / nd - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0);
    out.se = (var / nd).cwiseSqrt();
    return out;
}

std::vector<double> support_size_probabilities(const PriorSpec& spec) {
    std::vector<double> p;
    for (int j = 0; j <= spec.n() * spec.n(); ++j) p.push_back(std::exp(log_support_size_weight(spec, j)));
    return p;
}

ChiSquare chi_square(const std::vector<double>& counts, const std::vector<double>& probs) {
    if (counts.size() != probs.size()) throw ParameterError("chi_square: size mismatch");
    double total = 0.0;
    for (double c : counts) total += c;
    std::vector<double> obs, expd;
    double o = 0.0, e = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        o += counts[i];
        e += probs[i] * total;
        if (e >= 5.0) {
            obs.push_back(o);
            expd.push_back(e);
            o = e = 0.0;
        }
    }
    if (e > 0.0 || o > 0.0) {
        if (expd.empty()) {
            obs.push_back(o);
            expd.push_back(e);
        } else {
            obs.back() += o;
            expd.back() += e;
        }
    }
    ChiSquare out;
    for (std::size_t i = 0; i < obs.size(); ++i) out.statistic += (obs[i] - expd[i]) * (obs[i] - expd[i]) / expd[i];
    out.dof = static_cast<int>(obs.size()) - 1;
    out.p_value = out.dof > 0 ? boost::math::gamma_q(0.5 * out.dof, 0.5 * out.statistic) : 1.0;
    return out;
}

bool OracleSuite::passed() const { return failures() == 0; }

int OracleSuite::failures() const {
    int f = 0;
    for (const auto& c : cases) f += c.pass ? 0 : 1;
    return f;
}

OracleSuite clairvoyant_suite(int instances, std::uint64_t seed) {
    OracleSuite suite{"clairvoyant", {}};
    Rng rng = make_rng(seed, 21);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> ud(0.2, 2.0), ul(0.5, 3.0);
    for (int i = 0; i < instances; ++i) {
        Matrix th(2, 2);
        for (Index k = 0; k < 4; ++k) th.data()[k] = normal(rng);
        const Vector d0 = Vector::NullaryExpr(2, [&](Index) { return ud(rng); });
        const double l = ul(rng);
        const PriceSensitivityMatrix theta(th);
        const ClairvoyantResult cv = clairvoyant_price(theta, d0, l);
        const double grid = polar_grid_best(theta, d0, l);
        const bool feasible = cv.price.norm() <= l + 1e-12;
        suite.cases.push_back({describe("instance", i), cv.value, grid, feasible && cv.value >= grid - 1e-3 * l * l});
    }
    return suite;
}

OracleSuite theta_step_suite(int instances, std::uint64_t seed, int boundary_samples) {
    OracleSuite suite{"theta-step", {}};
    Rng rng = make_rng(seed, 22);
    std::normal_distribution<double> normal(0.0, 0.3);
    std::uniform_int_distribution<int> ut(3, 20);
    std::uniform_real_distribution<double> ur(0.1, 5.0), u01(0.0, 1.0);
    const int n = 3;
    for (int i = 0; i < instances; ++i) {
        Matrix center(n, n);
        for (Index k = 0; k < center.size(); ++k) center.data()[k] = normal(rng);
        GramState gram(n);
        const int t = ut(rng);
        for (int s = 0; s < t; ++s) gram.append(uniform_on_sphere(n, std::sqrt(u01(rng)), rng));
        const ConfidenceEllipsoid ell(PriceSensitivityMatrix(center), gram, ur(rng), 1e3);
        const Vector p = uniform_on_sphere(n, 1.0, rng);
        bool clamped = true;
        const PriceSensitivityMatrix step = theta_step(ell, p, &clamped);
        const double value = p.dot(step.entries() * p);
        const double ref = boundary_sample_best(ell, p, boundary_samples, rng);
        suite.cases.push_back({describe("instance", i), value, ref, !clamped && value >= ref - 1e-9});
    }
    return suite;
}

OracleSuite ofu_suite(int instances, std::uint64_t seed, const PolicyConfig& cfg) {
    OracleSuite suite{"ofu", {}};
    Rng rng = make_rng(seed, 23);
    std::uniform_real_distribution<double> udiag(-2.0, -0.5), uoff(-0.3, 0.3), ud(0.5, 1.5), uscale(0.5, 2.0),
        u01(0.0, 1.0);
    std::uniform_int_distribution<int> ut(2, 30);
    std::normal_distribution<double> noise(0.0, 0.2);
    const int n = 2;
    const double l = 1.0, k = 3.0;
    for (int i = 0; i < instances; ++i) {
        Matrix star(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) star(a, b) = a == b ? udiag(rng) : uoff(rng);
        Matrix hat = star;
        for (Index c = 0; c < hat.size(); ++c) hat.data()[c] += noise(rng);
        const PriceSensitivityMatrix center = scale_Z(PriceSensitivityMatrix(hat), k);
        GramState gram(n);
        const int t = ut(rng);
        for (int s = 0; s < t; ++s) gram.append(uniform_on_sphere(n, l * std::sqrt(u01(rng)), rng));
        const Vector d0 = Vector::NullaryExpr(n, [&](Index) { return ud(rng); });
        const ConfidenceEllipsoid probe(center, gram, 1.0, k);
        const double radius = quadratic_form(probe, star) * uscale(rng) + 1e-3;
        const ConfidenceEllipsoid ell(center, gram, radius, k);

        const OfuResult res = ofu_select(ell, d0, l, cfg, rng);
        const double grid = joint_grid_best(optimism_ellipsoid(ell, cfg), d0, l);
        suite.cases.push_back({describe("joint grid", i), res.value, grid, res.value >= grid - 1e-2 * l * l});

        const PriceSensitivityMatrix theta_star(star);
        if (contains(ell, theta_star)) {
            const double r_star = clairvoyant_price(theta_star, d0, l).value;
            suite.cases.push_back({describe("optimism", i), res.value, r_star, res.value >= r_star - 1e-6});
        }
    }
    return suite;
}

OracleSuite prior_recovery_suite(const PriorSpec& spec, const std::vector<Vector>& embeddings,
                                 const SamplerConfig& chain, long direct_draws, std::uint64_t seed) {
    OracleSuite suite{"posterior", {}};
    Rng chain_rng = make_rng(seed, 24);
    Rng mc_rng = make_rng(seed, 25);
    const int n = spec.n();
    const PosteriorSummary post = posterior_mean(spec, History(n), 0.0, chain, embeddings, chain_rng);
    const PriorMonteCarlo mc = direct_prior_mc(spec, embeddings, direct_draws, mc_rng, chain.z_mode);
    for (Index c = 0; c < n * n; ++c) {
        const double se = std::sqrt(post.mcse(c) * post.mcse(c) + mc.se(c) * mc.se(c));
        const double diff = std::abs(post.theta_hat.entries()(c) - mc.mean(c));
        std::ostringstream label;
        label << "entry (" << c % n << "," << c / n << ")";
        suite.cases.push_back({label.str(), post.theta_hat.entries()(c), mc.mean(c),
                               se > 0.0 ? diff <= 3.0 * se : diff <= 1e-12});
    }
    if (spec.has_support()) {
        const std::vector<double> probs = support_size_probabilities(spec);
        const ChiSquare cs = chi_square(mc.size_counts, probs);
        suite.cases.push_back({"direct support-size chi-square p-value", cs.p_value, 0.01, cs.p_value >= 0.01});

        double mean = 0.0;
        for (std::size_t j = 0; j < probs.size(); ++j) mean += static_cast<double>(j) * probs[j];
        suite.cases.push_back({"chain mean support size", post.mean_support_size, mean,
                               std::abs(post.mean_support_size - mean) <= 3.0 * post.support_size_mcse});
    }
    return suite;
}

}  // namespace netprice::oracle
