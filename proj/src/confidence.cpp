#include <netprice/confidence.hpp>
#include <cmath>
#include <iostream>
#include <numbers>

namespace netprice {

GramState::GramState(Index n) : v_(Matrix::Zero(n, n)) {}

void GramState::append(const Vector& price) {
    if (price.size() != v_.rows()) throw ParameterError("GramState::append: dimension mismatch");
    v_.noalias() += price * price.transpose();
    ++t_;
}

ConfidenceEllipsoid::ConfidenceEllipsoid(PriceSensitivityMatrix center, GramState shape, double radius_sq,
                                         double k_cap, double epsilon)
    : center_(std::move(center)), shape_(std::move(shape)), radius_sq_(radius_sq), k_cap_(k_cap), epsilon_(epsilon) {
    if (center_.dimension() != shape_.n()) throw ParameterError("ConfidenceEllipsoid: dimension mismatch");
    if (!(radius_sq_ >= 0.0)) throw ParameterError("ConfidenceEllipsoid: radius_sq must be ≥ 0");
    if (!(k_cap_ > 0.0)) throw ParameterError("ConfidenceEllipsoid: k_cap must be positive");
    if (!(epsilon_ > 0.0 && epsilon_ < 1.0)) throw ParameterError("ConfidenceEllipsoid: epsilon must lie in (0, 1)");
    if (center_.operator_norm() > k_cap_ + 1e-9)
        throw ParameterError("ConfidenceEllipsoid: center norm exceeds k_cap");
}

void RadiusConstants::validate() const {
    if (!(beta_embed > 0.0 && beta_embed < alpha_smooth && alpha_smooth <= 1.0))
        throw ParameterError("RadiusConstants: need 0 < beta_embed < alpha_smooth ≤ 1");
    if (!(c_alpha_beta >= 0.0) || !(c_beta_q >= 0.0) || !(c_beta_q_alpha >= 0.0) || !(embed_M > 0.0) ||
        !(c_orders >= 0.0))
        throw ParameterError("RadiusConstants: constants must be nonnegative");
    if (!(radius_scale > 0.0)) throw ParameterError("RadiusConstants: radius_scale must be positive");
}

namespace {

void check_common(int t, double epsilon, int n, double c1, double l) {
    if (t < 1) throw ParameterError("radius: t must be ≥ 1");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("radius: epsilon must lie in (0, 1)");
    if (n < 1) throw ParameterError("radius: n must be ≥ 1");
    if (!(c1 > 0.0) || !(l > 0.0)) throw ParameterError("radius: c1 and l must be positive");
}

}  // namespace

double radius_l0(int t, double epsilon, int j_star, int n, double k_cap, double alpha_mix, double c1, double l) {
    check_common(t, epsilon, n, c1, l);
    if (!(alpha_mix > 0.0 && alpha_mix < 1.0)) throw ParameterError("radius_l0: alpha_mix must lie in (0, 1)");
    if (!(k_cap >= 0.0)) throw ParameterError("radius_l0: k_cap must be ≥ 0");
    if (j_star < 0) throw ParameterError("radius_l0: j_star must be ≥ 0");
    if (j_star == 0) {
        std::cerr << "warning: radius_l0 called with j_star = 0; using 1\n";
        j_star = 1;
    }
    const double j = j_star;
    const double nn = static_cast<double>(n) * n;
    const double inner = j * std::log(std::numbers::e * nn * t * std::sqrt(k_cap * k_cap * n + 1.0) / j) -
                         std::log(alpha_mix * (1.0 - alpha_mix)) + std::log(2.0 / epsilon);
    return 3.0 * l * l / t + 8.0 * c1 * inner;
}

double radius_offdiag(int t, double epsilon, double theta_min, int n, double k_cap, double c1, double l) {
    check_common(t, epsilon, n, c1, l);
    if (!(theta_min > 0.0)) throw ParameterError("radius_offdiag: theta_min must be positive");
    const double inner = k_cap * k_cap * n + (2.0 * n - 1.0) * std::log(t / theta_min) + 4.0 * std::log(n) +
                         std::log(std::numbers::pi * std::numbers::pi / 6.0) + std::log(2.0 / epsilon);
    return 3.0 * l * l * theta_min * theta_min / t + 8.0 * c1 * inner;
}

double radius_spectral_scaling(int t, double epsilon, int n, const RadiusConstants& rc, double kappa_interp_norm,
                               double c1, double l) {
    check_common(t, epsilon, n, c1, l);
    rc.validate();
    const double a = rc.alpha_smooth, b = rc.beta_embed;
    if (a == b) throw ParameterError("radius_spectral_scaling: alpha_smooth equals beta_embed");
    if (!(kappa_interp_norm >= 0.0)) throw ParameterError("radius_spectral_scaling: norm must be ≥ 0");
    const double growth_exp = rc.scaling_exponent == ScalingExponent::display ? (1.0 - a) / (1.0 - b)
                                                                               : (1.0 - a) / (a - b);
    const double approx = rc.c_alpha_beta * std::pow(kappa_interp_norm, 2.0 * (1.0 - b) / (a - b)) *
                          std::pow(4.0 * n * n * static_cast<double>(t), growth_exp);
    const double lg = std::log(2.0 * n * std::sqrt(static_cast<double>(t)));
    return 3.0 * l * l + 8.0 * c1 * (approx + rc.c_beta_q * lg * lg + std::log(2.0 / epsilon));
}

double radius_spectral_powers(int t, double epsilon, int n, const RadiusConstants& rc, double kappa_alpha_norm_sq,
                              double c1, double l) {
    check_common(t, epsilon, n, c1, l);
    rc.validate();
    if (!(kappa_alpha_norm_sq >= 0.0)) throw ParameterError("radius_spectral_powers: norm must be ≥ 0");
    const double lg = std::log(static_cast<double>(t) * n * n);
    return 3.0 * l * l / t +
           8.0 * c1 * (rc.c_alpha_beta * kappa_alpha_norm_sq + rc.c_beta_q_alpha * lg * lg + std::log(2.0 / epsilon));
}

double quadratic_form(const ConfidenceEllipsoid& ell, const Matrix& theta) {
    if (theta.rows() != ell.shape().n() || theta.cols() != ell.shape().n())
        throw ParameterError("quadratic_form: dimension mismatch");
    const Matrix delta = theta - ell.center().entries();
    return (delta * ell.shape().v() * delta.transpose()).trace();
}

bool contains(const ConfidenceEllipsoid& ell, const PriceSensitivityMatrix& theta) {
    return quadratic_form(ell, theta.entries()) < ell.radius_sq() && theta.operator_norm() <= ell.k_cap() + 1e-9;
}

double regret_bound_lemma1(int n, int t_horizon, double l, double k_cap, const std::vector<double>& radii) {
    if (n < 1 || t_horizon < 1) throw ParameterError("regret_bound_lemma1: n and T must be ≥ 1");
    if (static_cast<int>(radii.size()) != t_horizon)
        throw ParameterError("regret_bound_lemma1: need one radius per period");
    double sum = 0.0;
    for (double r : radii) sum += r;
    const double T = t_horizon;
    return l * l * std::sqrt(8.0 * n * std::log(1.0 + 2.0 * T * l * l / n)) *
           std::sqrt(sum + 2.0 * k_cap * k_cap * T * n);
}

Regime parse_regime(const std::string& tag) {
    if (tag == "l0") return Regime::l0;
    if (tag == "offdiag") return Regime::offdiag;
    if (tag == "spectral_scaling") return Regime::spectral_scaling;
    if (tag == "spectral_powers") return Regime::spectral_powers;
    throw ParameterError("unknown regime tag '" + tag + "'");
}

std::string regime_name(Regime regime) {
    switch (regime) {
        case Regime::l0: return "l0";
        case Regime::offdiag: return "offdiag";
        case Regime::spectral_scaling: return "spectral_scaling";
        default: return "spectral_powers";
    }
}

double theorem_bound(Regime regime, const TheoremInputs& in) {
    if (in.horizon < 1 || in.n < 1) throw ParameterError("theorem_bound: n and T must be ≥ 1");
    const double T = in.horizon, N = in.n, L = in.l, K = in.k_cap, c1 = in.c1;
    const double log_eps = std::log(2.0 / in.epsilon);
    const double exploration = std::sqrt(8.0 * N * std::log(1.0 + 2.0 * T * L * L / N));
    double radicand = 0.0;
    switch (regime) {
        case Regime::l0: {
            const double j = std::max(1, in.j_star);
            radicand = 3.0 * L * L * std::log(T) +
                       8.0 * c1 * T *
                           (j * std::log(std::numbers::e * N * N * std::sqrt(K * K * N + 1.0) / j) -
                            std::log(in.alpha_mix * (1.0 - in.alpha_mix)) + log_eps) +
                       8.0 * c1 * j * (T + 1.0) * std::log(T + 1.0) + 2.0 * T * N * K * K;
            break;
        }
        case Regime::offdiag: {
            if (!(in.theta_min > 0.0)) throw ParameterError("theorem_bound: theta_min must be positive");
            const double th = in.theta_min;
            radicand = 3.0 * L * L * th * th * std::log(T) +
                       8.0 * c1 * T * (K * K * N + in.rc.c_orders * N * std::log(T / th) + log_eps) +
                       2.0 * K * K * T * N;
            break;
        }
        case Regime::spectral_scaling: {
            in.rc.validate();
            const double a = in.rc.alpha_smooth, b = in.rc.beta_embed;
            const double c_kappa = in.rc.c_alpha_beta * std::pow(in.kappa_norm, 2.0 * (1.0 - b) / (a - b));
            const double lg = std::log(8.0 * N * T);
            radicand = 3.0 * L * L * T +
                       8.0 * c1 * T *
                           (c_kappa * std::pow(4.0 * N * N * T, (1.0 - a) / (1.0 - b)) + in.rc.c_beta_q * lg * lg +
                            log_eps) +
                       2.0 * K * K * T * N;
            break;
        }
        case Regime::spectral_powers: {
            in.rc.validate();
            const double ln2 = std::log(N * N), lt = std::log(T);
            radicand = 3.0 * L * L * std::log(T) +
                       8.0 * c1 * T *
                           (in.rc.c_alpha_beta * in.kappa_norm + in.rc.c_beta_q_alpha * (ln2 * ln2 + lt * lt) +
                            log_eps) +
                       2.0 * K * K * T * N;
            break;
        }
    }
    return L * L * std::sqrt(radicand) * exploration;
}

double regime_radius(Regime regime, int t, const TheoremInputs& in) {
    switch (regime) {
        case Regime::l0: return radius_l0(t, in.epsilon, in.j_star, in.n, in.k_cap, in.alpha_mix, in.c1, in.l);
        case Regime::offdiag: return radius_offdiag(t, in.epsilon, in.theta_min, in.n, in.k_cap, in.c1, in.l);
        case Regime::spectral_scaling:
            return radius_spectral_scaling(t, in.epsilon, in.n, in.rc, in.kappa_norm, in.c1, in.l);
        default: return radius_spectral_powers(t, in.epsilon, in.n, in.rc, in.kappa_norm, in.c1, in.l);
    }
}

double composed_bound(Regime regime, const TheoremInputs& in) {
    std::vector<double> radii;
    radii.reserve(static_cast<std::size_t>(in.horizon));
    for (int t = 1; t <= in.horizon; ++t) radii.push_back(in.rc.radius_scale * regime_radius(regime, t, in));
    return regret_bound_lemma1(in.n, in.horizon, in.l, in.k_cap, radii);
}

}  // namespace netprice
