#include <netprice/priors.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace netprice {

GammaDensity GammaDensity::shifted_exponential(double rate, double shift) {
    if (!(rate > 0.0)) throw ParameterError("GammaDensity: rate must be positive");
    GammaDensity d;
    d.kind_ = Kind::shifted_exponential;
    d.rate_ = rate;
    d.lo_ = shift;
    d.hi_ = std::numeric_limits<double>::infinity();
    return d;
}

GammaDensity GammaDensity::uniform(double lo, double hi) {
    if (!(lo < hi) || !std::isfinite(hi)) throw ParameterError("GammaDensity: uniform needs finite lo < hi");
    GammaDensity d;
    d.kind_ = Kind::uniform;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
}

double GammaDensity::log_pdf(double gamma) const {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (kind_ == Kind::uniform) return (gamma > lo_ && gamma <= hi_) ? -std::log(hi_ - lo_) : neg_inf;
    return gamma >= lo_ ? std::log(rate_) - rate_ * (gamma - lo_) : neg_inf;
}

double GammaDensity::sample(Rng& rng) const {
    if (kind_ == Kind::uniform) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return hi_ - u(rng) * (hi_ - lo_);
    }
    std::exponential_distribution<double> e(rate_);
    return lo_ + e(rng);
}

double GammaDensity::total_mass() const {
    const double a = lo_;
    const double b = kind_ == Kind::uniform ? hi_ : lo_ + 60.0 / rate_;
    const int intervals = 20000;
    const double h = (b - a) / intervals;
    // Endpoints are evaluated just inside the support so the half-open uniform is handled.
    auto f = [&](double x) { return std::exp(log_pdf(std::clamp(x, std::nextafter(a, b), b))); };
    double sum = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * h / 3.0;
}

PriorSpec::PriorSpec(int n, double k_cap, PriorKind kind) : n_(n), k_cap_(k_cap), kind_(std::move(kind)) {
    if (n < 1) throw ParameterError("PriorSpec: n must be positive");
    if (!(k_cap > 0.0)) throw ParameterError("PriorSpec: k_cap must be positive");
    if (const auto* l0 = std::get_if<L0Prior>(&kind_)) {
        if (!(l0->alpha_mix > 0.0 && l0->alpha_mix < 1.0))
            throw ParameterError("PriorSpec: alpha_mix must lie strictly inside (0, 1)");
    }
    if (const auto* s = std::get_if<SpectralScalingPrior>(&kind_)) {
        if (!s->kernel) throw ParameterError("PriorSpec: spectral prior needs a kernel system");
        if (s->gamma_density.lower() < 1.0)
            throw ParameterError("PriorSpec: scaling prior density must live on [1, ∞)");
        if (std::abs(s->gamma_density.total_mass() - 1.0) > 1e-6)
            throw ParameterError("PriorSpec: gamma density does not integrate to 1");
    }
    if (const auto* s = std::get_if<SpectralPowersPrior>(&kind_)) {
        if (!s->kernel) throw ParameterError("PriorSpec: spectral prior needs a kernel system");
        if (s->gamma_density.lower() < 0.0 || s->gamma_density.upper() > 1.0)
            throw ParameterError("PriorSpec: powers prior density must live on (0, 1]");
        if (std::abs(s->gamma_density.total_mass() - 1.0) > 1e-6)
            throw ParameterError("PriorSpec: gamma density does not integrate to 1");
    }
}

bool PriorSpec::is_spectral() const {
    return std::holds_alternative<SpectralScalingPrior>(kind_) || std::holds_alternative<SpectralPowersPrior>(kind_);
}

std::string PriorSpec::name() const {
    switch (kind_.index()) {
        case 0: return "l0";
        case 1: return "offdiag";
        case 2: return "spectral_scaling";
        default: return "spectral_powers";
    }
}

double PriorSpec::frobenius_radius() const { return std::sqrt(k_cap_ * k_cap_ * n_ + 1.0); }

const KernelSystem* PriorSpec::kernel() const {
    if (const auto* s = std::get_if<SpectralScalingPrior>(&kind_)) return s->kernel.get();
    if (const auto* s = std::get_if<SpectralPowersPrior>(&kind_)) return s->kernel.get();
    return nullptr;
}

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

namespace {

double log_sum_exp(const std::vector<double>& xs) {
    const double m = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

// log of the aggregated (per-size) weight, before the C(N², j)⁻¹ split across supports.
double log_size_weight_unsplit(const PriorSpec& spec, int j) {
    const int cells = spec.n() * spec.n();
    if (const auto* l0 = std::get_if<L0Prior>(&spec.kind())) {
        std::vector<double> terms;
        for (int i = 0; i <= cells; ++i) terms.push_back(i * std::log(l0->alpha_mix));
        return j * std::log(l0->alpha_mix) - log_sum_exp(terms);
    }
    if (j == 0) return -std::numeric_limits<double>::infinity();
    double norm = 0.0;
    for (int i = 1; i <= cells; ++i) norm += 1.0 / (static_cast<double>(i) * i);
    return -2.0 * std::log(static_cast<double>(j)) - std::log(norm);
}

void check_support_prior(const PriorSpec& spec, int support_size) {
    if (spec.is_spectral()) throw ParameterError("mixing weights are defined for the L0 and OffDiag priors only");
    if (support_size < 0 || support_size > spec.n() * spec.n())
        throw ParameterError("support size must lie in [0, N²]");
}

std::vector<Index> uniform_support(int cells, int size, Rng& rng) {
    std::vector<Index> all(static_cast<std::size_t>(cells));
    std::iota(all.begin(), all.end(), Index{0});
    for (int i = 0; i < size; ++i) {
        std::uniform_int_distribution<int> pick(i, cells - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    all.resize(static_cast<std::size_t>(size));
    std::sort(all.begin(), all.end());
    return all;
}

int draw_support_size(const PriorSpec& spec, Rng& rng) {
    const int cells = spec.n() * spec.n();
    std::vector<double> w(static_cast<std::size_t>(cells + 1));
    for (int j = 0; j <= cells; ++j) w[static_cast<std::size_t>(j)] = std::exp(log_size_weight_unsplit(spec, j));
    std::discrete_distribution<int> dist(w.begin(), w.end());
    return dist(rng);
}

}  // namespace

double log_mixing_weight(const PriorSpec& spec, int support_size) {
    check_support_prior(spec, support_size);
    return log_size_weight_unsplit(spec, support_size) - log_binomial(spec.n() * spec.n(), support_size);
}

double log_support_size_weight(const PriorSpec& spec, int support_size) {
    check_support_prior(spec, support_size);
    return log_size_weight_unsplit(spec, support_size);
}

double offdiag_log_component_density(int n, bool diagonal, DiagonalSign sign, double value) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (value == 0.0 || !std::isfinite(value)) return neg_inf;
    if (diagonal) {
        const double log_std_normal = -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * value * value;
        if (sign == DiagonalSign::positive) return value > 0.0 ? std::log(2.0) + log_std_normal : neg_inf;
        return log_std_normal;
    }
    const double shape = 1.0 / n;
    return (2.0 * shape - 1.0) * std::log(std::abs(value)) - value * value - std::lgamma(shape);
}

double offdiag_sample_component(int n, bool diagonal, DiagonalSign sign, Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    if (diagonal) {
        std::normal_distribution<double> normal(0.0, 1.0);
        double v = 0.0;
        while (v == 0.0) v = std::abs(normal(rng));
        return (sign == DiagonalSign::symmetric && coin(rng)) ? -v : v;
    }
    std::gamma_distribution<double> gamma(1.0 / n, 1.0);
    double v = 0.0;
    while (v == 0.0) v = std::sqrt(gamma(rng));
    return coin(rng) ? -v : v;
}

double log_uniform_ball_density(int k, double radius) {
    if (k == 0) return 0.0;
    return -0.5 * k * std::log(std::numbers::pi) + std::lgamma(0.5 * k + 1.0) - k * std::log(radius);
}

Vector sample_uniform_ball(int k, double radius, Rng& rng) {
    if (k == 0) return Vector();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return uniform_on_sphere(k, 1.0, rng) * (radius * std::pow(u(rng), 1.0 / k));
}

Vector spectral_coefficients(const PriorSpec& spec, double gamma, const Vector& z) {
    const KernelSystem* ks = spec.kernel();
    if (!ks) throw ParameterError("spectral_coefficients: prior is not spectral");
    const Vector& mu = ks->eigenvalues();
    if (std::holds_alternative<SpectralScalingPrior>(spec.kind()))
        return ((gamma * mu.array()).sqrt() * z.array()).matrix();
    return (mu.array().pow(gamma / 2.0) * z.array()).matrix();
}

PriorDraw sample_prior(const PriorSpec& spec, const std::vector<Vector>& embeddings, Rng& rng) {
    const int n = spec.n();
    PriorDraw draw;
    draw.theta = Matrix::Zero(n, n);

    if (spec.is_spectral()) {
        if (static_cast<int>(embeddings.size()) != n)
            throw ParameterError("sample_prior: spectral prior needs one embedding per product");
        const KernelSystem& ks = *spec.kernel();
        const bool scaling = std::holds_alternative<SpectralScalingPrior>(spec.kind());
        const GammaDensity& density = scaling ? std::get<SpectralScalingPrior>(spec.kind()).gamma_density
                                              : std::get<SpectralPowersPrior>(spec.kind()).gamma_density;
        const bool no_diag = scaling ? std::get<SpectralScalingPrior>(spec.kind()).exclude_diagonal
                                     : std::get<SpectralPowersPrior>(spec.kind()).exclude_diagonal;
        draw.gamma = density.sample(rng);
        std::normal_distribution<double> normal(0.0, 1.0);
        draw.kl_coords.resize(ks.truncation());
        for (Index i = 0; i < draw.kl_coords.size(); ++i) draw.kl_coords(i) = normal(rng);
        const Vector b = spectral_coefficients(spec, draw.gamma, draw.kl_coords);
        const Vector flat = pairwise_design(ks, embeddings) * b;
        draw.theta = Eigen::Map<const Matrix>(flat.data(), n, n);
        if (no_diag) draw.theta.diagonal().setZero();
        return draw;
    }

    const int size = draw_support_size(spec, rng);
    draw.support = uniform_support(n * n, size, rng);
    if (std::holds_alternative<L0Prior>(spec.kind())) {
        const Vector values = sample_uniform_ball(size, spec.frobenius_radius(), rng);
        for (int k = 0; k < size; ++k) draw.theta(draw.support[static_cast<std::size_t>(k)]) = values(k);
    } else {
        const auto sign = std::get<OffDiagPrior>(spec.kind()).diagonal_sign;
        for (Index cell : draw.support) {
            const bool diagonal = (cell % n) == (cell / n);
            draw.theta(cell) = offdiag_sample_component(n, diagonal, sign, rng);
        }
    }
    return draw;
}

}  // namespace netprice
