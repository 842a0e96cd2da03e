#include <netprice/kernel_system.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace netprice {

namespace {

// Nonzero integer frequency vectors in the half-space "first nonzero coordinate positive",
// ordered by squared length then lexicographically.  Enough are produced to cover `count`.
std::vector<Eigen::VectorXi> half_space_frequencies(int dim, int count) {
    std::vector<Eigen::VectorXi> out;
    for (int radius = 1;; ++radius) {
        out.clear();
        Eigen::VectorXi k = Eigen::VectorXi::Constant(dim, -radius);
        while (true) {
            int first = 0;
            for (int c = 0; c < dim; ++c) {
                if (k(c) != 0) {
                    first = k(c);
                    break;
                }
            }
            if (first > 0 && k.squaredNorm() <= radius * radius) out.push_back(k);
            int c = dim - 1;
            while (c >= 0 && k(c) == radius) {
                k(c) = -radius;
                --c;
            }
            if (c < 0) break;
            ++k(c);
        }
        if (static_cast<int>(out.size()) >= count) break;
    }
    std::sort(out.begin(), out.end(), [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
        const int na = a.squaredNorm(), nb = b.squaredNorm();
        if (na != nb) return na < nb;
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    out.resize(count);
    return out;
}

}  // namespace

KernelSystem::KernelSystem(double decay_q, int truncation, int domain_dim) : q_(decay_q), d_(domain_dim) {
    if (!(decay_q > 0.0)) throw ParameterError("KernelSystem: decay_q must be positive");
    if (truncation < 1) throw ParameterError("KernelSystem: truncation must be at least 1");
    if (domain_dim < 1) throw ParameterError("KernelSystem: domain_dim must be at least 1");

    mu_.resize(truncation);
    for (int i = 0; i < truncation; ++i) mu_(i) = std::exp(-decay_q * (i + 1));

    modes_.push_back({Eigen::VectorXi::Zero(domain_dim), Mode::constant});
    const int n_freq = truncation / 2;  // (m − 1) trig functions, two per frequency, rounded up
    for (const auto& k : half_space_frequencies(domain_dim, n_freq)) {
        modes_.push_back({k, Mode::cosine});
        modes_.push_back({k, Mode::sine});
    }
    modes_.resize(truncation);

    const double volume = std::pow(2.0 * std::numbers::pi, domain_dim);
    norm_const_ = 1.0 / std::sqrt(volume);
    norm_trig_ = std::sqrt(2.0 / volume);
}

int KernelSystem::default_truncation(double decay_q, int n_products, int horizon) {
    if (!(decay_q > 0.0) || n_products < 1 || horizon < 1)
        throw ParameterError("default_truncation: need q > 0, N ≥ 1, T ≥ 1");
    const double n2t = static_cast<double>(n_products) * n_products * horizon;
    return static_cast<int>(std::ceil((2.0 / decay_q) * std::log(n2t) + 8.0));
}

double KernelSystem::basis(int i, const Vector& x) const {
    const Mode& mode = modes_[static_cast<std::size_t>(i)];
    if (mode.kind == Mode::constant) return norm_const_;
    double phase = 0.0;
    for (int c = 0; c < d_; ++c) phase += mode.freq(c) * x(c);
    return norm_trig_ * (mode.kind == Mode::cosine ? std::cos(phase) : std::sin(phase));
}

Vector KernelSystem::basis_values(const Vector& x) const {
    if (x.size() != d_) throw ParameterError("KernelSystem::basis_values: point has wrong dimension");
    Vector out(truncation());
    for (int i = 0; i < truncation(); ++i) out(i) = basis(i, x);
    return out;
}

SeriesFunction::SeriesFunction(std::shared_ptr<const KernelSystem> ks, Vector coeffs)
    : ks_(std::move(ks)), coeffs_(std::move(coeffs)) {
    if (!ks_) throw ParameterError("SeriesFunction: null kernel system");
    if (coeffs_.size() != ks_->truncation())
        throw ParameterError("SeriesFunction: coefficient count must equal the truncation");
}

double SeriesFunction::evaluate(const Vector& x) const { return ks_->basis_values(x).dot(coeffs_); }

SeriesFunction SeriesFunction::operator+(const SeriesFunction& other) const {
    if (ks_ != other.ks_) throw ParameterError("SeriesFunction: sum over different kernel systems");
    return SeriesFunction(ks_, coeffs_ + other.coeffs_);
}

double power_norm(const SeriesFunction& f, double beta) {
    const Vector& mu = f.kernel().eigenvalues();
    double sum = 0.0;
    for (Index i = 0; i < mu.size(); ++i) sum += f.coeffs()(i) * f.coeffs()(i) / std::pow(mu(i), beta);
    return std::sqrt(sum);
}

SeriesFunction kl_sample_scaling(const std::shared_ptr<const KernelSystem>& ks, double gamma, Rng& rng) {
    if (!(gamma >= 1.0)) throw ParameterError("kl_sample_scaling: gamma must be ≥ 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector b(ks->truncation());
    for (Index i = 0; i < b.size(); ++i) b(i) = std::sqrt(gamma * ks->eigenvalue(static_cast<int>(i))) * normal(rng);
    return SeriesFunction(ks, std::move(b));
}

SeriesFunction kl_sample_powers(const std::shared_ptr<const KernelSystem>& ks, double gamma, Rng& rng) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("kl_sample_powers: gamma must lie in (0, 1]");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector b(ks->truncation());
    for (Index i = 0; i < b.size(); ++i) b(i) = std::pow(ks->eigenvalue(static_cast<int>(i)), gamma / 2.0) * normal(rng);
    return SeriesFunction(ks, std::move(b));
}

Matrix pairwise_design(const KernelSystem& ks, const std::vector<Vector>& embeddings) {
    const auto n = static_cast<Index>(embeddings.size());
    Matrix design(n * n, ks.truncation());
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) design.row(j * n + i) = ks.basis_values(embeddings[i] - embeddings[j]).transpose();
    return design;
}

}  // namespace netprice
