#include <netprice/demand_env.hpp>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace netprice {

PriceSensitivityMatrix::PriceSensitivityMatrix(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) throw ParameterError("PriceSensitivityMatrix: matrix must be square");
    if (!entries_.allFinite()) throw ParameterError("PriceSensitivityMatrix: entries must be finite");
}

Index PriceSensitivityMatrix::nonzeros() const { return (entries_.array() != 0.0).count(); }

EnvSpec::EnvSpec(Vector baseline_demand, PriceSensitivityMatrix theta_star, double noise_sigma, double noise_q,
                 double price_radius, double norm_bound, std::vector<Vector> embeddings)
    : baseline_(std::move(baseline_demand)),
      theta_star_(std::move(theta_star)),
      sigma_(noise_sigma),
      q_(noise_q),
      l_(price_radius),
      k_(norm_bound),
      embeddings_(std::move(embeddings)) {
    if (baseline_.size() < 1) throw ParameterError("EnvSpec: need at least one product");
    if (theta_star_.dimension() != baseline_.size())
        throw ParameterError("EnvSpec: theta_star dimension does not match baseline_demand");
    if ((baseline_.array() <= 0.0).any()) throw ParameterError("EnvSpec: baseline demand must be strictly positive");
    if (!(sigma_ > 0.0) || !(q_ > 0.0) || !(l_ > 0.0) || !(k_ > 0.0))
        throw ParameterError("EnvSpec: noise_sigma, noise_q, price_radius and norm_bound must be positive");
    const double norm = operator_norm(theta_star_.entries());
    if (norm > k_ * (1.0 + 1e-12))
        throw ParameterError("EnvSpec: operator norm of theta_star (" + std::to_string(norm) +
                             ") exceeds norm_bound (" + std::to_string(k_) + ")");
    if (!embeddings_.empty() && static_cast<Index>(embeddings_.size()) != baseline_.size())
        throw ParameterError("EnvSpec: need one embedding per product");
}

PriceSensitivityMatrix gen_theta_l0(int n, int s, double k_cap, std::uint64_t seed) {
    if (n < 1) throw ParameterError("gen_theta_l0: n must be positive");
    if (s < 0 || s > n * n) throw ParameterError("gen_theta_l0: support size must lie in [0, n²]");
    if (!(k_cap > 0.0)) throw ParameterError("gen_theta_l0: k_cap must be positive");
    Rng rng = make_rng(seed, 11);

    std::vector<int> cells(static_cast<std::size_t>(n * n));
    std::iota(cells.begin(), cells.end(), 0);
    // Partial Fisher–Yates: the first s cells are a uniform s-subset.
    for (int i = 0; i < s; ++i) {
        std::uniform_int_distribution<int> pick(i, n * n - 1);
        std::swap(cells[static_cast<std::size_t>(i)], cells[static_cast<std::size_t>(pick(rng))]);
    }
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix theta = Matrix::Zero(n, n);
    for (int i = 0; i < s; ++i) {
        double v = 0.0;
        while (v == 0.0) v = unif(rng);
        const int cell = cells[static_cast<std::size_t>(i)];
        theta(cell % n, cell / n) = v;
    }
    const double norm = operator_norm(theta);
    if (norm > k_cap) theta *= k_cap / norm;
    return PriceSensitivityMatrix(std::move(theta));
}

PriceSensitivityMatrix gen_theta_offdiag(int n, double c_off, std::uint64_t seed, double diag_lo, double diag_hi) {
    if (n < 1) throw ParameterError("gen_theta_offdiag: n must be positive");
    if (!(c_off > 0.0)) throw ParameterError("gen_theta_offdiag: c_off must be positive");
    if (!(diag_lo <= diag_hi)) throw ParameterError("gen_theta_offdiag: diag range must satisfy lo ≤ hi");
    Rng rng = make_rng(seed, 12);
    std::uniform_real_distribution<double> diag(diag_lo, diag_hi);
    const double bound = c_off / n;
    std::uniform_real_distribution<double> off(-bound, bound);
    Matrix theta(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) theta(i, j) = (i == j) ? diag(rng) : off(rng);
    return PriceSensitivityMatrix(std::move(theta));
}

SpectralTruth gen_theta_spectral(const std::vector<Vector>& embeddings, std::shared_ptr<const KernelSystem> ks,
                                 double alpha, std::uint64_t coeff_seed, double diag_lo, double diag_hi) {
    if (embeddings.empty()) throw ParameterError("gen_theta_spectral: embeddings must be nonempty");
    if (!ks) throw ParameterError("gen_theta_spectral: null kernel system");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("gen_theta_spectral: alpha must lie in (0, 1]");
    if (!(diag_lo <= diag_hi)) throw ParameterError("gen_theta_spectral: diag range must satisfy lo ≤ hi");
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        if (embeddings[i].size() != ks->domain_dim())
            throw ParameterError("gen_theta_spectral: embedding dimension differs from the kernel domain");
        for (std::size_t j = 0; j < i; ++j)
            if (embeddings[i] == embeddings[j]) throw ParameterError("gen_theta_spectral: embeddings must be distinct");
    }

    Rng rng = make_rng(coeff_seed, 13);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int m = ks->truncation();
    Vector a(m);
    do {
        for (int i = 0; i < m; ++i) a(i) = normal(rng);
    } while (a.norm() == 0.0);
    a.normalize();
    Vector b(m);
    for (int i = 0; i < m; ++i) b(i) = a(i) * std::pow(ks->eigenvalue(i), alpha / 2.0);
    SeriesFunction kappa(ks, std::move(b));

    const auto n = static_cast<Index>(embeddings.size());
    std::uniform_real_distribution<double> diag(diag_lo, diag_hi);
    Matrix theta(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            if (i != j) theta(i, j) = kappa(embeddings[i] - embeddings[j]);
    for (Index i = 0; i < n; ++i) theta(i, i) = diag(rng);
    return {PriceSensitivityMatrix(std::move(theta)), std::move(kappa)};
}

DemandSample step(const EnvSpec& env, const Vector& price, Rng& rng, int period) {
    if (price.size() != env.n_products()) throw ParameterError("step: price has wrong dimension");
    if (price.norm() > env.price_radius() + 1e-12) throw DomainError("step: price outside the ball of radius L");
    std::normal_distribution<double> noise(0.0, env.noise_sigma());
    Vector demand = env.theta_star().entries() * price;
    for (Index i = 0; i < demand.size(); ++i) demand(i) += noise(rng);
    return {price, std::move(demand), period};
}

double expected_revenue(const PriceSensitivityMatrix& theta, const Vector& d0, const Vector& price) {
    if (d0.size() != theta.dimension() || price.size() != theta.dimension())
        throw ParameterError("expected_revenue: dimension mismatch");
    return price.dot(d0) + price.dot(theta.entries() * price);
}

}  // namespace netprice
