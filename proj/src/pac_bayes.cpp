#include <netprice/pac_bayes.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace netprice {

History::History(Index n_products)
    : n_(n_products), cross_(Matrix::Zero(n_products, n_products)), gram_(Matrix::Zero(n_products, n_products)) {}

void History::append(const Vector& price, const Vector& demand) {
    if (n_ == 0 && prices_.empty()) *this = History(price.size());
    if (price.size() != n_ || demand.size() != n_) throw ParameterError("History::append: dimension mismatch");
    prices_.push_back(price);
    demands_.push_back(demand);
    sum_dd_ += demand.squaredNorm();
    cross_.noalias() += demand * price.transpose();
    gram_.noalias() += price * price.transpose();
}

double History::risk(const Matrix& theta) const {
    if (prices_.empty()) return 0.0;
    const double quad = (theta * gram_).cwiseProduct(theta).sum();
    const double lin = theta.cwiseProduct(cross_).sum();
    return std::max(0.0, sum_dd_ - 2.0 * lin + quad) / size();
}

void SamplerConfig::validate() const {
    if (chain_length < 1 || burn_in < 0 || burn_in >= chain_length)
        throw ParameterError("SamplerConfig: need 0 ≤ burn_in < chain_length");
    if (thin < 1) throw ParameterError("SamplerConfig: thin must be ≥ 1");
    if (!(proposal_scale > 0.0)) throw ParameterError("SamplerConfig: proposal_scale must be positive");
    if (!(support_move_prob >= 0.0 && support_move_prob <= 1.0))
        throw ParameterError("SamplerConfig: support_move_prob must lie in [0, 1]");
    if (restarts < 1) throw ParameterError("SamplerConfig: restarts must be ≥ 1");
}

double empirical_risk(const PriceSensitivityMatrix& theta, const History& hist) {
    if (hist.empty()) throw DomainError("empirical_risk: empty history");
    if (theta.dimension() != hist.n_products()) throw ParameterError("empirical_risk: dimension mismatch");
    double sum = 0.0;
    for (int s = 0; s < hist.size(); ++s) sum += (hist.demand(s) - theta.entries() * hist.price(s)).squaredNorm();
    return sum / hist.size();
}

namespace {

Matrix scale_z_raw(const Matrix& theta, double k_cap, ZMode mode) {
    if (mode == ZMode::clamp) {
        // ‖Θ‖ ≤ ‖Θ‖_F, so the exact norm is only needed when the Frobenius norm exceeds K.
        if (theta.norm() <= k_cap) return theta;
        const double norm = spectral_norm(theta);
        return norm <= k_cap ? theta : Matrix(theta * (k_cap / norm));
    }
    const double norm = spectral_norm(theta);
    return norm == 0.0 ? theta : Matrix(theta * (k_cap / norm));
}

}  // namespace

PriceSensitivityMatrix scale_Z(const PriceSensitivityMatrix& theta, double k_cap, ZMode mode) {
    return PriceSensitivityMatrix(scale_z_raw(theta.entries(), k_cap, mode));
}

double c1_constant(double q_noise, double k_cap, double price_radius, double sigma) {
    if (!(q_noise > 0.0) || !(k_cap >= 0.0) || !(price_radius > 0.0) || !(sigma >= 0.0))
        throw ParameterError("c1_constant: parameters must be positive");
    const double kl = k_cap * price_radius;
    return std::max((q_noise + kl) * kl, sigma * sigma + k_cap * k_cap);
}

double lambda_schedule(int t, double c1) {
    if (t < 1) throw ParameterError("lambda_schedule: t must be ≥ 1");
    if (!(c1 > 0.0)) throw ParameterError("lambda_schedule: c1 must be positive");
    return t / (2.0 * c1);
}

double effective_sample_size(const std::vector<double>& chain) {
    const auto n = static_cast<Index>(chain.size());
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (double x : chain) mean += x;
    mean /= static_cast<double>(n);
    auto autocov = [&](Index lag) {
        double s = 0.0;
        for (Index i = 0; i + lag < n; ++i) s += (chain[i] - mean) * (chain[i + lag] - mean);
        return s / static_cast<double>(n);
    };
    const double c0 = autocov(0);
    if (c0 <= 0.0) return static_cast<double>(n);
    // Geyer: sum consecutive pairs of autocorrelations while positive and monotone.
    double tau = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (Index k = 0; 2 * k + 1 < n; ++k) {
        double pair = (autocov(2 * k) + autocov(2 * k + 1)) / c0;
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        tau += 2.0 * pair;
        prev_pair = pair;
    }
    tau = std::max(tau, 1.0 / static_cast<double>(n));
    return std::min(static_cast<double>(n), static_cast<double>(n) / tau);
}

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

enum class Family { l0, offdiag, scaling, powers };

struct State {
    Matrix theta;               // Θ̄, unscaled
    std::vector<char> active;   // per cell (discrete priors)
    std::vector<Index> support; // active cells
    double log_gamma = 0.0;     // spectral
    Vector z;                   // spectral KL coordinates
    double log_prior = 0.0;     // log prior density in the sampler's coordinates
    double risk = 0.0;          // r(Z(Θ̄))
};

class Sampler {
    public:
        Sampler(const PriorSpec& spec, const History& hist, const SamplerConfig& cfg,
                const std::vector<Vector>& embeddings)
            : spec_(spec), hist_(hist), cfg_(cfg), n_(spec.n()), cells_(spec.n() * spec.n()) {
            switch (spec.kind().index()) {
                case 0: family_ = Family::l0; break;
                case 1: family_ = Family::offdiag; break;
                case 2: family_ = Family::scaling; break;
                default: family_ = Family::powers; break;
            }
            if (spec.is_spectral()) {
                if (static_cast<int>(embeddings.size()) != n_)
                    throw ParameterError("posterior_mean: spectral prior needs one embedding per product");
                design_ = pairwise_design(*spec.kernel(), embeddings);
                if (family_ == Family::scaling) {
                    density_ = &std::get<SpectralScalingPrior>(spec.kind()).gamma_density;
                    exclude_diag_ = std::get<SpectralScalingPrior>(spec.kind()).exclude_diagonal;
                } else {
                    density_ = &std::get<SpectralPowersPrior>(spec.kind()).gamma_density;
                    exclude_diag_ = std::get<SpectralPowersPrior>(spec.kind()).exclude_diagonal;
                }
            }
            if (family_ == Family::offdiag) sign_ = std::get<OffDiagPrior>(spec.kind()).diagonal_sign;
            radius_ = spec.frobenius_radius();
        }

        State initial_state(Rng& rng) const {
            PriorDraw draw = draw_initial(rng);
            State s;
            if (spec_.is_spectral()) {
                s.log_gamma = std::log(draw.gamma);
                s.z = draw.kl_coords;
                s.theta = spectral_theta(s.log_gamma, s.z);
            } else {
                s.theta = draw.theta;
                s.active.assign(static_cast<std::size_t>(cells_), 0);
                for (Index c : draw.support) s.active[static_cast<std::size_t>(c)] = 1;
                s.support = draw.support;
            }
            s.log_prior = log_prior(s);
            s.risk = risk_of(s.theta);
            return s;
        }

        double risk_of(const Matrix& theta_bar) const {
            const double r = hist_.risk(scale_z_raw(theta_bar, spec_.k_cap(), cfg_.z_mode));
            if (!std::isfinite(r)) {
                std::ostringstream msg;
                msg << "posterior_mean: non-finite empirical risk at t=" << hist_.size() << ", draw norm "
                    << theta_bar.norm();
                throw SamplerError(msg.str());
            }
            return r;
        }

        Matrix scaled(const Matrix& theta_bar) const { return scale_z_raw(theta_bar, spec_.k_cap(), cfg_.z_mode); }

        /// Random walk on the active coordinates.  Returns true if accepted.
        bool random_walk(State& s, double lambda, double scale, Rng& rng) const {
            std::normal_distribution<double> normal(0.0, 1.0);
            State prop = s;
            if (spec_.is_spectral()) {
                for (Index i = 0; i < prop.z.size(); ++i) prop.z(i) += scale * normal(rng);
                prop.log_gamma += scale * normal(rng);
                prop.log_prior = log_prior(prop);
                if (prop.log_prior == neg_inf) return false;
                prop.theta = spectral_theta(prop.log_gamma, prop.z);
            } else {
                for (Index c : prop.support) prop.theta(c) += scale * normal(rng);
                prop.log_prior = log_prior(prop);
                if (prop.log_prior == neg_inf) return false;
            }
            prop.risk = risk_of(prop.theta);
            const double log_a = -lambda * (prop.risk - s.risk) + prop.log_prior - s.log_prior;
            if (accept(log_a, rng)) {
                s = std::move(prop);
                return true;
            }
            return false;
        }

        /// Birth or death of one cell.  Returns true if accepted.
        bool birth_death(State& s, double lambda, Rng& rng) const {
            std::bernoulli_distribution coin(0.5);
            const int k = static_cast<int>(s.support.size());
            if (coin(rng)) {
                if (k == cells_) return false;
                std::uniform_int_distribution<int> pick(0, cells_ - k - 1);
                int target = pick(rng);
                Index cell = 0;
                for (Index c = 0; c < cells_; ++c) {
                    if (s.active[static_cast<std::size_t>(c)]) continue;
                    if (target-- == 0) {
                        cell = c;
                        break;
                    }
                }
                double value;
                double log_q;
                if (family_ == Family::l0) {
                    std::uniform_real_distribution<double> u(-radius_, radius_);
                    value = u(rng);
                    log_q = -std::log(2.0 * radius_);
                } else {
                    const bool diag = (cell % n_) == (cell / n_);
                    value = offdiag_sample_component(n_, diag, sign_, rng);
                    log_q = offdiag_log_component_density(n_, diag, sign_, value);
                }
                State prop = s;
                prop.theta(cell) = value;
                prop.active[static_cast<std::size_t>(cell)] = 1;
                prop.support.insert(std::lower_bound(prop.support.begin(), prop.support.end(), cell), cell);
                prop.log_prior = log_prior(prop);
                if (prop.log_prior == neg_inf) return false;
                prop.risk = risk_of(prop.theta);
                const double log_forward = std::log(0.5) - std::log(static_cast<double>(cells_ - k)) + log_q;
                const double log_reverse = std::log(0.5) - std::log(static_cast<double>(k + 1));
                const double log_a =
                    -lambda * (prop.risk - s.risk) + prop.log_prior - s.log_prior + log_reverse - log_forward;
                if (accept(log_a, rng)) {
                    s = std::move(prop);
                    return true;
                }
                return false;
            }
            if (k == 0) return false;
            std::uniform_int_distribution<int> pick(0, k - 1);
            const auto pos = static_cast<std::size_t>(pick(rng));
            const Index cell = s.support[pos];
            const double value = s.theta(cell);
            double log_q;
            if (family_ == Family::l0) {
                log_q = -std::log(2.0 * radius_);
            } else {
                const bool diag = (cell % n_) == (cell / n_);
                log_q = offdiag_log_component_density(n_, diag, sign_, value);
            }
            State prop = s;
            prop.theta(cell) = 0.0;
            prop.active[static_cast<std::size_t>(cell)] = 0;
            prop.support.erase(prop.support.begin() + static_cast<std::ptrdiff_t>(pos));
            prop.log_prior = log_prior(prop);
            if (prop.log_prior == neg_inf) return false;
            prop.risk = risk_of(prop.theta);
            const double log_forward = std::log(0.5) - std::log(static_cast<double>(k));
            const double log_reverse = std::log(0.5) - std::log(static_cast<double>(cells_ - k + 1)) + log_q;
            const double log_a =
                -lambda * (prop.risk - s.risk) + prop.log_prior - s.log_prior + log_reverse - log_forward;
            if (accept(log_a, rng)) {
                s = std::move(prop);
                return true;
            }
            return false;
        }

        bool has_support() const { return !spec_.is_spectral(); }

    private:
        static bool accept(double log_a, Rng& rng) {
            if (log_a >= 0.0) return true;
            std::uniform_real_distribution<double> u(0.0, 1.0);
            return std::log(u(rng)) < log_a;
        }

        // Prior draw used for initialization; for spectral priors only (γ, Z) are drawn here
        // so the design matrix is not rebuilt.
        PriorDraw draw_initial(Rng& rng) const {
            if (!spec_.is_spectral()) return sample_prior(spec_, no_embeddings_, rng);
            PriorDraw d;
            d.gamma = density_->sample(rng);
            std::normal_distribution<double> normal(0.0, 1.0);
            d.kl_coords.resize(design_.cols());
            for (Index i = 0; i < d.kl_coords.size(); ++i) d.kl_coords(i) = normal(rng);
            return d;
        }

        Matrix spectral_theta(double log_gamma, const Vector& z) const {
            const Vector flat = design_ * spectral_coefficients(spec_, std::exp(log_gamma), z);
            Matrix theta = Eigen::Map<const Matrix>(flat.data(), n_, n_);
            if (exclude_diag_) theta.diagonal().setZero();
            return theta;
        }

        double log_prior(const State& s) const {
            switch (family_) {
                case Family::l0: {
                    const int k = static_cast<int>(s.support.size());
                    if (s.theta.squaredNorm() > radius_ * radius_) return neg_inf;
                    return log_mixing_weight(spec_, k) + log_uniform_ball_density(k, radius_);
                }
                case Family::offdiag: {
                    const int k = static_cast<int>(s.support.size());
                    if (k == 0) return neg_inf;
                    double lp = log_mixing_weight(spec_, k);
                    for (Index c : s.support)
                        lp += offdiag_log_component_density(n_, (c % n_) == (c / n_), sign_, s.theta(c));
                    return lp;
                }
                default: {
                    // Random walk runs on log γ, hence the Jacobian term log γ.
                    const double g = std::exp(s.log_gamma);
                    const double lg = density_->log_pdf(g);
                    if (lg == neg_inf) return neg_inf;
                    return lg + s.log_gamma - 0.5 * s.z.squaredNorm();
                }
            }
        }

        const PriorSpec& spec_;
        const History& hist_;
        const SamplerConfig& cfg_;
        int n_, cells_;
        Family family_;
        Matrix design_;
        const GammaDensity* density_ = nullptr;
        bool exclude_diag_ = false;
        DiagonalSign sign_ = DiagonalSign::symmetric;
        double radius_ = 0.0;
        std::vector<Vector> no_embeddings_;
};

}  // namespace

PosteriorSummary posterior_mean(const PriorSpec& spec, const History& hist, double lambda, const SamplerConfig& cfg,
                                const std::vector<Vector>& embeddings, Rng& rng) {
    cfg.validate();
    if (!(lambda >= 0.0)) throw ParameterError("posterior_mean: lambda must be ≥ 0");
    if (hist.empty() && lambda > 0.0) throw DomainError("posterior_mean: empty history requires lambda = 0");
    if (!hist.empty() && hist.n_products() != spec.n())
        throw ParameterError("posterior_mean: history dimension differs from the prior");

    const Sampler sampler(spec, hist, cfg, embeddings);
    const int n = spec.n();
    const int cells = n * n;
    const int temper_iters = cfg.burn_in / 2;
    const double lambda_start = std::min(lambda, 1.0);

    Matrix sum = Matrix::Zero(n, n);
    Matrix sum_sq = Matrix::Zero(n, n);
    Matrix inclusion = Matrix::Zero(n, n);
    double support_total = 0.0;
    std::vector<double> size_counts(static_cast<std::size_t>(cells + 1), 0.0);
    std::vector<std::vector<std::vector<double>>> traces(static_cast<std::size_t>(cfg.restarts),
                                                         std::vector<std::vector<double>>(static_cast<std::size_t>(cells)));
    std::vector<std::vector<double>> size_traces(static_cast<std::size_t>(cfg.restarts));
    long proposals = 0, accepted = 0;
    int samples = 0;

    for (int r = 0; r < cfg.restarts; ++r) {
        Rng chain_rng = make_rng(rng(), static_cast<std::uint64_t>(r));
        State state = sampler.initial_state(chain_rng);
        double scale = cfg.proposal_scale;
        int window_props = 0, window_acc = 0;
        std::uniform_real_distribution<double> u(0.0, 1.0);

        for (int it = 0; it < cfg.chain_length; ++it) {
            double lam = lambda;
            if (it < temper_iters && lambda > lambda_start && lambda_start > 0.0) {
                const double frac = static_cast<double>(it) / temper_iters;
                lam = lambda_start * std::pow(lambda / lambda_start, frac);
            }

            bool acc = false;
            bool proposed = true;
            const bool support_move = sampler.has_support() && u(chain_rng) < cfg.support_move_prob;
            if (support_move) {
                acc = sampler.birth_death(state, lam, chain_rng);
            } else if (sampler.has_support() && state.support.empty()) {
                // Nothing to perturb: the chain stays put, but the state is still a sample.
                proposed = false;
            } else {
                acc = sampler.random_walk(state, lam, scale, chain_rng);
                if (it < cfg.burn_in) {
                    ++window_props;
                    window_acc += acc ? 1 : 0;
                    if (window_props == 50) {
                        const double rate = static_cast<double>(window_acc) / window_props;
                        if (rate < 0.25) scale *= 0.75;
                        else if (rate > 0.45) scale *= 1.3;
                        window_props = window_acc = 0;
                    }
                }
            }
            if (it >= cfg.burn_in) {
                if (proposed) {
                    ++proposals;
                    accepted += acc ? 1 : 0;
                }
                if ((it - cfg.burn_in) % cfg.thin == 0) {
                    const Matrix z = sampler.scaled(state.theta);
                    sum += z;
                    sum_sq += z.cwiseProduct(z);
                    for (Index c = 0; c < cells; ++c)
                        traces[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].push_back(z(c));
                    for (Index c : state.support) inclusion(c) += 1.0;
                    support_total += static_cast<double>(state.support.size());
                    size_traces[static_cast<std::size_t>(r)].push_back(static_cast<double>(state.support.size()));
                    size_counts[state.support.size()] += 1.0;
                    ++samples;
                }
            }
        }
    }

    PosteriorSummary out;
    if (samples == 0) throw SamplerError("posterior_mean: no samples retained");
    const Matrix mean = sum / samples;
    // Clamp outputs lie in the K-ball and so does their average; the final clamp only
    // removes floating-point excess.
    out.theta_hat = scale_Z(PriceSensitivityMatrix(mean), spec.k_cap(), ZMode::clamp);
    out.samples = samples;
    out.acceptance_rate = proposals > 0 ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
    out.acceptance_warning = proposals > 0 && (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.95);
    out.inclusion_freq = inclusion / samples;
    out.mean_support_size = support_total / samples;
    if (sampler.has_support())
        for (double c : size_counts) out.support_size_freq.push_back(c / samples);
    out.risk_at_mean = hist.empty() ? 0.0 : hist.risk(out.theta_hat.entries());

    out.mcse = Matrix::Zero(n, n);
    double min_ess = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < cells; ++c) {
        double ess = 0.0;
        for (const auto& restart : traces) ess += effective_sample_size(restart[static_cast<std::size_t>(c)]);
        const double var = std::max(0.0, sum_sq(c) / samples - mean(c) * mean(c));
        if (var > 0.0) {
            min_ess = std::min(min_ess, ess);
            out.mcse(c) = std::sqrt(var / ess);
        }
    }
    out.effective_samples = std::isfinite(min_ess) ? static_cast<int>(min_ess) : samples;
    if (sampler.has_support()) {
        double ess = 0.0, sq = 0.0;
        for (const auto& restart : size_traces) {
            ess += effective_sample_size(restart);
            for (double v : restart) sq += v * v;
        }
        const double var = std::max(0.0, sq / samples - out.mean_support_size * out.mean_support_size);
        out.support_size_mcse = var > 0.0 ? std::sqrt(var / ess) : 0.0;
    }
    return out;
}

}  // namespace netprice
