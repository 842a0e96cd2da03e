#pragma once
#include <netprice/common.hpp>
#include <netprice/demand_env.hpp>
#include <netprice/priors.hpp>
#include <vector>

namespace netprice {

/** Append-only record of (p_s, D_s) pairs.  Alongside the raw rows it keeps the sufficient
 * statistics Σ‖D‖², Σ D pᵀ and Σ p pᵀ so that the least-squares risk of any Θ costs O(N³).
 */
class History {
    public:
        History() = default;
        explicit History(Index n_products);

        void append(const Vector& price, const Vector& demand);

        Index n_products() const { return n_; }
        int size() const { return static_cast<int>(prices_.size()); }
        bool empty() const { return prices_.empty(); }
        const Vector& price(int s) const { return prices_[static_cast<std::size_t>(s)]; }
        const Vector& demand(int s) const { return demands_[static_cast<std::size_t>(s)]; }

        double sum_sq_demand() const { return sum_dd_; }
        const Matrix& cross() const { return cross_; }
        const Matrix& gram() const { return gram_; }

        /// (1/t) Σ‖D_s − Θ p_s‖² from the sufficient statistics.
        double risk(const Matrix& theta) const;

    private:
        Index n_ = 0;
        std::vector<Vector> prices_, demands_;
        double sum_dd_ = 0.0;
        Matrix cross_, gram_;
};

enum class ZMode {
    /// Θ · min(1, K/‖Θ‖).
    clamp,
    /// KΘ/‖Θ‖ for every nonzero Θ.
    literal,
};

struct SamplerConfig {
    int chain_length = 4000;
    int burn_in = 1000;
    int thin = 4;
    double proposal_scale = 0.1;
    double support_move_prob = 0.3;
    int restarts = 2;
    ZMode z_mode = ZMode::clamp;

    void validate() const;
};

struct PosteriorSummary {
    PriceSensitivityMatrix theta_hat;
    double acceptance_rate = 0.0;
    int effective_samples = 0;
    double risk_at_mean = 0.0;
    /// Monte Carlo standard error of each entry of theta_hat.
    Matrix mcse;
    /// Fraction of retained samples in which each cell is in the support (L0/OffDiag).
    Matrix inclusion_freq;
    double mean_support_size = 0.0;
    /// Monte Carlo standard error of mean_support_size, from the support-size series' own ESS.
    double support_size_mcse = 0.0;
    /// Fraction of retained samples with each support size 0..N² (L0/OffDiag).
    std::vector<double> support_size_freq;
    int samples = 0;
    /// Acceptance rate after adaptation fell outside [0.05, 0.95].
    bool acceptance_warning = false;
};

/// (1/t) Σ_s ‖D_s − Θ p_s‖², evaluated row by row.  Throws DomainError on an empty history.
double empirical_risk(const PriceSensitivityMatrix& theta, const History& hist);

PriceSensitivityMatrix scale_Z(const PriceSensitivityMatrix& theta, double k_cap, ZMode mode = ZMode::clamp);

/// max{(Q + KL)KL, σ² + K²}.
double c1_constant(double q_noise, double k_cap, double price_radius, double sigma);

/// λ_t = t / (2 C₁).
double lambda_schedule(int t, double c1);

/** Posterior mean of Z(Θ̄) under dρ ∝ exp(−λ r(Z(Θ̄))) dμ, by Metropolis–Hastings.
 *
 * Moves: a joint Gaussian random walk on the active coordinates (matrix entries for the
 * L0/OffDiag priors, KL coordinates and log γ for the spectral priors) with its scale adapted
 * during burn-in toward 25–45% acceptance; and, for the discrete-support priors, birth/death
 * moves on single cells with probability `support_move_prob`.  In the first half of burn-in the
 * chain is tempered (λ ramps up geometrically) so that it can locate the posterior mass before
 * adaptation finishes; retained samples always target the exact posterior.
 *
 * `embeddings` is required for the spectral priors.  λ > 0 with an empty history is a
 * DomainError; a non-finite risk is a SamplerError.
 */
PosteriorSummary posterior_mean(const PriorSpec& spec, const History& hist, double lambda, const SamplerConfig& cfg,
                                const std::vector<Vector>& embeddings, Rng& rng);

/// Effective sample size of a scalar chain (Geyer's initial positive sequence).
double effective_sample_size(const std::vector<double>& chain);

}  // namespace netprice
