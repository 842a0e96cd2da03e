#pragma once
#include <netprice/common.hpp>
#include <netprice/kernel_system.hpp>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace netprice {

/// Mixing density π(γ) for the spectral priors.
class GammaDensity {
    public:
        /// rate·exp(−rate(γ − shift)) on [shift, ∞).
        static GammaDensity shifted_exponential(double rate = 1.0, double shift = 1.0);
        /// Uniform on (lo, hi].
        static GammaDensity uniform(double lo = 0.0, double hi = 1.0);

        double log_pdf(double gamma) const;
        double sample(Rng& rng) const;
        double lower() const { return lo_; }
        double upper() const { return hi_; }
        /// Numerical integral of the density over its support (composite Simpson).
        double total_mass() const;

    private:
        enum class Kind { shifted_exponential, uniform } kind_ = Kind::uniform;
        double rate_ = 1.0, lo_ = 0.0, hi_ = 1.0;
};

enum class DiagonalSign {
    /// |N(0,1)| exactly as written for own-price entries.
    positive,
    /// |N(0,1)| with an independent fair sign, matching the treatment of cross-price entries.
    symmetric,
};

struct L0Prior {
    double alpha_mix = 0.5;
};

struct OffDiagPrior {
    DiagonalSign diagonal_sign = DiagonalSign::symmetric;
};

struct SpectralScalingPrior {
    std::shared_ptr<const KernelSystem> kernel;
    GammaDensity gamma_density = GammaDensity::shifted_exponential();
    /// Zero the diagonal of every draw (set when the diagonal is learned in a separate phase).
    bool exclude_diagonal = false;
};

struct SpectralPowersPrior {
    std::shared_ptr<const KernelSystem> kernel;
    GammaDensity gamma_density = GammaDensity::uniform(0.0, 1.0);
    bool exclude_diagonal = false;
};

using PriorKind = std::variant<L0Prior, OffDiagPrior, SpectralScalingPrior, SpectralPowersPrior>;

/// One of the four sparsity priors over N×N matrices, with the scaling cap K shared by Z(·).
class PriorSpec {
    public:
        PriorSpec(int n, double k_cap, PriorKind kind);

        int n() const { return n_; }
        double k_cap() const { return k_cap_; }
        const PriorKind& kind() const { return kind_; }
        bool is_spectral() const;
        bool has_support() const { return !is_spectral(); }
        /// "l0" | "offdiag" | "spectral_scaling" | "spectral_powers".
        std::string name() const;
        /// √(K²N + 1): radius of the Frobenius ball carrying the L0 components.
        double frobenius_radius() const;
        const KernelSystem* kernel() const;

    private:
        int n_;
        double k_cap_;
        PriorKind kind_;
};

/// A draw Θ̄ from μ, before scaling.
struct PriorDraw {
    Matrix theta;
    /// Column-major cell indices (i + n·j) of the support, for L0/OffDiag draws.
    std::vector<Index> support;
    /// γ for spectral draws, NaN otherwise.
    double gamma = std::numeric_limits<double>::quiet_NaN();
    /// Standard-normal KL coordinates Z_i for spectral draws.
    Vector kl_coords;
};

/// Throws ParameterError if the prior is spectral and `embeddings` does not hold one point per product.
PriorDraw sample_prior(const PriorSpec& spec, const std::vector<Vector>& embeddings, Rng& rng);

/// log π_J for any single support J of the given size (L0 and OffDiag priors).
double log_mixing_weight(const PriorSpec& spec, int support_size);

/// log of the total weight of all supports of the given size: log(C(N², j)·π_J).
double log_support_size_weight(const PriorSpec& spec, int support_size);

/// log density of one OffDiag coordinate: diagonal half-normal (possibly signed), off-diagonal signed √Gamma(1/N, 1).
double offdiag_log_component_density(int n, bool diagonal, DiagonalSign sign, double value);
double offdiag_sample_component(int n, bool diagonal, DiagonalSign sign, Rng& rng);

/// log of the uniform density on the Frobenius ball of radius R in R^k.
double log_uniform_ball_density(int k, double radius);

/// Uniform point in the k-dimensional ball: Gaussian direction times radius·U^{1/k}.
Vector sample_uniform_ball(int k, double radius, Rng& rng);

/// Coefficients of κ for a spectral prior at (γ, Z): √(γμ_i) Z_i or μ_i^{γ/2} Z_i.
Vector spectral_coefficients(const PriorSpec& spec, double gamma, const Vector& z);

/// log C(n, k).
double log_binomial(int n, int k);

}  // namespace netprice
