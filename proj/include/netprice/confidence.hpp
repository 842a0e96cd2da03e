#pragma once
#include <netprice/common.hpp>
#include <netprice/demand_env.hpp>
#include <string>
#include <vector>

namespace netprice {

/// V_t = Σ p_s p_sᵀ and its unit-regularized version V̄_t = I + V_t.
class GramState {
    public:
        GramState() = default;
        explicit GramState(Index n);

        void append(const Vector& price);

        Index n() const { return v_.rows(); }
        int t() const { return t_; }
        const Matrix& v() const { return v_; }
        Matrix v_reg() const { return Matrix::Identity(v_.rows(), v_.cols()) + v_; }

    private:
        Matrix v_;
        int t_ = 0;
};

/** C_t = {Θ : Σ_s ‖(Θ − Θ̂)p_s‖² = tr((Θ − Θ̂) V_t (Θ − Θ̂)ᵀ) < β_t², ‖Θ‖ ≤ K}. */
class ConfidenceEllipsoid {
    public:
        ConfidenceEllipsoid(PriceSensitivityMatrix center, GramState shape, double radius_sq, double k_cap,
                            double epsilon = 0.05);

        const PriceSensitivityMatrix& center() const { return center_; }
        const GramState& shape() const { return shape_; }
        double radius_sq() const { return radius_sq_; }
        double k_cap() const { return k_cap_; }
        double epsilon() const { return epsilon_; }

    private:
        PriceSensitivityMatrix center_;
        GramState shape_;
        double radius_sq_, k_cap_, epsilon_;
};

enum class ScalingExponent {
    /// (1 − α)/(1 − β), as displayed with the scaling-prior radius.
    display,
    /// (1 − α)/(α − β), as it arises in the derivation.
    proof,
};

struct RadiusConstants {
    double c_alpha_beta = 1.0;
    double c_beta_q = 1.0;
    double c_beta_q_alpha = 1.0;
    double embed_M = 1.0;
    double beta_embed = 0.25;
    double alpha_smooth = 0.75;
    /// Absolute constant multiplying N log(T/θ) in the OffDiag regret bound.
    double c_orders = 2.0;
    /// Single multiplicative factor applied to every radius (set by calibration).
    double radius_scale = 1.0;
    ScalingExponent scaling_exponent = ScalingExponent::display;

    void validate() const;
};

/// Radius for the L0 prior: 3L²/t + 8c1(j log(e n² t √(K²n+1)/j) − log(α(1−α)) + log(2/ε)).
/// j_star = 0 is floored to 1 with a warning on stderr.
double radius_l0(int t, double epsilon, int j_star, int n, double k_cap, double alpha_mix, double c1, double l);

/// Radius for the OffDiag prior: 3L²θ²/t + 8c1(K²n + (2n−1)log(t/θ) + 4 log n + log(π²/6) + log(2/ε)).
double radius_offdiag(int t, double epsilon, double theta_min, int n, double k_cap, double c1, double l);

/// Radius for the spectral scaling prior; exponent of (4n²t) per rc.scaling_exponent.
double radius_spectral_scaling(int t, double epsilon, int n, const RadiusConstants& rc, double kappa_interp_norm,
                               double c1, double l);

/// Radius for the spectral powers prior: 3L²/t + 8c1(C‖κ*‖²_α + C' log²(t n²) + log(2/ε)).
double radius_spectral_powers(int t, double epsilon, int n, const RadiusConstants& rc, double kappa_alpha_norm_sq,
                              double c1, double l);

/// tr((Θ − Θ̂) V_t (Θ − Θ̂)ᵀ) with the unregularized V_t.
double quadratic_form(const ConfidenceEllipsoid& ell, const Matrix& theta);

bool contains(const ConfidenceEllipsoid& ell, const PriceSensitivityMatrix& theta);

/// L²√(8n log(1 + 2TL²/n)) · √(Σ β_t² + 2K²Tn).
double regret_bound_lemma1(int n, int t_horizon, double l, double k_cap, const std::vector<double>& radii);

enum class Regime { l0, offdiag, spectral_scaling, spectral_powers };

Regime parse_regime(const std::string& tag);
std::string regime_name(Regime regime);

struct TheoremInputs {
    int n = 1;
    int horizon = 1;
    double l = 1.0;
    double k_cap = 1.0;
    double c1 = 1.0;
    double epsilon = 0.05;
    int j_star = 1;
    double alpha_mix = 0.5;
    double theta_min = 1.0;
    /// ‖κ*‖ in the interpolation space (scaling) or ‖κ*‖²_α (powers).
    double kappa_norm = 1.0;
    RadiusConstants rc;
};

/// Closed-form right-hand sides of the four regret theorems.
double theorem_bound(Regime regime, const TheoremInputs& in);

/// regret_bound_lemma1 fed the regime's per-period radii for t = 1..T.
double composed_bound(Regime regime, const TheoremInputs& in);

/// Per-period radius for a regime (unscaled by rc.radius_scale).
double regime_radius(Regime regime, int t, const TheoremInputs& in);

}  // namespace netprice
