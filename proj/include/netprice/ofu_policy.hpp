#pragma once
#include <netprice/common.hpp>
#include <netprice/confidence.hpp>
#include <netprice/demand_env.hpp>
#include <netprice/pac_bayes.hpp>
#include <vector>

namespace netprice {

enum class OptimismSet {
    /// Maximize over {tr(ΔV̄Δᵀ) ≤ β²}: a subset of C_t, so Θ̃ always lies in C_t.
    regularized,
    /// Maximize over {tr(ΔV̄Δᵀ) ≤ β² + 4K²N}, which contains C_t, so optimism holds whenever Θ* ∈ C_t.
    enclosing,
};

struct PolicyConfig {
    int restarts = 8;
    int max_alt_iters = 100;
    double tol = 1e-8;
    bool pre_learn_diag = false;
    int pre_learn_rounds_per_product = 10;
    OptimismSet optimism_set = OptimismSet::enclosing;

    void validate() const;
};

struct ClairvoyantResult {
    Vector price;
    double value = 0.0;
    /// Lagrange multiplier ν of the ball constraint.
    double multiplier = 0.0;
};

struct OfuResult {
    Vector price;
    PriceSensitivityMatrix theta_tilde;
    double value = 0.0;
    int iterations = 0;
    bool converged = true;
    /// The K-clamp changed the ellipsoid maximizer at the returned pair.
    bool clamp_active = false;
    /// Objective after each alternating iteration of the winning restart.
    std::vector<double> value_trace;
};

/** Exact maximizer of p·d₀ + pᵀΘp over ‖p‖ ≤ L (trust-region subproblem).
 *
 * With S = (Θ + Θᵀ)/2 = U diag(s) Uᵀ and u = Uᵀd₀/2 the stationary points are
 * p(ν) = U diag(1/(ν − s)) u.  The global maximizer has ν ≥ max(0, s_max): either the interior
 * point (ν = 0, S negative definite), the hard case (u vanishes on the top eigenspace and
 * ‖p_rest(s_max)‖ ≤ L, completed along the top eigenvector), or the root of ‖p(ν)‖ = L.
 */
ClairvoyantResult clairvoyant_price(const PriceSensitivityMatrix& theta, const Vector& d0, double l);

/// Maximizer of pᵀΘp over tr((Θ − Θ̂)V̄(Θ − Θ̂)ᵀ) ≤ radius_sq, then clamped to the K-ball.
PriceSensitivityMatrix theta_step(const ConfidenceEllipsoid& ell, const Vector& price, bool* clamped = nullptr);

/// The set actually searched by ofu_select (same center and shape, radius per cfg.optimism_set).
ConfidenceEllipsoid optimism_ellipsoid(const ConfidenceEllipsoid& ell, const PolicyConfig& cfg);

OfuResult ofu_select(const ConfidenceEllipsoid& ell, const Vector& d0, double l, const PolicyConfig& cfg, Rng& rng);

struct PrelearnResult {
    Vector diag_estimates;
    /// Pre-learning rounds with D_t − Θ^d p_t as the demand.
    History residual_history;
    /// Raw observations, in play order.
    std::vector<DemandSample> samples;
};

/// Plays L·e_i for `rounds_per_product` periods per product and averages D_{t,i}/L.
PrelearnResult prelearn_diagonal(const EnvSpec& env, int rounds_per_product, Rng& rng);

}  // namespace netprice
