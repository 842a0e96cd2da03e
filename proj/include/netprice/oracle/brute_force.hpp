#pragma once
#include <netprice/confidence.hpp>
#include <netprice/ofu_policy.hpp>
#include <netprice/pac_bayes.hpp>
#include <netprice/priors.hpp>
#include <string>
#include <vector>

// Slow, independent reference computations used by the acceptance suite and `netprice oracle`.
namespace netprice::oracle {

/// Best revenue over a polar grid of the price disc (N = 2): `angles` directions × `radii` radii in (0, L].
double polar_grid_best(const PriceSensitivityMatrix& theta, const Vector& d0, double l, int angles = 720,
                       int radii = 100);

/// max ⟨ppᵀ, Θ'⟩ over `samples` random points on {tr((Θ' − Θ̂)V̄(Θ' − Θ̂)ᵀ) = radius_sq}.
double boundary_sample_best(const ConfidenceEllipsoid& ell, const Vector& price, int samples, Rng& rng);

/** Best p·d₀ + pᵀΘp over a grid of Θ on the boundary of `search` (hyperspherical angles,
 * K-clamped like theta_step) times a polar price grid.  N = 2 only.
 */
double joint_grid_best(const ConfidenceEllipsoid& search, const Vector& d0, double l, int sphere_res = 16,
                       int angles = 240, int radii = 40);

/// Σ_s ‖(Θ − Θ̂) p_s‖², summed row by row.
double trace_identity_loop(const Matrix& theta, const Matrix& center, const std::vector<Vector>& prices);

struct PriorMonteCarlo {
    Matrix mean;
    /// Standard error of each entry of `mean`.
    Matrix se;
    /// Support-size counts 0..N² (L0/OffDiag).
    std::vector<double> size_counts;
    long draws = 0;
};

/// Direct i.i.d. draws of Z(Θ̄) from the prior.
PriorMonteCarlo direct_prior_mc(const PriorSpec& spec, const std::vector<Vector>& embeddings, long draws, Rng& rng,
                                ZMode mode = ZMode::clamp);

/// Exact prior probability of each support size 0..N².
std::vector<double> support_size_probabilities(const PriorSpec& spec);

/// Pearson statistic and its upper-tail p-value, pooling cells with expected count < 5.
struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};
ChiSquare chi_square(const std::vector<double>& counts, const std::vector<double>& probs);

struct OracleCase {
    std::string label;
    /// Value under test and the reference it is compared with.
    double value = 0.0;
    double reference = 0.0;
    bool pass = false;
};

struct OracleSuite {
    std::string name;
    std::vector<OracleCase> cases;
    bool passed() const;
    int failures() const;
};

/// Trust-region solver vs polar grid on seeded N = 2 instances (tolerance 1e-3·L²).
OracleSuite clairvoyant_suite(int instances, std::uint64_t seed);

/// Closed-form theta_step vs random boundary points on seeded N = 3 instances with an inactive clamp.
OracleSuite theta_step_suite(int instances, std::uint64_t seed, int boundary_samples = 10000);

/// ofu_select vs the joint grid (tolerance 1e-2·L²) and optimism whenever Θ* ∈ C_t, seeded N = 2 instances.
OracleSuite ofu_suite(int instances, std::uint64_t seed, const PolicyConfig& cfg = {});

/// λ = 0 posterior mean vs direct prior Monte Carlo (3 combined standard errors per entry),
/// plus a 1% chi-square test of direct support-size frequencies and a 3-SE check of the chain's
/// mean support size.
OracleSuite prior_recovery_suite(const PriorSpec& spec, const std::vector<Vector>& embeddings,
                                 const SamplerConfig& chain, long direct_draws, std::uint64_t seed);

}  // namespace netprice::oracle
