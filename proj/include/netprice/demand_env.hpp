#pragma once
#include <netprice/common.hpp>
#include <netprice/kernel_system.hpp>
#include <cstdint>
#include <utility>
#include <vector>

namespace netprice {

/** Square, finite N×N matrix Θ.  Entry (i, j) is the effect of product j's price on product i's
 * demand under the normalized model D = Θ p + ε.
 */
class PriceSensitivityMatrix {
    public:
        PriceSensitivityMatrix() = default;
        /// Throws ParameterError unless the matrix is square with finite entries.
        explicit PriceSensitivityMatrix(Matrix entries);

        static PriceSensitivityMatrix zero(Index n) { return PriceSensitivityMatrix(Matrix::Zero(n, n)); }

        const Matrix& entries() const { return entries_; }
        Index dimension() const { return entries_.rows(); }
        double operator()(Index i, Index j) const { return entries_(i, j); }
        double operator_norm() const { return spectral_norm(entries_); }
        Index nonzeros() const;

    private:
        Matrix entries_;
};

/// Ground truth for one simulated market.
class EnvSpec {
    public:
        /** Validates: positive baseline demand, σ, Q, L, K > 0, and ‖Θ*‖ ≤ K.  `embeddings` holds the
         * product locations g_i when the truth is spectral (empty otherwise).
         */
        EnvSpec(Vector baseline_demand, PriceSensitivityMatrix theta_star, double noise_sigma, double noise_q,
                double price_radius, double norm_bound, std::vector<Vector> embeddings = {});

        Index n_products() const { return baseline_.size(); }
        const Vector& baseline_demand() const { return baseline_; }
        const PriceSensitivityMatrix& theta_star() const { return theta_star_; }
        double noise_sigma() const { return sigma_; }
        double noise_q() const { return q_; }
        double price_radius() const { return l_; }
        double norm_bound() const { return k_; }
        const std::vector<Vector>& embeddings() const { return embeddings_; }

    private:
        Vector baseline_;
        PriceSensitivityMatrix theta_star_;
        double sigma_, q_, l_, k_;
        std::vector<Vector> embeddings_;
};

struct DemandSample {
    Vector price;
    /// Normalized demand D_t = D̃_t − d₀.
    Vector demand;
    int period = 1;
};

/// Exactly `s` nonzero entries at uniform positions, values U[−1, 1], rescaled so ‖Θ‖ ≤ k_cap.
PriceSensitivityMatrix gen_theta_l0(int n, int s, double k_cap, std::uint64_t seed);

/// Diagonal U[diag_lo, diag_hi], off-diagonal U[−c_off/n, c_off/n].
PriceSensitivityMatrix gen_theta_offdiag(int n, double c_off, std::uint64_t seed, double diag_lo = -2.0,
                                         double diag_hi = -0.5);

struct SpectralTruth {
    PriceSensitivityMatrix theta;
    /// Generating function κ* with ‖κ*‖_{H^α} = 1.
    SeriesFunction kappa_star;
};

/** Θ_ij = κ*(g_i − g_j) off the diagonal with κ* = Σ a_i μ_i^{α/2} e_i, a uniform on the unit
 * sphere of R^m.  The diagonal is drawn separately from [diag_lo, diag_hi].
 */
SpectralTruth gen_theta_spectral(const std::vector<Vector>& embeddings, std::shared_ptr<const KernelSystem> ks,
                                 double alpha, std::uint64_t coeff_seed, double diag_lo = -2.0,
                                 double diag_hi = -0.5);

/// One period of demand: D = Θ* p + ε, ε ~ N(0, σ² I).  Throws DomainError if ‖p‖ > L.
DemandSample step(const EnvSpec& env, const Vector& price, Rng& rng, int period = 1);

/// r_Θ(p) = p·d₀ + pᵀΘp.
double expected_revenue(const PriceSensitivityMatrix& theta, const Vector& d0, const Vector& price);

}  // namespace netprice
