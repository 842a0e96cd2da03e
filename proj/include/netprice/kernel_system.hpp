#pragma once
#include <netprice/common.hpp>
#include <memory>
#include <vector>

namespace netprice {

/** Mercer eigen-system on the torus [−π, π]^d: real Fourier basis (constant first, then cos/sin
 * pairs ordered by squared frequency) normalized in L², with eigenvalues μ_i = exp(−q i), i ≥ 1.
 */
class KernelSystem {
    public:
        KernelSystem(double decay_q, int truncation, int domain_dim = 1);

        /// ceil((2/q) ln(N² T) + 8): keeps the truncated tail mass below (N² T)^{-2}.
        static int default_truncation(double decay_q, int n_products, int horizon);

        double decay_q() const { return q_; }
        int truncation() const { return static_cast<int>(mu_.size()); }
        int domain_dim() const { return d_; }

        /// μ_i for 0-based index i (the i+1-th eigenvalue).
        double eigenvalue(int i) const { return mu_(i); }
        const Vector& eigenvalues() const { return mu_; }

        /// e_i(x), 0-based index.
        double basis(int i, const Vector& x) const;
        /// (e_1(x), …, e_m(x)).
        Vector basis_values(const Vector& x) const;

    private:
        struct Mode {
            Eigen::VectorXi freq;
            enum Kind { constant, cosine, sine } kind;
        };
        double q_;
        int d_;
        Vector mu_;
        std::vector<Mode> modes_;
        double norm_const_, norm_trig_;
};

/// f = Σ b_i e_i over a shared KernelSystem.
class SeriesFunction {
    public:
        SeriesFunction() = default;
        SeriesFunction(std::shared_ptr<const KernelSystem> ks, Vector coeffs);

        const Vector& coeffs() const { return coeffs_; }
        const KernelSystem& kernel() const { return *ks_; }
        const std::shared_ptr<const KernelSystem>& kernel_ptr() const { return ks_; }

        double evaluate(const Vector& x) const;
        double operator()(const Vector& x) const { return evaluate(x); }

        SeriesFunction operator+(const SeriesFunction& other) const;

    private:
        std::shared_ptr<const KernelSystem> ks_;
        Vector coeffs_;
};

/// (Σ b_i² / μ_i^β)^{1/2}; β = 0 gives the L² norm, β = 1 the RKHS norm.
double power_norm(const SeriesFunction& f, double beta);

/// Truncated draw from GP(0, γK): coefficients √(γ μ_i) Z_i.  Requires γ ≥ 1.
SeriesFunction kl_sample_scaling(const std::shared_ptr<const KernelSystem>& ks, double gamma, Rng& rng);

/// Truncated draw from GP(0, K^γ): coefficients μ_i^{γ/2} Z_i.  Requires 0 < γ ≤ 1.
SeriesFunction kl_sample_powers(const std::shared_ptr<const KernelSystem>& ks, double gamma, Rng& rng);

/** Basis values at all pairwise differences g_i − g_j, laid out column-major so that
 * (design * b) reshaped to N×N gives Θ_ij = Σ_l b_l e_l(g_i − g_j).
 */
Matrix pairwise_design(const KernelSystem& ks, const std::vector<Vector>& embeddings);

}  // namespace netprice
