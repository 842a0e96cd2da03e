#pragma once
#include <Eigen/Core>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace netprice {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Pseudo-random engine used everywhere; every stochastic operation takes one by reference.
using Rng = std::mt19937_64;

/// Invalid argument or configuration value.
class ParameterError : public std::invalid_argument {
    public:
        using std::invalid_argument::invalid_argument;
};

/// Argument is well-formed but outside the operation's domain (e.g. a price outside the ball).
class DomainError : public std::domain_error {
    public:
        using std::domain_error::domain_error;
};

/// MCMC produced something unusable (non-finite risk, etc).
class SamplerError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
};

class CalibrationError : public std::runtime_error {
    public:
        using std::runtime_error::runtime_error;
};

/** Builds an independent engine for a (seed, stream) pair.  Streams let a single replication seed
 * drive the noise, policy and sampler randomness without any of them perturbing the others.
 */
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x6e70u};
    return Rng(seq);
}

/// Uniform draw on the sphere of the given radius in R^n.
Vector uniform_on_sphere(Index n, double radius, Rng& rng);

/// Largest singular value, computed exactly from the eigenvalues of AᵀA.
double operator_norm(const Matrix& a);

/** Largest singular value by power iteration on AᵀA.  Stops once the relative change of the
 * estimate drops below `tol` or after `max_iter` iterations.
 */
double operator_norm_power(const Matrix& a, double tol = 1e-10, int max_iter = 500);

/// Norm used by the sampler and clamps: exact for small matrices, power iteration beyond.
double spectral_norm(const Matrix& a);

}  // namespace netprice
