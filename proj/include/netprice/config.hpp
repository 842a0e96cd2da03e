#pragma once
#include <netprice/common.hpp>
#include <netprice/confidence.hpp>
#include <netprice/ofu_policy.hpp>
#include <netprice/pac_bayes.hpp>
#include <netprice/priors.hpp>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace netprice {

struct TruthConfig {
    /// "l0" | "offdiag" | "spectral".
    std::string kind = "l0";
    std::uint64_t seed = 0;
    /// Draw a fresh truth for every replication (truth seed + replication id).
    bool per_replication = false;
    // l0
    int support_size = 1;
    // offdiag
    double c_off = 1.0;
    // offdiag and spectral
    double diag_lo = -2.0, diag_hi = -0.5;
    // spectral
    double alpha = 0.75;
    /// Product locations; evenly spaced on the first axis of [−π, π)^d when empty.
    std::vector<Vector> embeddings;
};

struct EnvConfig {
    int n_products = 2;
    /// Defaults to all ones.
    Vector baseline_demand;
    double noise_sigma = 0.1;
    double noise_q = 0.1;
    double price_radius = 1.0;
    double norm_bound = 1.0;
    TruthConfig truth;
};

struct KernelConfig {
    double decay_q = 1.0;
    /// 0 selects KernelSystem::default_truncation(q, N, T).
    int truncation = 0;
    int domain_dim = 1;
};

struct PriorConfig {
    /// "l0" | "offdiag" | "spectral_scaling" | "spectral_powers".
    std::string kind = "l0";
    double alpha_mix = 0.5;
    DiagonalSign diagonal_sign = DiagonalSign::symmetric;
    /// Rate of the shifted exponential on [1, ∞) (scaling prior).
    double gamma_rate = 1.0;
    /// Zero the diagonal of spectral draws; defaults to on when the diagonal is pre-learned.
    std::optional<bool> exclude_diagonal;
};

enum class RadiusMode {
    /// |J*|, θ_min and ‖κ*‖ read from the ground truth.
    oracle,
    /// Upper bounds from the config.
    conservative,
};

struct ConfidenceConfig {
    double epsilon = 0.05;
    RadiusConstants constants;
    RadiusMode mode = RadiusMode::oracle;
    // conservative-mode inputs
    std::optional<int> j_star;
    std::optional<double> theta_min;
    std::optional<double> kappa_norm;
};

struct RunConfig {
    EnvConfig env;
    KernelConfig kernel;
    PriorConfig prior;
    SamplerConfig sampler;
    PolicyConfig policy;
    ConfidenceConfig confidence;
    int horizon = 200;
    int replications = 1;
    std::uint64_t base_seed = 1;
    std::string output_path = "out";
    /// Refresh the posterior every period up to this t, then on ⌈dense·ratio^k⌉.
    int refresh_dense = 50;
    double refresh_ratio = 1.2;

    void validate() const;
    Regime regime() const { return parse_regime(prior.kind); }
};

/// Throws ParameterError with the offending key on malformed input.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace netprice
