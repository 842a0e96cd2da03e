#pragma once
#include <netprice/config.hpp>
#include <netprice/confidence.hpp>
#include <netprice/demand_env.hpp>
#include <netprice/kernel_system.hpp>
#include <netprice/priors.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace netprice {

struct TraceRow {
    int t = 0;
    double price_norm = 0.0;
    double instant_regret = 0.0;
    double cum_regret = 0.0;
    double beta_sq = 0.0;
    bool in_confidence = false;
    double posterior_risk = 0.0;
    double sampler_acceptance = 0.0;
    /// (1/t) Σ_s ‖(Θ* − Θ̂)p_s‖²; not persisted to CSV.
    double excess_risk = std::numeric_limits<double>::quiet_NaN();
    bool refreshed = false;
};

struct RegretTrace {
    int replication_id = 0;
    std::uint64_t seed = 0;
    /// False when the sampler failed; rows then hold the partial episode.
    bool valid = true;
    std::string error;
    /// The episode was cut short at the first period with Θ* outside C_t (calibration runs).
    bool stopped_early = false;
    std::vector<TraceRow> rows;
    std::vector<Vector> prices;

    /// Θ* ∈ C_t for every logged period.
    bool covered() const;
    std::vector<double> radii() const;
    double final_regret() const { return rows.empty() ? 0.0 : rows.back().cum_regret; }
};

/// Everything an episode derives from the config and the replication id.
struct Scenario {
    EnvSpec env;
    PriorSpec prior;
    std::shared_ptr<const KernelSystem> kernel;
    std::vector<Vector> embeddings;
    std::optional<SpectralTruth> spectral_truth;
    Regime regime;
    double c1;
    /// Radius and bound inputs for this scenario (oracle or conservative).
    TheoremInputs bound_inputs;
};

Scenario build_scenario(const RunConfig& cfg, int replication_id);

/// t ≤ dense, or t = ⌈dense·ratio^k⌉ for some k ≥ 1.
bool is_refresh_period(int t, int dense, double ratio);

/// Test hooks for run_episode.
struct EpisodeHooks {
    /// Start from this center (and select p₁ by ofu_select instead of at random).
    std::optional<Matrix> initial_center;
    /// Never refresh the posterior.
    bool freeze_center = false;
    /// Use this β_t² for every period.
    std::optional<double> radius_override;
    /// End the episode at the first period with Θ* ∉ C_t.
    bool stop_on_exit = false;
};

RegretTrace run_episode(const RunConfig& cfg, int replication_id, const EpisodeHooks* hooks = nullptr);

struct SummaryRow {
    int checkpoint = 0;
    double median_cum_regret = 0.0;
    double q25 = 0.0, q75 = 0.0;
    /// Fraction of valid replications with Θ* ∈ C_t for all t ≤ checkpoint.
    double coverage = 0.0;
    double theorem_bound = 0.0;
    int valid_replications = 0;
};

struct BatchResult {
    std::vector<RegretTrace> traces;
    std::vector<SummaryRow> summary;
};

/// 1, 2, 5, 10, 20, 50, ... up to T, plus T itself.
std::vector<int> log_checkpoints(int horizon);

std::vector<SummaryRow> summarize(const RunConfig& cfg, const std::vector<RegretTrace>& traces);

/// Runs cfg.replications episodes in parallel (capped by NETPRICE_THREADS).  Writes
/// trace_{id}.csv, summary.csv and replications.csv into out_dir unless it is empty.
BatchResult run_batch(const RunConfig& cfg, const std::string& out_dir);

struct CalibrationStep {
    double factor;
    bool passed;
    int failures;
    int episodes_run;
};

struct CalibrationResult {
    RadiusConstants constants;
    std::vector<CalibrationStep> steps;
};

/** Smallest radius factor in [1e-6, 1e6] (log-space bisection, 12 steps) at which at least
 * `target_coverage` of `pilot_reps` pilot episodes keep Θ* inside C_t for every period.  Pilot
 * episodes use seeds disjoint from the evaluation seeds.  Throws CalibrationError if the target
 * fails even at 1e6.
 */
CalibrationResult calibrate(const RunConfig& cfg, double target_coverage, int pilot_reps);

struct BoundRow {
    int checkpoint = 0;
    double median_regret = 0.0;
    double theorem_bound = 0.0;
    /// Lemma-1 bound fed the regime's radii (scaled by radius_scale).
    double composed_bound = 0.0;
    /// Median over replications of the Lemma-1 bound on the realized β_t² sequence.
    double lemma1_realized_median = 0.0;
    int covered = 0;
    /// Replications with Δ above their own realized Lemma-1 bound.
    int exceedances = 0;
    /// Exceedances among covered replications.
    int covered_exceedances = 0;
    double allowed_exceedances = 0.0;
};

std::vector<BoundRow> bound_report(const RunConfig& cfg, const std::vector<RegretTrace>& traces);

void write_trace_csv(const std::string& path, const RegretTrace& trace);
RegretTrace read_trace_csv(const std::string& path);
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
void write_bound_csv(const std::string& path, const std::vector<BoundRow>& rows);
/// Reads every trace_{id}.csv in a directory, ordered by id.
std::vector<RegretTrace> read_traces(const std::string& dir);

/// NETPRICE_THREADS if set, else the hardware concurrency (at least 1).
int thread_count();

}  // namespace netprice
