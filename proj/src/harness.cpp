#include <netprice/harness.hpp>
#include <netprice/ofu_policy.hpp>
#include <netprice/pac_bayes.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <regex>
#include <sstream>
#include <thread>

namespace netprice {

namespace fs = std::filesystem;

bool RegretTrace::covered() const {
    return std::all_of(rows.begin(), rows.end(), [](const TraceRow& r) { return r.in_confidence; });
}

std::vector<double> RegretTrace::radii() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.beta_sq);
    return out;
}

namespace {

std::vector<Vector> default_embeddings(int n, int dim) {
    std::vector<Vector> g;
    for (int i = 0; i < n; ++i) {
        Vector x = Vector::Zero(dim);
        x(0) = -std::numbers::pi + 2.0 * std::numbers::pi * (i + 0.5) / n;
        g.push_back(std::move(x));
    }
    return g;
}

double min_nonzero_abs(const Matrix& m) {
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < m.size(); ++k) {
        const double v = std::abs(m.data()[k]);
        if (v > 0.0) best = std::min(best, v);
    }
    return std::isfinite(best) ? best : 1.0;
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg, int replication_id) {
    cfg.validate();
    const int n = cfg.env.n_products;
    const auto& tr = cfg.env.truth;
    const Regime regime = cfg.regime();
    const bool spectral_prior = regime == Regime::spectral_scaling || regime == Regime::spectral_powers;

    std::shared_ptr<const KernelSystem> ks;
    std::vector<Vector> embeddings;
    if (spectral_prior || tr.kind == "spectral") {
        const int m = cfg.kernel.truncation > 0 ? cfg.kernel.truncation
                                                : KernelSystem::default_truncation(cfg.kernel.decay_q, n, cfg.horizon);
        ks = std::make_shared<const KernelSystem>(cfg.kernel.decay_q, m, cfg.kernel.domain_dim);
        embeddings = tr.embeddings.empty() ? default_embeddings(n, cfg.kernel.domain_dim) : tr.embeddings;
    }

    const std::uint64_t truth_seed = tr.seed + (tr.per_replication ? static_cast<std::uint64_t>(replication_id) : 0);
    const double k = cfg.env.norm_bound;
    std::optional<SpectralTruth> spectral;
    PriceSensitivityMatrix theta_star;
    if (tr.kind == "l0") {
        theta_star = gen_theta_l0(n, tr.support_size, k, truth_seed);
    } else if (tr.kind == "offdiag") {
        theta_star = gen_theta_offdiag(n, tr.c_off, truth_seed, tr.diag_lo, tr.diag_hi);
    } else {
        spectral = gen_theta_spectral(embeddings, ks, tr.alpha, truth_seed, tr.diag_lo, tr.diag_hi);
        theta_star = spectral->theta;
    }

    Vector d0 = cfg.env.baseline_demand.size() > 0 ? cfg.env.baseline_demand : Vector::Ones(n);
    EnvSpec env(std::move(d0), theta_star, cfg.env.noise_sigma, cfg.env.noise_q, cfg.env.price_radius, k, embeddings);

    const bool exclude_diag = cfg.prior.exclude_diagonal.value_or(cfg.policy.pre_learn_diag);
    PriorKind kind;
    switch (regime) {
        case Regime::l0: kind = L0Prior{cfg.prior.alpha_mix}; break;
        case Regime::offdiag: kind = OffDiagPrior{cfg.prior.diagonal_sign}; break;
        case Regime::spectral_scaling:
            kind = SpectralScalingPrior{ks, GammaDensity::shifted_exponential(cfg.prior.gamma_rate, 1.0), exclude_diag};
            break;
        case Regime::spectral_powers:
            kind = SpectralPowersPrior{ks, GammaDensity::uniform(0.0, 1.0), exclude_diag};
            break;
    }
    PriorSpec prior(n, k, std::move(kind));

    const double c1 = c1_constant(cfg.env.noise_q, k, cfg.env.price_radius, cfg.env.noise_sigma);
    TheoremInputs in;
    in.n = n;
    in.horizon = cfg.horizon;
    in.l = cfg.env.price_radius;
    in.k_cap = k;
    in.c1 = c1;
    in.epsilon = cfg.confidence.epsilon;
    in.alpha_mix = cfg.prior.alpha_mix;
    in.rc = cfg.confidence.constants;
    const RadiusConstants& rc = cfg.confidence.constants;
    if (cfg.confidence.mode == RadiusMode::oracle) {
        in.j_star = std::max<int>(1, static_cast<int>(theta_star.nonzeros()));
        in.theta_min = min_nonzero_abs(theta_star.entries());
        if (spectral) {
            const double norm = power_norm(spectral->kappa_star, rc.alpha_smooth);
            in.kappa_norm = regime == Regime::spectral_scaling ? rc.embed_M * norm : norm * norm;
        }
    } else {
        in.j_star = std::max(1, cfg.confidence.j_star.value_or(n * n));
        in.theta_min = cfg.confidence.theta_min.value_or(1.0);
        in.kappa_norm = cfg.confidence.kappa_norm.value_or(1.0);
    }
    return Scenario{std::move(env), std::move(prior), ks, embeddings, std::move(spectral), regime, c1, in};
}

bool is_refresh_period(int t, int dense, double ratio) {
    if (t <= dense) return true;
    for (int k = 1;; ++k) {
        // The small offset keeps exact products such as 50·1.2² = 72 from rounding up.
        const int point = static_cast<int>(std::ceil(dense * std::pow(ratio, k) - 1e-9));
        if (point == t) return true;
        if (point > t) return false;
    }
}

RegretTrace run_episode(const RunConfig& cfg, int replication_id, const EpisodeHooks* hooks) {
    const Scenario sc = build_scenario(cfg, replication_id);
    const EnvSpec& env = sc.env;
    const int n = static_cast<int>(env.n_products());
    const double l = env.price_radius(), k = env.norm_bound();
    const Vector& d0 = env.baseline_demand();
    const double eps = cfg.confidence.epsilon;

    RegretTrace trace;
    trace.replication_id = replication_id;
    trace.seed = cfg.base_seed + static_cast<std::uint64_t>(replication_id);
    Rng noise_rng = make_rng(trace.seed, 1);
    Rng policy_rng = make_rng(trace.seed, 2);
    Rng sampler_rng = make_rng(trace.seed, 3);

    const ClairvoyantResult best = clairvoyant_price(env.theta_star(), d0, l);
    const double r_star = best.value;

    PrelearnResult pre;
    Matrix diag = Matrix::Zero(n, n);
    int pre_periods = 0;
    if (cfg.policy.pre_learn_diag) {
        pre = prelearn_diagonal(env, cfg.policy.pre_learn_rounds_per_product, noise_rng);
        diag = pre.diag_estimates.asDiagonal();
        pre_periods = static_cast<int>(pre.samples.size());
    }

    History hist(n);
    GramState gram(n);
    Matrix center = Matrix::Zero(n, n);
    if (hooks && hooks->initial_center) {
        center = scale_Z(PriceSensitivityMatrix(*hooks->initial_center), k).entries();
    }
    const bool freeze = hooks && hooks->freeze_center;
    double acceptance = 0.0;
    double cum = 0.0;
    std::optional<ConfidenceEllipsoid> prev;
    if (hooks && hooks->initial_center) {
        const double r0 = hooks->radius_override ? *hooks->radius_override
                                                 : cfg.confidence.constants.radius_scale *
                                                       regime_radius(sc.regime, 1, sc.bound_inputs);
        prev.emplace(PriceSensitivityMatrix(center), gram, r0, k, eps);
    }

    for (int t = 1; t <= cfg.horizon; ++t) {
        Vector price, demand;
        if (t <= pre_periods) {
            price = pre.samples[static_cast<std::size_t>(t - 1)].price;
            demand = pre.samples[static_cast<std::size_t>(t - 1)].demand;
        } else {
            if (prev) price = ofu_select(*prev, d0, l, cfg.policy, policy_rng).price;
            else price = uniform_on_sphere(n, l, policy_rng);
            demand = step(env, price, noise_rng, t).demand;
        }
        gram.append(price);
        hist.append(price, demand - diag * price);

        TraceRow row;
        row.t = t;
        if (!freeze && is_refresh_period(t, cfg.refresh_dense, cfg.refresh_ratio)) {
            try {
                const PosteriorSummary post = posterior_mean(sc.prior, hist, lambda_schedule(t, sc.c1), cfg.sampler,
                                                             sc.embeddings, sampler_rng);
                center = scale_Z(PriceSensitivityMatrix(Matrix(diag + post.theta_hat.entries())), k).entries();
                acceptance = post.acceptance_rate;
                row.refreshed = true;
            } catch (const SamplerError& e) {
                trace.valid = false;
                trace.error = e.what();
                break;
            }
        }
        const double radius = hooks && hooks->radius_override
                                  ? *hooks->radius_override
                                  : cfg.confidence.constants.radius_scale * regime_radius(sc.regime, t, sc.bound_inputs);
        prev.emplace(PriceSensitivityMatrix(center), gram, radius, k, eps);

        row.price_norm = price.norm();
        row.instant_regret = r_star - expected_revenue(env.theta_star(), d0, price);
        cum += row.instant_regret;
        row.cum_regret = cum;
        row.beta_sq = radius;
        row.in_confidence = contains(*prev, env.theta_star());
        row.posterior_risk = hist.risk(center - diag);
        row.sampler_acceptance = acceptance;
        row.excess_risk = quadratic_form(*prev, env.theta_star().entries()) / t;
        trace.rows.push_back(row);
        trace.prices.push_back(price);
        if (hooks && hooks->stop_on_exit && !row.in_confidence) {
            trace.stopped_early = true;
            break;
        }
    }
    return trace;
}

std::vector<int> log_checkpoints(int horizon) {
    std::vector<int> out;
    for (long base = 1; base <= horizon; base *= 10)
        for (int m : {1, 2, 5})
            if (base * m <= horizon) out.push_back(static_cast<int>(base * m));
    if (out.empty() || out.back() != horizon) out.push_back(horizon);
    return out;
}

namespace {

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

bool covered_until(const RegretTrace& tr, int checkpoint) {
    for (const auto& r : tr.rows) {
        if (r.t > checkpoint) break;
        if (!r.in_confidence) return false;
    }
    return true;
}

const TraceRow* row_at(const RegretTrace& tr, int t) {
    if (t < 1 || t > static_cast<int>(tr.rows.size())) return nullptr;
    const TraceRow& r = tr.rows[static_cast<std::size_t>(t - 1)];
    return r.t == t ? &r : nullptr;
}

TheoremInputs inputs_at(const RunConfig& cfg, int horizon) {
    TheoremInputs in = build_scenario(cfg, 0).bound_inputs;
    in.horizon = horizon;
    return in;
}

}  // namespace

std::vector<SummaryRow> summarize(const RunConfig& cfg, const std::vector<RegretTrace>& traces) {
    std::vector<SummaryRow> out;
    const Regime regime = cfg.regime();
    for (int cp : log_checkpoints(cfg.horizon)) {
        SummaryRow row;
        row.checkpoint = cp;
        std::vector<double> regrets;
        int covered = 0;
        for (const auto& tr : traces) {
            if (!tr.valid) continue;
            const TraceRow* r = row_at(tr, cp);
            if (!r) continue;
            regrets.push_back(r->cum_regret);
            covered += covered_until(tr, cp) ? 1 : 0;
        }
        row.valid_replications = static_cast<int>(regrets.size());
        row.median_cum_regret = quantile(regrets, 0.5);
        row.q25 = quantile(regrets, 0.25);
        row.q75 = quantile(regrets, 0.75);
        row.coverage = regrets.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(regrets.size());
        row.theorem_bound = theorem_bound(regime, inputs_at(cfg, cp));
        out.push_back(row);
    }
    return out;
}

int thread_count() {
    if (const char* env = std::getenv("NETPRICE_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << std::setprecision(17);
    return out;
}

}  // namespace

BatchResult run_batch(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    BatchResult result;
    result.traces.resize(static_cast<std::size_t>(cfg.replications));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.replications));
    auto worker = [&] {
        for (int id = next++; id < cfg.replications; id = next++) {
            try {
                result.traces[static_cast<std::size_t>(id)] = run_episode(cfg, id);
            } catch (...) {
                errors[static_cast<std::size_t>(id)] = std::current_exception();
            }
        }
    };
    const int workers = std::min(thread_count(), cfg.replications);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    result.summary = summarize(cfg, result.traces);
    if (!out_dir.empty()) {
        ensure_dir(out_dir);
        for (const auto& tr : result.traces)
            write_trace_csv((fs::path(out_dir) / ("trace_" + std::to_string(tr.replication_id) + ".csv")).string(), tr);
        write_summary_csv((fs::path(out_dir) / "summary.csv").string(), result.summary);
        auto out = open_out((fs::path(out_dir) / "replications.csv").string());
        out << "replication_id,seed,valid,covered,final_cum_regret,lemma1_bound\n";
        for (const auto& tr : result.traces) {
            const double bound = tr.rows.empty() ? 0.0
                                                 : regret_bound_lemma1(cfg.env.n_products, static_cast<int>(tr.rows.size()),
                                                                       cfg.env.price_radius, cfg.env.norm_bound, tr.radii());
            out << tr.replication_id << ',' << tr.seed << ',' << (tr.valid ? 1 : 0) << ',' << (tr.covered() ? 1 : 0)
                << ',' << tr.final_regret() << ',' << bound << '\n';
        }
    }
    return result;
}

CalibrationResult calibrate(const RunConfig& cfg, double target_coverage, int pilot_reps) {
    cfg.validate();
    if (!(target_coverage > 0.0 && target_coverage < 1.0))
        throw ParameterError("calibrate: target coverage must lie in (0, 1)");
    if (pilot_reps < 1) throw ParameterError("calibrate: need at least one pilot replication");

    RunConfig pilot = cfg;
    pilot.base_seed = cfg.base_seed + 1000003;
    const double base_scale = cfg.confidence.constants.radius_scale;
    const int allowed = static_cast<int>(std::floor((1.0 - target_coverage) * pilot_reps + 1e-9));
    CalibrationResult result;
    EpisodeHooks hooks;
    hooks.stop_on_exit = true;

    auto passes = [&](double factor) {
        pilot.confidence.constants.radius_scale = base_scale * factor;
        int failures = 0, run = 0;
        for (int id = 0; id < pilot_reps && failures <= allowed; ++id) {
            const RegretTrace tr = run_episode(pilot, id, &hooks);
            ++run;
            if (!tr.valid || !tr.covered()) ++failures;
        }
        const bool ok = failures <= allowed;
        result.steps.push_back({factor, ok, failures, run});
        return ok;
    };

    double lo = 1e-6, hi = 1e6;
    if (!passes(hi))
        throw CalibrationError("calibrate: coverage stays below " + std::to_string(target_coverage) +
                               " even with the radius scaled by 1e6");
    for (int step = 0; step < 12; ++step) {
        const double mid = std::sqrt(lo * hi);
        if (passes(mid)) hi = mid;
        else lo = mid;
    }
    result.constants = cfg.confidence.constants;
    result.constants.radius_scale = base_scale * hi;
    return result;
}

std::vector<BoundRow> bound_report(const RunConfig& cfg, const std::vector<RegretTrace>& traces) {
    std::vector<BoundRow> out;
    const Regime regime = cfg.regime();
    const double eps = cfg.confidence.epsilon;
    const int n = cfg.env.n_products;
    for (int cp : log_checkpoints(cfg.horizon)) {
        BoundRow row;
        row.checkpoint = cp;
        const TheoremInputs in = inputs_at(cfg, cp);
        row.theorem_bound = theorem_bound(regime, in);
        row.composed_bound = composed_bound(regime, in);
        std::vector<double> regrets, lemma;
        for (const auto& tr : traces) {
            if (!tr.valid) continue;
            const TraceRow* r = row_at(tr, cp);
            if (!r) continue;
            std::vector<double> radii;
            for (int t = 0; t < cp; ++t) radii.push_back(tr.rows[static_cast<std::size_t>(t)].beta_sq);
            const double bound = regret_bound_lemma1(n, cp, cfg.env.price_radius, cfg.env.norm_bound, radii);
            regrets.push_back(r->cum_regret);
            lemma.push_back(bound);
            const bool cov = covered_until(tr, cp);
            row.covered += cov ? 1 : 0;
            if (r->cum_regret > bound) {
                ++row.exceedances;
                if (cov) ++row.covered_exceedances;
            }
        }
        const double reps = static_cast<double>(regrets.size());
        row.median_regret = quantile(regrets, 0.5);
        row.lemma1_realized_median = quantile(lemma, 0.5);
        row.allowed_exceedances = eps * reps + 2.0 * std::sqrt(eps * (1.0 - eps) * reps);
        out.push_back(row);
    }
    return out;
}

void write_trace_csv(const std::string& path, const RegretTrace& trace) {
    auto out = open_out(path);
    out << "t,price_norm,instant_regret,cum_regret,beta_sq,in_confidence,posterior_risk,sampler_acceptance,"
           "replication_id,seed\n";
    for (const auto& r : trace.rows)
        out << r.t << ',' << r.price_norm << ',' << r.instant_regret << ',' << r.cum_regret << ',' << r.beta_sq << ','
            << (r.in_confidence ? 1 : 0) << ',' << r.posterior_risk << ',' << r.sampler_acceptance << ','
            << trace.replication_id << ',' << trace.seed << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

RegretTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,price_norm", 0) != 0) throw std::runtime_error("'" + path + "' is not a trace CSV");
    RegretTrace tr;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 10) throw std::runtime_error("malformed row in '" + path + "': " + line);
        TraceRow r;
        try {
            r.t = std::stoi(cells[0]);
            r.price_norm = std::stod(cells[1]);
            r.instant_regret = std::stod(cells[2]);
            r.cum_regret = std::stod(cells[3]);
            r.beta_sq = std::stod(cells[4]);
            r.in_confidence = cells[5] == "1";
            r.posterior_risk = std::stod(cells[6]);
            r.sampler_acceptance = std::stod(cells[7]);
            tr.replication_id = std::stoi(cells[8]);
            tr.seed = std::stoull(cells[9]);
        } catch (const std::exception&) {
            throw std::runtime_error("malformed row in '" + path + "': " + line);
        }
        tr.rows.push_back(r);
    }
    return tr;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
    auto out = open_out(path);
    out << "checkpoint,median_cum_regret,q25,q75,coverage,theorem_bound,valid_replications\n";
    for (const auto& r : rows)
        out << r.checkpoint << ',' << r.median_cum_regret << ',' << r.q25 << ',' << r.q75 << ',' << r.coverage << ','
            << r.theorem_bound << ',' << r.valid_replications << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_bound_csv(const std::string& path, const std::vector<BoundRow>& rows) {
    auto out = open_out(path);
    out << "checkpoint,median_regret,theorem_bound,composed_bound,lemma1_realized_median,covered,exceedances,"
           "covered_exceedances,allowed_exceedances\n";
    for (const auto& r : rows)
        out << r.checkpoint << ',' << r.median_regret << ',' << r.theorem_bound << ',' << r.composed_bound << ','
            << r.lemma1_realized_median << ',' << r.covered << ',' << r.exceedances << ',' << r.covered_exceedances
            << ',' << r.allowed_exceedances << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<RegretTrace> read_traces(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("trace directory '" + dir + "' does not exist");
    const std::regex name(R"(trace_(\d+)\.csv)");
    std::vector<std::pair<int, std::string>> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string fname = entry.path().filename().string();
        if (std::regex_match(fname, m, name)) files.emplace_back(std::stoi(m[1]), entry.path().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<RegretTrace> out;
    for (const auto& [id, path] : files) out.push_back(read_trace_csv(path));
    if (out.empty()) throw std::runtime_error("no trace_*.csv files in '" + dir + "'");
    return out;
}

}  // namespace netprice
