#include <netprice/config.hpp>
#include <fstream>
#include <sstream>

namespace netprice {

using nlohmann::json;

namespace {

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& path) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParameterError("config: bad value for '" + path + key + "': " + e.what());
    }
}

const json& section(const json& root, const char* key) {
    static const json empty = json::object();
    if (!root.contains(key)) return empty;
    if (!root.at(key).is_object()) throw ParameterError(std::string("config: '") + key + "' must be an object");
    return root.at(key);
}

Vector read_vector(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParameterError("config: '" + where + "' must be an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParameterError("config: '" + where + "' must be an array of numbers");
        v(static_cast<Index>(i)) = j[i].get<double>();
    }
    return v;
}

json write_vector(const Vector& v) {
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

}  // namespace

void RunConfig::validate() const {
    const int n = env.n_products;
    if (n < 1) throw ParameterError("config: env.n_products must be ≥ 1");
    if (env.baseline_demand.size() != 0 && env.baseline_demand.size() != n)
        throw ParameterError("config: env.baseline_demand must have n_products entries");
    if (!(env.noise_sigma > 0.0) || !(env.noise_q > 0.0) || !(env.price_radius > 0.0) || !(env.norm_bound > 0.0))
        throw ParameterError("config: env noise_sigma, noise_q, price_radius, norm_bound must be positive");
    const auto& tr = env.truth;
    if (tr.kind != "l0" && tr.kind != "offdiag" && tr.kind != "spectral")
        throw ParameterError("config: env.truth.kind must be l0, offdiag or spectral");
    if (!tr.embeddings.empty() && static_cast<int>(tr.embeddings.size()) != n)
        throw ParameterError("config: env.truth.params.embeddings needs one point per product");
    if (horizon < 1) throw ParameterError("config: horizon must be ≥ 1");
    if (replications < 1) throw ParameterError("config: replications must be ≥ 1");
    if (!(kernel.decay_q > 0.0) || kernel.truncation < 0 || kernel.domain_dim < 1)
        throw ParameterError("config: kernel needs decay_q > 0, truncation ≥ 0, domain_dim ≥ 1");
    parse_regime(prior.kind);
    sampler.validate();
    policy.validate();
    if (!(confidence.epsilon > 0.0 && confidence.epsilon < 1.0))
        throw ParameterError("config: confidence.epsilon must lie in (0, 1)");
    confidence.constants.validate();
    if (confidence.mode == RadiusMode::conservative) {
        const Regime r = regime();
        if (r == Regime::l0 && !confidence.j_star) throw ParameterError("config: conservative mode needs j_star");
        if (r == Regime::offdiag && !confidence.theta_min)
            throw ParameterError("config: conservative mode needs theta_min");
        if ((r == Regime::spectral_scaling || r == Regime::spectral_powers) && !confidence.kappa_norm)
            throw ParameterError("config: conservative mode needs kappa_norm");
    } else {
        const Regime r = regime();
        if ((r == Regime::spectral_scaling || r == Regime::spectral_powers) && tr.kind != "spectral")
            throw ParameterError("config: oracle radii for a spectral prior need a spectral truth");
    }
    if (policy.pre_learn_diag && n * policy.pre_learn_rounds_per_product >= horizon)
        throw ParameterError("config: pre-learning does not fit in the horizon");
    if (refresh_dense < 1 || !(refresh_ratio > 1.0))
        throw ParameterError("config: refresh_dense must be ≥ 1 and refresh_ratio > 1");
}

RunConfig parse_config(const json& root) {
    if (!root.is_object()) throw ParameterError("config: top level must be an object");
    RunConfig cfg;

    const json& env = section(root, "env");
    read(env, "n_products", cfg.env.n_products, "env.");
    if (env.contains("baseline_demand")) cfg.env.baseline_demand = read_vector(env.at("baseline_demand"), "env.baseline_demand");
    read(env, "noise_sigma", cfg.env.noise_sigma, "env.");
    read(env, "noise_q", cfg.env.noise_q, "env.");
    read(env, "price_radius", cfg.env.price_radius, "env.");
    read(env, "norm_bound", cfg.env.norm_bound, "env.");
    const json& truth = section(env, "truth");
    read(truth, "kind", cfg.env.truth.kind, "env.truth.");
    read(truth, "seed", cfg.env.truth.seed, "env.truth.");
    read(truth, "per_replication", cfg.env.truth.per_replication, "env.truth.");
    const json& tp = section(truth, "params");
    read(tp, "support_size", cfg.env.truth.support_size, "env.truth.params.");
    read(tp, "c_off", cfg.env.truth.c_off, "env.truth.params.");
    read(tp, "diag_lo", cfg.env.truth.diag_lo, "env.truth.params.");
    read(tp, "diag_hi", cfg.env.truth.diag_hi, "env.truth.params.");
    read(tp, "alpha", cfg.env.truth.alpha, "env.truth.params.");
    if (tp.contains("embeddings")) {
        const json& e = tp.at("embeddings");
        if (!e.is_array()) throw ParameterError("config: env.truth.params.embeddings must be an array");
        for (const auto& pt : e) {
            if (pt.is_number()) cfg.env.truth.embeddings.push_back(Vector::Constant(1, pt.get<double>()));
            else cfg.env.truth.embeddings.push_back(read_vector(pt, "env.truth.params.embeddings[]"));
        }
    }

    const json& kernel = section(root, "kernel");
    read(kernel, "decay_q", cfg.kernel.decay_q, "kernel.");
    read(kernel, "truncation", cfg.kernel.truncation, "kernel.");
    read(kernel, "domain_dim", cfg.kernel.domain_dim, "kernel.");

    const json& prior = section(root, "prior");
    read(prior, "kind", cfg.prior.kind, "prior.");
    const json& pp = section(prior, "params");
    read(pp, "alpha_mix", cfg.prior.alpha_mix, "prior.params.");
    read(pp, "gamma_rate", cfg.prior.gamma_rate, "prior.params.");
    if (pp.contains("diagonal_sign")) {
        std::string s;
        read(pp, "diagonal_sign", s, "prior.params.");
        if (s == "positive") cfg.prior.diagonal_sign = DiagonalSign::positive;
        else if (s == "symmetric") cfg.prior.diagonal_sign = DiagonalSign::symmetric;
        else throw ParameterError("config: prior.params.diagonal_sign must be positive or symmetric");
    }
    if (pp.contains("exclude_diagonal")) {
        bool b = false;
        read(pp, "exclude_diagonal", b, "prior.params.");
        cfg.prior.exclude_diagonal = b;
    }

    const json& sampler = section(root, "sampler");
    read(sampler, "chain_length", cfg.sampler.chain_length, "sampler.");
    read(sampler, "burn_in", cfg.sampler.burn_in, "sampler.");
    read(sampler, "thin", cfg.sampler.thin, "sampler.");
    read(sampler, "proposal_scale", cfg.sampler.proposal_scale, "sampler.");
    read(sampler, "support_move_prob", cfg.sampler.support_move_prob, "sampler.");
    read(sampler, "restarts", cfg.sampler.restarts, "sampler.");
    if (sampler.contains("z_mode")) {
        std::string s;
        read(sampler, "z_mode", s, "sampler.");
        if (s == "clamp") cfg.sampler.z_mode = ZMode::clamp;
        else if (s == "literal") cfg.sampler.z_mode = ZMode::literal;
        else throw ParameterError("config: sampler.z_mode must be clamp or literal");
    }

    const json& policy = section(root, "policy");
    read(policy, "restarts", cfg.policy.restarts, "policy.");
    read(policy, "max_alt_iters", cfg.policy.max_alt_iters, "policy.");
    read(policy, "tol", cfg.policy.tol, "policy.");
    read(policy, "pre_learn_diag", cfg.policy.pre_learn_diag, "policy.");
    read(policy, "pre_learn_rounds_per_product", cfg.policy.pre_learn_rounds_per_product, "policy.");
    if (policy.contains("optimism_set")) {
        std::string s;
        read(policy, "optimism_set", s, "policy.");
        if (s == "regularized") cfg.policy.optimism_set = OptimismSet::regularized;
        else if (s == "enclosing") cfg.policy.optimism_set = OptimismSet::enclosing;
        else throw ParameterError("config: policy.optimism_set must be regularized or enclosing");
    }

    const json& conf = section(root, "confidence");
    read(conf, "epsilon", cfg.confidence.epsilon, "confidence.");
    read(conf, "alpha_smooth", cfg.confidence.constants.alpha_smooth, "confidence.");
    read(conf, "beta_embed", cfg.confidence.constants.beta_embed, "confidence.");
    const json& cc = section(conf, "constants");
    read(cc, "c_alpha_beta", cfg.confidence.constants.c_alpha_beta, "confidence.constants.");
    read(cc, "c_beta_q", cfg.confidence.constants.c_beta_q, "confidence.constants.");
    read(cc, "c_beta_q_alpha", cfg.confidence.constants.c_beta_q_alpha, "confidence.constants.");
    read(cc, "embed_M", cfg.confidence.constants.embed_M, "confidence.constants.");
    read(cc, "c_orders", cfg.confidence.constants.c_orders, "confidence.constants.");
    read(cc, "radius_scale", cfg.confidence.constants.radius_scale, "confidence.constants.");
    if (conf.contains("mode")) {
        std::string s;
        read(conf, "mode", s, "confidence.");
        if (s == "oracle") cfg.confidence.mode = RadiusMode::oracle;
        else if (s == "conservative") cfg.confidence.mode = RadiusMode::conservative;
        else throw ParameterError("config: confidence.mode must be oracle or conservative");
    }
    if (conf.contains("scaling_exponent")) {
        std::string s;
        read(conf, "scaling_exponent", s, "confidence.");
        if (s == "display") cfg.confidence.constants.scaling_exponent = ScalingExponent::display;
        else if (s == "proof") cfg.confidence.constants.scaling_exponent = ScalingExponent::proof;
        else throw ParameterError("config: confidence.scaling_exponent must be display or proof");
    }
    const json& bounds = section(conf, "bounds");
    if (bounds.contains("j_star")) {
        int v = 0;
        read(bounds, "j_star", v, "confidence.bounds.");
        cfg.confidence.j_star = v;
    }
    if (bounds.contains("theta_min")) {
        double v = 0;
        read(bounds, "theta_min", v, "confidence.bounds.");
        cfg.confidence.theta_min = v;
    }
    if (bounds.contains("kappa_norm")) {
        double v = 0;
        read(bounds, "kappa_norm", v, "confidence.bounds.");
        cfg.confidence.kappa_norm = v;
    }

    read(root, "horizon", cfg.horizon, "");
    read(root, "replications", cfg.replications, "");
    read(root, "base_seed", cfg.base_seed, "");
    read(root, "output_path", cfg.output_path, "");
    read(root, "refresh_dense", cfg.refresh_dense, "");
    read(root, "refresh_ratio", cfg.refresh_ratio, "");

    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParameterError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& cfg) {
    json j;
    json env;
    env["n_products"] = cfg.env.n_products;
    if (cfg.env.baseline_demand.size() > 0) env["baseline_demand"] = write_vector(cfg.env.baseline_demand);
    env["noise_sigma"] = cfg.env.noise_sigma;
    env["noise_q"] = cfg.env.noise_q;
    env["price_radius"] = cfg.env.price_radius;
    env["norm_bound"] = cfg.env.norm_bound;
    const auto& tr = cfg.env.truth;
    json params = {{"support_size", tr.support_size}, {"c_off", tr.c_off}, {"diag_lo", tr.diag_lo},
                   {"diag_hi", tr.diag_hi},           {"alpha", tr.alpha}};
    if (!tr.embeddings.empty()) {
        json e = json::array();
        for (const auto& g : tr.embeddings) e.push_back(write_vector(g));
        params["embeddings"] = e;
    }
    env["truth"] = {{"kind", tr.kind}, {"seed", tr.seed}, {"per_replication", tr.per_replication}, {"params", params}};
    j["env"] = env;
    j["kernel"] = {{"decay_q", cfg.kernel.decay_q}, {"truncation", cfg.kernel.truncation},
                   {"domain_dim", cfg.kernel.domain_dim}};
    json pp = {{"alpha_mix", cfg.prior.alpha_mix},
               {"gamma_rate", cfg.prior.gamma_rate},
               {"diagonal_sign", cfg.prior.diagonal_sign == DiagonalSign::positive ? "positive" : "symmetric"}};
    if (cfg.prior.exclude_diagonal) pp["exclude_diagonal"] = *cfg.prior.exclude_diagonal;
    j["prior"] = {{"kind", cfg.prior.kind}, {"params", pp}};
    j["sampler"] = {{"chain_length", cfg.sampler.chain_length},
                    {"burn_in", cfg.sampler.burn_in},
                    {"thin", cfg.sampler.thin},
                    {"proposal_scale", cfg.sampler.proposal_scale},
                    {"support_move_prob", cfg.sampler.support_move_prob},
                    {"restarts", cfg.sampler.restarts},
                    {"z_mode", cfg.sampler.z_mode == ZMode::clamp ? "clamp" : "literal"}};
    j["policy"] = {{"restarts", cfg.policy.restarts},
                   {"max_alt_iters", cfg.policy.max_alt_iters},
                   {"tol", cfg.policy.tol},
                   {"pre_learn_diag", cfg.policy.pre_learn_diag},
                   {"pre_learn_rounds_per_product", cfg.policy.pre_learn_rounds_per_product},
                   {"optimism_set", cfg.policy.optimism_set == OptimismSet::regularized ? "regularized" : "enclosing"}};
    const auto& rc = cfg.confidence.constants;
    json conf = {{"epsilon", cfg.confidence.epsilon},
                 {"alpha_smooth", rc.alpha_smooth},
                 {"beta_embed", rc.beta_embed},
                 {"mode", cfg.confidence.mode == RadiusMode::oracle ? "oracle" : "conservative"},
                 {"scaling_exponent", rc.scaling_exponent == ScalingExponent::display ? "display" : "proof"},
                 {"constants",
                  {{"c_alpha_beta", rc.c_alpha_beta},
                   {"c_beta_q", rc.c_beta_q},
                   {"c_beta_q_alpha", rc.c_beta_q_alpha},
                   {"embed_M", rc.embed_M},
                   {"c_orders", rc.c_orders},
                   {"radius_scale", rc.radius_scale}}}};
    json bounds = json::object();
    if (cfg.confidence.j_star) bounds["j_star"] = *cfg.confidence.j_star;
    if (cfg.confidence.theta_min) bounds["theta_min"] = *cfg.confidence.theta_min;
    if (cfg.confidence.kappa_norm) bounds["kappa_norm"] = *cfg.confidence.kappa_norm;
    if (!bounds.empty()) conf["bounds"] = bounds;
    j["confidence"] = conf;
    j["horizon"] = cfg.horizon;
    j["replications"] = cfg.replications;
    j["base_seed"] = cfg.base_seed;
    j["output_path"] = cfg.output_path;
    j["refresh_dense"] = cfg.refresh_dense;
    j["refresh_ratio"] = cfg.refresh_ratio;
    return j;
}

}  // namespace netprice
