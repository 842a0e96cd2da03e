#include <netprice/ofu_policy.hpp>
#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace netprice {

void PolicyConfig::validate() const {
    if (restarts < 1) throw ParameterError("PolicyConfig: restarts must be ≥ 1");
    if (max_alt_iters < 1) throw ParameterError("PolicyConfig: max_alt_iters must be ≥ 1");
    if (!(tol > 0.0)) throw ParameterError("PolicyConfig: tol must be positive");
    if (pre_learn_rounds_per_product < 1) throw ParameterError("PolicyConfig: pre_learn_rounds_per_product must be ≥ 1");
}

namespace {

double revenue(const Matrix& theta, const Vector& d0, const Vector& p) { return p.dot(d0) + p.dot(theta * p); }

}  // namespace

ClairvoyantResult clairvoyant_price(const PriceSensitivityMatrix& theta, const Vector& d0, double l) {
    const Index n = theta.dimension();
    if (d0.size() != n) throw ParameterError("clairvoyant_price: dimension mismatch");
    if (!(l > 0.0)) throw ParameterError("clairvoyant_price: price radius must be positive");

    const Matrix s_mat = 0.5 * (theta.entries() + theta.entries().transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s_mat);
    const Vector& s = eig.eigenvalues();  // ascending
    const Matrix& u_mat = eig.eigenvectors();
    const Vector u = 0.5 * u_mat.transpose() * d0;
    const double s_max = s(n - 1);
    const double scale = std::max({1.0, s.cwiseAbs().maxCoeff(), u.norm()});

    auto coords = [&](double nu) {
        Vector c(n);
        for (Index i = 0; i < n; ++i) c(i) = u(i) / (nu - s(i));
        return c;
    };
    auto finish = [&](const Vector& c, double nu) {
        ClairvoyantResult r;
        r.price = u_mat * c;
        const double norm = r.price.norm();
        if (norm > l) r.price *= l / norm;
        r.value = revenue(theta.entries(), d0, r.price);
        r.multiplier = nu;
        return r;
    };

    if (s_max < 0.0) {
        const Vector c = coords(0.0);
        if (c.norm() <= l) return finish(c, 0.0);
    }

    if (s_max >= 0.0) {
        // Hard case: d₀ has no weight on the top eigenspace.
        const double cluster_tol = 1e-12 * scale;
        bool top_empty = true;
        Vector rest = Vector::Zero(n);
        Index top = n - 1;
        for (Index i = 0; i < n; ++i) {
            if (s(i) >= s_max - cluster_tol) {
                if (std::abs(u(i)) > 1e-12 * scale) top_empty = false;
                top = i;
            } else {
                rest(i) = u(i) / (s_max - s(i));
            }
        }
        if (top_empty && rest.norm() <= l) {
            rest(top) = std::sqrt(std::max(0.0, l * l - rest.squaredNorm()));
            return finish(rest, s_max);
        }
    }

    // ‖p(ν)‖ is decreasing on (max(0, s_max), ∞); bracket the root of ‖p(ν)‖ = L and bisect.
    double lo = std::max(0.0, s_max);
    double hi = lo + u.norm() / l + 1.0;
    while (coords(hi).norm() > l) hi = lo + 2.0 * (hi - lo);
    for (int it = 0; it < 500 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (coords(mid).norm() > l) lo = mid;
        else hi = mid;
    }
    return finish(coords(hi), hi);
}

PriceSensitivityMatrix theta_step(const ConfidenceEllipsoid& ell, const Vector& price, bool* clamped) {
    if (price.size() != ell.shape().n()) throw ParameterError("theta_step: dimension mismatch");
    const double pn = price.norm();
    if (pn == 0.0) throw ParameterError("theta_step: price must be nonzero");
    const Eigen::LLT<Matrix> llt(ell.shape().v_reg());
    if (llt.info() != Eigen::Success) throw DomainError("theta_step: regularized Gram matrix is not positive definite");
    const Vector w = llt.solve(price);
    const double pw = price.dot(w);
    Matrix theta = ell.center().entries() + (std::sqrt(ell.radius_sq()) / (std::sqrt(pw) * pn)) * price * w.transpose();
    const double norm = spectral_norm(theta);
    const bool clamp = norm > ell.k_cap();
    if (clamp) {
        theta *= ell.k_cap() / norm;
        // The scaled point can be far from the best K-ball point.  Also try s·p̂p̂ᵀ + B with B = 0 or the
        // center's block on p⊥ (norm max(s, ‖B‖)); the value s‖p‖² reaches the K-ball maximum at s = K.
        const Vector ph = price / pn;
        const Matrix perp = Matrix::Identity(ph.size(), ph.size()) - ph * ph.transpose();
        const Matrix vr = llt.reconstructedMatrix();
        const Matrix m = ph * ph.transpose();
        Matrix block = perp * ell.center().entries() * perp;
        const double bn = spectral_norm(block);
        if (bn > ell.k_cap()) block *= ell.k_cap() / bn;
        for (const Matrix& base : {Matrix(Matrix::Zero(ph.size(), ph.size())), block}) {
            // q(s) = a s² − 2b s + c over Θ = sM + base.
            const Matrix off = base - ell.center().entries();
            const double a = ph.dot(vr * ph);
            const double b = -(m * vr * off.transpose()).trace();
            const double c = (off * vr * off.transpose()).trace() - ell.radius_sq();
            const double disc = b * b - a * c;
            if (disc < 0.0) continue;
            const double lo = (b - std::sqrt(disc)) / a, hi = (b + std::sqrt(disc)) / a;
            const double sv = std::min(ell.k_cap(), hi);
            if (sv >= lo && sv * pn * pn > price.dot(theta * price)) theta = sv * m + base;
        }
    }
    if (clamped) *clamped = clamp;
    return PriceSensitivityMatrix(std::move(theta));
}

ConfidenceEllipsoid optimism_ellipsoid(const ConfidenceEllipsoid& ell, const PolicyConfig& cfg) {
    if (cfg.optimism_set == OptimismSet::regularized) return ell;
    // For Θ in C_t: tr(ΔV̄Δᵀ) = tr(ΔVΔᵀ) + ‖Δ‖²_F < β² + (2K√N)².
    const double k = ell.k_cap();
    const double extra = 4.0 * k * k * static_cast<double>(ell.shape().n());
    return ConfidenceEllipsoid(ell.center(), ell.shape(), ell.radius_sq() + extra, k, ell.epsilon());
}

OfuResult ofu_select(const ConfidenceEllipsoid& ell, const Vector& d0, double l, const PolicyConfig& cfg, Rng& rng) {
    cfg.validate();
    const ConfidenceEllipsoid search = optimism_ellipsoid(ell, cfg);
    const Index n = ell.shape().n();

    OfuResult best;
    best.value = -std::numeric_limits<double>::infinity();
    bool all_converged = true;
    int total_iters = 0;

    for (int r = 0; r < cfg.restarts; ++r) {
        Vector p = r == 0 ? clairvoyant_price(ell.center(), d0, l).price : uniform_on_sphere(n, l, rng);
        if (p.norm() == 0.0) p = uniform_on_sphere(n, l, rng);

        bool clamp = false;
        PriceSensitivityMatrix theta = theta_step(search, p, &clamp);
        double value = revenue(theta.entries(), d0, p);
        std::vector<double> trace{value};
        bool converged = false;
        int it = 0;
        while (it < cfg.max_alt_iters) {
            ++it;
            const ClairvoyantResult cv = clairvoyant_price(theta, d0, l);
            bool cand_clamp = false;
            PriceSensitivityMatrix cand = theta_step(search, cv.price, &cand_clamp);
            const double cand_value = revenue(cand.entries(), d0, cv.price);
            double next_value;
            bool stalled = false;
            if (cand_value >= cv.value) {
                theta = std::move(cand);
                clamp = cand_clamp;
                next_value = cand_value;
            } else {
                // The clamped step lost ground: keep Θ and stop at the better price.
                next_value = cv.value;
                stalled = true;
            }
            p = cv.price;
            const double gain = next_value - value;
            value = std::max(value, next_value);
            trace.push_back(value);
            if (gain < cfg.tol || stalled) {
                converged = true;
                break;
            }
        }
        total_iters += it;
        all_converged = all_converged && converged;
        if (value > best.value) {
            best.price = p;
            best.theta_tilde = theta;
            best.value = value;
            best.clamp_active = clamp;
            best.value_trace = std::move(trace);
        }
    }
    best.iterations = total_iters;
    best.converged = all_converged;
    return best;
}

PrelearnResult prelearn_diagonal(const EnvSpec& env, int rounds_per_product, Rng& rng) {
    if (rounds_per_product < 1) throw ParameterError("prelearn_diagonal: rounds_per_product must be ≥ 1");
    const Index n = env.n_products();
    const double l = env.price_radius();
    PrelearnResult out;
    out.diag_estimates = Vector::Zero(n);
    int period = 1;
    for (Index i = 0; i < n; ++i) {
        const Vector price = l * Vector::Unit(n, i);
        double sum = 0.0;
        for (int k = 0; k < rounds_per_product; ++k) {
            DemandSample sample = step(env, price, rng, period++);
            sum += sample.demand(i);
            out.samples.push_back(std::move(sample));
        }
        out.diag_estimates(i) = sum / (rounds_per_product * l);
    }
    out.residual_history = History(n);
    const Matrix diag = out.diag_estimates.asDiagonal();
    for (const auto& s : out.samples) out.residual_history.append(s.price, s.demand - diag * s.price);
    return out;
}

}  // namespace netprice
