#include "csfq/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "csfq/errors.hpp"

namespace csfq::fit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kMaxIterations = 200;
constexpr double kStepTol = 1e-10;
constexpr double kResidualTol = 1e-12;

// Model interface in *internal* (transformed) coordinates u. Transforms keep
// T positive (log) and p inside (0,1) (logit).
struct Model {
    std::string name;
    int n_params = 0;
    virtual std::vector<double> to_original(const std::vector<double>& u) const = 0;
    virtual std::vector<double> to_internal(const std::vector<double>& theta) const = 0;
    /// diagonal dθ/du at internal point u
    virtual std::vector<double> transform_scale(const std::vector<double>& u) const = 0;
    virtual double value(const std::vector<double>& theta, double x) const = 0;
    virtual void jacobian_row(const std::vector<double>& theta, double x, double* row) const = 0;
    virtual ~Model() = default;
};

double weight_at(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

FitOutcome levenberg_marquardt(const Model& model, std::span<const double> x,
                               std::span<const double> y, std::span<const double> w,
                               std::vector<double> u0) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const int k = model.n_params;
    FitOutcome out;
    out.model = model.name;

    auto residual_sq = [&](const std::vector<double>& u) {
        const auto theta = model.to_original(u);
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double r = y[i] - model.value(theta, x[i]);
            s += weight_at(w, i) * r * r;
        }
        return s;
    };

    std::vector<double> u = std::move(u0);
    double chi2 = residual_sq(u);
    double lambda = 1e-3;

    Eigen::MatrixXd jac(n, k);
    Eigen::VectorXd res(n);
    int it = 0;
    for (; it < kMaxIterations; ++it) {
        const auto theta = model.to_original(u);
        std::vector<double> row(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < n; ++i) {
            model.jacobian_row(theta, x[i], row.data());
            const double sw = std::sqrt(weight_at(w, i));
            res(i) = sw * (y[i] - model.value(theta, x[i]));
            for (int j = 0; j < k; ++j) jac(i, j) = sw * row[static_cast<std::size_t>(j)];
        }
        // chain rule into internal coordinates
        const auto dtheta_du = model.transform_scale(u);
        for (int j = 0; j < k; ++j) jac.col(j) *= dtheta_du[static_cast<std::size_t>(j)];

        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * res;

        bool stepped = false;
        for (int tries = 0; tries < 30; ++tries) {
            Eigen::MatrixXd damped = jtj;
            for (int j = 0; j < k; ++j)
                damped(j, j) += lambda * std::max(jtj(j, j), 1e-12);
            const Eigen::VectorXd step = damped.ldlt().solve(jtr);
            if (!step.allFinite()) {
                lambda *= 3.0;
                continue;
            }
            auto u_next = u;
            for (int j = 0; j < k; ++j) u_next[static_cast<std::size_t>(j)] += step(j);
            const double chi2_next = residual_sq(u_next);
            if (chi2_next <= chi2 * (1.0 + 1e-15)) {
                const double rel_step =
                    step.norm() /
                    std::max(1.0, Eigen::Map<const Eigen::VectorXd>(u.data(), k).norm());
                const double rel_change = std::abs(chi2 - chi2_next) / std::max(chi2, 1e-300);
                u = std::move(u_next);
                chi2 = chi2_next;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel_step < kStepTol && rel_change < kResidualTol) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 3.0;
        }
        if (!stepped) {
            out.converged = true;  // no descent direction left: stationary
        }
        if (out.converged) break;
    }
    out.iterations = it;
    if (!out.converged) out.warning = "max iterations reached; best-so-far parameters";

    // covariance in original coordinates at the optimum
    const auto theta = model.to_original(u);
    out.params = theta;
    out.residual_norm = std::sqrt(chi2);
    Eigen::MatrixXd jorig(n, k);
    std::vector<double> row(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < n; ++i) {
        model.jacobian_row(theta, x[i], row.data());
        const double sw = std::sqrt(weight_at(w, i));
        for (int j = 0; j < k; ++j) jorig(i, j) = sw * row[static_cast<std::size_t>(j)];
    }
    Eigen::MatrixXd jtj = jorig.transpose() * jorig;
    const double dof = static_cast<double>(n) - k;
    double scale = 1.0;
    if (w.empty()) scale = dof > 0 ? chi2 / dof : 0.0;  // reduced chi-square
    const Eigen::MatrixXd cov = scale * jtj.completeOrthogonalDecomposition().pseudoInverse();
    out.stderrs.assign(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < k; ++j) {
        const double v = cov(j, j);
        out.stderrs[static_cast<std::size_t>(j)] = v > 0.0 ? std::sqrt(v) : 0.0;
    }
    // rank check on the column-normalized normal matrix (scale-invariant)
    Eigen::MatrixXd norm = jtj;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            const double dd = std::sqrt(std::max(jtj(a, a) * jtj(b, b), 1e-300));
            norm(a, b) /= dd;
        }
    if (norm.fullPivLu().rank() < k && out.warning.empty())
        out.warning = "singular normal matrix; standard errors unreliable";
    return out;
}

bool is_flat(std::span<const double> y) {
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return (*hi - *lo) <= 1e-12 * (std::abs(*hi) + std::abs(*lo) + 1.0);
}

double mean_tail(std::span<const double> y, std::size_t count) {
    double s = 0.0;
    const std::size_t start = y.size() > count ? y.size() - count : 0;
    for (std::size_t i = start; i < y.size(); ++i) s += y[i];
    return s / static_cast<double>(y.size() - start);
}

// --------------------------------------------------------------------------
// exponential

struct ExpModel final : Model {
    ExpModel() {
        name = "exponential";
        n_params = 3;
    }
    std::vector<double> to_original(const std::vector<double>& u) const override {
        return {u[0], std::exp(u[1]), u[2]};
    }
    std::vector<double> to_internal(const std::vector<double>& t) const override {
        return {t[0], std::log(t[1]), t[2]};
    }
    std::vector<double> transform_scale(const std::vector<double>& u) const override {
        return {1.0, std::exp(u[1]), 1.0};
    }
    double value(const std::vector<double>& t, double x) const override {
        return t[0] * std::exp(-x / t[1]) + t[2];
    }
    void jacobian_row(const std::vector<double>& t, double x, double* row) const override {
        const double e = std::exp(-x / t[1]);
        row[0] = e;
        row[1] = t[0] * e * x / (t[1] * t[1]);
        row[2] = 1.0;
    }
};

std::vector<double> seed_exponential(std::span<const double> x, std::span<const double> y) {
    const double c0 = mean_tail(y, std::max<std::size_t>(2, y.size() / 5));
    const double a0 = y.front() - c0;
    // log-linear regression of log|y − c0| against x, floor-subtracted
    double sx = 0, sxx = 0, sz = 0, sxz = 0;
    int count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double v = y[i] - c0;
        if (v * a0 <= 0.0 || std::abs(v) < 0.05 * std::abs(a0)) continue;
        const double z = std::log(std::abs(v));
        sx += x[i];
        sxx += x[i] * x[i];
        sz += z;
        sxz += x[i] * z;
        ++count;
    }
    double t0 = (x.back() - x.front()) / 2.0;
    if (count >= 2) {
        const double denom = count * sxx - sx * sx;
        if (std::abs(denom) > 1e-300) {
            const double slope = (count * sxz - sx * sz) / denom;
            if (slope < -1e-300) t0 = -1.0 / slope;
        }
    }
    if (!(t0 > 0.0) || !std::isfinite(t0)) t0 = (x.back() - x.front()) / 2.0;
    return {a0, t0, c0};
}

// --------------------------------------------------------------------------
// damped cosine

struct CosModel final : Model {
    CosModel() {
        name = "damped_cosine";
        n_params = 5;
    }
    std::vector<double> to_original(const std::vector<double>& u) const override {
        return {u[0], std::exp(u[1]), std::exp(u[2]), u[3], u[4]};
    }
    std::vector<double> to_internal(const std::vector<double>& t) const override {
        return {t[0], std::log(t[1]), std::log(t[2]), t[3], t[4]};
    }
    std::vector<double> transform_scale(const std::vector<double>& u) const override {
        return {1.0, std::exp(u[1]), std::exp(u[2]), 1.0, 1.0};
    }
    double value(const std::vector<double>& t, double x) const override {
        return t[0] * std::exp(-x / t[1]) * std::cos(kTwoPi * t[2] * x + t[3]) + t[4];
    }
    void jacobian_row(const std::vector<double>& t, double x, double* row) const override {
        const double e = std::exp(-x / t[1]);
        const double arg = kTwoPi * t[2] * x + t[3];
        const double c = std::cos(arg), s = std::sin(arg);
        row[0] = e * c;
        row[1] = t[0] * e * c * x / (t[1] * t[1]);
        row[2] = -t[0] * e * s * kTwoPi * x;
        row[3] = -t[0] * e * s;
        row[4] = 1.0;
    }
};

// least-squares periodogram on (possibly non-uniform) samples
double periodogram_peak(std::span<const double> x, std::span<const double> y, bool& found) {
    const double span = x.back() - x.front();
    double min_dx = std::numeric_limits<double>::max();
    for (std::size_t i = 1; i < x.size(); ++i) min_dx = std::min(min_dx, x[i] - x[i - 1]);
    const double f_lo = 0.5 / span;
    const double f_hi = 0.5 / std::max(min_dx, 1e-300);
    const double mean = [&] {
        double s = 0;
        for (double v : y) s += v;
        return s / static_cast<double>(y.size());
    }();

    double best_f = 0.0, best_p = 0.0, total_p = 0.0;
    const int nf = 600;
    for (int i = 0; i < nf; ++i) {
        const double f = f_lo * std::pow(f_hi / f_lo, static_cast<double>(i) / (nf - 1));
        double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double c = std::cos(kTwoPi * f * x[j]);
            const double s = std::sin(kTwoPi * f * x[j]);
            const double v = y[j] - mean;
            cc += c * c;
            ss += s * s;
            cs += c * s;
            yc += v * c;
            ys += v * s;
        }
        const double det = cc * ss - cs * cs;
        if (std::abs(det) < 1e-12) continue;
        const double a = (yc * ss - ys * cs) / det;
        const double b = (ys * cc - yc * cs) / det;
        const double power = a * yc + b * ys;  // explained sum of squares
        total_p += power;
        if (power > best_p) {
            best_p = power;
            best_f = f;
        }
    }
    // a genuine oscillation should explain a dominant share of the variance
    found = best_p > 3.0 * (total_p / nf) && best_f > 1.0 / span;
    return best_f;
}

// --------------------------------------------------------------------------
// RB decay

struct RbModel final : Model {
    RbModel() {
        name = "rb_decay";
        n_params = 3;
    }
    static double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
    std::vector<double> to_original(const std::vector<double>& u) const override {
        return {u[0], logistic(u[1]), u[2]};
    }
    std::vector<double> to_internal(const std::vector<double>& t) const override {
        const double p = std::clamp(t[1], 1e-12, 1.0 - 1e-12);
        return {t[0], std::log(p / (1.0 - p)), t[2]};
    }
    std::vector<double> transform_scale(const std::vector<double>& u) const override {
        const double p = logistic(u[1]);
        return {1.0, p * (1.0 - p), 1.0};
    }
    double value(const std::vector<double>& t, double x) const override {
        return t[0] * std::pow(t[1], x) + t[2];
    }
    void jacobian_row(const std::vector<double>& t, double x, double* row) const override {
        const double pm = std::pow(t[1], x);
        row[0] = pm;
        row[1] = x > 0.0 ? t[0] * x * std::pow(t[1], x - 1.0) : 0.0;
        row[2] = 1.0;
    }
};

}  // namespace

FitOutcome fit_exponential(std::span<const double> x, std::span<const double> y,
                           std::span<const double> weights,
                           std::optional<std::vector<double>> initial) {
    if (x.size() != y.size() || (!weights.empty() && weights.size() != x.size()))
        throw ConfigError("fit_exponential: size mismatch");
    if (x.size() < 4) throw ConfigError("fit_exponential: need at least 4 points");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ConfigError("fit_exponential: x must be increasing");

    const ExpModel model;
    if (!initial && is_flat(y)) {
        FitOutcome out;
        out.model = model.name;
        out.params = {0.0, std::numeric_limits<double>::infinity(), mean_tail(y, y.size())};
        out.stderrs = {0.0, 0.0, 0.0};
        out.warning = "flat data: decay amplitude indistinguishable from zero";
        return out;
    }
    const auto seed = initial ? *initial : seed_exponential(x, y);
    return levenberg_marquardt(model, x, y, weights, model.to_internal(seed));
}

FitOutcome fit_damped_cosine(std::span<const double> x, std::span<const double> y,
                             std::optional<std::vector<double>> initial) {
    if (x.size() != y.size()) throw ConfigError("fit_damped_cosine: size mismatch");
    if (x.size() < 8) throw ConfigError("fit_damped_cosine: need at least 8 points");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw ConfigError("fit_damped_cosine: x must be increasing");

    const CosModel model;
    std::vector<double> seed;
    if (initial) {
        seed = *initial;
    } else {
        bool found = false;
        const double f0 = periodogram_peak(x, y, found);
        if (!found) {
            // no resolvable oscillation: exponential-plus-offset fallback
            const FitOutcome e = fit_exponential(x, y);
            FitOutcome out;
            out.model = model.name;
            out.params = {e.params[0], e.params[1], 0.0, 0.0, e.params[2]};
            out.stderrs = {e.stderrs[0], e.stderrs[1], 0.0, 0.0, e.stderrs[2]};
            out.residual_norm = e.residual_norm;
            out.converged = e.converged;
            out.iterations = e.iterations;
            out.warning = "no oscillation resolved over the span; exponential fallback (f = 0)";
            return out;
        }
        const double c0 = [&] {
            double s = 0;
            for (double v : y) s += v;
            return s / static_cast<double>(y.size());
        }();
        const double a0 = y.front() - c0;
        seed = {a0 != 0.0 ? a0 : 0.5 * (*std::max_element(y.begin(), y.end()) -
                                        *std::min_element(y.begin(), y.end())),
                (x.back() - x.front()) / 2.0, f0, 0.0, c0};
    }
    return levenberg_marquardt(model, x, y, {}, model.to_internal(seed));
}

FitOutcome fit_rb_decay(std::span<const double> m, std::span<const double> y,
                        std::span<const double> weights,
                        std::optional<std::vector<double>> initial) {
    if (m.size() != y.size() || (!weights.empty() && weights.size() != m.size()))
        throw ConfigError("fit_rb_decay: size mismatch");
    if (m.size() < 4) throw ConfigError("fit_rb_decay: need at least 4 lengths");

    const RbModel model;
    if (!initial && is_flat(y)) {
        FitOutcome out;
        out.model = model.name;
        out.params = {0.0, 0.5, mean_tail(y, y.size())};
        out.stderrs = {0.0, 0.0, 0.0};
        out.warning = "flat data: no decay to fit";
        return out;
    }
    std::vector<double> seed;
    if (initial) {
        seed = *initial;
    } else {
        const double b0 = y.back() - 0.05 * (y.front() - y.back());
        const double a_first = y.front() - b0;
        const double a_last = y.back() - b0;
        double p0 = 0.99;
        if (a_first != 0.0 && a_last / a_first > 0.0 && m.back() > m.front())
            p0 = std::pow(a_last / a_first, 1.0 / (m.back() - m.front()));
        p0 = std::clamp(p0, 1e-6, 1.0 - 1e-6);
        const double a0 = a_first / std::pow(p0, m.front());
        seed = {a0, p0, b0};
    }
    FitOutcome out = levenberg_marquardt(model, m, y, weights, model.to_internal(seed));
    const double p = out.params[1];
    if ((p > 1.0 - 1e-6 || p < 1e-6) && out.warning.empty())
        out.warning = "decay parameter pinned at bound";
    return out;
}

}  // namespace csfq::fit
