#include "windramp/arma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

namespace windramp {

bool ar_stationary(std::span<const double> phi) {
    const int p = static_cast<int>(phi.size());
    if (p == 0) return true;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i) companion(0, i) = phi[static_cast<std::size_t>(i)];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd eig = companion.eigenvalues();
    for (int i = 0; i < p; ++i)
        if (std::abs(eig(i)) >= 1.0) return false;
    return true;
}

std::vector<double> persistence_forecast(const UniformSeries& history, int horizon) {
    if (horizon < 0) throw std::invalid_argument("persistence_forecast: horizon must be >= 0");
    const auto last = history.last_present();
    if (!last.has_value())
        throw std::invalid_argument("persistence_forecast: history has no present values");
    return std::vector<double>(static_cast<std::size_t>(horizon), *last);
}

std::vector<double> rolling_persistence(const UniformSeries& train, const UniformSeries& test) {
    auto last = train.last_present();
    if (!last.has_value())
        throw std::invalid_argument("rolling_persistence: train has no present values");
    std::vector<double> out;
    out.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        out.push_back(*last);
        if (test[i].has_value()) last = test[i];
    }
    return out;
}

namespace {

constexpr double kHuge = 1e30;

// One-step CSS residuals of w under (c, phi, theta); residuals and the
// conditioning zeros live in e (same length as w). Returns the sum of
// squared residuals over t >= p, or +inf if the recursion exploded.
double css_residuals(std::span<const double> w, std::span<const double> phi,
                     std::span<const double> theta, double c, std::vector<double>& e) {
    const std::size_t n = w.size();
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    e.assign(n, 0.0);
    double s = 0.0;
    for (std::size_t t = p; t < n; ++t) {
        double pred = c;
        for (std::size_t i = 0; i < p; ++i) pred += phi[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < q; ++j) {
            const std::size_t lag = j + 1;
            if (t >= lag) pred += theta[j] * e[t - lag]; // pre-sample residuals are zero
        }
        const double r = w[t] - pred;
        if (!std::isfinite(r) || std::fabs(r) > kHuge)
            return std::numeric_limits<double>::infinity();
        e[t] = r;
        s += r * r;
    }
    return s;
}

// Deterministic OLS helper (column-pivoted QR).
Eigen::VectorXd ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& b) {
    return x.colPivHouseholderQr().solve(b);
}

struct HrInit {
    double c = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
};

// Two-stage Hannan-Rissanen initialisation: a long-AR regression supplies
// residual estimates, then y is regressed on its own lags and the lagged
// residuals.
HrInit hannan_rissanen(std::span<const double> w, int p, int q) {
    const std::size_t n = w.size();
    HrInit init;
    init.phi.assign(static_cast<std::size_t>(p), 0.0);
    init.theta.assign(static_cast<std::size_t>(q), 0.0);

    double mean = 0.0;
    for (double v : w) mean += v;
    mean /= static_cast<double>(n);

    std::vector<double> resid(n, 0.0);
    std::size_t resid_from = 0;
    if (q > 0) {
        const std::size_t lmax = (n - 1) / 4;
        std::size_t lag = std::max<std::size_t>(
            static_cast<std::size_t>(p + q),
            static_cast<std::size_t>(std::ceil(10.0 * std::log10(static_cast<double>(n)))));
        lag = std::max<std::size_t>(1, std::min(lag, lmax));
        const std::size_t rows = n - lag;
        Eigen::MatrixXd x(rows, lag + 1);
        Eigen::VectorXd b(rows);
        for (std::size_t t = lag; t < n; ++t) {
            const std::size_t r = t - lag;
            x(static_cast<Eigen::Index>(r), 0) = 1.0;
            for (std::size_t i = 0; i < lag; ++i)
                x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i + 1)) = w[t - 1 - i];
            b(static_cast<Eigen::Index>(r)) = w[t];
        }
        const Eigen::VectorXd beta = ols(x, b);
        for (std::size_t t = lag; t < n; ++t) {
            double pred = beta(0);
            for (std::size_t i = 0; i < lag; ++i)
                pred += beta(static_cast<Eigen::Index>(i + 1)) * w[t - 1 - i];
            resid[t] = w[t] - pred;
        }
        resid_from = lag;
    }

    const std::size_t t0 = std::max<std::size_t>(static_cast<std::size_t>(p),
                                                 q > 0 ? resid_from + static_cast<std::size_t>(q) : 0);
    const std::size_t k = 1 + static_cast<std::size_t>(p) + static_cast<std::size_t>(q);
    if (n <= t0 || n - t0 <= k) {
        init.c = mean;
        return init;
    }
    const std::size_t rows = n - t0;
    Eigen::MatrixXd x(rows, k);
    Eigen::VectorXd b(rows);
    for (std::size_t t = t0; t < n; ++t) {
        const std::size_t r = t - t0;
        x(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (int i = 0; i < p; ++i)
            x(static_cast<Eigen::Index>(r), 1 + i) = w[t - 1 - static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j)
            x(static_cast<Eigen::Index>(r), 1 + p + j) = resid[t - 1 - static_cast<std::size_t>(j)];
        b(static_cast<Eigen::Index>(r)) = w[t];
    }
    const Eigen::VectorXd beta = ols(x, b);
    init.c = beta(0);
    for (int i = 0; i < p; ++i) init.phi[static_cast<std::size_t>(i)] = beta(1 + i);
    for (int j = 0; j < q; ++j) init.theta[static_cast<std::size_t>(j)] = beta(1 + p + j);
    for (double& th : init.theta)
        if (!std::isfinite(th) || std::fabs(th) > 5.0) th = 0.0;
    for (double& ph : init.phi)
        if (!std::isfinite(ph)) ph = 0.0;
    return init;
}

// CSS objective with analytic Jacobian accumulated into normal equations.
// Parameter layout: [c, phi..., theta...].
struct CssQuadratics {
    double s = 0.0;
    Eigen::MatrixXd jtj;
    Eigen::VectorXd jte;
};

CssQuadratics css_quadratics(std::span<const double> w, const Eigen::VectorXd& psi, int p, int q) {
    const std::size_t n = w.size();
    const std::size_t k = 1 + static_cast<std::size_t>(p) + static_cast<std::size_t>(q);
    const double c = psi(0);
    std::vector<double> phi(static_cast<std::size_t>(p)), theta(static_cast<std::size_t>(q));
    for (int i = 0; i < p; ++i) phi[static_cast<std::size_t>(i)] = psi(1 + i);
    for (int j = 0; j < q; ++j) theta[static_cast<std::size_t>(j)] = psi(1 + p + j);

    std::vector<double> e(n, 0.0);
    // deriv[m][t] = d e_t / d psi_m
    std::vector<std::vector<double>> deriv(k, std::vector<double>(n, 0.0));

    CssQuadratics out;
    out.jtj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    out.jte = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));

    const std::size_t start = static_cast<std::size_t>(p);
    for (std::size_t t = start; t < n; ++t) {
        double pred = c;
        for (int i = 0; i < p; ++i) pred += phi[static_cast<std::size_t>(i)] * w[t - 1 - static_cast<std::size_t>(i)];
        for (int j = 0; j < q; ++j) {
            const std::size_t lag = static_cast<std::size_t>(j) + 1;
            pred += theta[static_cast<std::size_t>(j)] * (t >= lag ? e[t - lag] : 0.0);
        }
        const double r = w[t] - pred;
        if (!std::isfinite(r) || std::fabs(r) > kHuge) {
            out.s = std::numeric_limits<double>::infinity();
            return out;
        }
        e[t] = r;

        for (std::size_t m = 0; m < k; ++m) {
            double d;
            if (m == 0) {
                d = -1.0;
            } else if (m <= static_cast<std::size_t>(p)) {
                d = -w[t - m]; // m = i -> lag i
            } else {
                const std::size_t lag = m - static_cast<std::size_t>(p); // theta lag
                d = -(t >= lag ? e[t - lag] : 0.0);
            }
            for (int j = 0; j < q; ++j) {
                const std::size_t lag = static_cast<std::size_t>(j) + 1;
                if (t >= lag) d -= theta[static_cast<std::size_t>(j)] * deriv[m][t - lag];
            }
            deriv[m][t] = d;
        }

        out.s += r * r;
        for (std::size_t a = 0; a < k; ++a) {
            out.jte(static_cast<Eigen::Index>(a)) += deriv[a][t] * r;
            for (std::size_t b = a; b < k; ++b)
                out.jtj(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    deriv[a][t] * deriv[b][t];
        }
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < a; ++b)
            out.jtj(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                out.jtj(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a));
    return out;
}

} // namespace

ARMAModel fit_arma(std::span<const double> series, int p, int q) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit_arma: negative order");
    const std::size_t n = series.size();
    const std::size_t min_len = 10 * static_cast<std::size_t>(p + q + 1);
    if (n < min_len)
        throw std::invalid_argument("fit_arma: series length " + std::to_string(n) +
                                    " below required " + std::to_string(min_len));

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    if (var <= 1e-12 * (1.0 + mean * mean))
        throw std::invalid_argument("fit_arma: degenerate variance");

    ARMAModel model;
    model.order = {p, 0, q};

    if (p == 0 && q == 0) {
        // Pure differencing model: no parameters, no drift.
        double s = 0.0;
        for (double v : series) s += v * v;
        model.intercept = 0.0;
        model.sigma2 = s / static_cast<double>(n);
        model.diag = {0, true, s, true};
        return model;
    }

    const HrInit init = hannan_rissanen(series, p, q);
    const std::size_t k = 1 + static_cast<std::size_t>(p) + static_cast<std::size_t>(q);
    Eigen::VectorXd psi(static_cast<Eigen::Index>(k));
    psi(0) = init.c;
    for (int i = 0; i < p; ++i) psi(1 + i) = init.phi[static_cast<std::size_t>(i)];
    for (int j = 0; j < q; ++j) psi(1 + p + j) = init.theta[static_cast<std::size_t>(j)];

    // Levenberg-Marquardt on the CSS objective.
    double mu = 1e-3;
    CssQuadratics cur = css_quadratics(series, psi, p, q);
    if (!std::isfinite(cur.s)) {
        psi.setZero();
        psi(0) = mean;
        cur = css_quadratics(series, psi, p, q);
    }
    const int max_iter = 200;
    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        Eigen::MatrixXd a = cur.jtj;
        for (std::size_t i = 0; i < k; ++i) {
            const Eigen::Index ii = static_cast<Eigen::Index>(i);
            a(ii, ii) += mu * std::max(cur.jtj(ii, ii), 1e-12);
        }
        const Eigen::VectorXd step = a.ldlt().solve(-cur.jte);
        if (!step.allFinite()) {
            mu *= 10.0;
            continue;
        }
        const Eigen::VectorXd cand = psi + step;
        const CssQuadratics next = css_quadratics(series, cand, p, q);
        if (next.s < cur.s) {
            const double rel = (cur.s - next.s) / std::max(cur.s, 1e-300);
            psi = cand;
            cur = next;
            mu = std::max(mu / 3.0, 1e-12);
            if (rel < 1e-12) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            mu *= 4.0;
            if (mu > 1e12) {
                converged = true; // objective cannot be improved further
                ++iter;
                break;
            }
        }
    }

    model.intercept = psi(0);
    model.phi.resize(static_cast<std::size_t>(p));
    model.theta.resize(static_cast<std::size_t>(q));
    for (int i = 0; i < p; ++i) model.phi[static_cast<std::size_t>(i)] = psi(1 + i);
    for (int j = 0; j < q; ++j) model.theta[static_cast<std::size_t>(j)] = psi(1 + p + j);
    const std::size_t resid_count = n - static_cast<std::size_t>(p);
    model.sigma2 = cur.s / static_cast<double>(resid_count);
    model.diag.iterations = iter;
    model.diag.converged = converged;
    model.diag.final_css = cur.s;
    model.diag.ar_stationary = ar_stationary(model.phi);
    return model;
}

ARMAModel fit_arima(std::span<const double> series, int p, int d, int q) {
    if (d < 0) throw std::invalid_argument("fit_arima: d must be >= 0");
    if (d == 0) return fit_arma(series, p, q);
    const std::vector<double> w = difference(series, d);
    ARMAModel model = fit_arma(w, p, q);
    model.order.d = d;
    return model;
}

namespace {

std::vector<double> binomial_row(int d) {
    std::vector<double> row(static_cast<std::size_t>(d) + 1, 1.0);
    for (int k = 1; k <= d; ++k)
        row[static_cast<std::size_t>(k)] =
            row[static_cast<std::size_t>(k) - 1] * static_cast<double>(d - k + 1) / static_cast<double>(k);
    return row;
}

} // namespace

std::vector<double> forecast(const ARMAModel& model, std::span<const double> history, int horizon) {
    if (horizon < 0) throw std::invalid_argument("forecast: horizon must be >= 0");
    const int p = model.order.p, d = model.order.d, q = model.order.q;
    if (history.size() < static_cast<std::size_t>(std::max(p, q) + d))
        throw std::invalid_argument("forecast: history shorter than max(p,q)+d");

    const std::vector<double> w = d > 0 ? difference(history, d)
                                        : std::vector<double>(history.begin(), history.end());
    std::vector<double> e;
    css_residuals(w, model.phi, model.theta, model.intercept, e);

    const std::size_t nw = w.size();
    std::vector<double> wf;
    wf.reserve(static_cast<std::size_t>(horizon));
    for (int h = 1; h <= horizon; ++h) {
        double val = model.intercept;
        for (int i = 0; i < p; ++i) {
            const std::int64_t idx = static_cast<std::int64_t>(nw) + h - 1 - (i + 1);
            val += model.phi[static_cast<std::size_t>(i)] *
                   (idx >= static_cast<std::int64_t>(nw)
                        ? wf[static_cast<std::size_t>(idx - static_cast<std::int64_t>(nw))]
                        : w[static_cast<std::size_t>(idx)]);
        }
        for (int j = 0; j < q; ++j) {
            const std::int64_t idx = static_cast<std::int64_t>(nw) + h - 1 - (j + 1);
            if (idx < static_cast<std::int64_t>(nw) && idx >= 0)
                val += model.theta[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(idx)];
        }
        wf.push_back(val);
    }

    if (d == 0) return wf;
    std::vector<double> anchors(history.end() - d, history.end());
    return integrate(wf, anchors);
}

std::vector<double> rolling_one_step(const ARMAModel& model, std::span<const double> train,
                                     std::span<const double> test) {
    const int p = model.order.p, d = model.order.d;
    if (train.size() < static_cast<std::size_t>(p + d + 1))
        throw std::invalid_argument("rolling_one_step: train shorter than p+d+1");

    std::vector<double> levels(train.begin(), train.end());
    levels.insert(levels.end(), test.begin(), test.end());
    const std::vector<double> w =
        d > 0 ? difference(levels, d) : levels;

    // Causal residuals over the whole span with frozen parameters; the
    // one-step prediction of w_t is w_t - e_t.
    std::vector<double> e;
    css_residuals(w, model.phi, model.theta, model.intercept, e);

    const std::vector<double> binom = binomial_row(d);
    std::vector<double> out;
    out.reserve(test.size());
    for (std::size_t g = train.size(); g < levels.size(); ++g) {
        const std::size_t tw = g - static_cast<std::size_t>(d);
        double w_hat = w[tw] - e[tw];
        // Invert differencing against true earlier levels.
        double y_hat = w_hat;
        double sign = 1.0;
        for (int kk = 1; kk <= d; ++kk) {
            y_hat += sign * binom[static_cast<std::size_t>(kk)] * levels[g - static_cast<std::size_t>(kk)];
            sign = -sign;
        }
        out.push_back(y_hat);
    }
    return out;
}

std::vector<double> rolling_one_step(const ARMAModel& model, const UniformSeries& train,
                                     const UniformSeries& test) {
    if (train.interval() != test.interval())
        throw std::invalid_argument("rolling_one_step: train/test cadence mismatch");
    if (test.start() != train.start() + static_cast<Timestamp>(train.size()) * train.interval())
        throw std::invalid_argument("rolling_one_step: gap between train and test");
    return rolling_one_step(model, train.dense_values(), test.dense_values());
}

InSamplePredictions in_sample_predictions(const ARMAModel& model, std::span<const double> series) {
    const int p = model.order.p, d = model.order.d;
    const std::vector<double> w = d > 0 ? difference(series, d)
                                        : std::vector<double>(series.begin(), series.end());
    std::vector<double> e;
    css_residuals(w, model.phi, model.theta, model.intercept, e);
    const std::vector<double> binom = binomial_row(d);

    InSamplePredictions out;
    out.offset = static_cast<std::size_t>(p + d);
    for (std::size_t g = out.offset; g < series.size(); ++g) {
        const std::size_t tw = g - static_cast<std::size_t>(d);
        double y_hat = w[tw] - e[tw];
        double sign = 1.0;
        for (int kk = 1; kk <= d; ++kk) {
            y_hat += sign * binom[static_cast<std::size_t>(kk)] * series[g - static_cast<std::size_t>(kk)];
            sign = -sign;
        }
        out.values.push_back(y_hat);
    }
    return out;
}

std::string arma_to_json(const ARMAModel& m) {
    nlohmann::json j;
    j["format"] = "windramp-model";
    j["version"] = 1;
    j["type"] = m.order.d > 0 ? "arima" : "arma";
    j["order"] = {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}};
    j["phi"] = m.phi;
    j["theta"] = m.theta;
    j["intercept"] = m.intercept;
    j["sigma2"] = m.sigma2;
    j["diagnostics"] = {{"iterations", m.diag.iterations},
                        {"converged", m.diag.converged},
                        {"final_css", m.diag.final_css},
                        {"ar_stationary", m.diag.ar_stationary}};
    return j.dump(2);
}

ARMAModel arma_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("format").get<std::string>() != "windramp-model")
        throw std::invalid_argument("not a windramp model file");
    ARMAModel m;
    m.order.p = j.at("order").at("p").get<int>();
    m.order.d = j.at("order").at("d").get<int>();
    m.order.q = j.at("order").at("q").get<int>();
    m.phi = j.at("phi").get<std::vector<double>>();
    m.theta = j.at("theta").get<std::vector<double>>();
    m.intercept = j.at("intercept").get<double>();
    m.sigma2 = j.at("sigma2").get<double>();
    const auto& dg = j.at("diagnostics");
    m.diag.iterations = dg.at("iterations").get<int>();
    m.diag.converged = dg.at("converged").get<bool>();
    m.diag.final_css = dg.at("final_css").get<double>();
    m.diag.ar_stationary = dg.at("ar_stationary").get<bool>();
    return m;
}

} // namespace windramp
