#include "msbm/er.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace msbm {

namespace {

struct Evaluation
{
    double loglik = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd information; // negative Hessian
};

// Parameter layout: for each free word v, the block [mu_v, beta_v1, ..., beta_vd].
Eigen::VectorXd pack(const CovariateModel& m)
{
    const auto V = m.num_free_words();
    const auto stride = 1 + m.d;
    Eigen::VectorXd theta(static_cast<Eigen::Index>(V * stride));
    for (std::size_t v = 0; v < V; ++v) {
        theta[static_cast<Eigen::Index>(v * stride)] = m.mu[v];
        for (std::size_t k = 0; k < m.d; ++k) theta[static_cast<Eigen::Index>(v * stride + 1 + k)] = m.coef(v, k);
    }
    return theta;
}

void unpack(const Eigen::VectorXd& theta, CovariateModel& m)
{
    const auto V = m.num_free_words();
    const auto stride = 1 + m.d;
    for (std::size_t v = 0; v < V; ++v) {
        m.mu[v] = theta[static_cast<Eigen::Index>(v * stride)];
        for (std::size_t k = 0; k < m.d; ++k) m.coef(v, k) = theta[static_cast<Eigen::Index>(v * stride + 1 + k)];
    }
}

std::size_t rows_of(const LogitData& data)
{
    return data.words.size();
}

double weight_of(const LogitData& data, std::size_t r)
{
    return data.weights.empty() ? 1.0 : data.weights[r];
}

// Fills log_p (length 2^K) for one observation row.
void row_log_probs(const CovariateModel& m, std::span<const double> y, std::vector<double>& log_p)
{
    const auto V = m.num_free_words();
    double shift = 0.0; // base category has predictor 0
    for (std::size_t v = 0; v < V; ++v) {
        double eta = m.mu[v];
        for (std::size_t k = 0; k < m.d; ++k) eta += m.coef(v, k) * y[k];
        log_p[v + 1] = eta;
        shift = std::max(shift, eta);
    }
    double denom = std::exp(-shift);
    for (std::size_t v = 0; v < V; ++v) denom += std::exp(log_p[v + 1] - shift);
    const double log_norm = shift + std::log(denom);
    log_p[0] = -log_norm;
    for (std::size_t v = 0; v < V; ++v) log_p[v + 1] -= log_norm;
}

Evaluation evaluate(const LogitData& data, const CovariateModel& m, bool derivatives)
{
    const auto V = m.num_free_words();
    const auto stride = 1 + m.d;
    const auto P = static_cast<Eigen::Index>(V * stride);
    Evaluation ev;
    if (derivatives) {
        ev.gradient = Eigen::VectorXd::Zero(P);
        ev.information = Eigen::MatrixXd::Zero(P, P);
    }
    std::vector<double> log_p(V + 1);
    Eigen::VectorXd x(static_cast<Eigen::Index>(stride));
    Eigen::VectorXd p(static_cast<Eigen::Index>(V));
    Eigen::MatrixXd xx(static_cast<Eigen::Index>(stride), static_cast<Eigen::Index>(stride));

    const auto n_rows = rows_of(data);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double w = weight_of(data, r);
        if (w == 0.0) continue;
        const std::span<const double> y = data.d == 0 ? std::span<const double>{} : data.covariates.subspan(r * data.d, data.d);
        row_log_probs(m, y, log_p);
        const auto word = data.words[r];
        ev.loglik += w * log_p[word];
        if (!derivatives) continue;

        x[0] = 1.0;
        for (std::size_t k = 0; k < data.d; ++k) x[static_cast<Eigen::Index>(1 + k)] = y[k];
        xx.noalias() = x * x.transpose();
        for (std::size_t v = 0; v < V; ++v) p[static_cast<Eigen::Index>(v)] = std::exp(log_p[v + 1]);

        for (std::size_t v = 0; v < V; ++v) {
            const auto vi = static_cast<Eigen::Index>(v);
            const double resid = (word == v + 1 ? 1.0 : 0.0) - p[vi];
            ev.gradient.segment(vi * static_cast<Eigen::Index>(stride), static_cast<Eigen::Index>(stride)) += (w * resid) * x;
            for (std::size_t u = 0; u < V; ++u) {
                const auto ui = static_cast<Eigen::Index>(u);
                const double c = w * ((u == v ? p[vi] : 0.0) - p[vi] * p[ui]);
                if (c == 0.0) continue;
                ev.information.block(vi * static_cast<Eigen::Index>(stride), ui * static_cast<Eigen::Index>(stride),
                                     static_cast<Eigen::Index>(stride), static_cast<Eigen::Index>(stride)) += c * xx;
            }
        }
    }
    return ev;
}

Eigen::VectorXd newton_direction(const Eigen::MatrixXd& info, const Eigen::VectorXd& grad)
{
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() && (ldlt.vectorD().array() > 0).all()) {
        Eigen::VectorXd step = ldlt.solve(grad);
        if (step.allFinite()) return step;
    }
    // Singular information (e.g. a word that never occurs): ridge it.
    const double scale = std::max(1.0, info.diagonal().cwiseAbs().maxCoeff());
    Eigen::MatrixXd ridged = info;
    ridged.diagonal().array() += 1e-8 * scale;
    return ridged.ldlt().solve(grad);
}

std::vector<double> standard_errors(const Eigen::MatrixXd& info)
{
    const auto P = info.rows();
    std::vector<double> se(static_cast<std::size_t>(P), std::numeric_limits<double>::quiet_NaN());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return se;
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(P, P));
    for (Eigen::Index k = 0; k < P; ++k) se[static_cast<std::size_t>(k)] = cov(k, k) > 0 ? std::sqrt(cov(k, k)) : std::numeric_limits<double>::quiet_NaN();
    return se;
}

CovariateModel intercept_start(const LogitData& data)
{
    CovariateModel m(data.K, data.d);
    std::vector<double> mass(m.num_free_words() + 1, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows_of(data); ++r) {
        const double w = weight_of(data, r);
        mass[data.words[r]] += w;
        total += w;
    }
    if (total <= 0.0) return m;
    const double base = std::max(mass[0] / total, 1e-12);
    for (std::size_t v = 0; v < m.num_free_words(); ++v)
        m.mu[v] = std::log(std::max(mass[v + 1] / total, 1e-12) / base);
    return m;
}

} // namespace

double multinomial_log_likelihood(const LogitData& data, const CovariateModel& model)
{
    return evaluate(data, model, false).loglik;
}

GlmFit fit_multinomial_logit(const LogitData& data, const GlmConfig& config, const std::optional<CovariateModel>& start)
{
    if (data.K < 1 || data.K > kMaxLayers) throw InputError("logit fit: K out of range");
    if (data.covariates.size() != data.words.size() * data.d) throw DimensionError("logit fit: covariate block has the wrong size");
    if (!data.weights.empty() && data.weights.size() != data.words.size()) throw DimensionError("logit fit: weight vector has the wrong size");
    const auto limit = std::size_t{1} << data.K;
    for (auto w : data.words)
        if (w >= limit) throw InputError("logit fit: word index out of range");

    GlmFit fit;
    fit.model = start ? *start : intercept_start(data);
    if (fit.model.K != data.K || fit.model.d != data.d) throw DimensionError("logit fit: starting model has the wrong shape");

    Eigen::VectorXd theta = pack(fit.model);
    Evaluation ev = evaluate(data, fit.model, true);
    fit.loglik_trace.push_back(ev.loglik);

    for (;;) {
        fit.gradient_norm = ev.gradient.size() ? ev.gradient.cwiseAbs().maxCoeff() : 0.0;
        if (fit.gradient_norm < config.gradient_tolerance) {
            fit.converged = true;
            break;
        }
        if (fit.iterations >= config.max_iterations) break;

        const Eigen::VectorXd direction = newton_direction(ev.information, ev.gradient);
        double t = 1.0;
        bool accepted = false;
        CovariateModel candidate = fit.model;
        for (int h = 0; h <= config.max_halvings; ++h, t *= 0.5) {
            unpack(theta + t * direction, candidate);
            const double ll = multinomial_log_likelihood(data, candidate);
            // near the optimum the gain drops below the rounding error of the sum
            if (std::isfinite(ll) && ll >= ev.loglik - 1e-13 * std::max(1.0, std::abs(ev.loglik))) {
                accepted = true;
                break;
            }
        }
        ++fit.iterations;
        if (!accepted) break;
        theta = pack(candidate);
        fit.model = candidate;
        ev = evaluate(data, fit.model, true);
        fit.loglik_trace.push_back(ev.loglik);
    }

    fit.log_likelihood = ev.loglik;
    fit.std_errors = standard_errors(ev.information);
    fit.separation_warning = theta.size() > 0 && theta.cwiseAbs().maxCoeff() > config.separation_cap;
    if (!fit.converged)
        throw GlmConvergenceError("Newton-Raphson stopped after " + std::to_string(fit.iterations)
                                      + " iterations with gradient norm " + std::to_string(fit.gradient_norm),
                                  fit);
    return fit;
}

} // namespace msbm
