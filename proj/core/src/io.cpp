#include "msbm/io.hpp"

#include "msbm/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msbm {

namespace {

template <typename T>
T get(const json& doc, const char* key)
{
    if (!doc.contains(key)) throw InputError(std::string("JSON document is missing '") + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("JSON field '") + key + "': " + e.what());
    }
}

json one_based(const Assignment& z)
{
    json out = json::array();
    for (int label : z) out.push_back(label + 1);
    return out;
}

json tau_to_json(const VariationalPosterior& tau)
{
    json rows = json::array();
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const auto r = tau.row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

} // namespace

json to_json(const BlockParameters& theta)
{
    json pi = json::array();
    for (int q = 0; q < theta.Q; ++q) {
        json row = json::array();
        for (int l = 0; l < theta.Q; ++l) {
            const auto c = theta.cell(q, l);
            row.push_back(std::vector<double>(c.begin(), c.end()));
        }
        pi.push_back(std::move(row));
    }
    return json{{"Q", theta.Q}, {"K", theta.K}, {"alpha", theta.alpha}, {"pi", std::move(pi)}};
}

BlockParameters block_parameters_from_json(const json& doc)
{
    const int Q = get<int>(doc, "Q");
    const int K = get<int>(doc, "K");
    BlockParameters theta(Q, K);
    theta.alpha = get<std::vector<double>>(doc, "alpha");
    const auto pi = get<std::vector<std::vector<std::vector<double>>>>(doc, "pi");
    if (pi.size() != static_cast<std::size_t>(Q)) throw InputError("pi must have Q rows");
    for (int q = 0; q < Q; ++q) {
        if (pi[q].size() != static_cast<std::size_t>(Q)) throw InputError("pi must have Q columns");
        for (int l = 0; l < Q; ++l) {
            if (pi[q][l].size() != theta.num_words()) throw InputError("every pi cell must have 2^K entries");
            std::copy(pi[q][l].begin(), pi[q][l].end(), theta.cell(q, l).begin());
        }
    }
    theta.validate();
    return theta;
}

json to_json(const ErParameters& er)
{
    return json{{"K", er.K}, {"pi", er.pi}};
}

ErParameters er_parameters_from_json(const json& doc)
{
    ErParameters er{get<int>(doc, "K"), get<std::vector<double>>(doc, "pi")};
    if (er.pi.size() != (std::size_t{1} << er.K)) throw InputError("ER pi must have 2^K entries");
    return er;
}

json to_json(const CovariateModel& model)
{
    json beta = json::array();
    for (std::size_t v = 0; v < model.num_free_words(); ++v) {
        std::vector<double> row(model.d);
        for (std::size_t k = 0; k < model.d; ++k) row[k] = model.coef(v, k);
        beta.push_back(std::move(row));
    }
    return json{{"K", model.K}, {"d", model.d}, {"mu", model.mu}, {"beta", std::move(beta)}};
}

CovariateModel covariate_model_from_json(const json& doc)
{
    CovariateModel m(get<int>(doc, "K"), get<std::size_t>(doc, "d"));
    m.mu = get<std::vector<double>>(doc, "mu");
    if (m.mu.size() != m.num_free_words()) throw InputError("mu must have 2^K - 1 entries");
    const auto beta = get<std::vector<std::vector<double>>>(doc, "beta");
    if (beta.size() != m.num_free_words()) throw InputError("beta must have 2^K - 1 rows");
    for (std::size_t v = 0; v < beta.size(); ++v) {
        if (beta[v].size() != m.d) throw InputError("beta rows must have d entries");
        for (std::size_t k = 0; k < m.d; ++k) m.coef(v, k) = beta[v][k];
    }
    return m;
}

json to_json(const CovariateBlockParameters& theta)
{
    json cells = json::array();
    for (int q = 0; q < theta.Q; ++q) {
        json row = json::array();
        for (int l = 0; l < theta.Q; ++l) row.push_back(to_json(theta.cell(q, l)));
        cells.push_back(std::move(row));
    }
    return json{{"Q", theta.Q}, {"K", theta.K}, {"d", theta.d}, {"alpha", theta.alpha}, {"cells", std::move(cells)}};
}

CovariateBlockParameters covariate_block_parameters_from_json(const json& doc)
{
    CovariateBlockParameters theta(get<int>(doc, "Q"), get<int>(doc, "K"), get<std::size_t>(doc, "d"));
    theta.alpha = get<std::vector<double>>(doc, "alpha");
    if (theta.alpha.size() != static_cast<std::size_t>(theta.Q)) throw InputError("alpha must have length Q");
    const auto& cells = doc.at("cells");
    for (int q = 0; q < theta.Q; ++q)
        for (int l = 0; l < theta.Q; ++l) theta.cell(q, l) = covariate_model_from_json(cells.at(q).at(l));
    return theta;
}

json to_json(const GlmFit& fit)
{
    json doc = to_json(fit.model);
    json se = json::array();
    for (double s : fit.std_errors) se.push_back(std::isfinite(s) ? json(s) : json(nullptr));
    doc["std_errors"] = std::move(se);
    doc["log_likelihood"] = fit.log_likelihood;
    doc["gradient_norm"] = fit.gradient_norm;
    doc["iterations"] = fit.iterations;
    doc["converged"] = fit.converged;
    doc["separation_warning"] = fit.separation_warning;
    return doc;
}

json fit_result_to_json(const FitResult& fit, std::size_t n, double icl_value)
{
    const auto theta = to_json(fit.theta);
    return json{{"Q", fit.Q},
                {"K", fit.theta.K},
                {"n", n},
                {"alpha", theta["alpha"]},
                {"pi", theta["pi"]},
                {"tau", tau_to_json(fit.tau)},
                {"map_assignment", one_based(fit.map)},
                {"elbo_trace", fit.elbo_trace},
                {"icl", icl_value},
                {"converged", fit.converged},
                {"flags", fit.flags},
                {"seed", fit.seed}};
}

FitResult fit_result_from_json(const json& doc)
{
    FitResult fit;
    fit.Q = get<int>(doc, "Q");
    fit.theta = block_parameters_from_json(json{{"Q", fit.Q}, {"K", get<int>(doc, "K")}, {"alpha", doc.at("alpha")}, {"pi", doc.at("pi")}});
    const auto n = get<std::size_t>(doc, "n");
    const auto tau = get<std::vector<std::vector<double>>>(doc, "tau");
    if (tau.size() != n) throw InputError("tau must have n rows");
    std::vector<double> flat;
    for (const auto& row : tau) {
        if (row.size() != static_cast<std::size_t>(fit.Q)) throw InputError("tau rows must have Q entries");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    fit.tau = VariationalPosterior(n, fit.Q, std::move(flat));
    fit.map = labels_from_json(doc.at("map_assignment"));
    if (fit.map.size() != n) throw InputError("map_assignment must have n entries");
    for (int z : fit.map)
        if (z < 0 || z >= fit.Q) throw InputError("map_assignment label out of range");
    fit.elbo_trace = get<std::vector<double>>(doc, "elbo_trace");
    fit.converged = get<bool>(doc, "converged");
    fit.flags = get<std::vector<std::string>>(doc, "flags");
    fit.seed = get<std::uint64_t>(doc, "seed");
    return fit;
}

json covariate_fit_to_json(const CovariateFitResult& fit, std::size_t n, double icl_value)
{
    return json{{"Q", fit.Q},
                {"K", fit.theta.K},
                {"n", n},
                {"d", fit.theta.d},
                {"alpha", fit.theta.alpha},
                {"theta", to_json(fit.theta)},
                {"tau", tau_to_json(fit.tau)},
                {"map_assignment", one_based(fit.map)},
                {"elbo_trace", fit.elbo_trace},
                {"icl", icl_value},
                {"converged", fit.converged},
                {"flags", fit.flags},
                {"seed", fit.seed}};
}

json to_json(const IclReport& report)
{
    json records = json::array();
    for (const auto& r : report.records) {
        json rec{{"Q", r.Q}, {"ok", r.ok}};
        if (r.ok) {
            rec["best_elbo"] = r.best_elbo;
            rec["completed_loglik"] = r.completed_loglik;
            rec["penalty"] = r.penalty;
            rec["icl"] = r.icl;
            rec["converged"] = r.converged;
            rec["flags"] = r.flags;
        } else {
            rec["error"] = r.error;
        }
        records.push_back(std::move(rec));
    }
    return json{{"selected_q", report.selected_q}, {"records", std::move(records)}, {"warnings", report.warnings}};
}

json truth_to_json(const BlockParameters& theta, const Assignment& z, std::uint64_t seed)
{
    return json{{"n", z.size()}, {"seed", seed}, {"theta", to_json(theta)}, {"z", one_based(z)}};
}

Assignment labels_from_json(const json& array)
{
    Assignment z;
    for (const auto& v : array) {
        const int label = v.get<int>();
        if (label < 1) throw InputError("labels are 1-based");
        z.push_back(label - 1);
    }
    return z;
}

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << content;
        if (!out) throw InputError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string edge_list_tsv(const MultiplexGraph& g, int layer, int base)
{
    std::ostringstream out;
    out << "# n=" << g.size() << " base=" << base << '\n';
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j)
            if (i != j && g.has_edge(i, j, layer)) out << i + base << '\t' << j + base << '\n';
    return out.str();
}

std::string covariates_tsv(const EdgeCovariates& cov, int base)
{
    std::ostringstream out;
    out << "src\tdst";
    for (std::size_t k = 0; k < cov.dim(); ++k) out << "\ty" << k + 1;
    out << '\n';
    for (std::size_t i = 0; i < cov.size(); ++i)
        for (std::size_t j = 0; j < cov.size(); ++j) {
            if (i == j) continue;
            out << i + base << '\t' << j + base;
            for (double y : cov.at(i, j)) out << '\t' << format_number(y);
            out << '\n';
        }
    return out.str();
}

std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace msbm
