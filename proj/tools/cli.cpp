#include "cli.hpp"

#include "summarize.hpp"

#include <msbm/error.hpp>
#include <msbm/io.hpp>
#include <msbm/lab.hpp>
#include <msbm/metrics.hpp>
#include <msbm/oracle.hpp>
#include <msbm/selection.hpp>
#include <msbm/simulate.hpp>
#include <msbm/vem.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace msbm::cli {

namespace fs = std::filesystem;

namespace {

struct FitOptions
{
    int restarts = 10;
    std::uint64_t seed = 0;
    std::string init = "spectral+random";
    double damping = 0.0;
    int max_outer = 500;
    int threads = 1;

    void add_to(CLI::App& cmd)
    {
        cmd.add_option("--restarts", restarts, "Number of initialisations")->check(CLI::PositiveNumber)->capture_default_str();
        cmd.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
        cmd.add_option("--init", init, "spectral+random | spectral | random")->capture_default_str();
        cmd.add_option("--damping", damping, "Fixed-point damping in [0, 1)")->capture_default_str();
        cmd.add_option("--max-outer", max_outer, "Maximum EM iterations")->check(CLI::PositiveNumber)->capture_default_str();
        cmd.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    }

    FitConfig config() const
    {
        FitConfig c;
        c.restarts = restarts;
        c.seed = seed;
        c.init = parse_init_strategy(init);
        c.damping = damping;
        c.max_outer = max_outer;
        c.threads = threads;
        c.validate();
        return c;
    }
};

std::string dump(const json& doc)
{
    return doc.dump(2) + "\n";
}

void emit(const std::string& content, const std::string& path, std::ostream& out)
{
    if (path.empty())
        out << content;
    else
        write_file_atomic(path, content);
}

MultiplexGraph load_graph(const std::vector<std::string>& files, std::ostream& err)
{
    std::vector<fs::path> paths(files.begin(), files.end());
    auto loaded = load_layers(paths);
    if (loaded.report.self_loops_dropped > 0)
        err << "warning: dropped " << loaded.report.self_loops_dropped << " self-loop(s)\n";
    if (loaded.report.duplicate_edges > 0)
        err << "warning: ignored " << loaded.report.duplicate_edges << " duplicate edge(s)\n";
    return std::move(loaded.graph);
}

void warn_small_n(std::size_t n, int Q, std::ostream& err)
{
    if (n < 2 * static_cast<std::size_t>(Q))
        err << "warning: n = " << n << " < 2Q = " << 2 * Q << "; identifiability is only guaranteed for n >= 2Q\n";
}

// simulate -------------------------------------------------------------------

struct SimulateArgs
{
    std::size_t n = 0;
    int K = 2;
    int Q = 2;
    std::uint64_t seed = 0;
    std::string out;
    std::string theta;
};

int simulate(const SimulateArgs& a, std::ostream& out)
{
    if (a.n < 2) throw InputError("--n must be at least 2");
    const auto theta = a.theta.empty() ? random_block_parameters(a.Q, a.K, a.seed)
                                       : block_parameters_from_json(read_json(a.theta));
    const auto sample = sample_sbm(theta, a.n, a.seed);
    fs::create_directories(a.out);
    for (int k = 1; k <= theta.K; ++k)
        write_file_atomic(fs::path(a.out) / ("layer" + std::to_string(k) + ".tsv"), edge_list_tsv(sample.graph, k));
    write_file_atomic(fs::path(a.out) / "truth.json", dump(truth_to_json(theta, sample.truth, a.seed)));
    out << "wrote " << theta.K << " layer(s) and truth.json to " << a.out << "\n";
    return kExitOk;
}

// fit ------------------------------------------------------------------------

struct FitArgs
{
    std::vector<std::string> layers;
    int q = 0;
    std::string covariates;
    std::string out;
    std::string score;
    FitOptions options;
};

int fit_command(const FitArgs& a, std::ostream& out, std::ostream& err)
{
    const auto g = load_graph(a.layers, err);
    const auto config = a.options.config();
    warn_small_n(g.size(), a.q, err);

    json doc;
    bool converged = false;
    Assignment map;
    if (a.covariates.empty()) {
        const auto result = fit(g, a.q, config);
        doc = fit_result_to_json(result, g.size(), icl(g, result));
        converged = result.converged;
        map = result.map;
    } else {
        const auto cov = load_covariates(a.covariates, g.size());
        const auto result = fit_covariates(g, cov, a.q, config);
        doc = covariate_fit_to_json(result, g.size(), icl_covariates(g, cov, result));
        converged = result.converged;
        map = result.map;
    }

    if (!a.score.empty()) {
        const auto truth = read_json(a.score);
        const auto z = labels_from_json(truth.at("z"));
        if (z.size() != g.size()) throw InputError("truth labels do not match the number of nodes");
        const double ari = adjusted_rand_index(map, z);
        doc["score"] = json{{"ari", ari}};
        out << "ARI " << format_number(ari) << "\n";
    }
    emit(dump(doc), a.out, out);
    if (!converged) {
        err << "warning: fit did not converge; see flags\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

// select ---------------------------------------------------------------------

struct SelectArgs
{
    std::vector<std::string> layers;
    int qmin = 1;
    int qmax = 0;
    std::string out;
    std::string csv;
    FitOptions options;
};

int select_command(const SelectArgs& a, std::ostream& out, std::ostream& err)
{
    const auto g = load_graph(a.layers, err);
    if (a.qmin < 1 || a.qmin > a.qmax) throw InputError("need 1 <= qmin <= qmax");
    if (static_cast<std::size_t>(a.qmax) > g.size()) throw InputError("qmax exceeds the number of nodes");
    std::vector<int> candidates;
    for (int q = a.qmin; q <= a.qmax; ++q) candidates.push_back(q);

    const auto report = select_q(g, candidates, a.options.config());
    for (const auto& w : report.warnings) err << "warning: " << w << "\n";
    for (const auto& r : report.records)
        if (!r.ok) err << "warning: Q = " << r.Q << " failed: " << r.error << "\n";
    if (report.selected_q == 0) throw Error("every candidate Q failed");

    if (!a.out.empty()) write_file_atomic(a.out, dump(to_json(report)));
    if (!a.csv.empty()) {
        std::ostringstream csv;
        csv << "Q,ICL\n";
        for (const auto& r : report.records)
            if (r.ok) csv << r.Q << ',' << format_number(r.icl) << '\n';
        write_file_atomic(a.csv, csv.str());
    }
    out << report.selected_q << "\n";
    for (const auto& r : report.records)
        if (r.ok && r.Q == report.selected_q && !r.converged) return kExitNotConverged;
    return kExitOk;
}

// er-fit ---------------------------------------------------------------------

struct ErFitArgs
{
    std::vector<std::string> layers;
    std::string covariates;
    std::string out;
    int max_iterations = 100;
};

int er_fit_command(const ErFitArgs& a, std::ostream& out, std::ostream& err)
{
    const auto g = load_graph(a.layers, err);
    if (a.covariates.empty()) {
        const auto er = fit_er(g);
        const auto counts = word_counts(g);
        double loglik = 0.0;
        for (std::size_t w = 0; w < counts.size(); ++w)
            if (counts[w] > 0) loglik += static_cast<double>(counts[w]) * clamped_log(er.pi[w]);
        json doc = to_json(er);
        doc["n"] = g.size();
        doc["counts"] = counts;
        doc["log_likelihood"] = loglik;
        emit(dump(doc), a.out, out);
        return kExitOk;
    }

    const auto cov = load_covariates(a.covariates, g.size());
    GlmConfig config;
    config.max_iterations = a.max_iterations;
    try {
        const auto result = fit_er_covariates(g, cov, config);
        if (result.separation_warning) err << "warning: parameters exceed the separation cap\n";
        json doc = to_json(result);
        doc["n"] = g.size();
        emit(dump(doc), a.out, out);
        return kExitOk;
    } catch (const GlmConvergenceError& e) {
        err << "warning: " << e.what() << "\n";
        json doc = to_json(e.last_iterate());
        doc["n"] = g.size();
        emit(dump(doc), a.out, out);
        return kExitNotConverged;
    }
}

// oracle ---------------------------------------------------------------------

struct OracleArgs
{
    std::vector<std::string> layers;
    std::string theta;
    std::string tau;
    bool posterior = false;
    std::string out;
};

int oracle_command(const OracleArgs& a, std::ostream& out, std::ostream& err)
{
    const auto g = load_graph(a.layers, err);
    const auto theta = block_parameters_from_json(read_json(a.theta));
    json doc{{"Q", theta.Q}, {"n", g.size()}, {"assignments", assignment_count(theta.Q, g.size())}};
    if (a.posterior) {
        const auto post = exact_posterior(g, theta);
        doc["log_likelihood"] = post.log_likelihood;
        json rows = json::array();
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(theta.Q));
            for (int q = 0; q < theta.Q; ++q) row[q] = post.marginal(i, q);
            rows.push_back(std::move(row));
        }
        doc["marginals"] = std::move(rows);
        json mode = json::array();
        for (int z : post.decode(post.mode())) mode.push_back(z + 1);
        doc["mode"] = std::move(mode);
    } else {
        doc["log_likelihood"] = exact_log_likelihood(g, theta);
    }
    if (!a.tau.empty()) {
        const auto tau = fit_result_from_json(read_json(a.tau)).tau;
        const auto check = kl_decomposition_check(g, tau, theta);
        doc["kl_check"] = json{{"elbo", check.elbo},
                               {"log_likelihood", check.log_likelihood},
                               {"kl", check.kl},
                               {"residual", check.residual}};
    }
    emit(dump(doc), a.out, out);
    return kExitOk;
}

// lab ------------------------------------------------------------------------

struct LabArgs
{
    std::string config;
    std::string out;
    std::string summary;
};

LabConfig lab_config_from_json(const json& doc, const fs::path& base)
{
    LabConfig c;
    if (doc.contains("truth"))
        c.truth = block_parameters_from_json(doc.at("truth"));
    else if (doc.contains("truth_file"))
        c.truth = block_parameters_from_json(read_json(base / doc.at("truth_file").get<std::string>()));
    else
        throw InputError("lab config needs 'truth' or 'truth_file'");
    c.n_grid = doc.at("n_grid").get<std::vector<std::size_t>>();
    if (c.n_grid.empty()) throw InputError("n_grid is empty");
    c.replications = doc.value("replications", c.replications);
    c.seed = doc.value("seed", c.seed);
    c.zeta = doc.value("zeta", c.zeta);
    c.gamma = doc.value("gamma", c.gamma);
    c.identifiability_tol = doc.value("identifiability_tol", c.identifiability_tol);
    c.fit.restarts = doc.value("restarts", c.fit.restarts);
    c.fit.threads = doc.value("threads", c.fit.threads);
    c.fit.max_outer = doc.value("max_outer", c.fit.max_outer);
    c.fit.damping = doc.value("damping", c.fit.damping);
    if (doc.contains("init")) c.fit.init = parse_init_strategy(doc.at("init").get<std::string>());
    c.fit.validate();
    if (c.replications < 1) throw InputError("replications must be positive");
    return c;
}

int lab_command(const LabArgs& a, std::ostream& out, std::ostream& err)
{
    const auto config = lab_config_from_json(read_json(a.config), fs::path(a.config).parent_path());
    const auto table = error_vs_n(config);
    if (!table.preconditions.ok) {
        err << "error: preconditions violated\n";
        for (const auto& v : table.preconditions.violations) err << "  " << v << "\n";
        return kExitInput;
    }
    std::ostringstream csv;
    csv << "n,replication,err_pi,err_alpha\n";
    for (const auto& r : table.rows) {
        csv << r.n << ',' << r.replication + 1 << ',';
        if (r.ok)
            csv << format_number(r.err_pi) << ',' << format_number(r.err_alpha) << '\n';
        else
            csv << "NA,NA\n";
    }
    for (const auto& r : table.rows)
        if (!r.ok) err << "warning: n = " << r.n << " replication " << r.replication + 1 << " failed: " << r.error << "\n";
    emit(csv.str(), a.out, out);

    std::ostringstream summary;
    summary << "n,median_err_pi,median_err_alpha,failures\n";
    for (const auto& s : table.summary)
        summary << s.n << ',' << format_number(s.median_err_pi) << ',' << format_number(s.median_err_alpha) << ','
                << s.failures << '\n';
    if (!a.summary.empty()) write_file_atomic(a.summary, summary.str());
    return kExitOk;
}

// summarize ------------------------------------------------------------------

struct SummarizeArgs
{
    std::string fit;
    std::string attributes;
    std::vector<std::string> categorical;
    std::vector<std::string> layers;
    std::string out;
};

int summarize_command(const SummarizeArgs& a, std::ostream& out, std::ostream& err)
{
    const auto doc = read_json(a.fit);
    const auto map = labels_from_json(doc.at("map_assignment"));

    std::optional<AttributeTable> attributes;
    if (!a.attributes.empty()) {
        std::ifstream in(a.attributes);
        if (!in) throw InputError("cannot open " + a.attributes);
        attributes = parse_attributes(in, map.size());
        if (!attributes->unknown_ids.empty()) {
            err << "warning: unknown node ids excluded:";
            for (const auto& id : attributes->unknown_ids) err << ' ' << id;
            err << "\n";
        }
    }
    std::optional<MultiplexGraph> graph;
    if (!a.layers.empty()) graph = load_graph(a.layers, err);

    const std::set<std::string> categorical(a.categorical.begin(), a.categorical.end());
    const auto files = summarize(map, attributes ? &*attributes : nullptr, categorical, graph ? &*graph : nullptr);
    fs::create_directories(a.out);
    for (const auto& [name, content] : files) {
        write_file_atomic(fs::path(a.out) / name, content);
        out << name << "\n";
    }
    return kExitOk;
}

void add_config(CLI::App& cmd)
{
    cmd.add_option("--config", "Flat key = value file mirroring the flags; command-line flags take precedence");
}

bool truthy(const std::string& v)
{
    return v == "true" || v == "1" || v == "on" || v == "yes";
}

// Splices the entries of a subcommand's --config file into the argument list,
// skipping keys that were also given as flags.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args)
{
    if (args.empty()) return args;
    auto* sub = app.get_subcommand_no_throw(args.front());
    if (sub == nullptr || sub->get_option_no_throw("--config") == nullptr) return args;

    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    const auto items = CLI::ConfigTOML().from_config(in);
    const std::vector<std::string> given(args.begin(), args.end());
    for (const auto& item : items) {
        if (!item.parents.empty() || item.name == "++" || item.name == "--")
            throw InputError("config file must be a flat key = value document");
        const auto flag = "--" + item.name;
        auto* opt = sub->get_option_no_throw(flag);
        if (opt == nullptr || item.name == "config") throw InputError("unknown config key '" + item.name + "'");
        const bool on_command_line = std::any_of(given.begin(), given.end(), [&](const std::string& a) {
            return a == flag || a.starts_with(flag + "=");
        });
        if (on_command_line) continue;
        if (opt->get_type_size() == 0) {
            if (!item.inputs.empty() && truthy(item.inputs.front())) args.push_back(flag);
            continue;
        }
        args.push_back(flag);
        args.insert(args.end(), item.inputs.begin(), item.inputs.end());
    }
    return args;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stochastic block models for directed multiplex networks", "msbm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "msbm 0.1.0");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Sample a multiplex SBM and write layer edge lists plus truth.json");
    sim_cmd->add_option("--n", sim.n, "Number of nodes")->required();
    sim_cmd->add_option("--K", sim.K, "Number of layers")->check(CLI::Range(1, kMaxLayers))->capture_default_str();
    sim_cmd->add_option("--Q", sim.Q, "Number of blocks")->check(CLI::PositiveNumber)->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Seed")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Output directory")->required();
    sim_cmd->add_option("--theta", sim.theta, "Parameter JSON {Q, K, alpha, pi}; overrides --K and --Q")
        ->check(CLI::ExistingFile);
    add_config(*sim_cmd);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a multiplex SBM with Q blocks");
    fit_cmd->add_option("--layers", fit_args.layers, "Layer files, layer 1 first")->required();
    fit_cmd->add_option("--q", fit_args.q, "Number of blocks")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--covariates", fit_args.covariates, "Pair covariates TSV (src dst y1 .. yd)");
    fit_cmd->add_option("--out", fit_args.out, "Output JSON (stdout when omitted)");
    fit_cmd->add_option("--score", fit_args.score, "truth.json to score the MAP assignment against (ARI)");
    fit_args.options.add_to(*fit_cmd);
    add_config(*fit_cmd);

    SelectArgs sel;
    auto* sel_cmd = app.add_subcommand("select", "Choose Q by ICL over [qmin, qmax]");
    sel_cmd->add_option("--layers", sel.layers, "Layer files, layer 1 first")->required();
    sel_cmd->add_option("--qmin", sel.qmin, "Smallest Q")->capture_default_str();
    sel_cmd->add_option("--qmax", sel.qmax, "Largest Q")->required();
    sel_cmd->add_option("--out", sel.out, "Report JSON");
    sel_cmd->add_option("--csv", sel.csv, "Two-column CSV (Q, ICL)");
    sel.options.add_to(*sel_cmd);
    add_config(*sel_cmd);

    ErFitArgs er;
    auto* er_cmd = app.add_subcommand("er-fit", "Fit the multiplex Erdos-Renyi model, optionally with covariates");
    er_cmd->add_option("--layers", er.layers, "Layer files, layer 1 first")->required();
    er_cmd->add_option("--covariates", er.covariates, "Pair covariates TSV");
    er_cmd->add_option("--max-iterations", er.max_iterations, "Newton iterations")->capture_default_str();
    er_cmd->add_option("--out", er.out, "Output JSON");
    add_config(*er_cmd);

    OracleArgs orc;
    auto* orc_cmd = app.add_subcommand("oracle", "Exact likelihood and posterior by enumeration (small instances)");
    orc_cmd->add_option("--layers", orc.layers, "Layer files, layer 1 first")->required();
    orc_cmd->add_option("--theta", orc.theta, "Parameter or fit JSON")->required();
    orc_cmd->add_option("--tau", orc.tau, "Fit JSON whose tau is checked against the KL decomposition");
    orc_cmd->add_flag("--posterior", orc.posterior, "Also report per-node posterior marginals and the mode");
    orc_cmd->add_option("--out", orc.out, "Output JSON");
    add_config(*orc_cmd);

    LabArgs lab;
    auto* lab_cmd = app.add_subcommand("lab", "Consistency experiments");
    lab_cmd->require_subcommand(1);
    auto* evn = lab_cmd->add_subcommand("error-vs-n", "Estimation error against n");
    evn->add_option("--config", lab.config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    evn->add_option("--out", lab.out, "CSV (n, replication, err_pi, err_alpha)");
    evn->add_option("--summary", lab.summary, "CSV of medians per n");

    SummarizeArgs sum;
    auto* sum_cmd = app.add_subcommand("summarize", "Block sizes, attribute cross-tabs and degree summaries");
    sum_cmd->add_option("--fit", sum.fit, "Fit JSON")->required();
    sum_cmd->add_option("--attributes", sum.attributes, "Node attribute TSV (node name ...)");
    sum_cmd->add_option("--categorical", sum.categorical, "Attribute columns to cross-tabulate");
    sum_cmd->add_option("--layers", sum.layers, "Layer files for degree summaries");
    sum_cmd->add_option("--out", sum.out, "Output directory")->required();
    add_config(*sum_cmd);

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(app, args);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        for (auto* sub : app.get_subcommands()) {
            auto* shown = sub;
            for (auto* nested : sub->get_subcommands()) shown = nested;
            err << shown->help();
        }
        if (app.get_subcommands().empty()) err << app.help();
        return kExitInput;
    }

    try {
        if (*sim_cmd) return simulate(sim, out);
        if (*fit_cmd) return fit_command(fit_args, out, err);
        if (*sel_cmd) return select_command(sel, out, err);
        if (*er_cmd) return er_fit_command(er, out, err);
        if (*orc_cmd) return oracle_command(orc, out, err);
        if (*evn) return lab_command(lab, out, err);
        if (*sum_cmd) return summarize_command(sum, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

} // namespace msbm::cli
