// moran-infer command line front end. Builds JSON requests from flags (and an optional
// config file) and hands them to the C API.

#include <moraninfer/moraninfer.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LibraryError : std::runtime_error {
    LibraryError(mi_status s, const std::string& what) : std::runtime_error(what), status(s) {}
    mi_status status;
};

void check(mi_status status)
{
    if (status != MI_OK)
        throw LibraryError(status, std::string(mi_status_name(status)) + ": " + mi_last_error());
}

struct Buffer {
    mi_buffer* ptr = nullptr;
    ~Buffer() { mi_buffer_free(ptr); }
    std::string str() const { return std::string(mi_buffer_data(ptr), mi_buffer_size(ptr)); }
};

struct LogHandle {
    mi_event_log* ptr = nullptr;
    ~LogHandle() { mi_event_log_free(ptr); }
};

struct Globals {
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string output = "-";
    std::string format;
};

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot open output file '" + path + "'");
    out << text;
    if (!out)
        throw UsageError("failed writing '" + path + "'");
}

std::string read_file(const std::string& path)
{
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open input file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

mi_format resolve_format(const Globals& g, mi_format fallback)
{
    if (g.format.empty())
        return fallback;
    return g.format == "json" ? MI_FORMAT_JSON : MI_FORMAT_CSV;
}

std::vector<double> split_doubles(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("'" + item + "' is not a number");
        }
    }
    return out;
}

/// "lo:hi:step" or a comma list.
std::vector<double> parse_range(const std::string& text)
{
    if (text.find(':') == std::string::npos)
        return split_doubles(text);
    std::string spec = text;
    for (auto& c : spec)
        if (c == ':')
            c = ',';
    const auto v = split_doubles(spec);
    if (v.size() != 3 || !(v[2] > 0.0) || v[1] < v[0])
        throw UsageError("range '" + text + "' must be lo:hi:step with step > 0 and hi >= lo");
    std::vector<double> out;
    const auto n = static_cast<long long>((v[1] - v[0]) / v[2] + 1e-9);
    for (long long i = 0; i <= n; ++i)
        out.push_back(std::round((v[0] + static_cast<double>(i) * v[2]) * 1e12) / 1e12);
    return out;
}

std::vector<std::int64_t> parse_int_range(const std::string& text)
{
    std::vector<std::int64_t> out;
    for (double v : parse_range(text)) {
        if (v != std::floor(v))
            throw UsageError("'" + text + "' must contain integers");
        out.push_back(static_cast<std::int64_t>(v));
    }
    return out;
}

// ---- shared option groups -----------------------------------------------------------

struct ModelOptions {
    std::string process = "moran";
    std::string death_pool;
    std::int64_t K = 0;
    std::optional<double> s;
    std::string game;
    std::string graph;
    std::int64_t n = 0;
    std::int64_t k = 0;
    double p = 1.0;
    std::uint64_t graph_seed = 0;
    std::string rule = "bd";

    void add(CLI::App* app, const std::string& default_process)
    {
        process = default_process;
        app->add_option("--process", process, "Well-mixed process: moran, separated-bd, separated-db, variable-size")
            ->capture_default_str();
        app->add_option("--death-pool", death_pool, "Separated birth-death victim pool: exclude-offspring, enlarged");
        app->add_option("--K", K, "Variable-size half capacity (capacity is 2K)");
        app->add_option("--steepness", s, "Variable-size sigmoid steepness (default K/5)");
        app->add_option("--game", game, "Game matrix w_AA,w_AB,w_BA,w_BB");
        app->add_option("--graph", graph,
                        "Graph kind: complete, directed-cycle, cycle, star, k-regular, er-static, er-per-step");
        app->add_option("--vertices", n, "Graph vertex count");
        app->add_option("--degree", k, "k-regular degree");
        app->add_option("--edge-p", p, "Erdos-Renyi edge probability");
        app->add_option("--graph-seed", graph_seed, "Erdos-Renyi static graph seed");
        app->add_option("--rule", rule, "Graph update rule: bd, db")->capture_default_str();
    }

    Json json() const
    {
        Json j;
        if (!graph.empty()) {
            j["graph"] = graph;
            j["n"] = n;
            if (k)
                j["k"] = k;
            j["p"] = p;
            j["graph_seed"] = graph_seed;
            j["rule"] = rule;
            return j;
        }
        j["process"] = process;
        if (process == "variable-size") {
            j["K"] = K;
            if (s)
                j["s"] = *s;
        }
        if (!death_pool.empty())
            j["death_pool"] = death_pool;
        if (!game.empty())
            j["game"] = split_doubles(game);
        return j;
    }
};

struct InitOptions {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::string layout;
    std::int64_t layout_a = 0;
    std::uint64_t layout_seed = 0;

    void add(CLI::App* app, std::int64_t default_a, std::int64_t default_b)
    {
        a = default_a;
        b = default_b;
        app->add_option("--a", a, "Initial A count")->capture_default_str();
        app->add_option("--b", b, "Initial B count")->capture_default_str();
        app->add_option("--layout", layout,
                        "Graph layout: semicircle, alternating, random-balanced, counts-at-random, center-a, center-b");
        app->add_option("--layout-a", layout_a, "A count for counts-at-random and center layouts");
        app->add_option("--layout-seed", layout_seed, "Seed for random layouts");
    }

    Json json(const ModelOptions& model) const
    {
        Json j;
        if (!model.graph.empty()) {
            j["layout"] = layout.empty() ? "counts-at-random" : layout;
            j["a"] = layout.empty() && layout_a == 0 ? a : layout_a;
            j["seed"] = layout_seed;
            return j;
        }
        if (!layout.empty())
            throw UsageError("--layout needs a --graph model");
        j["a"] = a;
        j["b"] = b;
        return j;
    }
};

struct InferenceOptions {
    std::string prior = "gamma:2,2";
    std::size_t grid_points = 4001;
    double r_max = 20.0;
    double uniform_until = 2.0;
    double ci_mass = 0.95;
    double pseudocount = 0.0;

    void add(CLI::App* app)
    {
        app->add_option("--prior", prior, "gamma:K,THETA | uniform | fps-ones:N | fps:M,a,alpha,beta[,gamma];...")
            ->capture_default_str();
        app->add_option("--grid-points", grid_points, "Posterior grid points")->capture_default_str();
        app->add_option("--r-max", r_max, "Upper end R of the grid [0, R]")->capture_default_str();
        app->add_option("--uniform-until", uniform_until, "Grid is uniform up to here, log-spaced beyond")
            ->capture_default_str();
        app->add_option("--ci-mass", ci_mass, "Central credible interval mass")->capture_default_str();
        app->add_option("--pseudocount", pseudocount, "Pseudocount C added to both counting sums")
            ->capture_default_str();
    }

    Json json() const
    {
        Json j;
        j["prior"] = prior;
        j["grid"] = {{"points", grid_points}, {"r_max", r_max}, {"uniform_until", uniform_until}};
        j["ci_mass"] = ci_mass;
        j["pseudocount"] = pseudocount;
        return j;
    }
};

Json prior_and_grid(const InferenceOptions& inf)
{
    Json j = inf.json();
    j.erase("ci_mass");
    j.erase("pseudocount");
    return j;
}

int exit_code_for(mi_status status) { return status == MI_ERR_NUMERICAL ? kExitNumerical : kExitUsage; }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulate Moran-type selection and infer relative fitness from trajectories", "moran-infer"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(mi_version()));
    app.set_config("--config", "", "Key-value config file (TOML/INI); command-line flags override it");

    Globals g;
    app.add_option("--seed", g.seed, "Base random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware concurrency)")->capture_default_str();
    app.add_option("--output,-o", g.output, "Output path ('-' for stdout)")->capture_default_str();
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one trajectory and write its event log");
    ModelOptions sim_model;
    InitOptions sim_init;
    double sim_r = 1.0;
    std::uint64_t sim_max_steps = 0;
    sim_model.add(sim, "moran");
    sim_init.add(sim, 5, 5);
    sim->add_option("--r", sim_r, "True relative fitness of B")->capture_default_str();
    sim->add_option("--max-steps", sim_max_steps, "Step cap (0 = 50 N^2)")->capture_default_str();

    // infer
    auto* inf = app.add_subcommand("infer", "Infer r from an event log");
    std::string inf_input;
    std::size_t inf_sample = 0;
    std::string inf_posterior;
    InferenceOptions inf_opts;
    inf->add_option("input", inf_input, "Event log file ('-' for stdin)")->required();
    inf_opts.add(inf);
    inf->add_option("--sample-size", inf_sample, "Use a uniform sample of this many events (0 = all)");
    inf->add_option("--posterior", inf_posterior, "Also write the (r, density) posterior CSV here");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Estimator bias and spread over an (N, r) grid");
    ModelOptions sweep_model;
    InferenceOptions sweep_inf;
    std::string sweep_n = "3:30:3";
    std::string sweep_r = "0.1:2.0:0.1";
    std::string sweep_init = "balanced";
    std::int64_t sweep_init_a = 0;
    std::string sweep_layout;
    std::int64_t sweep_layout_a = 0;
    std::uint64_t sweep_layout_seed = 0;
    std::size_t sweep_traj = 200;
    std::size_t sweep_sample = 0;
    std::string sweep_estimators = "counting,inverse-counting,mean,median,mode";
    std::uint64_t sweep_max_steps = 0;
    sweep_model.add(sweep, "moran");
    sweep_inf.add(sweep);
    sweep->add_option("--n-values", sweep_n, "Population sizes: lo:hi:step or a comma list")->capture_default_str();
    sweep->add_option("--r-values", sweep_r, "True r values: lo:hi:step or a comma list")->capture_default_str();
    sweep->add_option("--init", sweep_init, "single-mutant, balanced, explicit, graph-layout")->capture_default_str();
    sweep->add_option("--init-a", sweep_init_a, "A count for the explicit rule");
    sweep->add_option("--layout", sweep_layout, "Layout for the graph-layout rule");
    sweep->add_option("--layout-a", sweep_layout_a, "A count for the layout");
    sweep->add_option("--layout-seed", sweep_layout_seed, "Seed for random layouts");
    sweep->add_option("--trajectories", sweep_traj, "Trajectories per cell")->capture_default_str();
    sweep->add_option("--sample-size", sweep_sample, "Events sampled per trajectory (0 = all)");
    sweep->add_option("--estimators", sweep_estimators, "Comma list of estimators")->capture_default_str();
    sweep->add_option("--max-steps", sweep_max_steps, "Step cap (0 = 50 N^2)");

    // histogram
    auto* hist = app.add_subcommand("histogram", "Distribution of per-trajectory estimates");
    ModelOptions hist_model;
    InitOptions hist_init;
    InferenceOptions hist_inf;
    double hist_r = 1.5;
    std::size_t hist_traj = 1000;
    std::size_t hist_sample = 0;
    double hist_bin = 0.1;
    std::string hist_est = "mean";
    std::uint64_t hist_max_steps = 0;
    hist_model.add(hist, "moran");
    hist_init.add(hist, 24, 16);
    hist_inf.add(hist);
    hist->add_option("--r", hist_r, "True r")->capture_default_str();
    hist->add_option("--trajectories", hist_traj, "Number of trajectories")->capture_default_str();
    hist->add_option("--sample-size", hist_sample, "Events sampled per trajectory (0 = all)");
    hist->add_option("--bin-width", hist_bin, "Histogram bin width")->capture_default_str();
    hist->add_option("--estimator", hist_est, "mean, median, mode")->capture_default_str();
    hist->add_option("--max-steps", hist_max_steps, "Step cap (0 = 50 N^2)");

    // graph-compare
    auto* gc = app.add_subcommand("graph-compare", "Fixation time and estimate spread across graph families");
    InferenceOptions gc_inf;
    std::int64_t gc_n = 20;
    std::string gc_r = "1.2,1.5,2";
    std::string gc_graphs;
    std::string gc_rule = "bd";
    std::size_t gc_traj = 200;
    std::string gc_est = "mean";
    std::uint64_t gc_max_steps = 0;
    gc_inf.add(gc);
    gc->add_option("--N", gc_n, "Vertices per graph")->capture_default_str();
    gc->add_option("--r-values", gc_r, "True r values")->capture_default_str();
    gc->add_option("--graphs", gc_graphs,
                   "Comma list: complete, cycle, directed-cycle, star, k-regular, er-per-step "
                   "(default: complete, cycle, star with either center type)");
    gc->add_option("--rule", gc_rule, "bd or db")->capture_default_str();
    gc->add_option("--trajectories", gc_traj, "Trajectories per graph and r")->capture_default_str();
    gc->add_option("--estimator", gc_est, "mean, median, mode")->capture_default_str();
    gc->add_option("--max-steps", gc_max_steps, "Step cap (0 = 50 N^2)");

    // random-graph
    auto* rg = app.add_subcommand("random-graph", "Estimate spread against Erdos-Renyi edge probability");
    InferenceOptions rg_inf;
    std::string rg_p = "0.2,0.4,0.6,0.8,1";
    std::string rg_kind = "er-per-step";
    std::uint64_t rg_graph_seed = 0;
    std::string rg_rule = "bd";
    std::int64_t rg_n = 12;
    std::int64_t rg_a = 5;
    double rg_r = 1.2;
    std::size_t rg_traj = 1000;
    std::string rg_est = "mean";
    std::uint64_t rg_max_steps = 0;
    rg_inf.add(rg);
    rg->add_option("--p-values", rg_p, "Edge probabilities")->capture_default_str();
    rg->add_option("--graph", rg_kind, "er-per-step or er-static")->capture_default_str();
    rg->add_option("--graph-seed", rg_graph_seed, "Seed of the static graph");
    rg->add_option("--rule", rg_rule, "bd or db")->capture_default_str();
    rg->add_option("--N", rg_n, "Vertices")->capture_default_str();
    rg->add_option("--a", rg_a, "Initial A count")->capture_default_str();
    rg->add_option("--r", rg_r, "True r")->capture_default_str();
    rg->add_option("--trajectories", rg_traj, "Trajectories per p")->capture_default_str();
    rg->add_option("--estimator", rg_est, "mean, median, mode")->capture_default_str();
    rg->add_option("--max-steps", rg_max_steps, "Step cap (0 = 50 N^2)");

    // info-gain
    auto* ig = app.add_subcommand("info-gain", "Per-event KL between true and estimated selection probabilities");
    ModelOptions ig_model;
    InitOptions ig_init;
    InferenceOptions ig_inf;
    double ig_r = 2.0;
    std::string ig_est = "mean";
    double ig_head = 0.2;
    std::uint64_t ig_max_steps = 0;
    ig_model.add(ig, "moran");
    ig_init.add(ig, 33, 17);
    ig_inf.add(ig);
    ig->add_option("--r", ig_r, "True r")->capture_default_str();
    ig->add_option("--estimator", ig_est, "mean, median, mode")->capture_default_str();
    ig->add_option("--head-fraction", ig_head, "Leading fraction summarized separately")->capture_default_str();
    ig->add_option("--max-steps", ig_max_steps, "Step cap (0 = 50 N^2)");

    // fixation-check
    auto* fc = app.add_subcommand("fixation-check", "Empirical B fixation fraction against the closed form");
    ModelOptions fc_model;
    std::int64_t fc_n = 10;
    std::int64_t fc_b = 1;
    double fc_r = 2.0;
    std::size_t fc_traj = 10000;
    std::uint64_t fc_max_steps = 0;
    fc_model.add(fc, "separated-bd");
    fc->add_option("--N", fc_n, "Population size")->capture_default_str();
    fc->add_option("--b", fc_b, "Initial B count")->capture_default_str();
    fc->add_option("--r", fc_r, "True r")->capture_default_str();
    fc->add_option("--trajectories", fc_traj, "Trajectories")->capture_default_str();
    fc->add_option("--max-steps", fc_max_steps, "Step cap (0 = 50 N^2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*sim) {
            Json req;
            req["model"] = sim_model.json();
            req["init"] = sim_init.json(sim_model);
            req["r"] = sim_r;
            req["seed"] = g.seed;
            req["max_steps"] = sim_max_steps;
            LogHandle log;
            check(mi_simulate(req.dump().c_str(), &log.ptr));
            Buffer text;
            check(mi_event_log_serialize(log.ptr, &text.ptr));
            write_output(g.output, text.str());
        } else if (*inf) {
            const auto text = read_file(inf_input);
            LogHandle log;
            check(mi_event_log_parse(text.data(), text.size(), &log.ptr));
            Json req = inf_opts.json();
            req["sample_size"] = inf_sample;
            req["sample_seed"] = g.seed;
            Buffer summary;
            Buffer posterior;
            check(mi_infer(log.ptr, req.dump().c_str(), resolve_format(g, MI_FORMAT_JSON), &summary.ptr,
                           inf_posterior.empty() ? nullptr : &posterior.ptr));
            write_output(g.output, summary.str());
            if (!inf_posterior.empty())
                write_output(inf_posterior, posterior.str());
        } else {
            std::string kind;
            Json req;
            if (*sweep) {
                kind = "sweep";
                req["model"] = sweep_model.json();
                req["n_values"] = parse_int_range(sweep_n);
                req["r_values"] = parse_range(sweep_r);
                Json init;
                init["rule"] = sweep_init;
                if (sweep_init == "explicit")
                    init["a"] = sweep_init_a;
                if (sweep_init == "graph-layout") {
                    if (sweep_layout.empty())
                        throw UsageError("--init graph-layout needs --layout");
                    init["layout"] = {{"layout", sweep_layout}, {"a", sweep_layout_a}, {"seed", sweep_layout_seed}};
                } else if (sweep_layout_seed) {
                    init["layout_seed"] = sweep_layout_seed;
                }
                req["init"] = init;
                req["trajectories"] = sweep_traj;
                req["sample_size"] = sweep_sample;
                req["inference"] = sweep_inf.json();
                Json est = Json::array();
                std::stringstream ss(sweep_estimators);
                std::string item;
                while (std::getline(ss, item, ','))
                    est.push_back(item);
                req["estimators"] = est;
                req["seed"] = g.seed;
                req["max_steps"] = sweep_max_steps;
            } else if (*hist) {
                kind = "histogram";
                req["model"] = hist_model.json();
                req["init"] = hist_init.json(hist_model);
                req["r"] = hist_r;
                req["trajectories"] = hist_traj;
                req["sample_size"] = hist_sample;
                req["inference"] = hist_inf.json();
                req["estimator"] = hist_est;
                req["bin_width"] = hist_bin;
                req["seed"] = g.seed;
                req["max_steps"] = hist_max_steps;
            } else if (*gc) {
                kind = "graph-compare";
                req["N"] = gc_n;
                req["r_values"] = parse_range(gc_r);
                if (!gc_graphs.empty()) {
                    Json graphs = Json::array();
                    std::stringstream ss(gc_graphs);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        if (item == "star-center-a" || item == "star-center-b")
                            graphs.push_back({{"label", item},
                                              {"graph", "star"},
                                              {"layout",
                                               {{"layout", item == "star-center-a" ? "center-a" : "center-b"},
                                                {"a", gc_n / 2}}}});
                        else
                            graphs.push_back(item);
                    }
                    req["graphs"] = graphs;
                }
                req["rule"] = gc_rule;
                req["trajectories"] = gc_traj;
                req["inference"] = gc_inf.json();
                req["estimator"] = gc_est;
                req["seed"] = g.seed;
                req["max_steps"] = gc_max_steps;
            } else if (*rg) {
                kind = "random-graph";
                req["p_values"] = parse_range(rg_p);
                req["graph"] = rg_kind;
                req["graph_seed"] = rg_graph_seed;
                req["rule"] = rg_rule;
                req["N"] = rg_n;
                req["a"] = rg_a;
                req["r"] = rg_r;
                req["trajectories"] = rg_traj;
                req["inference"] = rg_inf.json();
                req["estimator"] = rg_est;
                req["seed"] = g.seed;
                req["max_steps"] = rg_max_steps;
            } else if (*ig) {
                kind = "info-gain";
                req = prior_and_grid(ig_inf);
                req["model"] = ig_model.json();
                req["init"] = ig_init.json(ig_model);
                req["r"] = ig_r;
                req["seed"] = g.seed;
                req["max_steps"] = ig_max_steps;
                req["estimator"] = ig_est;
                req["head_fraction"] = ig_head;
            } else if (*fc) {
                kind = "fixation-check";
                req["model"] = fc_model.json();
                req["N"] = fc_n;
                req["b"] = fc_b;
                req["r"] = fc_r;
                req["trajectories"] = fc_traj;
                req["seed"] = g.seed;
                req["max_steps"] = fc_max_steps;
            }
            Buffer out;
            check(mi_run_experiment(kind.c_str(), req.dump().c_str(), resolve_format(g, MI_FORMAT_CSV), g.threads,
                                    &out.ptr));
            write_output(g.output, out.str());
        }
    } catch (const LibraryError& e) {
        std::cerr << "moran-infer: " << e.what() << '\n';
        return exit_code_for(e.status);
    } catch (const UsageError& e) {
        std::cerr << "moran-infer: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}
