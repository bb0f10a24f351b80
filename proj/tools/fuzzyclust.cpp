// fuzzyclust command-line tool: generate synthetic two-cluster graphs,
// cluster edge lists, check second-order optimality of membership matrices,
// and project vectors onto the unit simplex.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fuzzyclust/fuzzyclust.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw fuzzyclust::IoError("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) throw fuzzyclust::IoError("failed writing " + path.string());
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fuzzyclust::IoError("cannot open " + path);
    return in;
}

struct PipelineOptions {
    bool prune = false;
    unsigned threads = 0;
};

struct LoadedGraph {
    fuzzyclust::Graph graph;
    /// original_ids[k] = id in the input file of (preprocessed) node k.
    std::vector<std::int64_t> original_ids;
    std::size_t parsed_nodes = 0;
    std::size_t lcc_nodes = 0;
};

/// parse -> largest connected component -> optional degree-1 pruning,
/// keeping the map back to the input file's node ids.
LoadedGraph load_pipeline(const std::string& path, const PipelineOptions& opts) {
    auto in = open_input(path);
    LoadedGraph out;
    auto parsed = fuzzyclust::parse_edge_list(in);
    out.parsed_nodes = parsed.graph.num_nodes;
    out.original_ids = std::move(parsed.original_ids);

    const auto lcc = fuzzyclust::largest_connected_component_nodes(parsed.graph);
    out.graph = fuzzyclust::induced_subgraph(parsed.graph, lcc);
    out.lcc_nodes = out.graph.num_nodes;
    std::vector<std::int64_t> kept_ids;
    kept_ids.reserve(lcc.size());
    for (std::uint32_t v : lcc) kept_ids.push_back(out.original_ids[v]);
    out.original_ids = std::move(kept_ids);

    if (opts.prune) {
        const auto core = fuzzyclust::two_core_nodes(out.graph);
        out.graph = fuzzyclust::induced_subgraph(out.graph, core);
        std::vector<std::int64_t> surviving;
        surviving.reserve(core.size());
        for (std::uint32_t v : core) surviving.push_back(out.original_ids[v]);
        out.original_ids = std::move(surviving);
    }
    if (out.graph.num_nodes == 0) {
        throw fuzzyclust::InvalidInput("graph is empty after preprocessing");
    }
    return out;
}

/// CSV map from the compacted working ids to the input file's node ids.
std::string node_map_csv(const LoadedGraph& loaded) {
    std::ostringstream out;
    out << "node_id,original_id\n";
    for (std::size_t k = 0; k < loaded.original_ids.size(); ++k) {
        out << k << ',' << loaded.original_ids[k] << '\n';
    }
    return out.str();
}

int run_generate(const fuzzyclust::GeneratorSpec& spec, const std::string& out_dir) {
    const std::string started = iso8601_now();
    const auto generated = fuzzyclust::generate_two_cluster_er(spec);

    fs::create_directories(out_dir);
    {
        std::ostringstream edges;
        fuzzyclust::write_edge_list(generated.graph, edges);
        write_file(fs::path(out_dir) / "edges.txt", edges.str());
    }
    {
        std::ostringstream labels;
        fuzzyclust::write_labels_csv(generated.labels, labels);
        write_file(fs::path(out_dir) / "labels.csv", labels.str());
    }

    json manifest = {
        {"command", "generate"},
        {"version", fuzzyclust::kVersion},
        {"spec",
         {{"n1", spec.n1},
          {"p1", spec.p1},
          {"n2", spec.n2},
          {"p2", spec.p2},
          {"k_inter", spec.k_inter},
          {"seed", spec.seed}}},
        {"outputs", {"edges.txt", "labels.csv"}},
        {"nodes", generated.graph.num_nodes},
        {"edges", generated.graph.edges.size()},
        {"started_at", started},
        {"finished_at", iso8601_now()},
    };
    write_file(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "generated " << generated.graph.num_nodes << " nodes, "
              << generated.graph.edges.size() << " edges -> " << out_dir << "\n";
    return 0;
}

struct ClusterOptions {
    std::string graph_path;
    std::string out_dir = "run";
    std::size_t clusters = 2;
    std::string method = "gpa";
    double step = 0.0;
    double tol = 0.0;
    std::size_t max_iter = 100000;
    std::string init = "random";
    std::string init_file;
    std::size_t row = 1;
    std::uint64_t seed = 0;
    std::size_t trace_every = 1;
    bool fista_restart = false;
    bool trace_timing = false;
    PipelineOptions pipeline;
};

int run_cluster(const ClusterOptions& opts) {
    const std::string started = iso8601_now();
    const LoadedGraph loaded = load_pipeline(opts.graph_path, opts.pipeline);
    const auto similarity = fuzzyclust::SparseSimilarity::build_similarity(loaded.graph);

    fuzzyclust::InitStrategy init;
    init.seed = opts.seed;
    fuzzyclust::MembershipMatrix given;
    if (!opts.init_file.empty() || opts.init == "given") {
        if (opts.init_file.empty()) {
            throw fuzzyclust::InvalidInput("--init given requires --init-file");
        }
        auto in = open_input(opts.init_file);
        given = fuzzyclust::read_membership_csv(in);
        init.kind = fuzzyclust::InitKind::kGiven;
        init.given = &given;
    } else if (opts.init == "random") {
        init.kind = fuzzyclust::InitKind::kRandom;
    } else if (opts.init == "dirichlet") {
        init.kind = fuzzyclust::InitKind::kDirichlet;
    } else if (opts.init == "uniform") {
        init.kind = fuzzyclust::InitKind::kUniform;
    } else if (opts.init == "rowone") {
        if (opts.row < 1 || opts.row > opts.clusters) {
            throw fuzzyclust::InvalidInput("--row must lie in 1..C");
        }
        init.kind = fuzzyclust::InitKind::kRowOne;
        init.row = opts.row - 1;
    } else {
        throw fuzzyclust::InvalidInput("unknown --init strategy: " + opts.init);
    }

    fuzzyclust::SolverConfig config;
    config.step_size = opts.step;
    config.tol = opts.tol;
    config.max_iter = opts.max_iter;
    config.trace_every = opts.trace_every;
    config.fista_restart = opts.fista_restart;
    config.workers = fuzzyclust::resolve_workers(opts.pipeline.threads);
    if (opts.method == "gpa") {
        config.method = fuzzyclust::Method::kGpa;
    } else if (opts.method == "fista") {
        config.method = fuzzyclust::Method::kFista;
    } else {
        throw fuzzyclust::InvalidInput("unknown --method: " + opts.method);
    }

    const auto x0 =
        fuzzyclust::init_membership(loaded.graph.num_nodes, opts.clusters, init);
    const auto result = fuzzyclust::solve(x0, similarity, config);

    fs::create_directories(opts.out_dir);
    {
        std::ostringstream membership;
        fuzzyclust::write_membership_csv(result.membership, membership);
        write_file(fs::path(opts.out_dir) / "membership.csv", membership.str());
    }
    {
        std::ostringstream trace;
        fuzzyclust::write_trace_csv(result.trace, trace, opts.trace_timing);
        write_file(fs::path(opts.out_dir) / "trace.csv", trace.str());
    }
    write_file(fs::path(opts.out_dir) / "nodes.csv", node_map_csv(loaded));

    char loss_buf[32];
    std::snprintf(loss_buf, sizeof loss_buf, "%.17g", result.trace.final_loss);
    json manifest = {
        {"command", "cluster"},
        {"version", fuzzyclust::kVersion},
        {"inputs", {opts.graph_path}},
        {"config",
         {{"clusters", opts.clusters},
          {"method", opts.method},
          {"step_size", result.trace.step_size},
          {"tol", opts.tol},
          {"max_iter", opts.max_iter},
          {"init", opts.init},
          {"row", opts.row},
          {"seed", opts.seed},
          {"trace_every", opts.trace_every},
          {"fista_restart", opts.fista_restart},
          {"prune", opts.pipeline.prune},
          {"threads", config.workers}}},
        {"graph",
         {{"parsed_nodes", loaded.parsed_nodes},
          {"lcc_nodes", loaded.lcc_nodes},
          {"clustered_nodes", loaded.graph.num_nodes},
          {"edges", loaded.graph.edges.size()},
          {"similarity_nnz", similarity.nnz()}}},
        {"termination_reason", fuzzyclust::to_string(result.trace.reason)},
        {"iterations", result.trace.iterations},
        {"final_loss", result.trace.final_loss},
        {"outputs", {"membership.csv", "trace.csv", "nodes.csv"}},
        {"started_at", started},
        {"finished_at", iso8601_now()},
    };
    write_file(fs::path(opts.out_dir) / "manifest.json", manifest.dump(2) + "\n");

    std::cout << "final loss " << loss_buf << " after " << result.trace.iterations
              << " iterations (" << fuzzyclust::to_string(result.trace.reason) << ")\n";
    return 0;
}

struct CheckOptions {
    std::string graph_path;
    std::string membership_path;
    fuzzyclust::SecondOrderConfig config;
    PipelineOptions pipeline;
};

const char* condition_status(const fuzzyclust::RefinementVerdict& v, bool checked) {
    if (!checked) return "not_checked";
    return v.status == fuzzyclust::RefinementStatus::kSurviving ? "surviving" : "refuted";
}

int run_check(CheckOptions opts) {
    const LoadedGraph loaded = load_pipeline(opts.graph_path, opts.pipeline);
    const auto similarity = fuzzyclust::SparseSimilarity::build_similarity(loaded.graph);

    auto in = open_input(opts.membership_path);
    const auto membership = fuzzyclust::read_membership_csv(in);
    if (membership.nodes() != loaded.graph.num_nodes) {
        throw fuzzyclust::InvalidInput(
            "membership has " + std::to_string(membership.nodes()) + " nodes but the graph has " +
            std::to_string(loaded.graph.num_nodes));
    }
    opts.config.workers = fuzzyclust::resolve_workers(opts.pipeline.threads);

    const auto report = fuzzyclust::refine(membership, similarity, opts.config);

    const bool a_checked = report.critical;
    const bool b_checked =
        a_checked && report.condition_a.status != fuzzyclust::RefinementStatus::kRefutedConditionA;
    json out = {
        {"critical", report.critical},
        {"residual", report.residual},
        {"condition_a",
         {{"status", condition_status(report.condition_a, a_checked)},
          {"witness_value",
           report.condition_a.status == fuzzyclust::RefinementStatus::kRefutedConditionA
               ? json(report.condition_a.witness_value)
               : json(nullptr)}}},
        {"condition_b",
         {{"status", condition_status(report.condition_b, b_checked)},
          {"interior_shortcut", report.condition_b.used_interior_shortcut}}},
        {"directions_tested", report.directions_generated},
        {"status", fuzzyclust::to_string(report.status)},
    };
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_project(const std::string& literal) {
    std::vector<double> values;
    std::stringstream ss(literal);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw fuzzyclust::InvalidInput("cannot parse vector component \"" + cell + "\"");
        }
    }
    if (values.empty()) throw fuzzyclust::InvalidInput("empty vector literal");

    const auto projected = fuzzyclust::project_simplex(values);
    char buf[32];
    for (std::size_t k = 0; k < projected.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", projected[k]);
        std::cout << (k ? "," : "") << buf;
    }
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Similarity-based fuzzy graph clustering (column-parallel GPA/FISTA)"};
    app.require_subcommand(1);
    // key=value config file; subcommand options live in a [cluster] (etc.)
    // section. Explicit flags override config values.
    app.set_config("--config", "", "Read options from a key=value file");

    auto* gen = app.add_subcommand("generate", "Generate a two-cluster Erdos-Renyi graph");
    fuzzyclust::GeneratorSpec spec;
    std::string gen_out = "generated";
    gen->add_option("--n1", spec.n1, "Nodes in cluster 1")->required();
    gen->add_option("--p1", spec.p1, "Intra-cluster edge probability, cluster 1")->required();
    gen->add_option("--n2", spec.n2, "Nodes in cluster 2")->required();
    gen->add_option("--p2", spec.p2, "Intra-cluster edge probability, cluster 2")->required();
    gen->add_option("--k-inter", spec.k_inter, "Number of inter-cluster edges")->required();
    gen->add_option("--seed", spec.seed, "Generator seed");
    gen->add_option("--out", gen_out, "Output directory");

    auto* cl = app.add_subcommand("cluster", "Cluster an edge-list graph");
    cl->fallthrough();  // lets --config appear after the subcommand name
    ClusterOptions copts;
    cl->add_option("graph", copts.graph_path, "Edge-list file")->required();
    cl->add_option("--c", copts.clusters, "Number of clusters")->required();
    cl->add_option("--method", copts.method, "gpa or fista");
    cl->add_option("--step", copts.step, "Step size (0 = auto Frobenius surrogate)");
    cl->add_option("--tol", copts.tol, "Loss-decrease stopping threshold");
    cl->add_option("--max-iter", copts.max_iter, "Iteration budget");
    cl->add_option("--init", copts.init, "random|dirichlet|uniform|rowone|given");
    cl->add_option("--init-file", copts.init_file, "Membership CSV for --init given");
    cl->add_option("--row", copts.row, "1-based row for --init rowone");
    cl->add_option("--seed", copts.seed, "Seed for random/dirichlet init");
    cl->add_option("--trace-every", copts.trace_every, "Record every k-th iteration");
    cl->add_flag("--fista-restart", copts.fista_restart,
                 "Reset FISTA momentum on loss increase instead of stopping");
    cl->add_flag("--trace-timing", copts.trace_timing,
                 "Include elapsed_ms in trace.csv (breaks byte reproducibility)");
    cl->add_flag("--prune,!--no-prune", copts.pipeline.prune,
                 "Iteratively drop degree-<=1 nodes before clustering");
    cl->add_option("--threads", copts.pipeline.threads,
                   "Worker threads (default: FUZZYCLUST_THREADS or hardware)");
    cl->add_option("--out", copts.out_dir, "Output directory");

    auto* ck = app.add_subcommand("check", "Second-order optimality report for a membership");
    CheckOptions kopts;
    ck->add_option("graph", kopts.graph_path, "Edge-list file")->required();
    ck->add_option("membership", kopts.membership_path, "Membership CSV")->required();
    ck->add_option("--tau-probe", kopts.config.tau_probe, "Probe step for the residual");
    ck->add_option("--eps", kopts.config.eps_critical, "Criticality threshold on the residual");
    ck->add_option("--eps-active", kopts.config.eps_active, "Active-coordinate threshold");
    ck->add_option("--eps-grad", kopts.config.eps_grad_orth,
                   "Gradient-orthogonality tolerance for cone directions");
    ck->add_option("--eps-quad", kopts.config.eps_quad, "Violation threshold for (a)/(b)");
    ck->add_option("--random-directions", kopts.config.random_directions,
                   "Extra sampled cone directions beyond the pairwise enumeration");
    ck->add_option("--budget", kopts.config.budget, "Max directions evaluated");
    ck->add_option("--seed", kopts.config.seed, "Seed for sampled directions");
    ck->add_flag("--prune,!--no-prune", kopts.pipeline.prune,
                 "Iteratively drop degree-<=1 nodes before checking");
    ck->add_option("--threads", kopts.pipeline.threads, "Worker threads");

    auto* pj = app.add_subcommand("project", "Project a vector onto the unit simplex");
    std::string literal;
    pj->add_option("vector", literal, "Comma-separated reals, e.g. 1.2,-0.3,0.1")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return run_generate(spec, gen_out);
        if (cl->parsed()) return run_cluster(copts);
        if (ck->parsed()) return run_check(kopts);
        if (pj->parsed()) return run_project(literal);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag/config mistakes are validation errors
    } catch (const fuzzyclust::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const fuzzyclust::InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
