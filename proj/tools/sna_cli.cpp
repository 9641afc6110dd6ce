// Command-line front end: seeded, file-based experiment pipelines with
// CSV/JSON outputs and a manifest written beside every result file.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <cmath>
#include <sstream>

#include "sna/aggregate.hpp"
#include "sna/diffusion.hpp"
#include "sna/formation.hpp"
#include "sna/graph.hpp"
#include "sna/pref_models.hpp"
#include "sna/prefs.hpp"
#include "sna/select.hpp"
#include "sna/two_phase.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sna;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir = "out";
    bool force = false;
    int workers = 0;
    std::string config_path;
    bool schema = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const CommonOpts& opts, const std::string& name, const std::string& content) {
    fs::create_directories(opts.out_dir);
    fs::path path = fs::path(opts.out_dir) / name;
    if (fs::exists(path) && !opts.force)
        throw ContractError(path.string() + " exists; pass --force to overwrite");
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct ManifestTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_manifest(const CommonOpts& opts, const std::string& command, const json& config,
                    const ManifestTimer& timer) {
    json m;
    m["command"] = command;
    m["config"] = config;
    m["seed"] = opts.seed;
    m["version"] = kVersion;
    m["wall_time_s"] = timer.seconds();
    write_output(opts, command + ".manifest.json", m.dump(2) + "\n");
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

Graph load_graph_file(const std::string& path, bool directed, const std::string& model,
                      const SeedStream& stream) {
    LoadResult r = load_edge_list(read_file(path), directed);
    if (model == "none" || model.empty()) return r.graph;
    if (model == "wc") return to_weighted_cascade(r.graph);
    if (model == "tv") {
        Rng rng = stream.sub("tv-weights").rng();
        return to_trivalency(r.graph, rng);
    }
    throw ContractError("unknown probability model '" + model + "'");
}

std::vector<int> parse_id_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

// Configuration file values fill in flags the user did not pass.
void merge_config(CLI::App* cmd, const std::string& path) {
    json cfg = json::parse(read_file(path));
    for (auto& [key, value] : cfg.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt || opt->count() > 0) continue;
        std::string text = value.is_string() ? value.get<std::string>() : value.dump();
        opt->add_result(text);
    }
}

int schema_dump(const std::string& command) {
    static const std::map<std::string, std::string> schemas = {
        {"ingest", "normalized.edges: u v p per line\nid_map.json: {external_id: internal_id}"},
        {"diffuse",
         "diffuse.csv columns: seeds, iterations, objective (sigma|nu), delta, mean, std_error"},
        {"two-phase",
         "two_phase.csv columns: k, k1, d, selector, mode, value, std_error\n"
         "probes.csv columns: k1, d, value, std_error (one row per probe when splitting)"},
        {"prefs-generate", "corpus.csv columns: topic, node, ranking (space-separated ids)"},
        {"prefs-validate", "validate.csv columns: rms_kl, rms_mean_abs, smoothed_pairs"},
        {"msm", "distances.csv: n*n matrix rows of expected pairwise distances"},
        {"aggregate", "aggregate.json: {rankings: [[...], ...]}"},
        {"select-reps",
         "representatives.json: {members: [...]}\n"
         "error_curve.csv columns: method, k, mean_delta, std_error"},
        {"ewi", "ewi.csv columns: mu_d, sigma_d, max_mean_delta, std_error, violated"},
        {"formation", "formation_events.json: entry/alteration log\nformation.csv: size, ged"},
        {"deviation", "deviation.csv columns: size, ged\nsummary.json: class, healed_after"},
        {"ged", "ged.json: {distance, centers?}"},
        {"tu-game", "allocations.csv columns: node, shapley, gately, tau"},
    };
    auto it = schemas.find(command);
    if (it == schemas.end()) return 1;
    std::printf("%s\n", it->second.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"social-network analysis toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string graph_path, model = "none", pairs_path, corpus_path, profile_path;
    std::string selector = "greedy", mode = "myopic", kind = "s-random", rule = "plurality";
    std::string target = "star", topology = "star", position = "mid", method = "greedy-sum";
    std::string seeds_arg, d_arg = "auto", k1_arg = "auto", param = "c0", direction = "neg";
    std::string restore = "M,M,M";
    int k = 1, iterations = 10000, topics = 1000, r_alts = 5, m1 = 1000, m2 = 1000;
    int kstar_k = 3, n_max = 20, trials = 300, mc_per_cell = 500, runs = 1;
    double delta = 1.0, resolution = 0.01;
    bool directed = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", common.seed, "root seed (required for stochastic commands)")
            ->required();
        cmd->add_option("--out", common.out_dir, "output directory");
        cmd->add_flag("--force", common.force, "overwrite existing outputs");
        cmd->add_option("--workers", common.workers, "worker threads (0 = all cores)");
        cmd->add_option("--config", common.config_path, "JSON config merged under explicit flags");
        cmd->add_flag("--schema", common.schema, "print output column documentation and exit");
    };

    CLI::App* ingest = app.add_subcommand("ingest", "normalize an edge list and persist the id map");
    ingest->add_option("--input", graph_path, "edge list file")->required();
    ingest->add_flag("--directed", directed, "treat edges as directed");
    add_common(ingest);

    CLI::App* diffuse = app.add_subcommand("diffuse", "estimate expected or discounted spread");
    diffuse->add_option("--graph", graph_path)->required();
    diffuse->add_option("--model", model, "wc|tv|none");
    diffuse->add_option("--seeds", seeds_arg, "comma-separated seed node ids")->required();
    diffuse->add_option("--iterations", iterations);
    diffuse->add_option("--delta", delta, "decay rate; 1 = plain spread");
    add_common(diffuse);

    CLI::App* twophase = app.add_subcommand("two-phase", "two-phase seeding experiment");
    twophase->add_option("--graph", graph_path)->required();
    twophase->add_option("--model", model, "wc|tv|none");
    twophase->add_option("--k", k, "total budget")->required();
    twophase->add_option("--k1", k1_arg, "first-phase budget or 'auto'");
    twophase->add_option("--d", d_arg, "delay or 'auto' (stagnation)");
    twophase->add_option("--selector", selector, "greedy|gdd|sd|wd|face|spic|rmax");
    twophase->add_option("--mode", mode, "myopic|farsighted");
    twophase->add_option("--m1", m1);
    twophase->add_option("--m2", m2);
    twophase->add_option("--delta", delta, "decay rate");
    twophase->add_option("--runs", runs, "evaluation simulations");
    add_common(twophase);

    CLI::App* prefs_gen = app.add_subcommand("prefs-generate", "generate preference topics");
    prefs_gen->add_option("--graph", graph_path)->required();
    prefs_gen->add_option("--pairs", pairs_path, "pair model csv (i,j,mu,sigma)")->required();
    prefs_gen->add_option("--kind", kind, "ic|s-random|s-mu|s-sigma|d|r");
    prefs_gen->add_option("--topics", topics);
    prefs_gen->add_option("--r", r_alts, "alternatives per topic");
    add_common(prefs_gen);

    CLI::App* prefs_val = app.add_subcommand("prefs-validate", "score a corpus against a model");
    prefs_val->add_option("--corpus", corpus_path)->required();
    prefs_val->add_option("--pairs", pairs_path)->required();
    prefs_val->add_option("--r", r_alts);
    add_common(prefs_val);

    CLI::App* msm = app.add_subcommand("msm", "complete edge distances to all pairs");
    msm->add_option("--graph", graph_path)->required();
    msm->add_option("--pairs", pairs_path)->required();
    msm->add_option("--r", r_alts);
    msm->add_option("--mc-per-cell", mc_per_cell);
    msm->add_option("--resolution", resolution);
    add_common(msm);

    CLI::App* agg = app.add_subcommand("aggregate", "aggregate a preference profile");
    agg->add_option("--profile", profile_path)->required();
    agg->add_option("--rule", rule);
    agg->add_option("--r", r_alts);
    add_common(agg);

    CLI::App* reps = app.add_subcommand("select-reps", "choose representative nodes");
    reps->add_option("--pairs", pairs_path, "full pair model csv")->required();
    reps->add_option("--graph", graph_path, "needed for degree-cen");
    reps->add_option("--corpus", corpus_path, "needed for greedy-orig and error curves");
    reps->add_option("--method", method, "greedy-min|greedy-sum|greedy-orig|degree-cen|random-poll");
    reps->add_option("--k", k)->required();
    reps->add_option("--rule", rule);
    reps->add_option("--r", r_alts);
    add_common(reps);

    CLI::App* ewi = app.add_subcommand("ewi", "perturbation-insensitivity grid for a rule");
    ewi->add_option("--rule", rule);
    ewi->add_option("--profile", profile_path, "base profile csv")->required();
    ewi->add_option("--r", r_alts);
    ewi->add_option("--trials", trials);
    add_common(ewi);

    CLI::App* formation = app.add_subcommand("formation", "grow a network under a preset");
    formation->add_option("--topology", topology, "star|complete|diameter|bipartite-turan|two-star|k-star");
    formation->add_option("--k", kstar_k, "centers for k-star");
    formation->add_option("--position", position, "low|mid|high");
    formation->add_option("--n-max", n_max);
    add_common(formation);

    int dev_node = 2, dev_nmax = 20;
    CLI::App* deviation = app.add_subcommand("deviation", "deviate a preset parameter during one entry");
    deviation->add_option("--topology", topology);
    deviation->add_option("--k", kstar_k);
    deviation->add_option("--param", param, "c|c0");
    deviation->add_option("--direction", direction, "pos|neg");
    deviation->add_option("--node", dev_node, "deviation node")->required();
    deviation->add_option("--restore", restore, "gamma,c,c0 positions (e.g. L,M,H)");
    deviation->add_option("--n-max", dev_nmax, "network size to grow to")->required();
    add_common(deviation);

    CLI::App* ged = app.add_subcommand("ged", "edit distance to a named topology");
    ged->add_option("--graph", graph_path)->required();
    ged->add_option("--target", target, "star|complete|kstar");
    ged->add_option("--k", kstar_k);
    add_common(ged);

    CLI::App* tugame = app.add_subcommand("tu-game", "similarity-game allocations");
    tugame->add_option("--pairs", pairs_path)->required();
    tugame->add_option("--r", r_alts);
    add_common(tugame);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    CLI::App* active = app.get_subcommands().front();
    const std::string command = active->get_name();
    if (common.schema) return schema_dump(command);

    try {
        if (!common.config_path.empty()) {
            merge_config(active, common.config_path);
        }
#ifdef _OPENMP
        if (common.workers > 0) omp_set_num_threads(common.workers);
#endif
        SeedStream root(common.seed);
        ManifestTimer timer;
        json config;
        for (const CLI::Option* opt : active->get_options())
            if (opt->count() > 0 && opt->get_name().rfind("--", 0) == 0)
                config[opt->get_name().substr(2)] = opt->results().front();

        if (command == "ingest") {
            LoadResult r = load_edge_list(read_file(graph_path), directed);
            std::string edges;
            for (const Edge& e : r.graph.edges())
                edges += std::to_string(e.src) + " " + std::to_string(e.dst) + " " +
                         fmt(e.weight) + "\n";
            write_output(common, "normalized.edges", edges);
            write_output(common, "id_map.json", id_map_to_json(r.id_map) + "\n");
        } else if (command == "diffuse") {
            Graph g = load_graph_file(graph_path, false, model, root);
            std::vector<int> seeds = parse_id_list(seeds_arg);
            Estimate e;
            std::string objective = delta == 1.0 ? "sigma" : "nu";
            if (delta == 1.0)
                e = estimate_sigma(g, seeds, iterations, root.sub("diffuse"));
            else
                e = estimate_nu(g, seeds, DecaySchedule::geometric(delta), iterations,
                                root.sub("diffuse"));
            std::string csv = "seeds,iterations,objective,delta,mean,std_error\n";
            csv += "\"" + seeds_arg + "\"," + std::to_string(iterations) + "," + objective + "," +
                   fmt(delta) + "," + fmt(e.mean) + "," + fmt(e.std_error) + "\n";
            write_output(common, "diffuse.csv", csv);
        } else if (command == "two-phase") {
            Graph g = load_graph_file(graph_path, false, model, root);
            TwoPhaseConfig cfg;
            cfg.k = k;
            cfg.m1 = m1;
            cfg.m2 = m2;
            cfg.decay = DecaySchedule::geometric(delta);
            cfg.selector = selector_from_string(selector);
            cfg.mode = mode == "farsighted" ? PhaseMode::farsighted : PhaseMode::myopic;
            if (d_arg != "auto") cfg.d = std::stoi(d_arg);
            std::string probes_csv = "k1,d,value,std_error\n";
            if (k1_arg == "auto") {
                std::vector<int> grid(k + 1);
                std::iota(grid.begin(), grid.end(), 0);
                BudgetSplitResult split = optimize_budget_split(
                    g, k, cfg.d.value_or(g.node_count()), SplitEvaluator::h_mc, grid, cfg,
                    root.sub("split"));
                for (const BudgetSplitPoint& pt : split.curve)
                    probes_csv += std::to_string(pt.k1) + "," +
                                  std::to_string(cfg.d.value_or(-1)) + "," + fmt(pt.value) + "," +
                                  fmt(pt.std_error) + "\n";
                cfg.k1 = split.best_k1;
            } else {
                cfg.k1 = std::stoi(k1_arg);
            }
            TwoPhaseRun run = run_two_phase(g, cfg, root.sub("run"));
            Estimate e = evaluate_two_phase_policy(g, run.s1, cfg, runs, root.sub("eval"));
            std::string csv = "k,k1,d,selector,mode,value,std_error\n";
            csv += std::to_string(k) + "," + std::to_string(cfg.k1) + "," +
                   (cfg.d ? std::to_string(*cfg.d) : std::string("auto")) + "," + selector + "," +
                   mode + "," + fmt(e.mean) + "," + fmt(e.std_error) + "\n";
            write_output(common, "two_phase.csv", csv);
            write_output(common, "probes.csv", probes_csv);
            write_output(common, "trace.json", trace_to_json(run.phase1) + "\n");
        } else if (command == "prefs-generate") {
            LoadResult r = load_edge_list(read_file(graph_path), false);
            PairDistanceModel pm = pair_model_from_csv(read_file(pairs_path), r_alts);
            GeneratedCorpus corpus =
                generate(r.graph, pm, spread_kind_from_string(kind), topics, root.sub("gen"));
            write_output(common, "corpus.csv", corpus_to_csv(corpus));
        } else if (command == "prefs-validate") {
            PairDistanceModel pm = pair_model_from_csv(read_file(pairs_path), r_alts);
            GeneratedCorpus corpus = corpus_from_csv(read_file(corpus_path), pm.n, r_alts);
            ValidationReport rep = validate(corpus, pm);
            std::string csv = "rms_kl,rms_mean_abs,smoothed_pairs\n";
            csv += fmt(rep.rms_kl) + "," + fmt(rep.rms_mean_abs) + "," +
                   std::to_string(rep.smoothed_pairs) + "\n";
            write_output(common, "validate.csv", csv);
        } else if (command == "msm") {
            LoadResult r = load_edge_list(read_file(graph_path), false);
            PairDistanceModel pm = pair_model_from_csv(read_file(pairs_path), r_alts);
            TrTable t = build_tr(r_alts, {0.05, 0.10, 0.15, 0.20}, mc_per_cell, root.sub("tr"),
                                 resolution);
            std::vector<double> d = msm_sp(r.graph, pm, t);
            int n = r.graph.node_count();
            std::string csv;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) csv += (j ? "," : "") + fmt(d[i * n + j]);
                csv += "\n";
            }
            write_output(common, "distances.csv", csv);
        } else if (command == "aggregate") {
            Profile p = profile_from_csv(read_file(profile_path), r_alts);
            AggregateResult res = aggregate(rule_from_string(rule), p);
            json out;
            out["rankings"] = res.preferences;
            write_output(common, "aggregate.json", out.dump(2) + "\n");
        } else if (command == "select-reps") {
            PairDistanceModel pm = pair_model_from_csv(read_file(pairs_path), r_alts);
            RepSelectionInputs inputs;
            LoadResult gr;
            GeneratedCorpus corpus;
            if (!graph_path.empty()) {
                gr = load_edge_list(read_file(graph_path), false);
                inputs.graph = &gr.graph;
            }
            if (!corpus_path.empty()) {
                corpus = corpus_from_csv(read_file(corpus_path), pm.n, r_alts);
                inputs.corpus = &corpus;
            }
            Rule parsed_rule = rule_from_string(rule);
            inputs.rule = parsed_rule;
            std::vector<int> m = select_representatives(rep_method_from_string(method), pm, k,
                                                        inputs, root.sub("reps"));
            json out;
            out["members"] = m;
            write_output(common, "representatives.json", out.dump(2) + "\n");
            if (inputs.corpus) {
                // per-topic error of the weighted representative profile
                Aggregator f = make_aggregator(parsed_rule);
                Rng rng = root.sub("assign").rng();
                RepresentativeAssignment asg = assign_representatives(pm, m, rng);
                double sum = 0.0, sumsq = 0.0;
                int t_count = static_cast<int>(corpus.topics.size());
                for (const auto& topic : corpus.topics) {
                    double dlt = delta_error(f(topic), f(weighted_profile(topic, asg)));
                    sum += dlt;
                    sumsq += dlt * dlt;
                }
                double mean = sum / t_count;
                double var = t_count > 1 ? std::max(0.0, (sumsq - t_count * mean * mean) /
                                                             (t_count - 1))
                                         : 0.0;
                std::string curve = "method,k,mean_delta,std_error\n";
                curve += method + "," + std::to_string(k) + "," + fmt(mean) + "," +
                         fmt(std::sqrt(var / t_count)) + "\n";
                write_output(common, "error_curve.csv", curve);
            }
        } else if (command == "ewi") {
            Profile base = profile_from_csv(read_file(profile_path), r_alts);
            std::vector<double> mu_grid{0.05, 0.1, 0.2, 0.3};
            std::vector<double> sigma_grid{0.02, 0.05, 0.1};
            auto cells = ewi_test(make_aggregator(rule_from_string(rule)), {base}, mu_grid,
                                  sigma_grid, trials, root.sub("ewi"));
            std::string csv = "mu_d,sigma_d,max_mean_delta,std_error,violated\n";
            for (const EwiCell& c : cells)
                csv += fmt(c.mu_d) + "," + fmt(c.sigma_d) + "," + fmt(c.max_mean_delta) + "," +
                       fmt(c.std_error) + "," + (c.violated ? "1" : "0") + "\n";
            write_output(common, "ewi.csv", csv);
        } else if (command == "formation") {
            PresetSpec spec;
            spec.topology = topology_from_string(topology);
            spec.k = kstar_k;
            Preset preset = preset_conditions(spec, FormationParams::geometric_benefits(0.8),
                                              position_from_string(position));
            std::vector<std::pair<int, int>> curve;
            FormationRun run = run_recursive_formation(
                preset.params, n_max, preset.base, root.sub("formation"), std::nullopt,
                [&](const FormationState& st) {
                    UGraph view(st.entered);
                    for (int u = 0; u < st.entered; ++u)
                        for (int v = u + 1; v < st.entered; ++v)
                            if (st.net.has_edge(u, v)) view.add_edge(u, v);
                    curve.emplace_back(st.entered, ged_to_target(view, spec));
                });
            write_output(common, "formation_events.json", formation_events_to_json(run) + "\n");
            std::string csv = "size,ged\n";
            for (auto [size, g] : curve) csv += std::to_string(size) + "," + std::to_string(g) + "\n";
            write_output(common, "formation.csv", csv);
        } else if (command == "deviation") {
            PresetSpec spec;
            spec.topology = topology_from_string(topology);
            spec.k = kstar_k;
            DeviationSpec dev;
            dev.param = param == "c" ? DeviatedParam::link_cost : DeviatedParam::entry_factor;
            dev.direction = direction == "pos" ? +1 : -1;
            dev.deviation_node = dev_node;
            {
                std::istringstream rs(restore);
                std::string tok;
                std::vector<ParamPosition> pos;
                while (std::getline(rs, tok, ',')) pos.push_back(position_from_string(tok));
                if (pos.size() != 3) throw ContractError("--restore needs gamma,c,c0 positions");
                dev.restore_gamma = pos[0];
                dev.restore_c = pos[1];
                dev.restore_c0 = pos[2];
            }
            DeviationOutcome out = deviation_experiment(
                spec, FormationParams::geometric_benefits(0.8), dev, dev_nmax,
                root.sub("deviation"));
            std::string csv = "size,ged\n";
            for (auto [size, g] : out.ged_curve)
                csv += std::to_string(size) + "," + std::to_string(g) + "\n";
            write_output(common, "deviation.csv", csv);
            json summary;
            summary["class"] = std::string(1, out.result_class);
            summary["healed_after"] = out.healed_after_entries;
            write_output(common, "summary.json", summary.dump(2) + "\n");
        } else if (command == "ged") {
            LoadResult r = load_edge_list(read_file(graph_path), false);
            UGraph g = UGraph::from_graph(r.graph);
            json out;
            if (target == "star") {
                out["distance"] = ged_star(g);
            } else if (target == "complete") {
                out["distance"] = ged_complete(g);
            } else if (target == "kstar") {
                GedResult res = ged_kstar(g, kstar_k);
                out["distance"] = res.distance;
                out["centers"] = res.centers;
            } else {
                throw ContractError("unknown target '" + target + "'");
            }
            write_output(common, "ged.json", out.dump(2) + "\n");
        } else if (command == "tu-game") {
            PairDistanceModel pm = pair_model_from_csv(read_file(pairs_path), r_alts);
            std::vector<double> c(pm.n * pm.n, 0.0);
            for (int i = 0; i < pm.n; ++i)
                for (int j = 0; j < pm.n; ++j)
                    if (i != j) c[i * pm.n + j] = pm.similarity(i, j);
            std::vector<double> phi = shapley_similarity(pm.n, c);
            TuGame game = similarity_game_from_matrix(pm.n, c);
            std::vector<double> gv = gately(game);
            std::vector<double> tau = tau_value(game);
            std::string csv = "node,shapley,gately,tau\n";
            for (int i = 0; i < pm.n; ++i)
                csv += std::to_string(i) + "," + fmt(phi[i]) + "," + fmt(gv[i]) + "," +
                       fmt(tau[i]) + "\n";
            write_output(common, "allocations.csv", csv);
        }
        write_manifest(common, command, config, timer);
    } catch (const CapError& e) {
        std::fprintf(stderr, "refused: %s\n", e.what());
        return 3;
    } catch (const ContractError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
