// Acceptance suite: one checkable criterion per function, each printing a
// single PASS/FAIL line. Run with no arguments for the full battery or
// with a criterion number to run one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>

#include "sna/aggregate.hpp"
#include "sna/diffusion.hpp"
#include "sna/formation.hpp"
#include "sna/graph.hpp"
#include "sna/pref_models.hpp"
#include "sna/prefs.hpp"
#include "sna/select.hpp"
#include "sna/two_phase.hpp"
#include "test_support.hpp"

using namespace sna;
using namespace test_support;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

// ---- criterion 1: exact two-phase values on the 4-node instance ----
Outcome criterion1() {
    Outcome out;
    Graph g = toy_graph();
    auto close = [](double a, double b) { return std::abs(a - b) < 1e-9; };
    out.expect(close(eval_f_exact(g, {0}, 1, 1), 3.8), "f({A},d=1,k2=1) != 3.8");
    out.expect(close(eval_f_exact(g, {}, 3, 1), 2.7), "f({}) != 2.7");
    out.expect(close(eval_f_exact(g, {2}, 3, 1), 2.95), "f({C}) != 2.95");
    out.expect(close(eval_f_exact(g, {3}, 3, 1), 2.9), "f({D}) != 2.9");
    out.expect(close(eval_f_exact(g, {3, 2}, 3, 1), 3.5), "f({D,C}) != 3.5");
    // both diminishing-returns directions appear in these values
    double m_small = eval_f_exact(g, {2}, 3, 1) - eval_f_exact(g, {}, 3, 1);          // 0.25
    double m_large = eval_f_exact(g, {3, 2}, 3, 1) - eval_f_exact(g, {3}, 3, 1);      // 0.60
    out.expect(m_small < m_large, "submodularity-violation direction missing");
    double a_small = eval_f_exact(g, {0}, 3, 1) - eval_f_exact(g, {}, 3, 1);          // 1.14
    double a_large = eval_f_exact(g, {0, 1}, 3, 1) - eval_f_exact(g, {1}, 3, 1);      // 0.28
    out.expect(a_small > a_large, "supermodularity-violation direction missing");
    return out;
}

// ---- criterion 2: dominance and delay monotonicity, exact evaluators ----
Outcome criterion2() {
    Outcome out;
    Rng rng(1002);
    for (int rep = 0; rep < 50; ++rep) {
        int n = uniform_int(rng, 3, 6);
        int m = std::min(10, uniform_int(rng, n - 1, 2 * n));
        Graph g = random_digraph(n, m, rng);
        int k = 2, k1 = 1, d = uniform_int(rng, 1, 3);
        double best_two = -1.0;
        for (const auto& s1 : all_subsets_of_size(n, k1))
            best_two = std::max(best_two, eval_f_exact(g, s1, d, k - k1));
        double best_single = -1.0;
        for (const auto& s : all_subsets_of_size(n, k))
            best_single = std::max(best_single, exact_sigma(g, s));
        out.expect(best_two >= best_single - 1e-9,
                   "dominance violated on instance " + std::to_string(rep));
        std::vector<int> s1{uniform_int(rng, 0, n - 1)};
        double prev = -1.0;
        for (int dd = 0; dd <= 4; ++dd) {
            double v = eval_f_exact(g, s1, dd, 1);
            out.expect(v >= prev - 1e-9, "delay monotonicity violated at rep " +
                                             std::to_string(rep) + " d=" + std::to_string(dd));
            prev = v;
        }
    }
    return out;
}

// ---- criterion 3: two-phase gain band on the 77-node instance ----
Outcome criterion3() {
    Outcome out;
    Graph wc = to_weighted_cascade(lm_scale_graph());
    SeedStream s(1003);
    std::vector<int> all(wc.node_count());
    std::iota(all.begin(), all.end(), 0);
    Objective obj = sigma_objective(wc, 2000, s.sub("obj"));
    GreedyResult single = greedy_hill_climb(obj, all, 6);
    Estimate sp = estimate_sigma(wc, single.selected, 10000, s.sub("single-eval"));
    GreedyResult first = greedy_hill_climb(obj, all, 3);
    TwoPhaseConfig cfg;
    cfg.k = 6;
    cfg.k1 = 3;
    cfg.m2 = 100;
    cfg.selector = SelectorId::greedy;  // delay unset: run to stagnation
    Estimate tp = evaluate_two_phase_policy(wc, first.selected, cfg, 10000, s.sub("two-eval"));
    double gain = 100.0 * (tp.mean - sp.mean) / sp.mean;
    char buf[160];
    std::snprintf(buf, sizeof buf, "single %.2f±%.2f two-phase %.2f±%.2f gain %.2f%%", sp.mean,
                  sp.std_error, tp.mean, tp.std_error, gain);
    out.detail = buf;
    out.expect(gain >= 4.0 && gain <= 15.0, "gain outside [4%,15%]");
    return out;
}

// ---- criterion 4: joint search policy shape under decay ----
Outcome criterion4() {
    Outcome out;
    Graph wc = to_weighted_cascade(lm_scale_graph());
    // stagnation bound: median first-phase stagnation step over pilot runs
    SeedStream pilot(1004);
    std::vector<int> first = gdd_select(wc, 2);
    std::vector<int> lengths;
    for (int i = 0; i < 200; ++i) {
        Rng rng = pilot.rng_at(i);
        lengths.push_back(static_cast<int>(simulate_ic(wc, first, rng).steps.size()));
    }
    std::sort(lengths.begin(), lengths.end());
    // bound the delay grid where the value gradient still dominates noise
    int d_max = std::max(3, lengths[lengths.size() / 4]);

    TwoPhaseConfig cfg;
    cfg.m1 = 400;
    cfg.m2 = 3;
    CeParams params;
    params.max_iters = 12;

    int single_hits = 0, delay_hits = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        TwoPhaseConfig heavy = cfg;
        heavy.decay = DecaySchedule::geometric(0.75);
        FaceJointResult r = face_joint(wc, 6, d_max, heavy, params, SeedStream(40000 + seed));
        if (r.k1_mode == 6 && r.d_mode == 0) ++single_hits;
    }
    for (uint64_t seed = 0; seed < 10; ++seed) {
        TwoPhaseConfig flat = cfg;
        flat.decay = DecaySchedule::geometric(1.0);
        FaceJointResult r = face_joint(wc, 6, d_max, flat, params, SeedStream(41000 + seed));
        if (r.k1_mode < 6 && r.d_mode == d_max) ++delay_hits;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "d_max=%d, delta=0.75: %d/10 single phase; delta=1: %d/10 at the bound",
                  d_max, single_hits, delay_hits);
    out.detail = buf;
    out.expect(single_hits >= 8, "heavy decay did not favor the single phase");
    out.expect(delay_hits >= 8, "undiscounted runs did not push the delay to the bound");
    return out;
}

// ---- criterion 5: estimator/enumeration agreement ----
Outcome criterion5() {
    Outcome out;
    Rng rng(1005);
    int within = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        int n = uniform_int(rng, 3, 8);
        Graph g = random_digraph(n, std::min(12, uniform_int(rng, n - 1, 2 * n)), rng);
        int k = uniform_int(rng, 1, 2);
        std::vector<int> seeds;
        while (static_cast<int>(seeds.size()) < k) {
            int v = uniform_int(rng, 0, n - 1);
            if (std::find(seeds.begin(), seeds.end(), v) == seeds.end()) seeds.push_back(v);
        }
        double exact = exact_sigma(g, seeds);
        Estimate est = estimate_sigma(g, seeds, 5000, SeedStream(50000 + t));
        if (std::abs(est.mean - exact) <= 3 * est.std_error + 1e-12) ++within;
    }
    out.detail = std::to_string(within) + "/500 within 3 s.e.";
    out.expect(within >= 495, "estimator coverage below 99%");
    // undiscounted value estimates match plain spread estimates
    int nu_within = 0;
    const int nu_trials = 50;
    for (int t = 0; t < nu_trials; ++t) {
        int n = uniform_int(rng, 3, 7);
        Graph g = random_digraph(n, std::min(12, 2 * n), rng);
        std::vector<int> seeds{uniform_int(rng, 0, n - 1)};
        Estimate nu = estimate_nu(g, seeds, DecaySchedule::geometric(1.0), 5000,
                                  SeedStream(51000 + t));
        Estimate sg = estimate_sigma(g, seeds, 5000, SeedStream(52000 + t));
        double se = std::hypot(nu.std_error, sg.std_error);
        if (std::abs(nu.mean - sg.mean) <= 3 * se + 1e-12) ++nu_within;
        // same stream: the reduction is exact, sample by sample
        Estimate nu_same = estimate_nu(g, seeds, DecaySchedule::geometric(1.0), 2000,
                                       SeedStream(53000 + t));
        Estimate sg_same = estimate_sigma(g, seeds, 2000, SeedStream(53000 + t));
        out.expect(nu_same.mean == sg_same.mean, "shared-stream reduction broke");
    }
    out.expect(nu_within >= nu_trials - 2, "nu/sigma 3-s.e. coverage too low");
    return out;
}

// ---- criterion 6: edit distances vs exhaustive search ----
Outcome criterion6() {
    Outcome out;
    for (int n = 2; n <= 6; ++n) {
        EditSpace space(n);
        std::vector<int> to_star = edit_distances_to(space, labeled_stars(space));
        UGraph complete(n);
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) complete.add_edge(u, v);
        std::vector<int> to_complete = edit_distances_to(space, {space.encode(complete)});
        for (uint32_t code = 0; code < (uint32_t{1} << space.pairs.size()); ++code) {
            UGraph g = space.decode(code);
            if (ged_star(g) != to_star[code]) {
                out.expect(false, "star formula mismatch at n=" + std::to_string(n));
                break;
            }
            if (ged_complete(g) != to_complete[code]) {
                out.expect(false, "complete formula mismatch at n=" + std::to_string(n));
                break;
            }
        }
    }
    Rng rng(1006);
    std::map<std::pair<int, int>, std::vector<int>> oracle;
    int checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        int k = uniform_int(rng, 2, 3);
        int mu = uniform_int(rng, 2 * k, 7);
        EditSpace space(mu);
        auto key = std::make_pair(mu, k);
        if (!oracle.count(key)) oracle[key] = edit_distances_to(space, labeled_kstars(space, k));
        UGraph g(mu);
        for (int u = 0; u < mu; ++u)
            for (int v = u + 1; v < mu; ++v)
                if (uniform01(rng) < 0.45) g.add_edge(u, v);
        if (ged_kstar(g, k).distance != oracle[key][space.encode(g)]) {
            out.expect(false, "multi-center mismatch at rep " + std::to_string(rep));
            break;
        }
        ++checked;
    }
    out.detail = std::to_string(checked) + "/100 random instances matched";
    return out;
}

// ---- criterion 7: preset topologies form and stay stable ----
Outcome criterion7() {
    Outcome out;
    FormationParams b = FormationParams::geometric_benefits(0.8);
    struct Case {
        const char* name;
        PresetSpec spec;
        int n_max;
    };
    std::vector<Case> cases{
        {"star", {Topology::star}, 20},
        {"complete", {Topology::complete}, 20},
        {"diameter-2", {Topology::diameter, 2}, 20},
        {"bipartite", {Topology::bipartite_turan}, 20},
        {"two-star", {Topology::two_star}, 20},
        {"k-star-3", {Topology::k_star, 2, 3}, 21},
    };
    for (const Case& c : cases) {
        Preset preset = preset_conditions(c.spec, b, ParamPosition::mid);
        int good = 0;
        std::vector<std::string> fails(100);
#pragma omp parallel for schedule(dynamic) reduction(+ : good)
        for (uint64_t seed = 0; seed < 100; ++seed) {
            bool ok = true;
            try {
                FormationRun run = run_recursive_formation(preset.params, c.n_max, preset.base,
                                                           SeedStream(70000 + seed));
                if (run.stopped_growing || run.state.entered != c.n_max) ok = false;
                UGraph view(run.state.entered);
                for (int u = 0; u < run.state.entered; ++u)
                    for (int v = u + 1; v < run.state.entered; ++v)
                        if (run.state.net.has_edge(u, v)) view.add_edge(u, v);
                if (ged_to_target(view, c.spec) != 0) ok = false;
                if (!is_pairwise_stable(view, preset.params).stable) ok = false;
            } catch (const std::exception&) {
                ok = false;
            }
            if (ok) ++good;
        }
        if (good != 100)
            out.expect(false, std::string(c.name) + ": " + std::to_string(good) + "/100");
        else if (!out.detail.empty())
            out.detail += " ";
    }
    if (out.pass) out.detail = "6 topologies x 100/100 runs";
    return out;
}

// ---- criterion 8: healing after an entry-fee dip on the 3-center preset ----
Outcome criterion8() {
    Outcome out;
    FormationParams b = FormationParams::geometric_benefits(0.8);
    PresetSpec spec{Topology::k_star, 2, 3};
    std::vector<int> nodes;
    for (int n = 7; n <= 20; ++n)
        if (n % 3 != 1) nodes.push_back(n);
    int run_id = 0;
    int good = 0, total = 0;
    std::vector<std::string> issues;
    std::vector<std::tuple<int, uint64_t>> runs;
    while (static_cast<int>(runs.size()) < 100)
        for (int n : nodes) {
            if (static_cast<int>(runs.size()) >= 100) break;
            runs.emplace_back(n, 80000 + run_id++);
        }
#pragma omp parallel for schedule(dynamic) reduction(+ : good, total)
    for (size_t i = 0; i < runs.size(); ++i) {
        auto [n, seed] = runs[i];
        int z = n % 3;
        int window = (3 + 1 - z) % 3;
        DeviationSpec dev;
        dev.param = DeviatedParam::entry_factor;
        dev.direction = -1;
        dev.deviation_node = n;
        DeviationOutcome res =
            deviation_experiment(spec, b, dev, std::min(21, n + window + 2), SeedStream(seed));
        bool ok = true;
        bool saw_dev = false;
        for (auto& [size, ged] : res.ged_curve) {
            if (size == n) {
                saw_dev = true;
                if (ged != 2) ok = false;
            }
            if (size == n + window && ged != 0) ok = false;
        }
        if (!saw_dev) ok = false;
        ++total;
        if (ok) ++good;
    }
    out.detail = std::to_string(good) + "/" + std::to_string(total) + " runs healed on schedule";
    out.expect(good == total, "healing schedule violated");
    return out;
}

// ---- criterion 9: metric examples and the regenerated composition table ----
Outcome criterion9() {
    Outcome out;
    out.expect(std::abs(kendall_tau_norm({0, 1, 2}, {1, 2, 0}) - 2.0 / 3) < 1e-12, "kt example");
    out.expect(std::abs(footrule_norm({0, 1, 2}, {1, 2, 0}) - 1.0) < 1e-12, "footrule example");
    out.expect(std::abs(footrule_norm({0, 1, 2, 3, 4}, {1, 4, 2, 0, 3}) - 2.0 / 3) < 1e-12,
               "footrule similarity 1/3 example");
    out.expect(count_at_distance(5, 1) == 4, "count_at_distance(5,1)");

    TrTable t = build_tr(5, {0.05, 0.10, 0.15, 0.20}, 16000, SeedStream(1009), 0.01);
    auto cell = [&](double x, double y) { return t.at(x, y); };
    char buf[100];
    std::snprintf(buf, sizeof buf, "T(0.1,0.1)=%.2f T(0.3,0.4)=%.2f", cell(0.1, 0.1),
                  cell(0.3, 0.4));
    out.detail = buf;
    out.expect(std::abs(cell(0.1, 0.1) - 0.17) <= 0.02, "cell (0.1,0.1) off");
    out.expect(std::abs(cell(0.3, 0.4) - 0.45) <= 0.02, "cell (0.3,0.4) off");
    double step = t.resolution + 1e-9;
    for (int xi = 0; xi <= 100 && out.pass; ++xi)
        for (int yi = 0; yi <= 100; ++yi) {
            double dx = xi * 0.01, dy = yi * 0.01;
            if (std::abs(cell(dx, dy) - cell(dy, dx)) > step) {
                out.expect(false, "symmetry identity broke");
                break;
            }
            if (std::abs(cell(1.0 - dx, dy) - (1.0 - cell(dx, dy))) > step) {
                out.expect(false, "complement identity broke");
                break;
            }
            if (std::abs(cell(1.0 - dx, 1.0 - dy) - cell(dx, dy)) > step) {
                out.expect(false, "double-complement identity broke");
                break;
            }
        }
    return out;
}

// ---- criterion 10: objective properties and the greedy bound ----
Outcome criterion10() {
    Outcome out;
    Rng rng(1010);
    bool rho_submodular = true;
    std::string counterexample;
    for (int rep = 0; rep < 20; ++rep) {
        PairDistanceModel m(6, 5);
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j) m.set(i, j, uniform01(rng), 0.0);
        std::vector<double> rho_all(1 << 6), psi_all(1 << 6);
        for (uint32_t s = 0; s < (uint32_t{1} << 6); ++s) {
            std::vector<int> set;
            for (int v = 0; v < 6; ++v)
                if (s >> v & 1) set.push_back(v);
            rho_all[s] = rho(m, set);
            psi_all[s] = psi(m, set);
        }
        for (auto* f : {&rho_all, &psi_all})
            for (uint32_t s = 0; s < (uint32_t{1} << 6); ++s) {
                out.expect((*f)[s] >= -1e-12, "negativity");
                for (int v = 0; v < 6; ++v)
                    if (!(s >> v & 1))
                        out.expect((*f)[s | (1u << v)] >= (*f)[s] - 1e-12, "monotonicity");
            }
        for (uint32_t s = 0; s < (uint32_t{1} << 6) && rho_submodular; ++s)
            for (uint32_t tt = s; tt < (uint32_t{1} << 6); ++tt) {
                if ((s & tt) != s || s == tt) continue;
                for (int v = 0; v < 6; ++v) {
                    if (tt >> v & 1) continue;
                    uint32_t sv = s | (1u << v), tv = tt | (1u << v);
                    out.expect(psi_all[sv] - psi_all[s] >= psi_all[tv] - psi_all[tt] - 1e-12,
                               "sum objective submodularity");
                    if (rho_all[sv] - rho_all[s] < rho_all[tv] - rho_all[tt] - 1e-12) {
                        rho_submodular = false;
                        char buf[160];
                        std::snprintf(buf, sizeof buf,
                                      "rep %d masks S=%u T=%u v=%d margins %.4f < %.4f", rep, s,
                                      tt, v, rho_all[sv] - rho_all[s], rho_all[tv] - rho_all[tt]);
                        counterexample = buf;
                        break;
                    }
                }
                if (!rho_submodular) break;
            }
    }
    // documented defect: min-aggregation does not preserve submodularity;
    // this leg fails honestly with a concrete counterexample
    out.expect(rho_submodular, "worst-case objective not submodular (" + counterexample + ")");

    RepSelectionInputs inputs;
    for (int rep = 0; rep < 20; ++rep) {
        int n = uniform_int(rng, 5, 8);
        int k = uniform_int(rng, 1, 3);
        PairDistanceModel m(n, 5);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m.set(i, j, uniform01(rng), 0.0);
        auto sel = select_representatives(RepMethod::greedy_min, m, k, inputs,
                                          SeedStream(100000 + rep));
        double got = rho(m, sel);
        double best = 0.0;
        for (const auto& s : all_subsets_of_size(n, k)) best = std::max(best, rho(m, s));
        out.expect(got >= (1 - std::exp(-1.0)) * best - 1e-9, "greedy bound missed");
    }
    return out;
}

// ---- criterion 11: solution-concept coincidence ----
Outcome criterion11() {
    Outcome out;
    Rng rng(1011);
    for (int rep = 0; rep < 200; ++rep) {
        int n = uniform_int(rng, 2, 6);
        std::vector<double> c(n * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) c[i * n + j] = c[j * n + i] = uniform01(rng);
        std::vector<double> phi = shapley_similarity(n, c);
        TuGame game = similarity_game_from_matrix(n, c);
        std::vector<double> gv = gately(game);
        TauDiagnostics diag;
        std::vector<double> tau = tau_value(game, &diag);
        out.expect(std::abs(diag.lambda - 0.5) <= 1e-12, "tau lambda != 1/2");
        for (int i = 0; i < n; ++i) {
            out.expect(std::abs(gv[i] - phi[i]) <= 1e-9, "gately-shapley gap");
            out.expect(std::abs(tau[i] - phi[i]) <= 1e-9, "tau-shapley gap");
        }
    }
    return out;
}

// ---- criterion 12: representative methods keep their ordering ----
Outcome criterion12() {
    Outcome out;
    int good = 0;
    const int corpora = 10;
    std::string per_corpus;
    for (uint64_t cseed = 0; cseed < corpora; ++cseed) {
        SeedStream s(120000 + cseed);
        // random community graph: tight blocks, sparse cross links
        Rng rng = s.sub("graph").rng();
        int n = 100;
        const int blocks = 3;
        int block_of[100];
        for (int v = 0; v < n; ++v) block_of[v] = v < 45 ? 0 : v < 78 ? 1 : 2;
        Graph g(n, false);
        std::set<std::pair<int, int>> used;
        auto link = [&](int u, int v) {
            if (u == v) return false;
            return used.insert(std::make_pair(std::min(u, v), std::max(u, v))).second;
        };
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v)
                if (block_of[u] == block_of[v] && uniform01(rng) < 0.3) link(u, v);
        // a sparse connected backbone across blocks
        std::vector<int> first_of(blocks, -1), count_of(blocks, 0);
        for (int v = 0; v < n; ++v) {
            if (first_of[block_of[v]] < 0) first_of[block_of[v]] = v;
            ++count_of[block_of[v]];
        }
        for (int b = 0; b < blocks; ++b) {
            int u = first_of[b] + uniform_int(rng, 0, count_of[b] - 1);
            int bb = (b + 1) % blocks;
            int v = first_of[bb] + uniform_int(rng, 0, count_of[bb] - 1);
            link(u, v);
        }
        for (int extra = 0; extra < 10; ++extra)
            link(uniform_int(rng, 0, n - 1), uniform_int(rng, 0, n - 1));
        // join any leftover components to the giant one
        while (true) {
            std::vector<int> comp(n, -1);
            std::vector<int> stack{0};
            comp[0] = 0;
            while (!stack.empty()) {
                int u = stack.back();
                stack.pop_back();
                for (auto [a, b] : used) {
                    int w = -1;
                    if (a == u) w = b;
                    if (b == u) w = a;
                    if (w >= 0 && comp[w] < 0) {
                        comp[w] = 0;
                        stack.push_back(w);
                    }
                }
            }
            int lost = -1;
            for (int v = 0; v < n; ++v)
                if (comp[v] < 0) lost = v;
            if (lost < 0) break;
            link(lost, uniform_int(rng, 0, n - 1));
        }
        for (auto [u, v] : used) g.add_edge(u, v, 1.0);
        g.finalize();
        PairDistanceModel truth(n, 5);
        for (const Edge& e : g.edges()) {
            bool same_block = block_of[e.src] == block_of[e.dst];
            double mu = same_block ? 0.03 + 0.07 * uniform01(rng) : 0.35 + 0.2 * uniform01(rng);
            truth.set(e.src, e.dst, mu, 0.02 + 0.03 * uniform01(rng));
        }
        GeneratedCorpus corpus = generate(g, truth, SpreadKind::s_random, 2000, s.sub("corpus"));

        // fit all-pairs means on the first half; evaluate on the second
        int fit_topics = 1000;
        PairDistanceModel fitted(n, 5);
        {
            std::vector<double> acc(n * n, 0.0);
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double total = 0.0;
                    for (int t = 0; t < fit_topics; ++t)
                        total += kendall_tau_norm(corpus.topics[t][i], corpus.topics[t][j]);
                    acc[i * n + j] = total / fit_topics;
                }
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) fitted.set(i, j, acc[i * n + j], 0.05);
        }

        Rule rule = rule_from_string("plurality");
        Aggregator f = make_aggregator(rule);
        std::vector<AggregateResult> truths(corpus.topics.size() - fit_topics);
#pragma omp parallel for schedule(dynamic)
        for (size_t t = fit_topics; t < corpus.topics.size(); ++t)
            truths[t - fit_topics] = f(corpus.topics[t]);

        auto eval_weighted = [&](const std::vector<int>& m, uint64_t seed) {
            // expectation over the uniform tie-break in the assignment
            double total = 0.0;
            int draws = 5;
            for (int a = 0; a < draws; ++a) {
                Rng arng = SeedStream(seed).sub(a).rng();
                RepresentativeAssignment asg = assign_representatives(fitted, m, arng);
                for (size_t t = fit_topics; t < corpus.topics.size(); ++t)
                    total += delta_error(truths[t - fit_topics],
                                         f(weighted_profile(corpus.topics[t], asg)));
            }
            return total / (draws * (corpus.topics.size() - fit_topics));
        };
        auto eval_unweighted = [&](const std::vector<int>& m) {
            double total = 0.0;
            for (size_t t = fit_topics; t < corpus.topics.size(); ++t) {
                Profile q;
                for (int v : m) q.push_back(corpus.topics[t][v]);
                total += delta_error(truths[t - fit_topics], f(q));
            }
            return total / (corpus.topics.size() - fit_topics);
        };

        RepSelectionInputs inputs;
        inputs.graph = &g;
        bool ordered = true;
        for (int k : {1, 3, 5}) {
            std::vector<int> gs =
                select_representatives(RepMethod::greedy_sum, fitted, k, inputs, s.sub("gs"));
            std::vector<int> dc =
                select_representatives(RepMethod::degree_cen, fitted, k, inputs, s.sub("dc"));
            double e_gs = eval_weighted(gs, 9000 + k);
            double e_dc = eval_unweighted(dc);
            double e_rp = 0.0;
            for (uint64_t draw = 0; draw < 5; ++draw)
                e_rp += eval_unweighted(select_representatives(
                    RepMethod::random_poll, fitted, k, inputs, s.sub("rp").sub(draw)));
            e_rp /= 5;
            // tolerance of one hundredth on the unit distance scale:
            // about two paired standard errors of a 1000-topic mean, so
            // genuine reversals fail while measurement ties do not
            const double tol = 0.01;
            if (!(e_gs <= e_dc + tol && e_dc <= e_rp + tol)) ordered = false;
        }
        if (ordered) ++good;
        per_corpus += ordered ? "+" : "-";
    }
    out.detail = std::to_string(good) + "/10 corpora ordered (" + per_corpus + ")";
    out.expect(good >= 8, "method ordering held in fewer than 8 corpora");
    return out;
}

// ---- criterion 13: insensitivity tester controls ----
Outcome criterion13() {
    Outcome out;
    Rng rng(1013);
    auto perms = all_perms(5);
    std::vector<Profile> bases;
    for (int b = 0; b < 4; ++b) {
        Profile p;
        for (int v = 0; v < 9; ++v) p.push_back(perms[uniform_int(rng, 0, 119)]);
        bases.push_back(p);
    }
    // honest grid: only mean-faithful pairs
    std::vector<double> mu_grid{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> sigma_all{0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.28};
    int cells_checked = 0, anti_flags = 0;
    for (double mu : mu_grid) {
        std::vector<double> sigmas;
        for (double sg : sigma_all)
            if (sigma_permissible(mu, sg, 5)) sigmas.push_back(sg);
        if (sigmas.empty()) continue;
        auto dict = ewi_test(make_aggregator(rule_from_string("dictatorship(0)")), bases, {mu},
                             sigmas, 400, SeedStream(130000 + static_cast<uint64_t>(mu * 100)));
        for (const EwiCell& c : dict) {
            ++cells_checked;
            out.expect(!c.violated, "dictatorship flagged at mu=" + std::to_string(c.mu_d) +
                                        " sigma=" + std::to_string(c.sigma_d));
        }
        auto anti = ewi_test(make_aggregator(rule_from_string("reverse-plurality")), bases, {mu},
                             sigmas, 400, SeedStream(131000 + static_cast<uint64_t>(mu * 100)));
        for (const EwiCell& c : anti)
            if (c.violated) ++anti_flags;
    }
    out.detail = std::to_string(cells_checked) + " cells; perverse rule flagged " +
                 std::to_string(anti_flags);
    out.expect(cells_checked >= 10, "grid too small");
    out.expect(anti_flags > 0, "perverse rule never flagged");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"1 exact two-phase values on the 4-node instance", criterion1},
        {"2 dominance and delay monotonicity (50 random graphs)", criterion2},
        {"3 two-phase gain band on the 77-node network", criterion3},
        {"4 joint-search policy shape under decay", criterion4},
        {"5 estimator agreement with enumeration", criterion5},
        {"6 edit distances vs exhaustive search", criterion6},
        {"7 preset topologies form and stabilize (100/100)", criterion7},
        {"8 entry-fee deviation heals on schedule", criterion8},
        {"9 metric examples and composition table", criterion9},
        {"10 objective properties and the greedy bound", criterion10},
        {"11 solution-concept coincidence", criterion11},
        {"12 representative-method ordering", criterion12},
        {"13 insensitivity tester controls", criterion13},
    };
    int only = argc > 1 ? std::atoi(argv[1]) : 0;
    bool all_pass = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (only > 0 && static_cast<int>(i + 1) != only) continue;
        double start = now_s();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double secs = now_s() - start;
        std::printf("[%s] criterion %s (%.1fs)%s%s\n", out.pass ? "PASS" : "FAIL",
                    criteria[i].first, secs, out.detail.empty() ? "" : " — ",
                    out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) all_pass = false;
    }
    return all_pass ? 0 : 1;
}
