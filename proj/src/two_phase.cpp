#include "sna/two_phase.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <numeric>
#include <unordered_map>

namespace sna {

Observation observe(const DiffusionTrace& trace, int d) {
    if (d < 0) throw ContractError("observe: negative step");
    Observation y;
    y.step = d;
    for (int t = 0; t < static_cast<int>(trace.steps.size()); ++t) {
        if (t < d)
            y.already.insert(y.already.end(), trace.steps[t].begin(), trace.steps[t].end());
        else if (t == d)
            y.recent = trace.steps[t];
    }
    std::sort(y.already.begin(), y.already.end());
    std::sort(y.recent.begin(), y.recent.end());
    return y;
}

SelectorId selector_from_string(const std::string& s) {
    if (s == "greedy") return SelectorId::greedy;
    if (s == "gdd") return SelectorId::gdd;
    if (s == "sd") return SelectorId::sd;
    if (s == "wd") return SelectorId::wd;
    if (s == "face") return SelectorId::face;
    if (s == "spic") return SelectorId::spic;
    if (s == "rmax") return SelectorId::rmax;
    throw ContractError("unknown selector '" + s + "'");
}

namespace {

// Deterministic diffusion on a live graph, truncated after step d.
// Returns (already, recent) as bitmasks over nodes.
struct LayeredReach {
    std::vector<uint8_t> already;
    std::vector<uint8_t> recent;
};

LayeredReach reach_to_step(const LiveGraph& x, const std::vector<int>& seeds, int d) {
    const Graph& g = *x.parent;
    LayeredReach out;
    out.already.assign(g.node_count(), 0);
    out.recent.assign(g.node_count(), 0);
    std::vector<uint8_t> seen(g.node_count(), 0);
    std::vector<int> frontier;
    for (int s : seeds)
        if (!seen[s]) {
            seen[s] = 1;
            frontier.push_back(s);
        }
    int t = 0;
    while (t < d && !frontier.empty()) {
        std::vector<int> next;
        for (int u : frontier) {
            out.already[u] = 1;
            for (auto [v, ei] : g.out(u))
                if (x.present[ei] && !seen[v]) {
                    seen[v] = 1;
                    next.push_back(v);
                }
        }
        frontier = std::move(next);
        ++t;
    }
    for (int u : frontier) out.recent[u] = 1;
    return out;
}

// Reach count from seeds in x, ignoring nodes marked removed.
int reach_excluding(const LiveGraph& x, const std::vector<int>& seeds,
                    const std::vector<uint8_t>& removed) {
    const Graph& g = *x.parent;
    std::vector<uint8_t> vis(g.node_count(), 0);
    std::vector<int> stack;
    int count = 0;
    for (int s : seeds)
        if (!removed[s] && !vis[s]) {
            vis[s] = 1;
            ++count;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (auto [v, ei] : g.out(u))
            if (x.present[ei] && !removed[v] && !vis[v]) {
                vis[v] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count;
}

void enumerate_k_subsets(const std::vector<int>& pool, int k,
                         const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> pick(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            visit(pick);
            return;
        }
        for (int i = start; i <= static_cast<int>(pool.size()) - (k - depth); ++i) {
            pick[depth] = pool[i];
            rec(i + 1, depth + 1);
        }
    };
    if (k == 0)
        visit({});
    else
        rec(0, 0);
}

long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double eval_f_exact(const Graph& g, const std::vector<int>& s1, int d, int k2, int edge_cap,
                    long long subset_cap) {
    for (int s : s1) g.check_node(s);
    if (d < 0 || k2 < 0) throw ContractError("eval_f_exact: negative delay or budget");

    // group live graphs by observation
    struct Group {
        std::vector<std::vector<uint8_t>> members;  // edge-presence vectors
        std::vector<double> probs;
        std::vector<uint8_t> already;
        std::vector<int> recent;
    };
    std::map<std::pair<std::vector<uint8_t>, std::vector<uint8_t>>, Group> groups;
    enumerate_live_graphs(
        g,
        [&](const LiveGraph& x) {
            LayeredReach r = s1.empty() ? LayeredReach{std::vector<uint8_t>(g.node_count(), 0),
                                                       std::vector<uint8_t>(g.node_count(), 0)}
                                        : reach_to_step(x, s1, d);
            Group& grp = groups[{r.already, r.recent}];
            if (grp.members.empty()) {
                grp.already = r.already;
                for (int v = 0; v < g.node_count(); ++v)
                    if (r.recent[v]) grp.recent.push_back(v);
            }
            grp.members.push_back(x.present);
            grp.probs.push_back(x.probability);
        },
        edge_cap);

    double total = 0.0;
    for (auto& [key, grp] : groups) {
        double p_y = std::accumulate(grp.probs.begin(), grp.probs.end(), 0.0);
        int already_count = 0;
        std::vector<int> pool;
        std::vector<uint8_t> in_s1(g.node_count(), 0);
        for (int s : s1) in_s1[s] = 1;
        for (int v = 0; v < g.node_count(); ++v) {
            if (grp.already[v])
                ++already_count;
            else if (!in_s1[v])
                pool.push_back(v);
        }
        // recent nodes stay in the pool complement: they are pre-seeded, not selectable
        std::vector<int> selectable;
        std::vector<uint8_t> recent_mask(g.node_count(), 0);
        for (int v : grp.recent) recent_mask[v] = 1;
        for (int v : pool)
            if (!recent_mask[v]) selectable.push_back(v);

        int k2_eff = std::min<int>(k2, static_cast<int>(selectable.size()));
        if (binomial(static_cast<int>(selectable.size()), k2_eff) > subset_cap)
            throw CapError("eval_f_exact: second-phase subset count exceeds cap");

        LiveGraph x;
        x.parent = &g;
        double best = -1.0;
        enumerate_k_subsets(selectable, k2_eff, [&](const std::vector<int>& s2) {
            std::vector<int> seeds = grp.recent;
            seeds.insert(seeds.end(), s2.begin(), s2.end());
            double acc = 0.0;
            for (size_t i = 0; i < grp.members.size(); ++i) {
                x.present = grp.members[i];
                acc += grp.probs[i] * reach_excluding(x, seeds, grp.already);
            }
            best = std::max(best, acc);
        });
        total += p_y * already_count + best;
    }
    return total;
}

namespace {

Graph residual_graph(const Graph& g, const std::vector<uint8_t>& removed,
                     std::vector<int>* fwd_map, std::vector<int>* rev_map) {
    int n = g.node_count();
    fwd_map->assign(n, -1);
    rev_map->clear();
    int m = 0;
    for (int v = 0; v < n; ++v)
        if (!removed[v]) {
            (*fwd_map)[v] = m++;
            rev_map->push_back(v);
        }
    Graph res(m, true);
    for (const Edge& e : g.edges())
        if (!removed[e.src] && !removed[e.dst])
            res.add_edge((*fwd_map)[e.src], (*fwd_map)[e.dst], e.weight);
    res.finalize();
    return res;
}

}  // namespace

Estimate eval_h(const Graph& g, const std::vector<int>& s1, int d, int k2, int m1, int m2,
                const SeedStream& stream, const DecaySchedule& decay, Exec exec) {
    for (int s : s1) g.check_node(s);
    if (m1 < 1 || m2 < 1) throw ContractError("eval_h: simulation counts must be >= 1");
    if (s1.empty() && k2 == 0) return {0.0, 0.0};

    std::vector<double> samples(m1);
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int outer = 0; outer < m1; ++outer) {
        Rng rng = stream.sub("h-outer").rng_at(outer);
        DiffusionTrace phase1;
        if (!s1.empty()) phase1 = simulate_ic(g, s1, rng);
        // truncate at step d
        DiffusionTrace trunc;
        for (int t = 0; t <= d && t < static_cast<int>(phase1.steps.size()); ++t)
            trunc.steps.push_back(phase1.steps[t]);
        Observation y = observe(trunc, d);

        std::vector<uint8_t> removed(g.node_count(), 0);
        for (int v : y.already) removed[v] = 1;
        std::vector<int> fwd, rev;
        Graph res = residual_graph(g, removed, &fwd, &rev);
        std::vector<int> recent_res;
        for (int v : y.recent) recent_res.push_back(fwd[v]);
        int k2_eff = std::min<int>(k2, res.node_count() - static_cast<int>(recent_res.size()));
        std::vector<int> s2_res =
            k2_eff > 0 ? gdd_select(res, k2_eff, recent_res) : std::vector<int>{};

        std::vector<int> seeds_res = recent_res;
        seeds_res.insert(seeds_res.end(), s2_res.begin(), s2_res.end());

        double already_value = 0.0;
        for (int t = 0; t < static_cast<int>(trunc.steps.size()) && t < d; ++t)
            already_value += decay.at(t) * trunc.steps[t].size();

        double acc = 0.0;
        SeedStream inner = stream.sub("h-inner").sub(outer);
        for (int j = 0; j < m2; ++j) {
            double v = already_value;
            if (!seeds_res.empty()) {
                Rng rng2 = inner.rng_at(j);
                DiffusionTrace cont = simulate_ic(res, seeds_res, rng2);
                for (int t = 0; t < static_cast<int>(cont.steps.size()); ++t)
                    v += decay.at(d + t) * cont.steps[t].size();
            }
            acc += v;
        }
        samples[outer] = acc / m2;
    }
    double sum = 0.0, sumsq = 0.0;
    for (double v : samples) {
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / m1;
    double var = m1 > 1 ? std::max(0.0, (sumsq - m1 * mean * mean) / (m1 - 1)) : 0.0;
    return {mean, std::sqrt(var / m1)};
}

namespace {

std::vector<int> select_single_phase(const Graph& g, int k, SelectorId id, const Objective& obj,
                                     const SeedStream& stream) {
    std::vector<int> all(g.node_count());
    std::iota(all.begin(), all.end(), 0);
    if (k >= g.node_count()) return all;
    switch (id) {
        case SelectorId::greedy:
            return greedy_hill_climb(obj, all, k).selected;
        case SelectorId::gdd:
            return gdd_select(g, k);
        case SelectorId::sd:
            return single_discount(g, k);
        case SelectorId::wd:
            return weighted_discount(g, k);
        case SelectorId::face: {
            CeParams p;
            return ce_subset_search(obj, all, k, p, stream.sub("face")).best_sample;
        }
        case SelectorId::spic:
            return spic_select(g, k, obj, 5 * g.node_count(), stream.sub("spic"));
        case SelectorId::rmax:
            return rmax_select(obj, all, k, 5 * g.node_count(), stream.sub("rmax"));
    }
    throw ContractError("unreachable selector");
}

// Phase-2 selection on the residual graph with the recent set pre-seeded.
std::vector<int> select_second_phase(const Graph& res, int k2, const std::vector<int>& recent_res,
                                     SelectorId id, int m2, const SeedStream& stream) {
    int free_nodes = res.node_count() - static_cast<int>(recent_res.size());
    int k2_eff = std::min(k2, free_nodes);
    if (k2_eff <= 0) return {};
    if (id == SelectorId::gdd || id == SelectorId::sd || id == SelectorId::wd) {
        if (id == SelectorId::gdd) return gdd_select(res, k2_eff, recent_res);
        // discount heuristics ignore the pre-seeded set beyond exclusion
        std::vector<uint8_t> pre(res.node_count(), 0);
        for (int v : recent_res) pre[v] = 1;
        std::vector<int> ranked =
            id == SelectorId::sd ? single_discount(res, res.node_count())
                                 : weighted_discount(res, res.node_count());
        std::vector<int> out;
        for (int v : ranked) {
            if (pre[v]) continue;
            out.push_back(v);
            if (static_cast<int>(out.size()) == k2_eff) break;
        }
        return out;
    }
    // value-driven: maximize sigma(recent u S2) over free nodes
    Objective obj;
    obj.exec = Exec::serial;  // callers parallelize over outer runs
    SeedStream eval_stream = stream.sub("phase2-eval");
    obj.eval = [&res, &recent_res, m2, eval_stream](const std::vector<int>& s2) {
        std::vector<int> seeds = recent_res;
        seeds.insert(seeds.end(), s2.begin(), s2.end());
        if (seeds.empty()) return 0.0;
        uint64_t fp = 0x9ae16a3b2f90404fULL;
        std::vector<int> sorted = seeds;
        std::sort(sorted.begin(), sorted.end());
        for (int v : sorted) fp = mix64(fp ^ mix64(static_cast<uint64_t>(v) + 1));
        return estimate_sigma(res, seeds, m2, eval_stream.sub(fp), Exec::serial).mean;
    };
    std::vector<int> candidates;
    std::vector<uint8_t> pre(res.node_count(), 0);
    for (int v : recent_res) pre[v] = 1;
    for (int v = 0; v < res.node_count(); ++v)
        if (!pre[v]) candidates.push_back(v);
    switch (id) {
        case SelectorId::greedy:
            return greedy_hill_climb(obj, candidates, k2_eff).selected;
        case SelectorId::face: {
            CeParams p;
            return ce_subset_search(obj, candidates, k2_eff, p, stream.sub("phase2-face")).best_sample;
        }
        case SelectorId::rmax:
            return rmax_select(obj, candidates, k2_eff, 5 * res.node_count(),
                               stream.sub("phase2-rmax"));
        case SelectorId::spic:
            return spic_select(res, k2_eff, obj, 5 * res.node_count(), stream.sub("phase2-spic"));
        default:
            throw ContractError("unsupported phase-2 selector");
    }
}

}  // namespace

TwoPhaseRun run_two_phase(const Graph& g, const TwoPhaseConfig& cfg, const SeedStream& stream) {
    if (cfg.k1 < 0 || cfg.k1 > cfg.k) throw ContractError("invalid budget split");
    if (cfg.k > g.node_count()) throw ContractError("budget exceeds node count");

    TwoPhaseRun run;
    // phase-1 objective: myopic uses expected spread; farsighted scores the
    // full two-phase completion of the candidate set.
    Objective phase1_obj;
    SeedStream s = stream;
    if (cfg.mode == PhaseMode::myopic || cfg.k1 == cfg.k) {
        phase1_obj = sigma_objective(g, cfg.m1, s.sub("phase1-sigma"));
    } else {
        SeedStream hs = s.sub("phase1-h");
        const Graph* gp = &g;
        TwoPhaseConfig c = cfg;
        int d_for_h = cfg.d.value_or(g.node_count());
        phase1_obj.eval = [gp, c, d_for_h, hs](const std::vector<int>& s1) {
            return eval_h(*gp, s1, d_for_h, c.k2(), std::max(1, c.m1 / 10), std::max(1, c.m2 / 10),
                          hs, c.decay, Exec::serial)
                .mean;
        };
    }
    run.s1 = select_single_phase(g, cfg.k1, cfg.selector, phase1_obj, s.sub("phase1"));
    std::sort(run.s1.begin(), run.s1.end());

    if (cfg.k1 == cfg.k) {  // single phase
        Rng rng = s.sub("phase1-run").rng();
        run.phase1 = run.s1.empty() ? DiffusionTrace{} : simulate_ic(g, run.s1, rng);
        run.total_activated = run.phase1.total_activated();
        return run;
    }

    // realize phase 1
    Rng rng = s.sub("phase1-run").rng();
    DiffusionTrace full = run.s1.empty() ? DiffusionTrace{} : simulate_ic(g, run.s1, rng);
    int d = cfg.d.value_or(static_cast<int>(full.steps.size()));  // stagnation when unset
    for (int t = 0; t <= d && t < static_cast<int>(full.steps.size()); ++t)
        run.phase1.steps.push_back(full.steps[t]);
    run.observed_step = d;
    Observation y = observe(run.phase1, d);

    std::vector<uint8_t> removed(g.node_count(), 0);
    for (int v : y.already) removed[v] = 1;
    std::vector<int> fwd, rev;
    Graph res = residual_graph(g, removed, &fwd, &rev);
    std::vector<int> recent_res;
    for (int v : y.recent) recent_res.push_back(fwd[v]);

    int free_nodes = res.node_count() - static_cast<int>(recent_res.size());
    run.shortfall = std::max(0, cfg.k2() - free_nodes);
    std::vector<int> s2_res =
        select_second_phase(res, cfg.k2(), recent_res, cfg.selector, cfg.m2, s.sub("phase2"));
    for (int v : s2_res) run.s2.push_back(rev[v]);
    std::sort(run.s2.begin(), run.s2.end());

    std::vector<int> seeds_res = recent_res;
    seeds_res.insert(seeds_res.end(), s2_res.begin(), s2_res.end());
    if (!seeds_res.empty()) {
        Rng rng2 = s.sub("phase2-run").rng();
        run.phase2 = simulate_ic(res, seeds_res, rng2);
        for (auto& step : run.phase2.steps)
            for (int& v : step) v = rev[v];
    }
    run.total_activated = static_cast<int>(y.already.size()) + run.phase2.total_activated();
    return run;
}

Estimate evaluate_two_phase_policy(const Graph& g, const std::vector<int>& s1,
                                   const TwoPhaseConfig& cfg, int runs, const SeedStream& stream,
                                   Exec exec) {
    if (runs < 1) throw ContractError("evaluate_two_phase_policy: runs must be >= 1");
    std::vector<double> samples(runs);
    // memoized phase-2 selections, keyed by the observation
    using Key = std::pair<std::vector<int>, std::vector<int>>;
#pragma omp parallel if (exec == Exec::parallel)
    {
        std::map<Key, std::vector<int>> cache;
#pragma omp for schedule(dynamic)
        for (int i = 0; i < runs; ++i) {
            Rng rng = stream.sub("eval-run").rng_at(i);
            DiffusionTrace full = s1.empty() ? DiffusionTrace{} : simulate_ic(g, s1, rng);
            int d = cfg.d.value_or(static_cast<int>(full.steps.size()));
            DiffusionTrace trunc;
            for (int t = 0; t <= d && t < static_cast<int>(full.steps.size()); ++t)
                trunc.steps.push_back(full.steps[t]);
            Observation y = observe(trunc, d);
            std::vector<uint8_t> removed(g.node_count(), 0);
            for (int v : y.already) removed[v] = 1;
            std::vector<int> fwd, rev;
            Graph res = residual_graph(g, removed, &fwd, &rev);
            std::vector<int> recent_res;
            for (int v : y.recent) recent_res.push_back(fwd[v]);

            Key key{y.already, y.recent};
            auto it = cache.find(key);
            std::vector<int> s2;
            if (it != cache.end()) {
                s2 = it->second;
            } else {
                uint64_t fp = 0x51ed2701ULL;
                for (int v : y.already) fp = mix64(fp ^ mix64(v + 1));
                for (int v : y.recent) fp = mix64(fp ^ mix64(v + 101));
                std::vector<int> s2_res = select_second_phase(
                    res, cfg.k2(), recent_res, cfg.selector, cfg.m2, stream.sub("eval-sel").sub(fp));
                for (int v : s2_res) s2.push_back(rev[v]);
                cache.emplace(key, s2);
            }
            std::vector<int> seeds_res = recent_res;
            for (int v : s2) seeds_res.push_back(fwd[v]);
            double value = 0.0;
            for (int t = 0; t < static_cast<int>(trunc.steps.size()) && t < d; ++t)
                value += cfg.decay.at(t) * trunc.steps[t].size();
            if (!seeds_res.empty()) {
                Rng rng2 = stream.sub("eval-cont").rng_at(i);
                DiffusionTrace cont = simulate_ic(res, seeds_res, rng2);
                for (int t = 0; t < static_cast<int>(cont.steps.size()); ++t)
                    value += cfg.decay.at(d + t) * cont.steps[t].size();
            }
            samples[i] = value;
        }
    }
    double sum = 0.0, sumsq = 0.0;
    for (double v : samples) {
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / runs;
    double var = runs > 1 ? std::max(0.0, (sumsq - runs * mean * mean) / (runs - 1)) : 0.0;
    return {mean, std::sqrt(var / runs)};
}

BudgetSplitResult optimize_budget_split(const Graph& g, int k, int d, SplitEvaluator evaluator,
                                        const std::vector<int>& k1_grid, const TwoPhaseConfig& cfg,
                                        const SeedStream& stream) {
    BudgetSplitResult out;
    double best = -std::numeric_limits<double>::infinity();
    for (int k1 : k1_grid) {
        if (k1 < 0 || k1 > k) throw ContractError("budget grid point outside [0,k]");
        BudgetSplitPoint pt;
        pt.k1 = k1;
        if (evaluator == SplitEvaluator::f_exact) {
            // exact: best S1 of size k1 by exhaustive search
            std::vector<int> all(g.node_count());
            std::iota(all.begin(), all.end(), 0);
            double best_f = -1.0;
            enumerate_k_subsets(all, k1, [&](const std::vector<int>& s1) {
                best_f = std::max(best_f, eval_f_exact(g, s1, d, k - k1));
            });
            pt.value = best_f;
        } else {
            TwoPhaseConfig c = cfg;
            c.k = k;
            c.k1 = k1;
            c.d = d;
            SeedStream s = stream.sub("split").sub(k1);
            Objective obj = sigma_objective(g, c.m1, s.sub("sel"));
            std::vector<int> s1 = select_single_phase(g, k1, c.selector, obj, s.sub("phase1"));
            Estimate e = k1 == k
                             ? estimate_sigma(g, s1, c.m1, s.sub("eval-sp"))
                             : eval_h(g, s1, d, k - k1, c.m1, c.m2, s.sub("eval"), c.decay);
            pt.value = e.mean;
            pt.std_error = e.std_error;
        }
        out.curve.push_back(pt);
        if (pt.value > best) {
            best = pt.value;
            out.best_k1 = k1;
            out.best_value = pt.value;
        }
    }
    return out;
}

FaceJointResult face_joint(const Graph& g, int k, int d_max, const TwoPhaseConfig& cfg,
                           const CeParams& params, const SeedStream& stream) {
    if (d_max < 0) throw ContractError("face_joint: negative delay bound");
    int n = g.node_count();
    CeParams p = params;
    if (p.n_min == 0) p.n_min = n;
    if (p.n_max == 0) p.n_max = 20 * n;
    if (p.n_elite == 0) p.n_elite = (n + 3) / 4;

    // categorical distributions over k1 and d, node-inclusion vector over nodes
    std::vector<double> k1_dist(k, 1.0 / k);            // values 1..k
    if (d_max < 1) throw ContractError("face_joint: needs d_max >= 1");
    std::vector<double> d_dist(d_max, 1.0 / d_max);  // values 1..d_max; k1 = k forces d = 0
    std::vector<double> w = gdd_initial_weights(g);
    double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    double mean_k1 = (k + 1) / 2.0;
    std::vector<double> node_p(n);
    for (int i = 0; i < n; ++i) node_p[i] = mean_k1 * w[i] / wsum;
    // redistribute surplus above 1 proportionally
    for (int pass = 0; pass < 64; ++pass) {
        double surplus = 0.0, open_sum = 0.0;
        for (double v : node_p) {
            if (v > 1.0)
                surplus += v - 1.0;
            else
                open_sum += v;
        }
        if (surplus <= 1e-12) break;
        for (double& v : node_p) {
            if (v > 1.0)
                v = 1.0;
            else if (open_sum > 0.0)
                v += surplus * (v / open_sum);
        }
    }

    FaceJointResult res;
    res.best_value = -std::numeric_limits<double>::infinity();
    double prev_gamma = -std::numeric_limits<double>::infinity();
    int stall = 0;
    auto pick_categorical = [](const std::vector<double>& dist, Rng& rng) {
        double t = uniform01(rng);
        double acc = 0.0;
        for (size_t i = 0; i < dist.size(); ++i) {
            acc += dist[i];
            if (t <= acc) return static_cast<int>(i);
        }
        return static_cast<int>(dist.size()) - 1;
    };
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    for (int iter = 0; iter < p.max_iters; ++iter) {
        int batch = p.n_min;
        std::vector<JointSample> samples(batch);
        {
            Rng rng = stream.sub("joint-draw").rng_at(iter);
            double p_total = std::accumulate(node_p.begin(), node_p.end(), 0.0);
            for (int i = 0; i < batch; ++i) {
                int k1 = pick_categorical(k1_dist, rng) + 1;
                int d = k1 == k ? 0 : pick_categorical(d_dist, rng) + 1;
                std::vector<double> scaled(n);
                for (int j = 0; j < n; ++j)
                    scaled[j] = std::min(1.0, node_p[j] * k1 / std::max(p_total, 1e-12));
                samples[i] = {k1, d, sample_fixed_size(scaled, all, k1, rng)};
            }
        }
        std::vector<double> vals(batch);
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < batch; ++i) {
            const JointSample& smp = samples[i];
            SeedStream es = stream.sub("joint-eval").sub(iter * 100003 + i);
            if (smp.k1 == k) {
                Estimate e = estimate_nu(g, smp.s1, cfg.decay, cfg.m1, es, Exec::serial);
                vals[i] = e.mean;
            } else {
                Estimate e = eval_h(g, smp.s1, smp.d, k - smp.k1, cfg.m1, cfg.m2, es, cfg.decay,
                                    Exec::serial);
                vals[i] = e.mean;
            }
        }
        // rank distinct samples only, as in the subset search
        std::vector<int> order;
        {
            std::set<std::tuple<int, int, std::vector<int>>> seen;
            std::vector<int> all_idx(batch);
            std::iota(all_idx.begin(), all_idx.end(), 0);
            std::stable_sort(all_idx.begin(), all_idx.end(),
                             [&](int a, int b) { return vals[a] > vals[b]; });
            for (int i : all_idx) {
                std::vector<int> key = samples[i].s1;
                std::sort(key.begin(), key.end());
                if (seen.insert({samples[i].k1, samples[i].d, key}).second) order.push_back(i);
            }
        }
        int elite = std::min<int>(p.n_elite, static_cast<int>(order.size()));
        double gamma = vals[order[elite - 1]];
        if (vals[order[0]] > res.best_value) {
            res.best_value = vals[order[0]];
            res.best = samples[order[0]];
        }
        res.best_value_by_iter.push_back(res.best_value);

        std::vector<double> k1_freq(k, 0.0), d_freq(d_max, 0.0), node_freq(n, 0.0);
        double wsum_elite = 0.0;
        for (size_t e = 0; e < order.size() && (static_cast<int>(e) < elite || vals[order[e]] >= gamma - p.gamma_tol); ++e) {
            double wgt = std::max(vals[order[e]], 1e-12);
            wsum_elite += wgt;
            const JointSample& smp = samples[order[e]];
            k1_freq[smp.k1 - 1] += wgt;
            if (smp.k1 < k) d_freq[smp.d - 1] += wgt;
            for (int v : smp.s1) node_freq[v] += wgt;
        }
        for (int i = 0; i < k; ++i)
            k1_dist[i] = (1 - p.alpha) * k1_dist[i] + p.alpha * k1_freq[i] / wsum_elite;
        double d_wsum = std::accumulate(d_freq.begin(), d_freq.end(), 0.0);
        if (d_wsum > 0.0)
            for (int i = 0; i < d_max; ++i)
                d_dist[i] = (1 - p.alpha) * d_dist[i] + p.alpha * d_freq[i] / d_wsum;
        for (int i = 0; i < n; ++i)
            node_p[i] = (1 - p.alpha) * node_p[i] + p.alpha * node_freq[i] / wsum_elite;

        res.iterations = iter + 1;
        if (std::abs(gamma - prev_gamma) <= p.gamma_tol) {
            if (++stall >= 2) break;
        } else {
            stall = 0;
        }
        prev_gamma = gamma;
    }
    if (res.best.k1 == k) res.best.d = 0;
    res.k1_mode = 1 + static_cast<int>(std::max_element(k1_dist.begin(), k1_dist.end()) -
                                       k1_dist.begin());
    res.d_mode = res.k1_mode == k
                     ? 0
                     : 1 + static_cast<int>(std::max_element(d_dist.begin(), d_dist.end()) -
                                            d_dist.begin());
    return res;
}

GoldenResult golden_section_k1(int k, int d_max, const std::function<double(int, int)>& evaluator,
                               InnerDSearch inner, int tol) {
    GoldenResult out;
    std::map<int, std::pair<int, double>> memo;  // k1 -> (best d, value)
    auto eval_k1 = [&](int k1) {
        auto it = memo.find(k1);
        if (it != memo.end()) return it->second.second;
        int best_d = 0;
        double best_v;
        if (k1 == k) {
            best_v = evaluator(k1, 0);
        } else if (inner == InnerDSearch::sequential_from_zero) {
            best_v = evaluator(k1, 0);
            for (int d = 1; d <= d_max; ++d) {
                double v = evaluator(k1, d);
                if (v > best_v) {
                    best_v = v;
                    best_d = d;
                } else {
                    break;  // unimodal in d
                }
            }
        } else {
            // golden section over integer d
            const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
            int lo = 0, hi = d_max;
            std::map<int, double> dmemo;
            auto ev = [&](int d) {
                auto jt = dmemo.find(d);
                if (jt != dmemo.end()) return jt->second;
                double v = evaluator(k1, d);
                dmemo[d] = v;
                return v;
            };
            while (hi - lo > 2) {
                int x1 = hi - static_cast<int>(std::lround(phi * (hi - lo)));
                int x2 = lo + static_cast<int>(std::lround(phi * (hi - lo)));
                if (x1 >= x2) break;
                if (ev(x1) > ev(x2))
                    hi = x2;
                else
                    lo = x1;
            }
            best_v = ev(lo);
            best_d = lo;
            for (int d = lo + 1; d <= hi; ++d)
                if (ev(d) > best_v) {
                    best_v = ev(d);
                    best_d = d;
                }
        }
        memo[k1] = {best_d, best_v};
        out.probes.emplace_back(k1, best_v);
        return best_v;
    };

    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    int lo = 0, hi = k;
    while (hi - lo > std::max(2, tol)) {
        int x1 = hi - static_cast<int>(std::lround(phi * (hi - lo)));
        int x2 = lo + static_cast<int>(std::lround(phi * (hi - lo)));
        if (x1 >= x2) break;
        if (eval_k1(x1) > eval_k1(x2))
            hi = x2;
        else
            lo = x1;
    }
    for (int k1 = lo; k1 <= hi; ++k1) eval_k1(k1);
    double best = -std::numeric_limits<double>::infinity();
    for (auto& [k1, dv] : memo) {
        if (dv.second > best) {
            best = dv.second;
            out.best_k1 = k1;
            out.best_d = dv.first;
            out.best_value = dv.second;
        }
    }
    return out;
}

}  // namespace sna
