#include "sna/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sna {

namespace {

uint64_t set_fingerprint(const std::vector<int>& s) {
    std::vector<int> sorted = s;
    std::sort(sorted.begin(), sorted.end());
    uint64_t h = 0x9ae16a3b2f90404fULL;
    for (int v : sorted) h = mix64(h ^ mix64(static_cast<uint64_t>(v) + 1));
    return h;
}

}  // namespace

Objective sigma_objective(const Graph& g, int iterations, const SeedStream& stream, Exec exec) {
    Objective obj;
    obj.exec = exec;
    obj.eval = [&g, iterations, stream, exec](const std::vector<int>& s) {
        if (s.empty()) return 0.0;
        SeedStream derived = stream.sub(set_fingerprint(s));
        return estimate_sigma(g, s, iterations, derived, exec).mean;
    };
    return obj;
}

Objective exact_sigma_objective(const Graph& g, int edge_cap) {
    Objective obj;
    obj.eval = [&g, edge_cap](const std::vector<int>& s) { return exact_sigma(g, s, edge_cap); };
    return obj;
}

GreedyResult greedy_hill_climb(const Objective& obj, const std::vector<int>& candidates, int k) {
    if (k > static_cast<int>(candidates.size()))
        throw ContractError("greedy: k exceeds candidate count");
    GreedyResult res;
    std::vector<int> pool = candidates;
    std::sort(pool.begin(), pool.end());
    std::vector<int> current;
    for (int round = 0; round < k; ++round) {
        int best = -1;
        double best_val = 0.0;
        std::vector<double> vals(pool.size());
#pragma omp parallel for schedule(dynamic) if (obj.exec == Exec::parallel)
        for (size_t i = 0; i < pool.size(); ++i) {
            std::vector<int> trial = current;
            trial.push_back(pool[i]);
            vals[i] = obj.eval(trial);
        }
        for (size_t i = 0; i < pool.size(); ++i) {
            if (best == -1 || vals[i] > best_val) {  // ties keep the lowest id (pool is sorted)
                best = static_cast<int>(i);
                best_val = vals[i];
            }
        }
        current.push_back(pool[best]);
        res.selected.push_back(pool[best]);
        res.prefix_values.push_back(best_val);
        pool.erase(pool.begin() + best);
    }
    return res;
}

namespace {

std::vector<int> discount_heuristic(const Graph& g, int k, bool weighted) {
    if (k > g.node_count()) throw ContractError("discount heuristic: k exceeds node count");
    int n = g.node_count();
    std::vector<uint8_t> removed(n, 0);
    std::vector<int> out;
    for (int round = 0; round < k; ++round) {
        int best = -1;
        double best_score = -1.0;
        for (int v = 0; v < n; ++v) {
            if (removed[v]) continue;
            double score = 0.0;
            for (auto [w, ei] : g.out(v))
                if (!removed[w]) score += weighted ? g.edge(ei).weight : 1.0;
            if (score > best_score) {
                best = v;
                best_score = score;
            }
        }
        removed[best] = 1;
        out.push_back(best);
    }
    return out;
}

}  // namespace

std::vector<int> single_discount(const Graph& g, int k) { return discount_heuristic(g, k, false); }
std::vector<int> weighted_discount(const Graph& g, int k) { return discount_heuristic(g, k, true); }

double gdd_weight(const Graph& g, int v, const std::vector<uint8_t>& selected) {
    double blocked = 1.0;
    for (auto [x, ei] : g.in(v))
        if (selected[x]) blocked *= 1.0 - g.edge(ei).weight;
    double reach = 1.0;
    for (auto [y, ei] : g.out(v))
        if (!selected[y]) reach += g.edge(ei).weight;
    return blocked * reach;
}

std::vector<double> gdd_initial_weights(const Graph& g) {
    std::vector<uint8_t> none(g.node_count(), 0);
    std::vector<double> w(g.node_count());
    for (int v = 0; v < g.node_count(); ++v) w[v] = gdd_weight(g, v, none);
    return w;
}

std::vector<int> gdd_select(const Graph& g, int k, const std::vector<int>& preselected) {
    if (k > g.node_count()) throw ContractError("gdd: k exceeds node count");
    std::vector<uint8_t> selected(g.node_count(), 0);
    for (int p : preselected) {
        g.check_node(p);
        selected[p] = 1;
    }
    std::vector<int> out;
    for (int round = 0; round < k; ++round) {
        int best = -1;
        double best_w = -1.0;
        for (int v = 0; v < g.node_count(); ++v) {
            if (selected[v]) continue;
            double w = gdd_weight(g, v, selected);
            if (w > best_w + 1e-15 || best == -1) {
                best = v;
                best_w = w;
            }
        }
        if (best == -1) break;  // fewer free nodes than budget
        selected[best] = 1;
        out.push_back(best);
    }
    return out;
}

std::vector<int> sample_fixed_size(const std::vector<double>& probs,
                                   const std::vector<int>& candidates, int k, Rng& rng) {
    int attempts = 0;
    std::vector<int> out;
    while (attempts++ < 200) {
        out.clear();
        for (size_t i = 0; i < candidates.size(); ++i)
            if (uniform01(rng) < probs[i]) out.push_back(candidates[i]);
        if (static_cast<int>(out.size()) == k) return out;
    }
    // weighted sampling without replacement
    out.clear();
    std::vector<double> w(probs);
    std::vector<uint8_t> used(candidates.size(), 0);
    for (int pick = 0; pick < k; ++pick) {
        double total = 0.0;
        for (size_t i = 0; i < w.size(); ++i)
            if (!used[i]) total += std::max(w[i], 1e-12);
        double target = uniform01(rng) * total;
        size_t chosen = 0;
        double acc = 0.0;
        for (size_t i = 0; i < w.size(); ++i) {
            if (used[i]) continue;
            acc += std::max(w[i], 1e-12);
            chosen = i;
            if (acc >= target) break;
        }
        used[chosen] = 1;
        out.push_back(candidates[chosen]);
    }
    return out;
}

CeResult ce_subset_search(const Objective& obj, const std::vector<int>& candidates_in, int k,
                          const CeParams& params, const SeedStream& stream,
                          const std::vector<double>& initial_probs) {
    std::vector<int> candidates = candidates_in;
    std::sort(candidates.begin(), candidates.end());
    int n = static_cast<int>(candidates.size());
    if (k > n || k < 0) throw ContractError("ce search: infeasible budget");
    CeParams p = params;
    if (p.n_min == 0) p.n_min = n;
    if (p.n_max == 0) p.n_max = 20 * n;
    if (p.n_elite == 0) p.n_elite = (n + 3) / 4;
    std::vector<double> probs = initial_probs;
    if (probs.empty()) probs.assign(n, static_cast<double>(k) / n);
    if (static_cast<int>(probs.size()) != n) throw ContractError("initial probability size mismatch");

    CeResult res;
    res.best_value = -std::numeric_limits<double>::infinity();
    double prev_gamma = -std::numeric_limits<double>::infinity();
    int stall = 0;
    int batch_floor = p.n_min;  // sample counts never shrink across iterations
    for (int iter = 0; iter < p.max_iters; ++iter) {
        res.probability_trace.push_back(probs);
        // fully adaptive batch: extend sampling while the elite threshold
        // fails to improve, up to n_max samples
        std::vector<std::vector<int>> samples;
        std::vector<double> vals;
        Rng rng = stream.sub("draw").rng_at(iter);
        double gamma = 0.0;
        int elite = 0;
        std::vector<int> order;
        while (true) {
            int lo = static_cast<int>(samples.size());
            int hi = std::min(p.n_max, lo == 0 ? batch_floor : lo + p.n_min);
            samples.resize(hi);
            for (int i = lo; i < hi; ++i) {
                samples[i] = sample_fixed_size(probs, candidates, k, rng);
                std::sort(samples[i].begin(), samples[i].end());
            }
            vals.resize(hi);
#pragma omp parallel for schedule(dynamic) if (obj.exec == Exec::parallel)
            for (int i = lo; i < hi; ++i) vals[i] = obj.eval(samples[i]);
            // rank distinct samples only; duplicates would swamp the
            // elite set once the distribution sharpens
            order.clear();
            {
                std::set<std::vector<int>> seen;
                std::vector<int> all_idx(hi);
                std::iota(all_idx.begin(), all_idx.end(), 0);
                std::stable_sort(all_idx.begin(), all_idx.end(),
                                 [&](int a, int b) { return vals[a] > vals[b]; });
                for (int i : all_idx)
                    if (seen.insert(samples[i]).second) order.push_back(i);
            }
            int distinct = static_cast<int>(order.size());
            elite = std::min(distinct, p.n_elite);
            gamma = vals[order[elite - 1]];
            // extend until both the elite threshold and the incumbent improve
            bool improved = gamma > prev_gamma + p.gamma_tol && vals[order[0]] > res.best_value;
            if (improved || hi >= p.n_max) break;
        }
        batch_floor = std::max(batch_floor, static_cast<int>(samples.size()));

        if (vals[order[0]] > res.best_value) {
            res.best_value = vals[order[0]];
            res.best_sample = samples[order[0]];
        }
        res.best_value_by_iter.push_back(res.best_value);

        // value-weighted frequency over all samples at or above the
        // elite threshold (ties included)
        std::vector<double> freq(n, 0.0);
        double wsum = 0.0;
        for (size_t e = 0; e < order.size() && (static_cast<int>(e) < elite || vals[order[e]] >= gamma - p.gamma_tol); ++e) {
            double w = std::max(vals[order[e]], 0.0);
            if (w <= 0.0) w = 1e-12;
            wsum += w;
            for (int node : samples[order[e]]) {
                auto it = std::lower_bound(candidates.begin(), candidates.end(), node);
                freq[it - candidates.begin()] += w;
            }
        }
        for (int i = 0; i < n; ++i) {
            double q = freq[i] / wsum;
            probs[i] = (1.0 - p.alpha) * probs[i] + p.alpha * q;
        }
        res.iterations = iter + 1;
        if (std::abs(gamma - prev_gamma) <= p.gamma_tol) {
            if (++stall >= 2) break;
        } else {
            stall = 0;
        }
        prev_gamma = gamma;
    }
    return res;
}

std::vector<int> rmax_select(const Objective& obj, const std::vector<int>& candidates, int k,
                             int num_samples, const SeedStream& stream) {
    if (num_samples < 1) throw ContractError("rmax: need at least one sample");
    if (k > static_cast<int>(candidates.size())) throw ContractError("rmax: k exceeds candidates");
    std::vector<std::vector<int>> samples(num_samples);
    {
        Rng rng = stream.rng();
        std::vector<int> pool = candidates;
        for (int i = 0; i < num_samples; ++i) {
            // partial Fisher-Yates for a uniform k-subset
            for (int j = 0; j < k; ++j)
                std::swap(pool[j], pool[uniform_int(rng, j, static_cast<int>(pool.size()) - 1)]);
            samples[i].assign(pool.begin(), pool.begin() + k);
            std::sort(samples[i].begin(), samples[i].end());
        }
    }
    std::vector<double> vals(num_samples);
#pragma omp parallel for schedule(dynamic) if (obj.exec == Exec::parallel)
    for (int i = 0; i < num_samples; ++i) vals[i] = obj.eval(samples[i]);
    int best = 0;
    for (int i = 1; i < num_samples; ++i)
        if (vals[i] > vals[best]) best = i;
    return samples[best];
}

NodeValues shapley_estimate(const Objective& obj, int n, int permutations,
                            const SeedStream& stream) {
    if (permutations < 1) throw ContractError("shapley: need at least one permutation");
    std::vector<double> acc(n, 0.0);
    std::vector<std::vector<double>> per_perm(permutations);
#pragma omp parallel for schedule(dynamic) if (obj.exec == Exec::parallel)
    for (int p = 0; p < permutations; ++p) {
        Rng rng = stream.rng_at(p);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (int j = n - 1; j > 0; --j) std::swap(perm[j], perm[uniform_int(rng, 0, j)]);
        std::vector<double> contrib(n);
        std::vector<int> prefix;
        double prev = 0.0;
        for (int j = 0; j < n; ++j) {
            prefix.push_back(perm[j]);
            double cur = obj.eval(prefix);
            contrib[perm[j]] = cur - prev;
            prev = cur;
        }
        per_perm[p] = std::move(contrib);
    }
    for (const auto& c : per_perm)
        for (int v = 0; v < n; ++v) acc[v] += c[v];
    for (double& v : acc) v /= permutations;
    return {std::move(acc), "shapley"};
}

std::vector<int> spic_select(const Graph& g, int k, const Objective& sigma_eval, int permutations,
                             const SeedStream& stream) {
    if (k > g.node_count()) throw ContractError("spic: k exceeds node count");
    NodeValues values = shapley_estimate(sigma_eval, g.node_count(), permutations, stream);
    std::vector<double> phi = values.values;
    std::vector<uint8_t> chosen(g.node_count(), 0);
    std::vector<int> out;
    for (int round = 0; round < k; ++round) {
        int best = -1;
        for (int v = 0; v < g.node_count(); ++v)
            if (!chosen[v] && (best == -1 || phi[v] > phi[best])) best = v;
        chosen[best] = 1;
        out.push_back(best);
        double phi_y = phi[best];
        for (auto [x, ei] : g.out(best))
            if (!chosen[x]) phi[x] *= 1.0 - g.edge(ei).weight;
        for (auto [z, ei] : g.in(best))
            if (!chosen[z]) phi[z] = std::max(0.0, phi[z] - g.edge(ei).weight * phi_y);
    }
    return out;
}

PostprocessMode postprocess_mode_from_string(const std::string& s) {
    if (s == "eliminate-always") return PostprocessMode::eliminate_always;
    if (s == "eliminate-threshold") return PostprocessMode::eliminate_threshold;
    if (s == "eliminate-local") return PostprocessMode::eliminate_local;
    if (s == "discount-1") return PostprocessMode::discount_1;
    if (s == "discount-2") return PostprocessMode::discount_2;
    if (s == "discount-3") return PostprocessMode::discount_3;
    throw ContractError("unknown postprocess mode '" + s + "'");
}

namespace {

// Mutual weight for elimination modes: max of the two directions.
double mutual_weight(const Graph& g, int a, int b) {
    double w = 0.0;
    for (auto [v, ei] : g.out(a))
        if (v == b) w = std::max(w, g.edge(ei).weight);
    for (auto [v, ei] : g.in(a))
        if (v == b) w = std::max(w, g.edge(ei).weight);
    return w;
}

std::vector<int> neighbors_of(const Graph& g, int v) {
    std::vector<int> ns;
    for (auto [w, ei] : g.out(v)) ns.push_back(w);
    for (auto [w, ei] : g.in(v)) ns.push_back(w);
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
}

}  // namespace

std::vector<int> postprocess(const NodeValues& values, const Graph& g, int k,
                             PostprocessMode mode, double threshold) {
    int n = g.node_count();
    if (k > n) throw ContractError("postprocess: k exceeds node count");
    if (static_cast<int>(values.values.size()) != n)
        throw ContractError("postprocess: value list size mismatch");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values.values[a] > values.values[b]; });

    std::vector<uint8_t> chosen(n, 0);
    std::vector<int> out;

    auto eliminate = [&](auto&& skip) {
        for (int v : order) {
            if (static_cast<int>(out.size()) == k) break;
            if (chosen[v] || skip(v)) continue;
            chosen[v] = 1;
            out.push_back(v);
        }
        for (int v : order) {  // fall back to plain value order
            if (static_cast<int>(out.size()) == k) break;
            if (!chosen[v]) {
                chosen[v] = 1;
                out.push_back(v);
            }
        }
    };

    switch (mode) {
        case PostprocessMode::eliminate_always:
            eliminate([&](int v) {
                for (int w : neighbors_of(g, v))
                    if (chosen[w]) return true;
                return false;
            });
            break;
        case PostprocessMode::eliminate_threshold:
            eliminate([&](int v) {
                for (int w : neighbors_of(g, v))
                    if (chosen[w] && mutual_weight(g, v, w) > threshold) return true;
                return false;
            });
            break;
        case PostprocessMode::eliminate_local:
            eliminate([&](int v) {
                for (int w : neighbors_of(g, v)) {
                    if (!chosen[w]) continue;
                    // rank v among w's neighbors by mutual weight; skip if in the top half
                    std::vector<double> ws;
                    for (int u : neighbors_of(g, w)) ws.push_back(mutual_weight(g, w, u));
                    std::sort(ws.begin(), ws.end(), std::greater<>());
                    double mine = mutual_weight(g, w, v);
                    int pos = 0;
                    while (pos < static_cast<int>(ws.size()) && ws[pos] > mine) ++pos;
                    if (pos < static_cast<int>((ws.size() + 1) / 2)) return true;
                }
                return false;
            });
            break;
        case PostprocessMode::discount_1:
        case PostprocessMode::discount_2:
        case PostprocessMode::discount_3: {
            std::vector<double> phi = values.values;
            const std::vector<double> orig = values.values;
            for (int round = 0; round < k; ++round) {
                int best = -1;
                for (int v : order)
                    if (!chosen[v] && (best == -1 || phi[v] > phi[best])) best = v;
                chosen[best] = 1;
                out.push_back(best);
                for (int x : neighbors_of(g, best)) {
                    if (chosen[x]) continue;
                    if (mode == PostprocessMode::discount_1) {
                        double w = 0.0;  // weight of edge best->x (influence on x)
                        for (auto [v, ei] : g.out(best))
                            if (v == x) w = std::max(w, g.edge(ei).weight);
                        phi[x] *= 1.0 - w;
                    } else if (mode == PostprocessMode::discount_2) {
                        double w = 0.0;
                        for (auto [v, ei] : g.out(best))
                            if (v == x) w = std::max(w, g.edge(ei).weight);
                        phi[x] -= w * orig[x];
                    } else {
                        double w = 0.0;  // weight of edge x->best (x's claim on best's value)
                        for (auto [v, ei] : g.in(best))
                            if (v == x) w = std::max(w, g.edge(ei).weight);
                        phi[x] = std::max(0.0, phi[x] - w * phi[best]);
                    }
                }
            }
            break;
        }
    }
    return out;
}

}  // namespace sna
