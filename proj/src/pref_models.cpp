#include "sna/pref_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sna {

SpreadKind spread_kind_from_string(const std::string& s) {
    if (s == "ic") return SpreadKind::ic;
    if (s == "s-random") return SpreadKind::s_random;
    if (s == "s-mu") return SpreadKind::s_mu;
    if (s == "s-sigma") return SpreadKind::s_sigma;
    if (s == "d") return SpreadKind::d;
    if (s == "r") return SpreadKind::r;
    throw ContractError("unknown spread kind '" + s + "'");
}

std::string to_string(SpreadKind k) {
    switch (k) {
        case SpreadKind::ic: return "ic";
        case SpreadKind::s_random: return "s-random";
        case SpreadKind::s_mu: return "s-mu";
        case SpreadKind::s_sigma: return "s-sigma";
        case SpreadKind::d: return "d";
        case SpreadKind::r: return "r";
    }
    return "?";
}

namespace {

bool is_connected(const Graph& g) {
    if (g.node_count() == 0) return true;
    std::vector<int> dist = shortest_path_lengths(g, 0);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d == kUnreachable; });
}

Preference uniform_preference(int r, Rng& rng) {
    Preference p(r);
    std::iota(p.begin(), p.end(), 0);
    for (int j = r - 1; j > 0; --j) std::swap(p[j], p[uniform_int(rng, 0, j)]);
    return p;
}

std::vector<Preference> all_preferences(int r) {
    Preference p(r);
    std::iota(p.begin(), p.end(), 0);
    std::vector<Preference> all;
    do {
        all.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return all;
}

// Bayesian assignment: score every candidate preference by the product of
// per-neighbor terms P(D = d) / #preferences-at-d, then sample.
Preference assign_by_conditioning(const Graph& g, const PairDistanceModel& model, int node,
                                  const std::vector<int>& assigned_neighbors,
                                  const std::vector<Preference>& prefs,
                                  const std::vector<Preference>& candidates,
                                  const std::vector<long long>& at_distance, Rng& rng) {
    int r = model.r;
    int c = pair_count(r);
    std::vector<double> score(candidates.size(), 1.0);
    for (int i : assigned_neighbors) {
        DiscreteTruncGauss d = dtg_pmf(model.mu_at(i, node), model.sigma_at(i, node), r);
        for (size_t ci = 0; ci < candidates.size(); ++ci) {
            int steps = kendall_tau_raw(candidates[ci], prefs[i]);
            score[ci] *= d.pmf[steps] / static_cast<double>(at_distance[steps]);
        }
    }
    double total = std::accumulate(score.begin(), score.end(), 0.0);
    if (total <= 0.0) return candidates[uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1)];
    double t = uniform01(rng) * total;
    double acc = 0.0;
    for (size_t ci = 0; ci < candidates.size(); ++ci) {
        acc += score[ci];
        if (t <= acc) return candidates[ci];
    }
    return candidates.back();
}

}  // namespace

GeneratedCorpus generate(const Graph& g, const PairDistanceModel& model, SpreadKind kind,
                         int topics, const SeedStream& stream, Exec exec) {
    if (g.node_count() != model.n) throw ContractError("graph/model size mismatch");
    if (topics < 1) throw ContractError("topic count must be >= 1");
    if (kind != SpreadKind::r && !is_connected(g))
        throw ContractError("spread models require a connected graph");
    int r = model.r;
    if (kind == SpreadKind::ic && r > kFactorialCap)
        throw CapError("independent-conditioning generation capped at r <= " +
                       std::to_string(kFactorialCap));
    int n = g.node_count();

    std::vector<Preference> candidates;
    std::vector<long long> at_distance;
    bool needs_ic = kind == SpreadKind::ic || kind == SpreadKind::d;
    if (needs_ic) {
        if (r > kFactorialCap)
            throw CapError("initializing-set conditioning capped at r <= " +
                           std::to_string(kFactorialCap));
        candidates = all_preferences(r);
        at_distance.resize(pair_count(r) + 1);
        for (int s = 0; s <= pair_count(r); ++s) at_distance[s] = count_at_distance(r, s);
    }

    GeneratedCorpus corpus;
    corpus.n = n;
    corpus.r = r;
    corpus.generator = to_string(kind);
    corpus.seed = stream.seed();
    corpus.topics.resize(topics);
    corpus.orders.resize(topics);

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int t = 0; t < topics; ++t) {
        Rng rng = stream.rng_at(t);
        std::vector<Preference> prefs(n);
        if (kind == SpreadKind::r) {
            for (int v = 0; v < n; ++v) prefs[v] = uniform_preference(r, rng);
            corpus.topics[t] = std::move(prefs);
            continue;
        }
        // orders are recorded so traversal validity stays checkable
        std::vector<uint8_t> assigned(n, 0);
        std::vector<int> order;  // assignment order for traversal checks

        auto assigned_neighbors_of = [&](int u) {
            std::vector<int> ns;
            for (auto [v, ei] : g.out(u))
                if (assigned[v]) ns.push_back(v);
            return ns;
        };

        // initializing set
        if (kind == SpreadKind::d) {
            int cap = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
            int s = uniform_int(rng, 1, std::max(1, cap));
            int first = uniform_int(rng, 0, n - 1);
            prefs[first] = uniform_preference(r, rng);
            assigned[first] = 1;
            order.push_back(first);
            for (int grow = 1; grow < s; ++grow) {
                std::vector<int> frontier;
                for (int v = 0; v < n; ++v)
                    if (!assigned[v] && !assigned_neighbors_of(v).empty()) frontier.push_back(v);
                if (frontier.empty()) break;
                int u = frontier[uniform_int(rng, 0, static_cast<int>(frontier.size()) - 1)];
                prefs[u] = assign_by_conditioning(g, model, u, assigned_neighbors_of(u), prefs,
                                                  candidates, at_distance, rng);
                assigned[u] = 1;
                order.push_back(u);
            }
        } else {
            int first = uniform_int(rng, 0, n - 1);
            prefs[first] = uniform_preference(r, rng);
            assigned[first] = 1;
            order.push_back(first);
        }

        // traversal
        while (static_cast<int>(order.size()) < n) {
            std::vector<int> frontier;
            for (int v = 0; v < n; ++v)
                if (!assigned[v] && !assigned_neighbors_of(v).empty()) frontier.push_back(v);
            int u = frontier[uniform_int(rng, 0, static_cast<int>(frontier.size()) - 1)];
            std::vector<int> ns = assigned_neighbors_of(u);
            switch (kind) {
                case SpreadKind::ic:
                    prefs[u] = assign_by_conditioning(g, model, u, ns, prefs, candidates,
                                                      at_distance, rng);
                    break;
                case SpreadKind::s_random:
                case SpreadKind::s_mu:
                case SpreadKind::s_sigma: {
                    int pick;
                    if (kind == SpreadKind::s_random) {
                        pick = ns[uniform_int(rng, 0, static_cast<int>(ns.size()) - 1)];
                    } else if (kind == SpreadKind::s_mu) {
                        std::vector<double> w(ns.size());
                        for (size_t i = 0; i < ns.size(); ++i) w[i] = 1.0 - model.mu_at(ns[i], u);
                        double total = std::accumulate(w.begin(), w.end(), 0.0);
                        double tgt = uniform01(rng) * total;
                        size_t i = 0;
                        for (double acc = 0.0; i < ns.size(); ++i) {
                            acc += w[i];
                            if (tgt <= acc) break;
                        }
                        pick = ns[std::min(i, ns.size() - 1)];
                    } else {
                        // zero-sigma neighbors dominate the 1/sigma weights
                        std::vector<int> zero;
                        for (int v : ns)
                            if (model.sigma_at(v, u) == 0.0) zero.push_back(v);
                        if (!zero.empty()) {
                            pick = zero[uniform_int(rng, 0, static_cast<int>(zero.size()) - 1)];
                        } else {
                            std::vector<double> w(ns.size());
                            for (size_t i = 0; i < ns.size(); ++i)
                                w[i] = 1.0 / model.sigma_at(ns[i], u);
                            double total = std::accumulate(w.begin(), w.end(), 0.0);
                            double tgt = uniform01(rng) * total;
                            size_t i = 0;
                            for (double acc = 0.0; i < ns.size(); ++i) {
                                acc += w[i];
                                if (tgt <= acc) break;
                            }
                            pick = ns[std::min(i, ns.size() - 1)];
                        }
                    }
                    DiscreteTruncGauss d = dtg_pmf(model.mu_at(pick, u), model.sigma_at(pick, u), r);
                    int steps = sample_distance_index(d, rng);
                    prefs[u] = uniform_at_distance(prefs[pick], steps, rng);
                    break;
                }
                case SpreadKind::d: {
                    int best = ns[0];
                    for (int v : ns)
                        if (model.mu_at(v, u) < model.mu_at(best, u)) best = v;
                    prefs[u] = prefs[best];
                    break;
                }
                case SpreadKind::r:
                    break;  // handled above
            }
            assigned[u] = 1;
            order.push_back(u);
        }
        corpus.topics[t] = std::move(prefs);
        corpus.orders[t] = std::move(order);
    }
    return corpus;
}

int TrTable::index_of(double d) const {
    int idx = static_cast<int>(std::lround(d / resolution));
    if (idx < 0 || idx >= cells || std::abs(d - idx * resolution) > 1e-9)
        throw ContractError("distance value off the table grid");
    return idx;
}

double TrTable::at(double dx, double dy) const {
    return values[index_of(dx) * cells + index_of(dy)];
}

namespace {

// sigma values whose discretized distribution stays mean-faithful at mu.
std::vector<double> permissible_sigmas(double mu, const std::vector<double>& grid, int r,
                                       double tolerance) {
    std::vector<double> ok;
    for (double s : grid) {
        DiscreteTruncGauss d = dtg_pmf(mu, s, r);
        if (std::abs(d.mean() - mu) <= tolerance) ok.push_back(s);
    }
    return ok;
}

}  // namespace

TrTable build_tr(int r, const std::vector<double>& sigma_grid, int mc_per_cell,
                 const SeedStream& stream, double resolution, Exec exec) {
    if (r < 2) throw ContractError("alternative count must be >= 2");
    if (mc_per_cell < 1) throw ContractError("mc_per_cell must be >= 1");
    TrTable t;
    t.r = r;
    t.resolution = resolution;
    t.cells = static_cast<int>(std::lround(1.0 / resolution)) + 1;
    t.values.assign(t.cells * t.cells, 0.0);

    Preference anchor(r);
    std::iota(anchor.begin(), anchor.end(), 0);
    // mean-faithfulness bound for sigma eligibility; independent of the
    // table resolution so coarse tables stay consistent with fine ones
    const double tol = 0.005;

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (int cell = 0; cell < t.cells * t.cells; ++cell) {
        int xi = cell / t.cells, yi = cell % t.cells;
        double dx = xi * resolution, dy = yi * resolution;
        Rng rng = stream.rng_at(cell);
        std::vector<double> sx = permissible_sigmas(dx, sigma_grid, r, tol);
        std::vector<double> sy = permissible_sigmas(dy, sigma_grid, r, tol);
        if (sx.empty()) sx.push_back(0.0);
        if (sy.empty()) sy.push_back(0.0);
        double acc = 0.0;
        for (int it = 0; it < mc_per_cell; ++it) {
            double sgx = sx[uniform_int(rng, 0, static_cast<int>(sx.size()) - 1)];
            double sgy = sy[uniform_int(rng, 0, static_cast<int>(sy.size()) - 1)];
            int ex = sample_distance_index(dtg_pmf(dx, sgx, r), rng);
            int ey = sample_distance_index(dtg_pmf(dy, sgy, r), rng);
            Preference px = uniform_at_distance(anchor, ex, rng);
            Preference py = uniform_at_distance(anchor, ey, rng);
            acc += kendall_tau_norm(px, py);
        }
        double mean = acc / mc_per_cell;
        t.values[cell] = std::lround(mean / resolution) * resolution;
    }
    return t;
}

double oplus(const TrTable& t, double dx, double dy) {
    if (dx <= 0.5 && dy <= 0.5) return t.at(dx, dy);
    return std::max(dx, dy);
}

std::vector<double> msm_sp(const Graph& g, const PairDistanceModel& edge_model, const TrTable& t) {
    int n = g.node_count();
    double res = t.resolution;
    auto snap = [&](double v) { return std::lround(std::clamp(v, 0.0, 1.0) / res) * res; };
    std::vector<double> d(n * n, 1.0);
    for (int i = 0; i < n; ++i) d[i * n + i] = 0.0;
    for (const Edge& e : g.edges()) {
        double v = snap(edge_model.mu_at(e.src, e.dst));
        d[e.src * n + e.dst] = v;
        d[e.dst * n + e.src] = v;
    }
    bool changed = true;
    int rounds = 0;
    while (changed && rounds++ < n + 2) {
        changed = false;
        for (int p = 0; p < n; ++p)
            for (int i = 0; i < n; ++i) {
                if (i == p) continue;
                for (int j = 0; j < n; ++j) {
                    if (j == p || j == i) continue;
                    double via = oplus(t, d[p * n + i], d[p * n + j]);
                    if (via < d[i * n + j] - 1e-12) {
                        d[i * n + j] = via;
                        d[j * n + i] = via;
                        changed = true;
                    }
                }
            }
    }
    return d;
}

ValidationReport validate(const GeneratedCorpus& corpus, const PairDistanceModel& truth,
                          Exec exec) {
    if (corpus.n != truth.n || corpus.r != truth.r)
        throw ContractError("corpus and reference model disagree on n or r");
    int n = corpus.n, r = corpus.r;
    int cells = pair_count(r) + 1;
    int topics = static_cast<int>(corpus.topics.size());
    struct PairErr {
        double kl = 0.0;
        double mean_abs = 0.0;
        bool smoothed = false;
    };
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<PairErr> errs(pairs.size());

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
    for (size_t pi = 0; pi < pairs.size(); ++pi) {
        auto [i, j] = pairs[pi];
        std::vector<double> emp(cells, 0.0);
        double mean_emp = 0.0;
        for (int t = 0; t < topics; ++t) {
            int steps = kendall_tau_raw(corpus.topics[t][i], corpus.topics[t][j]);
            emp[steps] += 1.0;
            mean_emp += static_cast<double>(steps) / pair_count(r);
        }
        for (double& v : emp) v /= topics;
        mean_emp /= topics;
        DiscreteTruncGauss ref = dtg_pmf(truth.mu_at(i, j), truth.sigma_at(i, j), r);
        bool needs_smoothing = false;
        for (int c = 0; c < cells; ++c)
            if (ref.pmf[c] > 0.0 && emp[c] == 0.0) needs_smoothing = true;
        if (needs_smoothing) {
            double total = 0.0;
            for (double& v : emp) {
                v += 1e-6;
                total += v;
            }
            for (double& v : emp) v /= total;
        }
        double kl = 0.0;
        for (int c = 0; c < cells; ++c)
            if (ref.pmf[c] > 0.0) kl += ref.pmf[c] * std::log(ref.pmf[c] / emp[c]);
        errs[pi] = {kl, std::abs(mean_emp - ref.mean()), needs_smoothing};
    }
    ValidationReport rep;
    double kl2 = 0.0, mean2 = 0.0;
    for (const PairErr& e : errs) {
        kl2 += e.kl * e.kl;
        mean2 += e.mean_abs * e.mean_abs;
        if (e.smoothed) ++rep.smoothed_pairs;
    }
    rep.rms_kl = std::sqrt(kl2 / pairs.size());
    rep.rms_mean_abs = std::sqrt(mean2 / pairs.size());
    return rep;
}

std::string corpus_to_csv(const GeneratedCorpus& c) {
    std::string out = "topic,node,ranking\n";
    for (size_t t = 0; t < c.topics.size(); ++t)
        for (int v = 0; v < c.n; ++v) {
            out += std::to_string(t) + "," + std::to_string(v) + ",";
            const Preference& p = c.topics[t][v];
            for (size_t i = 0; i < p.size(); ++i) {
                if (i) out += " ";
                out += std::to_string(p[i]);
            }
            out += "\n";
        }
    return out;
}

GeneratedCorpus corpus_from_csv(const std::string& text, int n, int r) {
    GeneratedCorpus corpus;
    corpus.n = n;
    corpus.r = r;
    corpus.generator = "file";
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("topic", 0) == 0) continue;  // header
        }
        std::istringstream ls(line);
        std::string topic_s, node_s, ranking_s;
        if (!std::getline(ls, topic_s, ',') || !std::getline(ls, node_s, ',') ||
            !std::getline(ls, ranking_s))
            throw ContractError("corpus row needs topic,node,ranking");
        size_t t = std::stoul(topic_s);
        int node = std::stoi(node_s);
        if (node < 0 || node >= n) throw ContractError("corpus node id out of range");
        if (corpus.topics.size() <= t)
            corpus.topics.resize(t + 1, std::vector<Preference>(n, Preference{}));
        Preference p;
        std::istringstream rs(ranking_s);
        int a;
        while (rs >> a) p.push_back(a);
        if (static_cast<int>(p.size()) != r || !is_valid_preference(p))
            throw ContractError("corpus ranking is not a permutation of 0..r-1");
        corpus.topics[t][node] = p;
    }
    for (const auto& topic : corpus.topics)
        for (const Preference& p : topic)
            if (p.empty()) throw ContractError("corpus has missing (topic, node) cells");
    return corpus;
}

std::string pair_model_to_csv(const PairDistanceModel& m) {
    std::string out = "i,j,mu,sigma\n";
    char buf[64];
    for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g\n", i, j, m.mu_at(i, j),
                          m.sigma_at(i, j));
            out += buf;
        }
    return out;
}

PairDistanceModel pair_model_from_csv(const std::string& text, int r) {
    std::istringstream stream(text);
    std::string line;
    std::vector<std::tuple<int, int, double, double>> rows;
    int max_node = -1;
    bool first = true;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        if (first && line.find("mu") != std::string::npos) {
            first = false;
            continue;  // header
        }
        first = false;
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> toks;
        while (std::getline(ls, tok, ',')) toks.push_back(tok);
        if (toks.size() != 4) throw ContractError("pair csv row needs 4 columns");
        int i = std::stoi(toks[0]), j = std::stoi(toks[1]);
        rows.emplace_back(i, j, std::stod(toks[2]), std::stod(toks[3]));
        max_node = std::max({max_node, i, j});
    }
    PairDistanceModel m(max_node + 1, r);
    for (auto& [i, j, mu, sg] : rows) m.set(i, j, mu, sg);
    return m;
}

}  // namespace sna
