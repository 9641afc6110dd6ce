#include "sna/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sna {

Rule rule_from_string(const std::string& s) {
    if (s == "plurality") return {RuleKind::plurality, 0};
    if (s == "borda") return {RuleKind::borda, 0};
    if (s == "veto") return {RuleKind::veto, 0};
    if (s == "copeland") return {RuleKind::copeland, 0};
    if (s == "minmax" || s == "minmax-pairwise-opposition")
        return {RuleKind::minmax_pairwise_opposition, 0};
    if (s == "bucklin") return {RuleKind::bucklin, 0};
    if (s == "kemeny") return {RuleKind::kemeny, 0};
    if (s == "random-dictatorship") return {RuleKind::random_dictatorship, 0};
    if (s == "reverse-plurality") return {RuleKind::reverse_plurality, 0};
    if (s.rfind("dictatorship", 0) == 0) {
        Rule r{RuleKind::dictatorship, 0};
        auto open = s.find('(');
        if (open != std::string::npos) r.dictator = std::stoi(s.substr(open + 1));
        return r;
    }
    throw ContractError("unknown aggregation rule '" + s + "'");
}

namespace {

// Co-winner set over the remaining alternatives, by the round-score of the
// given rule kind. Positions are taken within the restricted profile.
std::vector<int> round_winners(RuleKind kind, const Profile& profile,
                               const std::vector<int>& remaining) {
    int nv = static_cast<int>(profile.size());
    int m = static_cast<int>(remaining.size());
    // map alternative -> dense index within `remaining`
    int max_alt = *std::max_element(remaining.begin(), remaining.end());
    std::vector<int> dense(max_alt + 1, -1);
    for (int i = 0; i < m; ++i) dense[remaining[i]] = i;

    // restricted rank of each remaining alternative per voter
    std::vector<std::vector<int>> rank(nv, std::vector<int>(m));
    for (int v = 0; v < nv; ++v) {
        int pos = 0;
        for (int a : profile[v])
            if (a <= max_alt && dense[a] >= 0) rank[v][dense[a]] = pos++;
    }

    std::vector<double> score(m, 0.0);
    switch (kind) {
        case RuleKind::plurality:
            for (int v = 0; v < nv; ++v)
                for (int i = 0; i < m; ++i)
                    if (rank[v][i] == 0) score[i] += 1.0;
            break;
        case RuleKind::borda:
            for (int v = 0; v < nv; ++v)
                for (int i = 0; i < m; ++i) score[i] += m - 1 - rank[v][i];
            break;
        case RuleKind::veto:
            for (int v = 0; v < nv; ++v)
                for (int i = 0; i < m; ++i)
                    if (rank[v][i] != m - 1) score[i] += 1.0;
            break;
        case RuleKind::copeland: {
            for (int i = 0; i < m; ++i)
                for (int j = i + 1; j < m; ++j) {
                    int wins_i = 0;
                    for (int v = 0; v < nv; ++v)
                        if (rank[v][i] < rank[v][j]) ++wins_i;
                    int wins_j = nv - wins_i;
                    if (wins_i > wins_j)
                        score[i] += 1.0;
                    else if (wins_j > wins_i)
                        score[j] += 1.0;
                    else {
                        score[i] += 0.5;
                        score[j] += 0.5;
                    }
                }
            break;
        }
        case RuleKind::minmax_pairwise_opposition: {
            for (int i = 0; i < m; ++i) {
                double worst = 0.0;
                for (int j = 0; j < m; ++j) {
                    if (i == j) continue;
                    int against = 0;
                    for (int v = 0; v < nv; ++v)
                        if (rank[v][j] < rank[v][i]) ++against;
                    worst = std::max(worst, static_cast<double>(against));
                }
                score[i] = -worst;
            }
            break;
        }
        case RuleKind::bucklin: {
            for (int depth = 1; depth <= m; ++depth) {
                std::vector<int> within(m, 0);
                for (int v = 0; v < nv; ++v)
                    for (int i = 0; i < m; ++i)
                        if (rank[v][i] < depth) ++within[i];
                int best = *std::max_element(within.begin(), within.end());
                if (2 * best > nv || depth == m) {
                    for (int i = 0; i < m; ++i) score[i] = within[i];
                    break;
                }
            }
            break;
        }
        default:
            throw ContractError("round_winners: not a score rule");
    }
    double best = *std::max_element(score.begin(), score.end());
    std::vector<int> winners;
    for (int i = 0; i < m; ++i)
        if (score[i] >= best - 1e-9) winners.push_back(remaining[i]);
    return winners;
}

void build_rankings(RuleKind kind, const Profile& profile, std::vector<int>& remaining,
                    Preference& prefix, std::set<Preference>& out, int branch_cap) {
    if (remaining.empty()) {
        out.insert(prefix);
        if (static_cast<int>(out.size()) > branch_cap)
            throw CapError("aggregate: correspondence exceeds " + std::to_string(branch_cap) +
                           " rankings");
        return;
    }
    std::vector<int> winners = round_winners(kind, profile, remaining);
    for (int w : winners) {  // ascending alternative id: round_winners preserves order
        prefix.push_back(w);
        std::vector<int> rest;
        for (int a : remaining)
            if (a != w) rest.push_back(a);
        build_rankings(kind, profile, rest, prefix, out, branch_cap);
        prefix.pop_back();
    }
}

}  // namespace

AggregateResult aggregate(const Rule& rule, const Profile& profile, int branch_cap) {
    if (profile.empty()) throw ContractError("aggregate: empty profile");
    int r = static_cast<int>(profile.front().size());
    for (const Preference& p : profile) {
        if (static_cast<int>(p.size()) != r) throw ContractError("aggregate: mixed alternative counts");
        check_preference(p);
    }
    AggregateResult res;
    switch (rule.kind) {
        case RuleKind::dictatorship: {
            if (rule.dictator < 0 || rule.dictator >= static_cast<int>(profile.size()))
                throw ContractError("dictator index out of range");
            res.preferences = {profile[rule.dictator]};
            return res;
        }
        case RuleKind::random_dictatorship: {
            std::set<Preference> support(profile.begin(), profile.end());
            res.preferences.assign(support.begin(), support.end());
            return res;
        }
        case RuleKind::kemeny: {
            if (r > kKemenyMaxR)
                throw CapError("kemeny enumeration capped at r <= " + std::to_string(kKemenyMaxR));
            Preference p(r);
            std::iota(p.begin(), p.end(), 0);
            long long best = -1;
            std::vector<Preference> argmin;
            do {
                long long total = 0;
                for (const Preference& q : profile) total += kendall_tau_raw(p, q);
                if (best < 0 || total < best) {
                    best = total;
                    argmin = {p};
                } else if (total == best) {
                    argmin.push_back(p);
                }
            } while (std::next_permutation(p.begin(), p.end()));
            res.preferences = std::move(argmin);
            std::sort(res.preferences.begin(), res.preferences.end());
            return res;
        }
        case RuleKind::reverse_plurality: {
            AggregateResult base = aggregate({RuleKind::plurality, 0}, profile, branch_cap);
            std::set<Preference> revs;
            for (const Preference& p : base.preferences) revs.insert(reversed(p));
            res.preferences.assign(revs.begin(), revs.end());
            return res;
        }
        default: {
            std::vector<int> remaining(r);
            std::iota(remaining.begin(), remaining.end(), 0);
            Preference prefix;
            std::set<Preference> out;
            build_rankings(rule.kind, profile, remaining, prefix, out, branch_cap);
            res.preferences.assign(out.begin(), out.end());
            return res;
        }
    }
}

Aggregator make_aggregator(const Rule& rule) {
    return [rule](const Profile& p) { return aggregate(rule, p); };
}

double delta_error(const AggregateResult& truth, const AggregateResult& candidate) {
    if (truth.preferences.empty() || candidate.preferences.empty())
        throw ContractError("delta_error: empty aggregate");
    double acc = 0.0;
    for (const Preference& y : candidate.preferences) {
        double best = std::numeric_limits<double>::infinity();
        for (const Preference& x : truth.preferences)
            best = std::min(best, kendall_tau_norm(x, y));
        acc += best;
    }
    return acc / candidate.preferences.size();
}

double delta_error_weighted(const AggregateResult& truth, const std::vector<Preference>& candidates,
                            const std::vector<double>& weights) {
    if (candidates.size() != weights.size() || candidates.empty())
        throw ContractError("delta_error_weighted: bad inputs");
    double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);
    double acc = 0.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Preference& x : truth.preferences)
            best = std::min(best, kendall_tau_norm(x, candidates[i]));
        acc += weights[i] * best;
    }
    return acc / total_w;
}

RepresentativeAssignment assign_representatives(const PairDistanceModel& model,
                                                const std::vector<int>& m, Rng& rng) {
    if (m.empty()) throw ContractError("assign_representatives: empty set");
    RepresentativeAssignment out;
    out.members = m;
    std::sort(out.members.begin(), out.members.end());
    out.rep_of.resize(model.n);
    out.weights.assign(out.members.size(), 0);
    for (int i = 0; i < model.n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> argmin;
        for (int j : out.members) {
            double d = model.mu_at(j, i);
            if (d < best - 1e-12) {
                best = d;
                argmin = {j};
            } else if (d <= best + 1e-12) {
                argmin.push_back(j);
            }
        }
        int rep = argmin[uniform_int(rng, 0, static_cast<int>(argmin.size()) - 1)];
        out.rep_of[i] = rep;
        auto it = std::lower_bound(out.members.begin(), out.members.end(), rep);
        ++out.weights[it - out.members.begin()];
    }
    return out;
}

Profile weighted_profile(const Profile& p, const RepresentativeAssignment& assignment) {
    if (p.size() != assignment.rep_of.size())
        throw ContractError("weighted_profile: assignment does not cover all voters");
    Profile q;
    q.reserve(p.size());
    for (size_t i = 0; i < p.size(); ++i) q.push_back(p[assignment.rep_of[i]]);
    return q;
}

double rho(const PairDistanceModel& model, const std::vector<int>& s) {
    if (s.empty()) return 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < model.n; ++i) {
        double best = 0.0;
        for (int j : s) best = std::max(best, model.similarity(j, i));
        worst = std::min(worst, best);
    }
    return worst;
}

double psi(const PairDistanceModel& model, const std::vector<int>& s) {
    if (s.empty()) return 0.0;
    double total = 0.0;
    for (int i = 0; i < model.n; ++i) {
        double best = 0.0;
        for (int j : s) best = std::max(best, model.similarity(j, i));
        total += best;
    }
    return total;
}

RepMethod rep_method_from_string(const std::string& s) {
    if (s == "greedy-min") return RepMethod::greedy_min;
    if (s == "greedy-sum") return RepMethod::greedy_sum;
    if (s == "greedy-orig") return RepMethod::greedy_orig;
    if (s == "degree-cen") return RepMethod::degree_cen;
    if (s == "random-poll") return RepMethod::random_poll;
    throw ContractError("unknown representative method '" + s + "'");
}

std::vector<int> select_representatives(RepMethod method, const PairDistanceModel& model, int k,
                                        const RepSelectionInputs& inputs, const SeedStream& stream) {
    int n = model.n;
    if (k > n || k < 1) throw ContractError("representative budget out of range");
    switch (method) {
        case RepMethod::greedy_min:
        case RepMethod::greedy_sum: {
            std::vector<int> m;
            std::vector<uint8_t> in(n, 0);
            for (int round = 0; round < k; ++round) {
                int best = -1;
                double best_v = -std::numeric_limits<double>::infinity();
                for (int j = 0; j < n; ++j) {
                    if (in[j]) continue;
                    m.push_back(j);
                    double v = method == RepMethod::greedy_min ? rho(model, m) : psi(model, m);
                    m.pop_back();
                    if (v > best_v + 1e-15) {
                        best_v = v;
                        best = j;
                    }
                }
                in[best] = 1;
                m.push_back(best);
            }
            std::sort(m.begin(), m.end());
            return m;
        }
        case RepMethod::greedy_orig: {
            if (!inputs.rule || !inputs.corpus)
                throw ContractError("greedy-orig needs a rule and a corpus");
            const GeneratedCorpus& corpus = *inputs.corpus;
            Aggregator f = make_aggregator(*inputs.rule);
            std::vector<AggregateResult> truths(corpus.topics.size());
            for (size_t t = 0; t < corpus.topics.size(); ++t) truths[t] = f(corpus.topics[t]);
            std::vector<int> m;
            std::vector<uint8_t> in(n, 0);
            Rng rng = stream.sub("greedy-orig").rng();
            for (int round = 0; round < k; ++round) {
                int best = -1;
                double best_err = std::numeric_limits<double>::infinity();
                for (int j = 0; j < n; ++j) {
                    if (in[j]) continue;
                    m.push_back(j);
                    RepresentativeAssignment asg = assign_representatives(model, m, rng);
                    double err = 0.0;
                    for (size_t t = 0; t < corpus.topics.size(); ++t) {
                        Profile qp = weighted_profile(corpus.topics[t], asg);
                        err += delta_error(truths[t], f(qp));
                    }
                    m.pop_back();
                    if (err < best_err - 1e-15) {
                        best_err = err;
                        best = j;
                    }
                }
                in[best] = 1;
                m.push_back(best);
            }
            std::sort(m.begin(), m.end());
            return m;
        }
        case RepMethod::degree_cen: {
            if (!inputs.graph) throw ContractError("degree-cen needs the graph");
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return inputs.graph->degree(a) > inputs.graph->degree(b);
            });
            std::vector<int> m(order.begin(), order.begin() + k);
            std::sort(m.begin(), m.end());
            return m;
        }
        case RepMethod::random_poll: {
            std::vector<int> pool(n);
            std::iota(pool.begin(), pool.end(), 0);
            Rng rng = stream.sub("random-poll").rng();
            for (int j = 0; j < k; ++j)
                std::swap(pool[j], pool[uniform_int(rng, j, n - 1)]);
            std::vector<int> m(pool.begin(), pool.begin() + k);
            std::sort(m.begin(), m.end());
            return m;
        }
    }
    throw ContractError("unreachable representative method");
}

bool sigma_permissible(double mu, double sigma, int r, double tol) {
    if (sigma > 1.0 / std::sqrt(12.0) + 1e-12) return false;
    DiscreteTruncGauss d = dtg_pmf(mu, sigma, r);
    return std::abs(d.mean() - mu) <= tol;
}

std::vector<EwiCell> ewi_test(const Aggregator& rule, const std::vector<Profile>& base_profiles,
                              const std::vector<double>& mu_grid,
                              const std::vector<double>& sigma_grid, int trials,
                              const SeedStream& stream, Exec exec) {
    if (base_profiles.empty()) throw ContractError("ewi_test: no base profiles");
    int r = static_cast<int>(base_profiles.front().front().size());
    std::vector<EwiCell> cells;
    for (double mu : mu_grid)
        for (double sg : sigma_grid) {
            if (mu < 0.0 || mu > 1.0 || sg < 0.0 || sg > 1.0 / std::sqrt(12.0) + 1e-12)
                throw ContractError("ewi grid outside [0,1] x [0,0.289]");
            EwiCell cell;
            cell.mu_d = mu;
            cell.sigma_d = sg;
            DiscreteTruncGauss dist = dtg_pmf(mu, sg, r);
            for (size_t b = 0; b < base_profiles.size(); ++b) {
                const Profile& base = base_profiles[b];
                AggregateResult truth = rule(base);
                std::vector<double> deltas(trials);
                SeedStream cs = stream.sub("ewi").sub(b * 1000003 + cells.size());
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
                for (int t = 0; t < trials; ++t) {
                    Rng rng = cs.rng_at(t);
                    Profile perturbed;
                    perturbed.reserve(base.size());
                    for (const Preference& p : base) {
                        int steps = sample_distance_index(dist, rng);
                        perturbed.push_back(uniform_at_distance(p, steps, rng));
                    }
                    deltas[t] = delta_error(truth, rule(perturbed));
                }
                double sum = 0.0, sumsq = 0.0;
                for (double v : deltas) {
                    sum += v;
                    sumsq += v * v;
                }
                double mean = sum / trials;
                double var = trials > 1
                                 ? std::max(0.0, (sumsq - trials * mean * mean) / (trials - 1))
                                 : 0.0;
                double se = std::sqrt(var / trials);
                if (mean > cell.max_mean_delta) {
                    cell.max_mean_delta = mean;
                    cell.std_error = se;
                }
                if (mean > mu + 3 * se) cell.violated = true;
            }
            cells.push_back(cell);
        }
    return cells;
}

TuGame similarity_game_from_matrix(int n, const std::vector<double>& c) {
    if (static_cast<int>(c.size()) != n * n) throw ContractError("similarity matrix size mismatch");
    if (n > 24) throw ContractError("game enumeration capped at 24 players");
    TuGame g;
    g.n = n;
    g.value = [n, c](uint32_t mask) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!(mask >> i & 1)) continue;
            for (int j = i + 1; j < n; ++j)
                if (mask >> j & 1) v += c[i * n + j];
        }
        return v;
    };
    return g;
}

TuGame similarity_game(const PairDistanceModel& model) {
    std::vector<double> c(model.n * model.n, 0.0);
    for (int i = 0; i < model.n; ++i)
        for (int j = 0; j < model.n; ++j)
            if (i != j) c[i * model.n + j] = model.similarity(i, j);
    return similarity_game_from_matrix(model.n, c);
}

std::vector<double> shapley_similarity(int n, const std::vector<double>& c) {
    if (static_cast<int>(c.size()) != n * n) throw ContractError("similarity matrix size mismatch");
    for (int i = 0; i < n; ++i) {
        if (c[i * n + i] != 0.0) throw ContractError("similarity diagonal must be zero");
        for (int j = 0; j < n; ++j)
            if (std::abs(c[i * n + j] - c[j * n + i]) > 1e-12)
                throw ContractError("similarity matrix must be symmetric");
    }
    std::vector<double> phi(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            if (i != j) acc += c[i * n + j];
        phi[j] = acc / 2.0;
    }
    return phi;
}

std::vector<double> gately(const TuGame& game, bool* degenerate) {
    int n = game.n;
    uint32_t grand = (n >= 32) ? 0xffffffffu : ((uint32_t{1} << n) - 1);
    double vn = game.value(grand);
    std::vector<double> marginal(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        marginal[i] = vn - game.value(grand & ~(uint32_t{1} << i));
        total += marginal[i];
    }
    if (degenerate) *degenerate = false;
    if (std::abs(total) < 1e-12) {
        if (degenerate) *degenerate = true;
        return std::vector<double>(n, vn / n);  // uniform split fallback
    }
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = marginal[i] / total * vn;
    return x;
}

std::vector<double> tau_value(const TuGame& game, TauDiagnostics* diag) {
    int n = game.n;
    uint32_t grand = (n >= 32) ? 0xffffffffu : ((uint32_t{1} << n) - 1);
    double vn = game.value(grand);
    std::vector<double> upper(n), lower(n);
    double su = 0.0, sl = 0.0;
    for (int i = 0; i < n; ++i) {
        upper[i] = vn - game.value(grand & ~(uint32_t{1} << i));
        lower[i] = game.value(uint32_t{1} << i);
        su += upper[i];
        sl += lower[i];
    }
    double lambda;
    if (std::abs(su - sl) < 1e-12) {
        lambda = 1.0;  // segment degenerate; any point satisfies efficiency only if su == vn
        if (std::abs(su - vn) > 1e-9) {
            std::vector<double> x(n, vn / n);
            if (diag) diag->lambda = lambda;
            return x;
        }
    } else {
        lambda = (vn - sl) / (su - sl);
    }
    if (diag) diag->lambda = lambda;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lambda * upper[i] + (1 - lambda) * lower[i];
    return x;
}

double social_centrality_score(const std::vector<std::optional<Preference>>& user_prefs,
                               const std::vector<Preference>& aggregates,
                               const std::vector<int>& n_t) {
    if (user_prefs.size() != aggregates.size() || user_prefs.size() != n_t.size())
        throw ContractError("score inputs disagree on topic count");
    double weight_total = 0.0;
    for (size_t t = 0; t < user_prefs.size(); ++t)
        if (user_prefs[t]) weight_total += n_t[t];
    if (weight_total <= 0.0) throw ContractError("no answered topics");
    double sim = 0.0;
    for (size_t t = 0; t < user_prefs.size(); ++t) {
        if (!user_prefs[t]) continue;
        double c = 1.0 - footrule_norm(*user_prefs[t], aggregates[t]);
        sim += (n_t[t] / weight_total) * c;
    }
    return 0.5 * std::ceil(20.0 * std::sqrt(sim) - 1e-9);
}

double friend_similarity(const std::vector<std::optional<Preference>>& a,
                         const std::vector<std::optional<Preference>>& b) {
    if (a.size() != b.size() || a.empty()) throw ContractError("friend similarity: bad topic lists");
    double acc = 0.0;
    for (size_t t = 0; t < a.size(); ++t)
        if (a[t] && b[t]) acc += 1.0 - footrule_norm(*a[t], *b[t]);
    return 100.0 * acc / a.size();
}

}  // namespace sna
