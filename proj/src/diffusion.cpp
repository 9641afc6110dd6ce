#include "sna/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sna {

DecaySchedule DecaySchedule::geometric(double delta) {
    if (delta < 0.0 || delta > 1.0) throw ContractError("decay delta outside [0,1]");
    DecaySchedule d;
    d.geometric_ = true;
    d.delta_ = delta;
    return d;
}

DecaySchedule DecaySchedule::table(std::vector<double> values) {
    if (values.empty()) throw ContractError("empty decay table");
    if (values.front() > 1.0 || values.back() < 0.0) throw ContractError("decay values outside [0,1]");
    for (size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[i - 1] + 1e-12) throw ContractError("decay table must be non-increasing");
    DecaySchedule d;
    d.geometric_ = false;
    d.values_ = std::move(values);
    return d;
}

double DecaySchedule::at(int t) const {
    if (geometric_) {
        if (t == 0) return 1.0;
        return std::pow(delta_, t);
    }
    if (t < static_cast<int>(values_.size())) return values_[t];
    return values_.back();
}

bool DecaySchedule::is_constant_one() const { return geometric_ && delta_ == 1.0; }

DiffusionTrace simulate_ic(const Graph& g, const std::vector<int>& seeds, Rng& rng) {
    if (seeds.empty()) throw ContractError("simulate_ic: empty seed set");
    std::vector<uint8_t> active(g.node_count(), 0);
    DiffusionTrace trace;
    std::vector<int> frontier;
    for (int s : seeds) {
        g.check_node(s);
        if (!active[s]) {
            active[s] = 1;
            frontier.push_back(s);
        }
    }
    std::sort(frontier.begin(), frontier.end());
    trace.steps.push_back(frontier);
    int cap = g.node_count();  // IC terminates within n rounds
    for (int round = 0; round < cap && !trace.steps.back().empty(); ++round) {
        std::vector<int> next;
        for (int u : trace.steps.back()) {
            for (auto [v, ei] : g.out(u)) {
                if (active[v]) continue;
                if (uniform01(rng) < g.edge(ei).weight) {
                    active[v] = 1;
                    next.push_back(v);
                }
            }
        }
        std::sort(next.begin(), next.end());
        if (next.empty()) break;
        trace.steps.push_back(std::move(next));
    }
    return trace;
}

namespace {

// Allocation-free cascade: returns the final activated count. Scratch
// buffers are reused across iterations.
struct CascadeScratch {
    std::vector<uint8_t> active;
    std::vector<int> frontier;
    std::vector<int> next;
};

int cascade_spread(const Graph& g, const std::vector<int>& seeds, Rng& rng,
                   CascadeScratch& scratch) {
    scratch.active.assign(g.node_count(), 0);
    scratch.frontier.clear();
    for (int s : seeds)
        if (!scratch.active[s]) {
            scratch.active[s] = 1;
            scratch.frontier.push_back(s);
        }
    std::sort(scratch.frontier.begin(), scratch.frontier.end());
    int count = static_cast<int>(scratch.frontier.size());
    while (!scratch.frontier.empty()) {
        scratch.next.clear();
        for (int u : scratch.frontier) {
            for (auto [v, ei] : g.out(u)) {
                if (scratch.active[v]) continue;
                if (uniform01(rng) < g.edge(ei).weight) {
                    scratch.active[v] = 1;
                    scratch.next.push_back(v);
                }
            }
        }
        std::sort(scratch.next.begin(), scratch.next.end());
        count += static_cast<int>(scratch.next.size());
        std::swap(scratch.frontier, scratch.next);
    }
    return count;
}

// Collects one scalar per MC iteration, each with an index-derived
// generator, then sums in index order. Parallel and serial execution
// produce identical results by construction.
template <typename F>
Estimate mc_mean(int iterations, const SeedStream& stream, Exec exec, F&& sample_value) {
    if (iterations < 1) throw ContractError("iteration count must be >= 1");
    std::vector<double> samples(iterations);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (int i = 0; i < iterations; ++i) {
        Rng rng = stream.rng_at(i);
        samples[i] = sample_value(rng);
    }
    double sum = 0.0, sumsq = 0.0;
    for (double v : samples) {
        sum += v;
        sumsq += v * v;
    }
    double mean = sum / iterations;
    double var = iterations > 1 ? std::max(0.0, (sumsq - iterations * mean * mean) / (iterations - 1))
                                : 0.0;
    return {mean, std::sqrt(var / iterations)};
}

}  // namespace

Estimate estimate_sigma(const Graph& g, const std::vector<int>& seeds, int iterations,
                        const SeedStream& stream, Exec exec) {
    if (seeds.empty()) return {0.0, 0.0};
    for (int s : seeds) g.check_node(s);
    return mc_mean(iterations, stream, exec, [&](Rng& rng) {
        thread_local CascadeScratch scratch;
        return static_cast<double>(cascade_spread(g, seeds, rng, scratch));
    });
}

double exact_sigma(const Graph& g, const std::vector<int>& seeds, int edge_cap) {
    for (int s : seeds) g.check_node(s);
    if (seeds.empty()) return 0.0;
    double total = 0.0;
    enumerate_live_graphs(
        g, [&](const LiveGraph& x) { total += x.probability * reachable_count(x, seeds); },
        edge_cap);
    return total;
}

namespace {

// Per-node activation steps from `seeds` in live graph x; kUnreachable if
// never activated.
std::vector<int> activation_steps(const LiveGraph& x, const std::vector<int>& seeds) {
    const Graph& g = *x.parent;
    std::vector<int> step(g.node_count(), kUnreachable);
    std::vector<int> frontier;
    for (int s : seeds)
        if (step[s] == kUnreachable) {
            step[s] = 0;
            frontier.push_back(s);
        }
    int t = 0;
    while (!frontier.empty()) {
        ++t;
        std::vector<int> next;
        for (int u : frontier)
            for (auto [v, ei] : g.out(u))
                if (x.present[ei] && step[v] == kUnreachable) {
                    step[v] = t;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    return step;
}

}  // namespace

Estimate estimate_nu(const Graph& g, const std::vector<int>& seeds, const DecaySchedule& decay,
                     int iterations, const SeedStream& stream, Exec exec) {
    if (seeds.empty()) return {0.0, 0.0};
    return mc_mean(iterations, stream, exec, [&](Rng& rng) {
        DiffusionTrace t = simulate_ic(g, seeds, rng);
        double v = 0.0;
        for (size_t s = 0; s < t.steps.size(); ++s)
            v += decay.at(static_cast<int>(s)) * t.steps[s].size();
        return v;
    });
}

double exact_nu(const Graph& g, const std::vector<int>& seeds, const DecaySchedule& decay,
                int edge_cap) {
    for (int s : seeds) g.check_node(s);
    if (seeds.empty()) return 0.0;
    double total = 0.0;
    enumerate_live_graphs(
        g,
        [&](const LiveGraph& x) {
            double v = 0.0;
            for (int st : activation_steps(x, seeds))
                if (st != kUnreachable) v += decay.at(st);
            total += x.probability * v;
        },
        edge_cap);
    return total;
}

DiffusionTrace simulate_lt(const Graph& g, const std::vector<int>& seeds, Rng& rng,
                           const std::vector<double>& threshold_lower_bounds) {
    if (seeds.empty()) throw ContractError("simulate_lt: empty seed set");
    if (static_cast<int>(threshold_lower_bounds.size()) != g.node_count())
        throw ContractError("threshold bound list size mismatch");
    for (int u = 0; u < g.node_count(); ++u) {
        double sum = 0.0;
        for (auto [v, ei] : g.in(u)) sum += g.edge(ei).weight;
        if (sum > 1.0 + 1e-9)
            throw ContractError("in-weight sum exceeds 1 at node " + std::to_string(u));
        if (threshold_lower_bounds[u] < 0.0 || threshold_lower_bounds[u] >= 1.0)
            throw ContractError("threshold lower bound outside [0,1)");
    }
    int n = g.node_count();
    std::vector<double> threshold(n);
    for (int u = 0; u < n; ++u) {
        double lo = threshold_lower_bounds[u];
        double unit = 1.0 - uniform01(rng);  // (0,1]
        threshold[u] = lo + unit * (1.0 - lo);
    }
    std::vector<uint8_t> active(n, 0);
    std::vector<double> incoming(n, 0.0);
    DiffusionTrace trace;
    std::vector<int> frontier;
    for (int s : seeds) {
        g.check_node(s);
        if (!active[s]) {
            active[s] = 1;
            frontier.push_back(s);
        }
    }
    std::sort(frontier.begin(), frontier.end());
    trace.steps.push_back(frontier);
    for (int round = 0; round < n && !trace.steps.back().empty(); ++round) {
        for (int u : trace.steps.back())
            for (auto [v, ei] : g.out(u))
                if (!active[v]) incoming[v] += g.edge(ei).weight;
        std::vector<int> next;
        for (int v = 0; v < n; ++v)
            if (!active[v] && incoming[v] >= threshold[v]) next.push_back(v);
        if (next.empty()) break;
        for (int v : next) active[v] = 1;
        trace.steps.push_back(std::move(next));
    }
    return trace;
}

std::string trace_to_json(const DiffusionTrace& t) {
    std::string out = "[";
    for (size_t s = 0; s < t.steps.size(); ++s) {
        if (s) out += ",";
        out += "[";
        for (size_t i = 0; i < t.steps[s].size(); ++i) {
            if (i) out += ",";
            out += std::to_string(t.steps[s][i]);
        }
        out += "]";
    }
    out += "]";
    return out;
}

}  // namespace sna
