#include "sna/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <set>
#include <sstream>

namespace sna {

Graph Graph::from_edges(int n, bool directed, const std::vector<Edge>& edges) {
    Graph g(n, directed);
    for (const Edge& e : edges) g.add_edge(e.src, e.dst, e.weight);
    g.finalize();
    return g;
}

void Graph::add_edge(int u, int v, double w) {
    if (finalized_) throw ContractError("add_edge after finalize");
    if (u < 0 || v < 0 || u >= n_ || v >= n_) throw ContractError("edge endpoint out of range");
    if (u == v) throw ContractError("self-loop on node " + std::to_string(u));
    if (w < 0.0 || w > 1.0) throw ContractError("edge weight outside [0,1]");
    edges_.push_back({u, v, w});
}

void Graph::finalize() {
    out_.assign(n_, {});
    in_.assign(n_, {});
    std::set<std::pair<int, int>> seen;
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
        const Edge& e = edges_[i];
        std::pair<int, int> key =
            directed_ ? std::make_pair(e.src, e.dst) : std::make_pair(std::min(e.src, e.dst), std::max(e.src, e.dst));
        if (!seen.insert(key).second)
            throw ContractError("duplicate edge " + std::to_string(e.src) + "->" +
                                std::to_string(e.dst));
        out_[e.src].push_back({e.dst, i});
        in_[e.dst].push_back({e.src, i});
        if (!directed_) {
            out_[e.dst].push_back({e.src, i});
            in_[e.src].push_back({e.dst, i});
        }
    }
    auto by_neighbor = [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
        return a < b;
    };
    for (auto& v : out_) std::sort(v.begin(), v.end(), by_neighbor);
    for (auto& v : in_) std::sort(v.begin(), v.end(), by_neighbor);
    finalized_ = true;
}

LoadResult load_edge_list(const std::string& text, bool directed) {
    std::map<std::string, int> ids;
    std::vector<std::tuple<int, int, double>> raw;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    auto intern = [&](const std::string& tok) {
        auto it = ids.find(tok);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(ids.size());
        ids.emplace(tok, id);
        return id;
    };
    while (std::getline(stream, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string u, v, p;
        if (!(ls >> u)) continue;  // blank
        if (!(ls >> v)) throw ContractError("line " + std::to_string(lineno) + ": expected 'u v [p]'");
        double w = 1.0;
        if (ls >> p) {
            try {
                size_t pos = 0;
                w = std::stod(p, &pos);
                if (pos != p.size()) throw std::invalid_argument(p);
            } catch (const std::exception&) {
                throw ContractError("line " + std::to_string(lineno) + ": bad weight '" + p + "'");
            }
            if (w < 0.0 || w > 1.0)
                throw ContractError("line " + std::to_string(lineno) + ": weight outside [0,1]");
        }
        std::string extra;
        if (ls >> extra)
            throw ContractError("line " + std::to_string(lineno) + ": trailing token '" + extra + "'");
        if (u == v) throw ContractError("line " + std::to_string(lineno) + ": self-loop");
        int ui = intern(u);
        int vi = intern(v);
        raw.emplace_back(ui, vi, w);
    }
    Graph g(static_cast<int>(ids.size()), directed);
    for (auto& [u, v, w] : raw) g.add_edge(u, v, w);
    g.finalize();
    return {std::move(g), std::move(ids)};
}

std::string id_map_to_json(const std::map<std::string, int>& m) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : m) {
        if (!first) out += ",";
        first = false;
        out += "\"";
        for (char c : k) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        out += "\":" + std::to_string(v);
    }
    out += "}";
    return out;
}

double live_graph_probability(const Graph& g, const std::vector<uint8_t>& present) {
    double p = 1.0;
    for (int i = 0; i < g.edge_count(); ++i)
        p *= present[i] ? g.edge(i).weight : 1.0 - g.edge(i).weight;
    return p;
}

Graph to_weighted_cascade(const Graph& g) {
    if (g.directed()) throw ContractError("weighted-cascade transform expects an undirected graph");
    Graph out(g.node_count(), true);
    for (const Edge& e : g.edges()) {
        out.add_edge(e.src, e.dst, 1.0 / g.degree(e.dst));
        out.add_edge(e.dst, e.src, 1.0 / g.degree(e.src));
    }
    out.finalize();
    return out;
}

Graph to_trivalency(const Graph& g, Rng& rng) {
    if (g.directed()) throw ContractError("trivalency transform expects an undirected graph");
    static constexpr double kValues[3] = {0.001, 0.01, 0.1};
    Graph out(g.node_count(), true);
    for (const Edge& e : g.edges()) {
        out.add_edge(e.src, e.dst, kValues[uniform_int(rng, 0, 2)]);
        out.add_edge(e.dst, e.src, kValues[uniform_int(rng, 0, 2)]);
    }
    out.finalize();
    return out;
}

LiveGraph sample_live_graph(const Graph& g, Rng& rng) {
    LiveGraph x;
    x.parent = &g;
    x.present.resize(g.edge_count());
    for (int i = 0; i < g.edge_count(); ++i)
        x.present[i] = uniform01(rng) < g.edge(i).weight ? 1 : 0;
    x.probability = live_graph_probability(g, x.present);
    return x;
}

void enumerate_live_graphs(const Graph& g, const std::function<void(const LiveGraph&)>& visit,
                           int edge_cap) {
    int m = g.edge_count();
    if (m > edge_cap)
        throw CapError("live-graph enumeration needs cap >= " + std::to_string(m) +
                       " edges (configured " + std::to_string(edge_cap) + ")");
    LiveGraph x;
    x.parent = &g;
    x.present.assign(m, 0);
    for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
        for (int i = 0; i < m; ++i) x.present[i] = (mask >> i) & 1;
        x.probability = live_graph_probability(g, x.present);
        visit(x);
    }
}

int reachable_count(const LiveGraph& x, const std::vector<int>& seeds) {
    const Graph& g = *x.parent;
    std::vector<uint8_t> vis(g.node_count(), 0);
    std::vector<int> stack;
    for (int s : seeds) {
        g.check_node(s);
        if (!vis[s]) {
            vis[s] = 1;
            stack.push_back(s);
        }
    }
    int count = static_cast<int>(stack.size());
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (auto [v, ei] : g.out(u)) {
            if (x.present[ei] && !vis[v]) {
                vis[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count;
}

std::vector<int> shortest_path_lengths(const Graph& g, int source) {
    g.check_node(source);
    std::vector<int> dist(g.node_count(), kUnreachable);
    std::queue<int> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        auto relax = [&](int v) {
            if (dist[v] == kUnreachable) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        };
        for (auto [v, ei] : g.out(u)) relax(v);
        if (g.directed())
            for (auto [v, ei] : g.in(u)) relax(v);
    }
    return dist;
}

void FlowNetwork::add_arc(int from, int to, long long cap) {
    if (cap < 0) throw ContractError("negative arc capacity");
    if (from == to) throw ContractError("flow arc self-loop");
    arcs.push_back({from, to, cap});
}

MaxFlowResult max_flow(const FlowNetwork& net) {
    if (net.source == net.sink) throw ContractError("source equals sink");
    int n = net.node_count;
    int m = static_cast<int>(net.arcs.size());
    // residual graph: forward arc 2i, backward arc 2i+1
    std::vector<long long> cap(2 * m);
    std::vector<int> head(2 * m);
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < m; ++i) {
        cap[2 * i] = net.arcs[i].capacity;
        cap[2 * i + 1] = 0;
        head[2 * i] = net.arcs[i].to;
        head[2 * i + 1] = net.arcs[i].from;
        adj[net.arcs[i].from].push_back(2 * i);
        adj[net.arcs[i].to].push_back(2 * i + 1);
    }
    MaxFlowResult res;
    std::vector<int> pred(n);
    while (true) {
        std::fill(pred.begin(), pred.end(), -1);
        std::queue<int> q;
        q.push(net.source);
        pred[net.source] = -2;
        while (!q.empty() && pred[net.sink] == -1) {
            int u = q.front();
            q.pop();
            for (int a : adj[u]) {
                if (cap[a] > 0 && pred[head[a]] == -1) {
                    pred[head[a]] = a;
                    q.push(head[a]);
                }
            }
        }
        if (pred[net.sink] == -1) break;
        long long push = std::numeric_limits<long long>::max();
        for (int v = net.sink; v != net.source;) {
            int a = pred[v];
            push = std::min(push, cap[a]);
            v = head[a ^ 1];
        }
        for (int v = net.sink; v != net.source;) {
            int a = pred[v];
            cap[a] -= push;
            cap[a ^ 1] += push;
            v = head[a ^ 1];
        }
        res.value += push;
    }
    res.arc_flow.resize(m);
    for (int i = 0; i < m; ++i) res.arc_flow[i] = cap[2 * i + 1];
    return res;
}

}  // namespace sna
