#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sna/rng.hpp"

namespace sna {

// Violated precondition or invariant; CLI maps this to exit code 2.
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Work refused because it exceeds a configured cap; CLI exit code 3.
struct CapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Edge {
    int src;
    int dst;
    double weight;  // probability (IC) or influence degree (LT), in [0,1]
};

// Weighted graph with dense node ids 0..n-1. For undirected graphs each
// pair is stored once; adjacency indexes cover both orientations.
class Graph {
public:
    Graph() = default;
    Graph(int n, bool directed) : n_(n), directed_(directed) {}

    static Graph from_edges(int n, bool directed, const std::vector<Edge>& edges);

    void add_edge(int u, int v, double w);
    void finalize();  // builds adjacency indexes; call after the last add_edge

    int node_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool directed() const { return directed_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int i) const { return edges_[i]; }

    // (neighbor, edge index) lists, sorted by neighbor id
    const std::vector<std::pair<int, int>>& out(int u) const { return out_[u]; }
    const std::vector<std::pair<int, int>>& in(int u) const { return in_[u]; }
    int out_degree(int u) const { return static_cast<int>(out_[u].size()); }
    int in_degree(int u) const { return static_cast<int>(in_[u].size()); }
    // degree in the undirected sense (valid for undirected graphs)
    int degree(int u) const { return out_degree(u); }

    void check_node(int u) const {
        if (u < 0 || u >= n_) throw ContractError("unknown node id " + std::to_string(u));
    }

private:
    int n_ = 0;
    bool directed_ = true;
    bool finalized_ = false;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<int, int>>> out_, in_;
};

struct LoadResult {
    Graph graph;
    std::map<std::string, int> id_map;  // external id -> internal id
};

// Parses "u v [p]" lines ('#' starts a comment, blank lines skipped);
// missing p defaults to 1.0. Node tokens are arbitrary strings, re-indexed
// densely in order of first appearance.
LoadResult load_edge_list(const std::string& text, bool directed);

std::string id_map_to_json(const std::map<std::string, int>& m);

// One sampled edge-subset realization of a probabilistic graph.
struct LiveGraph {
    const Graph* parent = nullptr;
    std::vector<uint8_t> present;  // per edge index
    double probability = 0.0;

    bool has_edge(int i) const { return present[i] != 0; }
};

double live_graph_probability(const Graph& g, const std::vector<uint8_t>& present);

Graph to_weighted_cascade(const Graph& g);
Graph to_trivalency(const Graph& g, Rng& rng);

LiveGraph sample_live_graph(const Graph& g, Rng& rng);

inline constexpr int kDefaultEnumCap = 22;

// Visits all 2^m live graphs. Refuses when m exceeds the cap.
void enumerate_live_graphs(const Graph& g, const std::function<void(const LiveGraph&)>& visit,
                           int edge_cap = kDefaultEnumCap);

// Nodes reachable from `seeds` via present edges, seeds included.
int reachable_count(const LiveGraph& x, const std::vector<int>& seeds);

inline constexpr int kUnreachable = -1;

// BFS hop counts on an undirected view of g; kUnreachable marks
// disconnected nodes.
std::vector<int> shortest_path_lengths(const Graph& g, int source);

// ---- integer max-flow ----

struct FlowArc {
    int from;
    int to;
    long long capacity;
};

struct FlowNetwork {
    int node_count = 0;
    int source = 0;
    int sink = 0;
    std::vector<FlowArc> arcs;

    int add_node() { return node_count++; }
    void add_arc(int from, int to, long long cap);
};

struct MaxFlowResult {
    long long value = 0;
    std::vector<long long> arc_flow;  // parallel to FlowNetwork::arcs
};

// Ford-Fulkerson with BFS augmenting paths; integral capacities give an
// integral flow.
MaxFlowResult max_flow(const FlowNetwork& net);

}  // namespace sna
