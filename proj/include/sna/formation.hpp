#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sna/graph.hpp"
#include "sna/rng.hpp"

namespace sna {

// Small undirected simple graph with bitmask adjacency (at most 64 nodes).
struct UGraph {
    int n = 0;
    std::vector<uint64_t> adj;

    UGraph() = default;
    explicit UGraph(int n_) : n(n_), adj(n_, 0) {
        if (n_ > 64) throw ContractError("formation graphs capped at 64 nodes");
    }
    bool has_edge(int u, int v) const { return adj[u] >> v & 1; }
    void add_edge(int u, int v) {
        if (u == v) throw ContractError("self-loop");
        adj[u] |= uint64_t{1} << v;
        adj[v] |= uint64_t{1} << u;
    }
    void remove_edge(int u, int v) {
        adj[u] &= ~(uint64_t{1} << v);
        adj[v] &= ~(uint64_t{1} << u);
    }
    int degree(int u) const { return __builtin_popcountll(adj[u]); }
    int edge_count() const {
        int total = 0;
        for (uint64_t a : adj) total += __builtin_popcountll(a);
        return total / 2;
    }
    std::vector<std::pair<int, int>> edge_list() const;
    static UGraph from_graph(const Graph& g);
};

// Benefit/cost parameters of the link-formation utility. Benefits decay
// with distance; geometric kind uses b_i = delta^i.
struct FormationParams {
    bool geometric = true;
    double delta = 0.8;
    std::vector<double> benefits;  // b_1, b_2, ... for the table kind
    double link_cost = 0.0;        // c
    double entry_factor = 0.0;     // c0, per unit of the first contact's degree
    double rent_fraction = 0.0;    // gamma in [0,1)

    double benefit(int dist) const;
    static FormationParams geometric_benefits(double delta);
};

struct EntryContext {
    int target = -1;  // the node the entrant connects to (fee = c0 * deg before the link)
};

struct FormationState {
    UGraph net;
    int entered = 0;  // nodes 0..entered-1 are in the network
};

// Per-node utilities: direct benefits minus link costs, distance-decayed
// indirect benefits, intermediation rents paid to essential nodes, and
// bridging rents received.
std::vector<double> all_utilities(const UGraph& g, const FormationParams& params);
double utility(const UGraph& g, const FormationParams& params, int j,
               const std::optional<EntryContext>& entry = std::nullopt);

// Nodes lying on every path between y and z (empty when disconnected or
// adjacent with alternatives).
std::vector<int> essential_nodes(const UGraph& g, int y, int z);

struct Action {
    enum Kind { pass, add, del } kind = pass;
    int partner = -1;
};

// Myopic single-link best response of `node`: additions require the
// partner not to lose, any move requires strict improvement. Ties among
// equally-best strict improvements break uniformly at random.
Action best_response(const UGraph& g, int node, const FormationParams& params, Rng& rng);

struct StabilityReport {
    bool stable = true;
    Action violating_move;
    int violating_node = -1;
};

StabilityReport is_pairwise_stable(const UGraph& g, const FormationParams& params);

struct FormationEvent {
    enum Kind { enter, add, del, decline } kind = enter;
    int actor = -1;
    int partner = -1;
    double utility_before = 0.0;
    double utility_after = 0.0;
    int network_size = 0;
};

struct FormationRun {
    FormationState state;
    std::vector<FormationEvent> events;
    bool stopped_growing = false;  // an entrant declined; growth ceased
    // network sizes at which stabilization completed, for per-size probes
    std::vector<int> stable_sizes;
};

// Per-entry parameter override: the deviated values apply while node
// `node` enters and the network re-stabilizes; `restored` applies after.
struct DeviationPlan {
    int node = -1;
    FormationParams deviated;
};

inline constexpr int kRoundCapFactor = 10;  // cap = factor * n^2 moves per stabilization

// Sequential growth: each entrant proposes its best positive-utility entry
// link (declining stops growth), then random best responses run until a
// full pass makes no move; repeats until n_max nodes entered.
FormationRun run_recursive_formation(const FormationParams& params, int n_max,
                                     const FormationState& base, const SeedStream& stream,
                                     const std::optional<DeviationPlan>& deviation = std::nullopt,
                                     const std::function<void(const FormationState&)>& on_stable = {});

enum class Topology { star, complete, diameter, bipartite_turan, two_star, k_star };
Topology topology_from_string(const std::string& s);

enum class ParamPosition { low, mid, high };
ParamPosition position_from_string(const std::string& s);

struct PresetSpec {
    Topology topology = Topology::star;
    int diameter_bound = 2;  // for Topology::diameter
    int k = 3;               // for Topology::k_star
    int sigma_max = 0;       // entry bound for the two-star interval form; 0 = closed form
    std::optional<double> gamma_override;  // must satisfy the topology's bound
};

struct Preset {
    FormationParams params;
    FormationState base;  // starting network
    // interval bounds actually used, for deviation magnitudes
    double c_lo = 0.0, c_hi = 0.0;
    double c0_lo = 0.0, c0_hi = 0.0;
    double gamma_lo = 0.0, gamma_hi = 0.0;
};

// Parameters at the requested position inside the sufficient interval for
// the topology (low = 10% above the lower bound, mid = 50%, high = 10%
// below the upper bound).
Preset preset_conditions(const PresetSpec& spec, const FormationParams& benefits,
                         ParamPosition pos_gamma, ParamPosition pos_c, ParamPosition pos_c0);
inline Preset preset_conditions(const PresetSpec& spec, const FormationParams& benefits,
                                ParamPosition pos) {
    return preset_conditions(spec, benefits, pos, pos, pos);
}

// Structural target checks used by experiments.
bool matches_topology(const UGraph& g, const PresetSpec& spec);
int ged_to_target(const UGraph& g, const PresetSpec& spec);

// ---- graph edit distance ----

int ged_star(const UGraph& g);
int ged_complete(const UGraph& g);

struct GedResult {
    int distance = 0;
    std::vector<int> centers;  // witness center assignment
    int retained_interlinks = 0;
};

// Minimum edits to a balanced k-star, minimized over center mappings;
// retained center-leaf links per mapping come from an integer max-flow.
GedResult ged_kstar(const UGraph& g, int k, bool prune = true);

// ---- deviation experiments ----

struct DeviationOutcome {
    std::vector<std::pair<int, int>> ged_curve;  // (network size, ged) at each stabilization
    char result_class = 'A';  // A: never deviates; B: heals; C: constant plateau; D: growing
    int healed_after_entries = -1;  // entries from deviation until ged returns to 0 (-1 = never)
};

enum class DeviatedParam { link_cost, entry_factor };

struct DeviationSpec {
    DeviatedParam param = DeviatedParam::link_cost;
    int direction = -1;       // -1 below the interval, +1 above
    double magnitude = 0.0;   // 0 = default: 2% of interval length, 0.01 for singletons
    int deviation_node = 2;
    ParamPosition restore_gamma = ParamPosition::mid;
    ParamPosition restore_c = ParamPosition::mid;
    ParamPosition restore_c0 = ParamPosition::mid;
};

DeviationOutcome deviation_experiment(const PresetSpec& preset, const FormationParams& benefits,
                                      const DeviationSpec& dev, int n_max,
                                      const SeedStream& stream);

std::string formation_events_to_json(const FormationRun& run);

}  // namespace sna
