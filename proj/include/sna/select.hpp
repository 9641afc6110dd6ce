#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sna/diffusion.hpp"
#include "sna/graph.hpp"

namespace sna {

enum class BudgetKind { exact_k, at_most_k };

// Set-function evaluator shared by all value-driven selectors. Evaluation
// must be deterministic for a fixed seed configuration; Monte-Carlo backed
// objectives derive their stream from the evaluated set.
struct Objective {
    std::function<double(const std::vector<int>&)> eval;
    BudgetKind budget = BudgetKind::exact_k;
    Exec exec = Exec::parallel;
};

// sigma(S) estimated with `iterations` cascades; the generator is derived
// from (stream, S) so repeated evaluations of one set agree exactly.
Objective sigma_objective(const Graph& g, int iterations, const SeedStream& stream,
                          Exec exec = Exec::parallel);
Objective exact_sigma_objective(const Graph& g, int edge_cap = kDefaultEnumCap);

struct NodeValues {
    std::vector<double> values;
    std::string provenance;  // "shapley" | "degree" | "gdd" | ...
};

struct GreedyResult {
    std::vector<int> selected;      // in pick order
    std::vector<double> prefix_values;  // objective value after each pick
};

// Picks k elements by largest marginal value; ties go to the lowest node
// id. Prefix values let the caller take the best prefix under an
// at-most-k budget.
GreedyResult greedy_hill_climb(const Objective& obj, const std::vector<int>& candidates, int k);

std::vector<int> single_discount(const Graph& g, int k);
std::vector<int> weighted_discount(const Graph& g, int k);

// Iterative heuristic: pick argmax of
//   w_v = prod_{x in X}(1-p_xv) * (1 + sum_{y in Y} p_vy)
// where X = selected in-neighbors of v and Y = unselected out-neighbors.
// `preselected` counts as already picked without consuming budget.
std::vector<int> gdd_select(const Graph& g, int k, const std::vector<int>& preselected = {});
double gdd_weight(const Graph& g, int v, const std::vector<uint8_t>& selected);
std::vector<double> gdd_initial_weights(const Graph& g);

struct CeParams {
    int n_min = 0;       // 0 -> defaults to n
    int n_max = 0;       // 0 -> defaults to 20n
    int n_elite = 0;     // 0 -> defaults to ceil(n/4)
    double alpha = 0.6;  // smoothing toward the new frequency estimate
    int max_iters = 20;
    double gamma_tol = 1e-9;  // elite-threshold convergence
};

struct CeResult {
    std::vector<int> best_sample;
    double best_value = 0.0;
    std::vector<double> best_value_by_iter;           // best-ever, non-decreasing
    std::vector<std::vector<double>> probability_trace;  // per-iteration node probabilities
    int iterations = 0;
};

// Cross-entropy search over fixed-size node subsets with an elite update
// weighted by objective value.
CeResult ce_subset_search(const Objective& obj, const std::vector<int>& candidates, int k,
                          const CeParams& params, const SeedStream& stream,
                          const std::vector<double>& initial_probs = {});

std::vector<int> rmax_select(const Objective& obj, const std::vector<int>& candidates, int k,
                             int num_samples, const SeedStream& stream);

// Bernoulli draw over `candidates` conditioned on exactly k successes;
// rejection sampling with a weighted without-replacement fallback.
std::vector<int> sample_fixed_size(const std::vector<double>& probs,
                                   const std::vector<int>& candidates, int k, Rng& rng);

// Average marginal contribution over `permutations` random orders.
NodeValues shapley_estimate(const Objective& obj, int n, int permutations,
                            const SeedStream& stream);

// Shapley-valued selection with cascade-specific discounting: picking y
// multiplies each out-neighbor value by (1-p_yx) and subtracts
// p_zy * phi_y from each in-neighbor z (clamped at zero).
std::vector<int> spic_select(const Graph& g, int k, const Objective& sigma_eval,
                             int permutations, const SeedStream& stream);

enum class PostprocessMode {
    eliminate_always,
    eliminate_threshold,
    eliminate_local,
    discount_1,  // multiply by (1 - weight from chosen in-neighbor)
    discount_2,  // subtract weight * original value
    discount_3,  // subtract weight * chosen neighbor's value, clamp at 0
};

PostprocessMode postprocess_mode_from_string(const std::string& s);

// Turns per-node values into a top-k set via neighbor elimination or
// value discounting; elimination modes fall back to plain value order
// when no eligible node remains.
std::vector<int> postprocess(const NodeValues& values, const Graph& g, int k,
                             PostprocessMode mode, double threshold = 0.0);

}  // namespace sna
