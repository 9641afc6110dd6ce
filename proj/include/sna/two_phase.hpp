#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sna/diffusion.hpp"
#include "sna/graph.hpp"
#include "sna/select.hpp"

namespace sna {

// Mid-diffusion snapshot: nodes activated before step d and exactly at
// step d. The two sets are disjoint.
struct Observation {
    std::vector<int> already;   // activated strictly before `step`
    std::vector<int> recent;    // activated exactly at `step`
    int step = 0;
};

Observation observe(const DiffusionTrace& trace, int d);

enum class PhaseMode { myopic, farsighted };

enum class SelectorId { greedy, gdd, sd, wd, face, spic, rmax };
SelectorId selector_from_string(const std::string& s);

struct TwoPhaseConfig {
    int k = 1;                  // total budget
    int k1 = 1;                 // first-phase budget; k2 = k - k1
    std::optional<int> d;       // delay; nullopt = run phase 1 to stagnation
    int m1 = 1000;              // cascades for phase-1 objective estimates
    int m2 = 1000;              // cascades for phase-2 objective estimates
    DecaySchedule decay = DecaySchedule::geometric(1.0);
    PhaseMode mode = PhaseMode::myopic;
    SelectorId selector = SelectorId::greedy;

    int k2() const { return k - k1; }
};

// Exact two-phase value by live-graph enumeration: live graphs are grouped
// by their step-d observation; for each group the best k2-set over
// N \ (S1 u already) is found by subset enumeration.
double eval_f_exact(const Graph& g, const std::vector<int>& s1, int d, int k2,
                    int edge_cap = kDefaultEnumCap, long long subset_cap = 2000000);

// Monte-Carlo two-phase value with the second phase chosen by the
// degree-discount heuristic on the residual graph. With a non-trivial
// decay, activations at step t are worth Gamma(t).
Estimate eval_h(const Graph& g, const std::vector<int>& s1, int d, int k2, int m1, int m2,
                const SeedStream& stream, const DecaySchedule& decay = DecaySchedule::geometric(1.0),
                Exec exec = Exec::parallel);

struct TwoPhaseRun {
    std::vector<int> s1;
    std::vector<int> s2;
    DiffusionTrace phase1;      // truncated at the observation step
    DiffusionTrace phase2;      // continuation on the residual graph
    int total_activated = 0;
    int observed_step = 0;      // step at which phase 2 started
    int shortfall = 0;          // budget not placeable on the residual graph
};

TwoPhaseRun run_two_phase(const Graph& g, const TwoPhaseConfig& cfg, const SeedStream& stream);

// Expected completed spread of the configured two-phase policy with
// phase-1 seeds fixed; phase 2 re-selected per run from the observation.
Estimate evaluate_two_phase_policy(const Graph& g, const std::vector<int>& s1,
                                   const TwoPhaseConfig& cfg, int runs, const SeedStream& stream,
                                   Exec exec = Exec::parallel);

struct BudgetSplitPoint {
    int k1 = 0;
    double value = 0.0;
    double std_error = 0.0;
};

struct BudgetSplitResult {
    std::vector<BudgetSplitPoint> curve;
    int best_k1 = 0;
    double best_value = 0.0;
};

enum class SplitEvaluator { f_exact, h_mc };

BudgetSplitResult optimize_budget_split(const Graph& g, int k, int d, SplitEvaluator evaluator,
                                        const std::vector<int>& k1_grid, const TwoPhaseConfig& cfg,
                                        const SeedStream& stream);

struct JointSample {
    int k1 = 0;
    int d = 0;
    std::vector<int> s1;
};

struct FaceJointResult {
    JointSample best;           // best-ever sample
    double best_value = 0.0;
    int k1_mode = 0;            // modes of the converged distributions;
    int d_mode = 0;             // the policy the search settled on
    int iterations = 0;
    std::vector<double> best_value_by_iter;
};

// Cross-entropy over (k1, d, S1) jointly. First-iteration node inclusion
// probabilities are proportional to degree-discount weights, with surplus
// above 1 redistributed. k1 = k forces d = 0 (single phase).
FaceJointResult face_joint(const Graph& g, int k, int d_max, const TwoPhaseConfig& cfg,
                           const CeParams& params, const SeedStream& stream);

struct GoldenResult {
    int best_k1 = 0;
    int best_d = 0;
    double best_value = 0.0;
    std::vector<std::pair<int, double>> probes;  // (k1, value) in probe order
};

enum class InnerDSearch { sequential_from_zero, golden };

// Golden-section over integer k1 in [0, k]; for each probed k1 the best
// delay is found by the inner search. Evaluator maps (k1, d) -> value.
GoldenResult golden_section_k1(int k, int d_max,
                               const std::function<double(int, int)>& evaluator,
                               InnerDSearch inner = InnerDSearch::sequential_from_zero,
                               int tol = 1);

}  // namespace sna
