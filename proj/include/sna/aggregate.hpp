#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sna/pref_models.hpp"
#include "sna/prefs.hpp"

namespace sna {

// Correspondence output: the achievable full rankings, deduplicated.
struct AggregateResult {
    std::vector<Preference> preferences;  // sorted, unique, non-empty
};

enum class RuleKind {
    plurality,
    borda,
    veto,
    copeland,
    minmax_pairwise_opposition,
    bucklin,
    kemeny,
    dictatorship,
    random_dictatorship,
    reverse_plurality,  // plurality ranking reversed; a deliberately perverse rule
};

struct Rule {
    RuleKind kind = RuleKind::plurality;
    int dictator = 0;  // for dictatorship
};

Rule rule_from_string(const std::string& s);

inline constexpr int kBranchCap = 5000;
inline constexpr int kKemenyMaxR = 6;

// Score rules build rankings by iterative winner removal branching on
// every co-winner; no tie-break is applied.
AggregateResult aggregate(const Rule& rule, const Profile& profile, int branch_cap = kBranchCap);

using Aggregator = std::function<AggregateResult(const Profile&)>;
Aggregator make_aggregator(const Rule& rule);

// Expected distance from a uniformly chosen candidate ranking to the
// nearest truth ranking. Not symmetric.
double delta_error(const AggregateResult& truth, const AggregateResult& candidate);
double delta_error_weighted(const AggregateResult& truth, const std::vector<Preference>& candidates,
                            const std::vector<double>& weights);

struct RepresentativeAssignment {
    std::vector<int> members;  // the representative set M
    std::vector<int> rep_of;   // per node, its chosen representative
    std::vector<int> weights;  // per member of M, how many nodes it represents
};

// Every node picks uniformly among its expected-distance minimizers in M.
RepresentativeAssignment assign_representatives(const PairDistanceModel& model,
                                                const std::vector<int>& m, Rng& rng);

// Q': voter i's row replaced by the preference of its representative.
Profile weighted_profile(const Profile& p, const RepresentativeAssignment& assignment);

// Worst-case and total expected similarity of a candidate set.
double rho(const PairDistanceModel& model, const std::vector<int>& s);
double psi(const PairDistanceModel& model, const std::vector<int>& s);

enum class RepMethod { greedy_min, greedy_sum, greedy_orig, degree_cen, random_poll };
RepMethod rep_method_from_string(const std::string& s);

struct RepSelectionInputs {
    const Graph* graph = nullptr;              // degree-cen
    const GeneratedCorpus* corpus = nullptr;   // greedy-orig evaluation topics
    std::optional<Rule> rule;                  // greedy-orig
};

std::vector<int> select_representatives(RepMethod method, const PairDistanceModel& model, int k,
                                        const RepSelectionInputs& inputs, const SeedStream& stream);

struct EwiCell {
    double mu_d = 0.0;
    double sigma_d = 0.0;
    double max_mean_delta = 0.0;  // worst over base profiles
    double std_error = 0.0;       // of the worst profile's mean
    bool violated = false;        // mean exceeds mu_d beyond 3 s.e.
};

// Perturbs every voter by a distance drawn from the (mu_d, sigma_d)
// distribution, re-aggregates, and compares to the unperturbed aggregate.
std::vector<EwiCell> ewi_test(const Aggregator& rule, const std::vector<Profile>& base_profiles,
                              const std::vector<double>& mu_grid,
                              const std::vector<double>& sigma_grid, int trials,
                              const SeedStream& stream, Exec exec = Exec::parallel);

// sigma values that keep the discretized distribution's mean within `tol`
// of mu; used to build honest (mu, sigma) grids.
bool sigma_permissible(double mu, double sigma, int r, double tol = 0.005);

// ---- cooperative game on the similarity matrix ----

// Characteristic function over player subsets (n <= 24), with nu({}) = 0.
struct TuGame {
    int n = 0;
    std::function<double(uint32_t)> value;  // subset bitmask -> value
};

// Game where a coalition is worth the sum of its pairwise similarities.
TuGame similarity_game(const PairDistanceModel& model);
TuGame similarity_game_from_matrix(int n, const std::vector<double>& c);

// phi_j = (1/2) sum_{i != j} c(i, j).
std::vector<double> shapley_similarity(int n, const std::vector<double>& c);

struct TauDiagnostics {
    double lambda = 0.0;
};

// Allocation equalizing the propensity to disrupt (proportional to the
// marginal contribution to the grand coalition when singletons are worth 0).
std::vector<double> gately(const TuGame& game, bool* degenerate = nullptr);
// Maximal feasible point on the segment between marginal and minimal
// right vectors.
std::vector<double> tau_value(const TuGame& game, TauDiagnostics* diag = nullptr);

// ---- application scoring ----

// Half-point score in [0, 10] from footrule similarity to per-topic
// aggregates, topics weighted by response counts. Topics the user skipped
// are excluded (weights renormalize); no answered topic is an error.
double social_centrality_score(const std::vector<std::optional<Preference>>& user_prefs,
                               const std::vector<Preference>& aggregates,
                               const std::vector<int>& n_t);

// Percentage similarity across topics; a topic either side skipped
// contributes zero.
double friend_similarity(const std::vector<std::optional<Preference>>& a,
                         const std::vector<std::optional<Preference>>& b);

}  // namespace sna
