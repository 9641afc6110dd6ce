#pragma once

#include <string>
#include <vector>

#include "sna/diffusion.hpp"
#include "sna/prefs.hpp"

namespace sna {

enum class SpreadKind { ic, s_random, s_mu, s_sigma, d, r };
SpreadKind spread_kind_from_string(const std::string& s);
std::string to_string(SpreadKind k);

// topics x nodes matrix of generated preferences.
struct GeneratedCorpus {
    int n = 0;
    int r = 2;
    std::string generator;
    uint64_t seed = 0;
    std::vector<std::vector<Preference>> topics;
    std::vector<std::vector<int>> orders;  // per-topic node assignment order
};

inline constexpr int kFactorialCap = 7;  // candidate scoring enumerates r!

// Assigns a preference to every node per topic by traversing the graph
// from a random initializing set; each kind fixes the assignment rule.
GeneratedCorpus generate(const Graph& g, const PairDistanceModel& model, SpreadKind kind,
                         int topics, const SeedStream& stream, Exec exec = Exec::parallel);

// Empirical composition table: cell (dx, dy) holds the expected distance
// between two preferences derived from a shared anchor at sampled
// distances with means dx and dy.
struct TrTable {
    int r = 2;
    double resolution = 0.01;
    int cells = 0;  // grid points per axis: round(1/resolution)+1
    std::vector<double> values;  // cells x cells, row major

    double at(double dx, double dy) const;
    int index_of(double d) const;
};

// sigma values from `sigma_grid` are filtered per mean to those keeping
// the discretized distribution's mean within half a resolution step of the
// mean parameter; none eligible degenerates to sigma = 0.
TrTable build_tr(int r, const std::vector<double>& sigma_grid, int mc_per_cell,
                 const SeedStream& stream, double resolution = 0.01,
                 Exec exec = Exec::parallel);

// Composition operator: table lookup when both inputs are <= 0.5, else max.
double oplus(const TrTable& t, double dx, double dy);

// Completes edge-level expected distances to all pairs by shortest-path
// style relaxation with the composition operator, iterated to a fixpoint.
std::vector<double> msm_sp(const Graph& g, const PairDistanceModel& edge_model, const TrTable& t);

struct ValidationReport {
    double rms_kl = 0.0;
    double rms_mean_abs = 0.0;
    int smoothed_pairs = 0;
};

// Per-pair empirical distance distribution against the reference model:
// KL(reference || empirical) and absolute mean difference, RMS over pairs.
ValidationReport validate(const GeneratedCorpus& corpus, const PairDistanceModel& truth,
                          Exec exec = Exec::parallel);

std::string corpus_to_csv(const GeneratedCorpus& c);
GeneratedCorpus corpus_from_csv(const std::string& text, int n, int r);
std::string pair_model_to_csv(const PairDistanceModel& m);
PairDistanceModel pair_model_from_csv(const std::string& text, int r);

}  // namespace sna
