#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sna/graph.hpp"
#include "sna/rng.hpp"

namespace sna {

// A preference is a total order: ranking[0] is the most preferred
// alternative id; a valid preference is a permutation of 0..r-1.
using Preference = std::vector<int>;
using Profile = std::vector<Preference>;

bool is_valid_preference(const Preference& p);
void check_preference(const Preference& p);

inline int pair_count(int r) { return r * (r - 1) / 2; }

// Pairwise-inversion count over C(r,2).
double kendall_tau_norm(const Preference& p, const Preference& q);
int kendall_tau_raw(const Preference& p, const Preference& q);

// Total positional displacement over 2*ceil(r/2)*floor(r/2).
double footrule_norm(const Preference& p, const Preference& q);

// Number of permutations of r elements at exactly `steps` pairwise
// inversions from any fixed permutation (independent of the anchor).
long long count_at_distance(int r, int steps);

// Uniformly random permutation at exactly `steps` inversions from anchor.
Preference uniform_at_distance(const Preference& anchor, int steps, Rng& rng);

Preference reversed(const Preference& p);

// Distance distribution over the grid {0, 1/C(r,2), ..., 1}: the cell at x
// carries the truncated-Gaussian mass of [x - h, x + h] clamped to [0,1],
// with h half the grid step. sigma = 0 degenerates to a point mass at the
// nearest grid point.
struct DiscreteTruncGauss {
    double mu = 0.0;
    double sigma = 0.0;
    int r = 2;
    std::vector<double> pmf;  // size C(r,2)+1

    double grid_value(int idx) const { return static_cast<double>(idx) / pair_count(r); }
    double mean() const;
};

DiscreteTruncGauss dtg_pmf(double mu, double sigma, int r);

// Grid index sampled by inverse CDF.
int sample_distance_index(const DiscreteTruncGauss& d, Rng& rng);
double sample_distance(const DiscreteTruncGauss& d, Rng& rng);

struct MleFit {
    double mu = 0.0;
    double sigma = 0.0;
    double log_likelihood = 0.0;
};

// Maximum-likelihood (mu, sigma) over grid-valued samples by iterative
// grid refinement.
MleFit mle_fit(const std::vector<double>& samples, int r);

// Per-pair (mu, sigma) of the pairwise distance distribution; symmetric
// with zero diagonal for mu. Cells without an estimate hold mu = 1.
struct PairDistanceModel {
    int n = 0;
    int r = 2;
    std::vector<double> mu;     // n*n row major
    std::vector<double> sigma;  // n*n row major

    PairDistanceModel() = default;
    PairDistanceModel(int n_, int r_) : n(n_), r(r_), mu(n_ * n_, 1.0), sigma(n_ * n_, 0.0) {
        for (int i = 0; i < n_; ++i) mu[i * n_ + i] = 0.0;
    }
    double mu_at(int i, int j) const { return mu[i * n + j]; }
    double sigma_at(int i, int j) const { return sigma[i * n + j]; }
    void set(int i, int j, double m, double s) {
        if (m < 0.0 || m > 1.0 || s < 0.0) throw ContractError("pair model parameter out of range");
        mu[i * n + j] = mu[j * n + i] = m;
        sigma[i * n + j] = sigma[j * n + i] = s;
    }
    double similarity(int i, int j) const { return 1.0 - mu_at(i, j); }
};

// Profile CSV: one row per voter, columns are alternative ids in rank
// order; blank rows mark voters who skipped the topic.
std::string profile_to_csv(const Profile& p);
Profile profile_from_csv(const std::string& text, int r);

}  // namespace sna
