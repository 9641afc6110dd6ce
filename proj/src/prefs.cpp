#include "sna/prefs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sna {

bool is_valid_preference(const Preference& p) {
    std::vector<uint8_t> seen(p.size(), 0);
    for (int a : p) {
        if (a < 0 || a >= static_cast<int>(p.size()) || seen[a]) return false;
        seen[a] = 1;
    }
    return true;
}

void check_preference(const Preference& p) {
    if (!is_valid_preference(p)) throw ContractError("not a permutation of 0..r-1");
}

int kendall_tau_raw(const Preference& p, const Preference& q) {
    if (p.size() != q.size()) throw ContractError("preferences over different alternative counts");
    int r = static_cast<int>(p.size());
    std::vector<int> pos_q(r);
    for (int i = 0; i < r; ++i) pos_q[q[i]] = i;
    int inv = 0;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            if (pos_q[p[i]] > pos_q[p[j]]) ++inv;
    return inv;
}

double kendall_tau_norm(const Preference& p, const Preference& q) {
    int r = static_cast<int>(p.size());
    if (r < 2) {
        if (p.size() != q.size()) throw ContractError("preferences over different alternative counts");
        return 0.0;
    }
    return static_cast<double>(kendall_tau_raw(p, q)) / pair_count(r);
}

double footrule_norm(const Preference& p, const Preference& q) {
    if (p.size() != q.size()) throw ContractError("preferences over different alternative counts");
    int r = static_cast<int>(p.size());
    if (r < 2) return 0.0;
    std::vector<int> pos_p(r), pos_q(r);
    for (int i = 0; i < r; ++i) {
        pos_p[p[i]] = i;
        pos_q[q[i]] = i;
    }
    int sum = 0;
    for (int a = 0; a < r; ++a) sum += std::abs(pos_p[a] - pos_q[a]);
    int denom = 2 * ((r + 1) / 2) * (r / 2);
    return static_cast<double>(sum) / denom;
}

namespace {

// Mahonian triangle rows: counts[i][j] = permutations of i elements with
// j inversions.
std::vector<std::vector<long long>> mahonian_rows(int r) {
    std::vector<std::vector<long long>> rows(r + 1);
    rows[0] = {1};
    for (int i = 1; i <= r; ++i) {
        int maxinv = i * (i - 1) / 2;
        rows[i].assign(maxinv + 1, 0);
        // element i inserted into a permutation of i-1 adds 0..i-1 inversions
        for (int j = 0; j <= maxinv; ++j) {
            long long acc = 0;
            for (int add = 0; add <= std::min(j, i - 1); ++add) {
                int rest = j - add;
                if (rest <= static_cast<int>(rows[i - 1].size()) - 1) acc += rows[i - 1][rest];
            }
            rows[i][j] = acc;
        }
    }
    return rows;
}

}  // namespace

long long count_at_distance(int r, int steps) {
    if (r < 1) throw ContractError("alternative count must be >= 1");
    int maxinv = pair_count(r);
    if (steps < 0 || steps > maxinv) throw ContractError("inversion count out of range");
    return mahonian_rows(r)[r][steps];
}

Preference uniform_at_distance(const Preference& anchor, int steps, Rng& rng) {
    check_preference(anchor);
    int r = static_cast<int>(anchor.size());
    if (steps < 0 || steps > pair_count(r)) throw ContractError("inversion count out of range");
    auto rows = mahonian_rows(r);
    // draw inversion-table digits backward: digit for element i lies in
    // 0..i-1 and the remaining sum must be reachable
    std::vector<int> digits(r, 0);
    int remaining = steps;
    for (int i = r; i >= 1; --i) {
        long long total = rows[i][remaining];
        double t = uniform01(rng) * static_cast<double>(total);
        long long acc = 0;
        int chosen = -1;
        for (int add = 0; add <= std::min(remaining, i - 1); ++add) {
            int rest = remaining - add;
            long long ways = rest <= static_cast<int>(rows[i - 1].size()) - 1 ? rows[i - 1][rest] : 0;
            if (ways == 0) continue;
            acc += ways;
            chosen = add;
            if (static_cast<double>(acc) >= t) break;
        }
        if (chosen < 0) throw ContractError("inversion sampler: no feasible digit");
        digits[i - 1] = chosen;
        remaining -= chosen;
    }
    // build position permutation: insert element i (0-based positions) so
    // that it has digits[i] larger elements before it
    std::vector<int> perm;
    perm.reserve(r);
    for (int i = 0; i < r; ++i) {
        // digits[i] of the existing i elements end up AFTER element i
        int pos = i - digits[i];
        perm.insert(perm.begin() + pos, i);
    }
    // perm is a permutation of 0..r-1 with inv(perm) == steps; compose with anchor
    Preference out(r);
    for (int i = 0; i < r; ++i) out[i] = anchor[perm[i]];
    return out;
}

Preference reversed(const Preference& p) { return Preference(p.rbegin(), p.rend()); }

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// CDF of a Gaussian(mu, sigma) truncated to [0,1].
double trunc_gauss_cdf(double x, double mu, double sigma) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lo = std_normal_cdf((0.0 - mu) / sigma);
    double hi = std_normal_cdf((1.0 - mu) / sigma);
    double z = hi - lo;
    if (z < 1e-300) return x < mu ? 0.0 : 1.0;
    return (std_normal_cdf((x - mu) / sigma) - lo) / z;
}

}  // namespace

double DiscreteTruncGauss::mean() const {
    double m = 0.0;
    for (size_t i = 0; i < pmf.size(); ++i) m += grid_value(static_cast<int>(i)) * pmf[i];
    return m;
}

DiscreteTruncGauss dtg_pmf(double mu, double sigma, int r) {
    if (mu < 0.0 || mu > 1.0) throw ContractError("mu outside [0,1]");
    if (sigma < 0.0) throw ContractError("negative sigma");
    if (r < 2) throw ContractError("alternative count must be >= 2");
    DiscreteTruncGauss d;
    d.mu = mu;
    d.sigma = sigma;
    d.r = r;
    int cells = pair_count(r) + 1;
    d.pmf.assign(cells, 0.0);
    if (sigma == 0.0) {
        int idx = static_cast<int>(std::lround(mu * pair_count(r)));
        d.pmf[idx] = 1.0;
        return d;
    }
    double half = 1.0 / (r * (r - 1));  // half of one grid step
    for (int i = 0; i < cells; ++i) {
        double x = d.grid_value(i);
        double hi = std::min(x + half, 1.0);
        double lo = std::max(x - half, 0.0);
        d.pmf[i] = trunc_gauss_cdf(hi, mu, sigma) - trunc_gauss_cdf(lo, mu, sigma);
    }
    double total = std::accumulate(d.pmf.begin(), d.pmf.end(), 0.0);
    for (double& v : d.pmf) v /= total;
    return d;
}

int sample_distance_index(const DiscreteTruncGauss& d, Rng& rng) {
    double t = uniform01(rng);
    double acc = 0.0;
    for (size_t i = 0; i < d.pmf.size(); ++i) {
        acc += d.pmf[i];
        if (t <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(d.pmf.size()) - 1;
}

double sample_distance(const DiscreteTruncGauss& d, Rng& rng) {
    return d.grid_value(sample_distance_index(d, rng));
}

MleFit mle_fit(const std::vector<double>& samples, int r) {
    if (samples.size() < 2) throw ContractError("mle_fit needs at least two samples");
    bool all_equal = std::all_of(samples.begin(), samples.end(),
                                 [&](double v) { return v == samples.front(); });
    if (all_equal) return {samples.front(), 0.0, 0.0};

    int cells = pair_count(r) + 1;
    std::vector<int> counts(cells, 0);
    for (double v : samples) {
        int idx = static_cast<int>(std::lround(v * pair_count(r)));
        if (idx < 0 || idx >= cells || std::abs(v - static_cast<double>(idx) / pair_count(r)) > 1e-9)
            throw ContractError("sample off the distance grid");
        ++counts[idx];
    }
    auto loglik = [&](double mu, double sigma) {
        DiscreteTruncGauss d = dtg_pmf(mu, sigma, r);
        double ll = 0.0;
        for (int i = 0; i < cells; ++i) {
            if (!counts[i]) continue;
            if (d.pmf[i] <= 0.0) return -std::numeric_limits<double>::infinity();
            ll += counts[i] * std::log(d.pmf[i]);
        }
        return ll;
    };
    double mu_lo = 0.0, mu_hi = 1.0, sg_lo = 1e-3, sg_hi = 0.6;
    double best_mu = 0.5, best_sg = 0.1, best_ll = -std::numeric_limits<double>::infinity();
    const int grid = 100;
    for (int pass = 0; pass < 3; ++pass) {
        for (int i = 0; i <= grid; ++i) {
            double mu = mu_lo + (mu_hi - mu_lo) * i / grid;
            for (int j = 0; j <= grid; ++j) {
                double sg = sg_lo + (sg_hi - sg_lo) * j / grid;
                double ll = loglik(mu, sg);
                if (ll > best_ll) {
                    best_ll = ll;
                    best_mu = mu;
                    best_sg = sg;
                }
            }
        }
        double mu_step = (mu_hi - mu_lo) / grid, sg_step = (sg_hi - sg_lo) / grid;
        mu_lo = std::max(0.0, best_mu - 2 * mu_step);
        mu_hi = std::min(1.0, best_mu + 2 * mu_step);
        sg_lo = std::max(1e-4, best_sg - 2 * sg_step);
        sg_hi = best_sg + 2 * sg_step;
    }
    return {best_mu, best_sg, best_ll};
}

std::string profile_to_csv(const Profile& p) {
    std::string out;
    for (const Preference& pref : p) {
        for (size_t i = 0; i < pref.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(pref[i]);
        }
        out += "\n";
    }
    return out;
}

Profile profile_from_csv(const std::string& text, int r) {
    Profile profile;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        if (line.empty()) continue;  // skipped voter
        Preference pref;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) pref.push_back(std::stoi(tok));
        if (static_cast<int>(pref.size()) != r || !is_valid_preference(pref))
            throw ContractError("profile row " + std::to_string(lineno) + " is not a ranking of 0.." +
                                std::to_string(r - 1));
        profile.push_back(std::move(pref));
    }
    return profile;
}

}  // namespace sna
