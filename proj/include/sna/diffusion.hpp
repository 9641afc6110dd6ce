#pragma once

#include <vector>

#include "sna/graph.hpp"
#include "sna/rng.hpp"

namespace sna {

// Step 0 holds the seeds; step t>0 the nodes first activated at t.
struct DiffusionTrace {
    std::vector<std::vector<int>> steps;

    int total_activated() const {
        int c = 0;
        for (const auto& s : steps) c += static_cast<int>(s.size());
        return c;
    }
};

// Per-step value of an activation. Non-increasing with Gamma(0) = 1 for
// the geometric kind; unreached nodes contribute nothing.
class DecaySchedule {
public:
    static DecaySchedule geometric(double delta);
    static DecaySchedule table(std::vector<double> values);

    double at(int t) const;
    bool is_constant_one() const;

private:
    bool geometric_ = true;
    double delta_ = 1.0;
    std::vector<double> values_;
};

enum class Exec { serial, parallel };

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

DiffusionTrace simulate_ic(const Graph& g, const std::vector<int>& seeds, Rng& rng);

// Mean final activated count over `iterations` independent cascades.
Estimate estimate_sigma(const Graph& g, const std::vector<int>& seeds, int iterations,
                        const SeedStream& stream, Exec exec = Exec::parallel);

// Expectation of the reach count over all live graphs (enumeration).
double exact_sigma(const Graph& g, const std::vector<int>& seeds,
                   int edge_cap = kDefaultEnumCap);

// Discounted spread: each node reached in t steps is worth Gamma(t).
Estimate estimate_nu(const Graph& g, const std::vector<int>& seeds, const DecaySchedule& decay,
                     int iterations, const SeedStream& stream, Exec exec = Exec::parallel);

double exact_nu(const Graph& g, const std::vector<int>& seeds, const DecaySchedule& decay,
                int edge_cap = kDefaultEnumCap);

// Threshold model: node u activates when the weight of its active
// in-neighbors reaches its threshold, drawn uniformly from
// (lower_bound[u], 1]. Requires per-node in-weight sums <= 1.
DiffusionTrace simulate_lt(const Graph& g, const std::vector<int>& seeds, Rng& rng,
                           const std::vector<double>& threshold_lower_bounds);

std::string trace_to_json(const DiffusionTrace& t);

}  // namespace sna
