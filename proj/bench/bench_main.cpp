// Serial vs OpenMP comparison for the Monte-Carlo kernels. Each kernel
// seeds its iterations by index, so both execution modes must produce
// identical results; the table reports times and the speedup.

#include <chrono>
#include <cstdio>
#include <numeric>
#include <string>

#include "sna/aggregate.hpp"
#include "sna/diffusion.hpp"
#include "sna/pref_models.hpp"
#include "sna/two_phase.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sna;

namespace {

Graph scale_graph() {
    // hub-heavy 77-node network grown by preferential attachment
    Rng rng(20160901);
    const int n = 77;
    Graph g(n, false);
    std::vector<int> degree(n, 0);
    std::vector<std::pair<int, int>> edges;
    auto has = [&](int u, int v) {
        for (auto [a, b] : edges)
            if ((a == u && b == v) || (a == v && b == u)) return true;
        return false;
    };
    auto link = [&](int u, int v) {
        if (u == v || has(u, v)) return false;
        edges.push_back({u, v});
        ++degree[u];
        ++degree[v];
        return true;
    };
    link(0, 1);
    link(1, 2);
    link(0, 2);
    for (int v = 3; v < n; ++v) {
        int placed = 0, guard = 0;
        while (placed < 3 && guard++ < 1000) {
            int total = 0;
            for (int u = 0; u < v; ++u) total += degree[u] + 1;
            int t = uniform_int(rng, 0, total - 1);
            int target = 0;
            for (int u = 0; u < v; ++u) {
                t -= degree[u] + 1;
                if (t < 0) {
                    target = u;
                    break;
                }
            }
            if (link(v, target)) ++placed;
        }
    }
    for (auto [u, v] : edges) g.add_edge(u, v, 1.0);
    g.finalize();
    return to_weighted_cascade(g);
}

template <typename F>
double time_it(F&& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", name, serial_s, parallel_s,
                serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#endif
    std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel", "speedup");

    Graph g = scale_graph();
    SeedStream stream(42);
    std::vector<int> seeds{0, 1, 2};

    {
        Estimate a, b;
        double ts = time_it([&] { a = estimate_sigma(g, seeds, 200000, stream, Exec::serial); });
        double tp = time_it([&] { b = estimate_sigma(g, seeds, 200000, stream, Exec::parallel); });
        report("spread estimate", ts, tp, a.mean == b.mean && a.std_error == b.std_error);
    }
    {
        DecaySchedule decay = DecaySchedule::geometric(0.9);
        Estimate a, b;
        double ts = time_it([&] { a = estimate_nu(g, seeds, decay, 100000, stream, Exec::serial); });
        double tp = time_it([&] { b = estimate_nu(g, seeds, decay, 100000, stream, Exec::parallel); });
        report("discounted spread", ts, tp, a.mean == b.mean && a.std_error == b.std_error);
    }
    {
        Estimate a, b;
        double ts = time_it([&] { a = eval_h(g, seeds, 3, 3, 2000, 20, stream,
                                             DecaySchedule::geometric(1.0), Exec::serial); });
        double tp = time_it([&] { b = eval_h(g, seeds, 3, 3, 2000, 20, stream,
                                             DecaySchedule::geometric(1.0), Exec::parallel); });
        report("two-phase completion", ts, tp, a.mean == b.mean);
    }
    {
        TrTable a, b;
        std::vector<double> grid{0.05, 0.10, 0.15, 0.20};
        double ts = time_it([&] { a = build_tr(5, grid, 400, stream, 0.05, Exec::serial); });
        double tp = time_it([&] { b = build_tr(5, grid, 400, stream, 0.05, Exec::parallel); });
        report("composition table", ts, tp, a.values == b.values);
    }
    {
        Rng setup(7);
        auto perms = [&] {
            Profile p;
            for (int v = 0; v < 15; ++v) {
                Preference pref{0, 1, 2, 3, 4};
                for (int j = 4; j > 0; --j) std::swap(pref[j], pref[uniform_int(setup, 0, j)]);
                p.push_back(pref);
            }
            return p;
        }();
        Aggregator rule = make_aggregator(rule_from_string("borda"));
        std::vector<EwiCell> a, b;
        double ts = time_it([&] {
            a = ewi_test(rule, {perms}, {0.1, 0.2}, {0.05}, 2000, stream, Exec::serial);
        });
        double tp = time_it([&] {
            b = ewi_test(rule, {perms}, {0.1, 0.2}, {0.05}, 2000, stream, Exec::parallel);
        });
        bool same = a.size() == b.size();
        for (size_t i = 0; same && i < a.size(); ++i)
            same = a[i].max_mean_delta == b[i].max_mean_delta;
        report("insensitivity grid", ts, tp, same);
    }
    return 0;
}
