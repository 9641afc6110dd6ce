#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "sna/aggregate.hpp"
#include "sna/select.hpp"
#include "test_support.hpp"

using namespace sna;
using namespace test_support;

namespace {
// alternatives X=0, Y=1, Z=2
const Preference XYZ{0, 1, 2};
const Preference YZX{1, 2, 0};

AggregateResult make_result(std::vector<Preference> p) {
    std::sort(p.begin(), p.end());
    return {std::move(p)};
}
}  // namespace

TEST_CASE("aggregation rules") {
    SUBCASE("unanimous profiles are fixed points") {
        Profile unanimous{YZX, YZX, YZX};
        for (const char* name : {"plurality", "borda", "copeland", "minmax", "bucklin", "kemeny",
                                 "dictatorship(1)", "random-dictatorship"}) {
            AggregateResult r = aggregate(rule_from_string(name), unanimous);
            REQUIRE(r.preferences.size() == 1);
            CHECK(r.preferences[0] == YZX);
        }
        // veto necessarily branches: every non-last alternative of a
        // unanimous profile collects zero vetoes, so round one ties
        AggregateResult v = aggregate(rule_from_string("veto"), unanimous);
        CHECK(std::count(v.preferences.begin(), v.preferences.end(), YZX) == 1);
        CHECK(v.preferences.size() == 2);
    }
    SUBCASE("borda branches on round-two co-winners") {
        Profile p{YZX, XYZ};
        AggregateResult r = aggregate(rule_from_string("borda"), p);
        // round 1: Y wins (3 > 2 > 1); round 2 over {X, Z}: tie -> branch
        CHECK(r.preferences == make_result({{1, 0, 2}, {1, 2, 0}}).preferences);
    }
    SUBCASE("kemeny matches brute force on r=4 profiles") {
        Rng rng(301);
        auto perms = all_perms(4);
        for (int rep = 0; rep < 25; ++rep) {
            Profile p;
            int nv = uniform_int(rng, 1, 7);
            for (int v = 0; v < nv; ++v)
                p.push_back(perms[uniform_int(rng, 0, static_cast<int>(perms.size()) - 1)]);
            AggregateResult r = aggregate(rule_from_string("kemeny"), p);
            long long best = -1;
            std::vector<Preference> want;
            for (const auto& cand : perms) {
                long long total = 0;
                for (const auto& vote : p) total += kendall_tau_raw(cand, vote);
                if (best < 0 || total < best) {
                    best = total;
                    want = {cand};
                } else if (total == best) {
                    want.push_back(cand);
                }
            }
            std::sort(want.begin(), want.end());
            CHECK(r.preferences == want);
        }
    }
    SUBCASE("score rules agree with direct enumeration of branch trees") {
        // independent oracle: recursive winner selection with recomputed scores
        Rng rng(302);
        auto perms3 = all_perms(3);
        for (const char* name : {"plurality", "borda", "veto"}) {
            Rule rule = rule_from_string(name);
            for (int rep = 0; rep < 30; ++rep) {
                Profile p;
                int nv = uniform_int(rng, 1, 5);
                for (int v = 0; v < nv; ++v)
                    p.push_back(perms3[uniform_int(rng, 0, 5)]);
                AggregateResult got = aggregate(rule, p);
                // oracle: enumerate all full rankings, keep those buildable
                // round by round from co-winner sets
                std::function<bool(const Preference&, std::vector<int>, size_t)> ok =
                    [&](const Preference& cand, std::vector<int> remaining, size_t pos) {
                        if (remaining.empty()) return true;
                        // score over remaining under this rule
                        std::vector<double> score(remaining.size(), 0.0);
                        for (const auto& vote : p) {
                            std::vector<int> restricted;
                            for (int a : vote)
                                if (std::count(remaining.begin(), remaining.end(), a))
                                    restricted.push_back(a);
                            for (size_t i = 0; i < remaining.size(); ++i) {
                                auto it = std::find(restricted.begin(), restricted.end(),
                                                    remaining[i]);
                                size_t rank = it - restricted.begin();
                                if (rule.kind == RuleKind::plurality && rank == 0) score[i] += 1;
                                if (rule.kind == RuleKind::borda)
                                    score[i] += remaining.size() - 1 - rank;
                                if (rule.kind == RuleKind::veto && rank != remaining.size() - 1)
                                    score[i] += 1;
                            }
                        }
                        double best = *std::max_element(score.begin(), score.end());
                        int a = cand[pos];
                        auto idx = std::find(remaining.begin(), remaining.end(), a) -
                                   remaining.begin();
                        if (score[idx] < best - 1e-9) return false;
                        std::vector<int> rest;
                        for (int b : remaining)
                            if (b != a) rest.push_back(b);
                        return ok(cand, rest, pos + 1);
                    };
                std::vector<Preference> want;
                for (const auto& cand : perms3)
                    if (ok(cand, {0, 1, 2}, 0)) want.push_back(cand);
                CHECK(got.preferences == want);
            }
        }
    }
    SUBCASE("anonymity: permuting voters leaves the result unchanged") {
        Rng rng(303);
        auto perms = all_perms(4);
        Profile p;
        for (int v = 0; v < 6; ++v) p.push_back(perms[uniform_int(rng, 0, 23)]);
        Profile shuffled = p;
        for (int j = 5; j > 0; --j) std::swap(shuffled[j], shuffled[uniform_int(rng, 0, j)]);
        for (const char* name : {"plurality", "borda", "copeland", "minmax", "bucklin", "kemeny"}) {
            Rule rule = rule_from_string(name);
            CHECK(aggregate(rule, p).preferences == aggregate(rule, shuffled).preferences);
        }
    }
    SUBCASE("random dictatorship returns the support") {
        Profile p{XYZ, YZX, XYZ};
        AggregateResult r = aggregate(rule_from_string("random-dictatorship"), p);
        CHECK(r.preferences == make_result({XYZ, YZX}).preferences);
    }
    SUBCASE("reverse plurality reverses each ranking") {
        Profile p{XYZ, XYZ, YZX};
        AggregateResult plain = aggregate(rule_from_string("plurality"), p);
        AggregateResult rev = aggregate(rule_from_string("reverse-plurality"), p);
        REQUIRE(plain.preferences.size() == rev.preferences.size());
        std::vector<Preference> flipped;
        for (const auto& q : plain.preferences) flipped.push_back(reversed(q));
        std::sort(flipped.begin(), flipped.end());
        CHECK(rev.preferences == flipped);
    }
    SUBCASE("empty profile rejected") {
        CHECK_THROWS_AS(aggregate(rule_from_string("borda"), {}), ContractError);
    }
}

TEST_CASE("expected error between correspondences") {
    AggregateResult truth = make_result({XYZ});
    SUBCASE("subset of truth is exact") {
        CHECK(delta_error(truth, make_result({XYZ})) == doctest::Approx(0.0));
        AggregateResult two = make_result({XYZ, YZX});
        CHECK(delta_error(two, make_result({YZX})) == doctest::Approx(0.0));
    }
    SUBCASE("distance example carries over") {
        CHECK(delta_error(truth, make_result({YZX})) == doctest::Approx(2.0 / 3));
    }
    SUBCASE("asymmetry") {
        AggregateResult a = make_result({XYZ, YZX});
        AggregateResult b = make_result({YZX});
        CHECK(delta_error(a, b) != doctest::Approx(delta_error(b, a)));
    }
    SUBCASE("weighted variant biases toward heavy candidates") {
        double d = delta_error_weighted(truth, {XYZ, YZX}, {3.0, 1.0});
        CHECK(d == doctest::Approx(0.25 * (2.0 / 3)));
    }
}

TEST_CASE("representative assignment") {
    PairDistanceModel m(4, 5);
    m.set(0, 1, 0.2, 0.05);
    m.set(0, 2, 0.4, 0.05);
    m.set(0, 3, 0.4, 0.05);
    m.set(1, 2, 0.3, 0.05);
    m.set(1, 3, 0.3, 0.05);
    m.set(2, 3, 0.1, 0.05);
    SUBCASE("everyone represents itself when all are chosen") {
        Rng rng(304);
        RepresentativeAssignment a = assign_representatives(m, {0, 1, 2, 3}, rng);
        for (int i = 0; i < 4; ++i) CHECK(a.rep_of[i] == i);
        CHECK(a.weights == std::vector<int>{1, 1, 1, 1});
    }
    SUBCASE("single representative takes everyone") {
        Rng rng(305);
        RepresentativeAssignment a = assign_representatives(m, {2}, rng);
        CHECK(a.weights == std::vector<int>{4});
        for (int i = 0; i < 4; ++i) CHECK(a.rep_of[i] == 2);
    }
    SUBCASE("ties split uniformly") {
        Rng rng(306);
        int c2 = 0;
        const int reps = 10000;
        for (int i = 0; i < reps; ++i) {
            RepresentativeAssignment a = assign_representatives(m, {2, 3}, rng);
            if (a.rep_of[1] == 2) ++c2;  // node 1 equidistant from 2 and 3
        }
        double se = std::sqrt(reps * 0.25);
        CHECK(std::abs(c2 - reps / 2.0) <= 3 * se);
    }
    SUBCASE("weighted profile replaces rows by representatives") {
        Rng rng(307);
        RepresentativeAssignment a = assign_representatives(m, {0}, rng);
        Profile p{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        Profile q = weighted_profile(p, a);
        REQUIRE(q.size() == 4);
        for (const auto& row : q) CHECK(row == p[0]);
    }
}

TEST_CASE("worst-case and total similarity objectives") {
    PairDistanceModel m(4, 5);
    m.set(0, 1, 0.5, 0.0);
    m.set(0, 2, 0.8, 0.0);
    m.set(0, 3, 0.6, 0.0);
    m.set(1, 2, 0.6, 0.0);
    m.set(1, 3, 0.7, 0.0);
    m.set(2, 3, 0.9, 0.0);
    SUBCASE("full set attains the ceiling") {
        CHECK(rho(m, {0, 1, 2, 3}) == doctest::Approx(1.0));
        CHECK(psi(m, {0, 1, 2, 3}) == doctest::Approx(4.0));
    }
    SUBCASE("singleton values follow the matrix") {
        CHECK(rho(m, {0}) == doctest::Approx(0.2));
        CHECK(psi(m, {0}) == doctest::Approx(1.0 + 0.5 + 0.2 + 0.4));
    }
    SUBCASE("non-negative and monotone; the sum objective is submodular") {
        Rng rng(308);
        for (int rep = 0; rep < 20; ++rep) {
            PairDistanceModel rm(6, 5);
            for (int i = 0; i < 6; ++i)
                for (int j = i + 1; j < 6; ++j) rm.set(i, j, uniform01(rng), 0.0);
            std::vector<double> rho_all(1 << 6), psi_all(1 << 6);
            for (uint32_t s = 0; s < (uint32_t{1} << 6); ++s) {
                std::vector<int> set;
                for (int v = 0; v < 6; ++v)
                    if (s >> v & 1) set.push_back(v);
                rho_all[s] = rho(rm, set);
                psi_all[s] = psi(rm, set);
            }
            for (auto* f : {&rho_all, &psi_all})
                for (uint32_t s = 0; s < (uint32_t{1} << 6); ++s) {
                    CHECK((*f)[s] >= -1e-12);
                    for (int v = 0; v < 6; ++v)
                        if (!(s >> v & 1)) CHECK((*f)[s | (1u << v)] >= (*f)[s] - 1e-12);
                }
            for (uint32_t s = 0; s < (uint32_t{1} << 6); ++s)
                for (uint32_t t = s; t < (uint32_t{1} << 6); ++t) {
                    if ((s & t) != s || s == t) continue;
                    for (int v = 0; v < 6; ++v) {
                        if (t >> v & 1) continue;
                        CHECK(psi_all[s | (1u << v)] - psi_all[s] >=
                              psi_all[t | (1u << v)] - psi_all[t] - 1e-12);
                    }
                }
        }
    }
    SUBCASE("the worst-case objective is not submodular: pinned counterexample") {
        PairDistanceModel cm(3, 5);
        cm.set(0, 1, 1.0 - 0.7, 0.0);
        cm.set(0, 2, 1.0 - 0.6, 0.0);
        cm.set(1, 2, 1.0 - 0.6, 0.0);
        double lhs = rho(cm, {0, 1}) - rho(cm, {0});        // adding 1 to {0}
        double rhs = rho(cm, {0, 2, 1}) - rho(cm, {0, 2});  // adding 1 to {0,2}
        CHECK(lhs == doctest::Approx(0.0));
        CHECK(rhs == doctest::Approx(0.3));
        CHECK(lhs < rhs);  // the diminishing-returns direction reverses
    }
}

TEST_CASE("representative selection methods") {
    PairDistanceModel m(5, 5);
    Rng setup(309);
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) m.set(i, j, 0.2 + 0.6 * uniform01(setup), 0.0);
    RepSelectionInputs inputs;
    SUBCASE("full budget returns everyone") {
        for (RepMethod method : {RepMethod::greedy_min, RepMethod::greedy_sum,
                                 RepMethod::random_poll}) {
            auto sel = select_representatives(method, m, 5, inputs, SeedStream(310));
            CHECK(sel == std::vector<int>{0, 1, 2, 3, 4});
        }
    }
    SUBCASE("degree heuristic picks the star center") {
        Graph star(5, false);
        for (int leaf = 1; leaf < 5; ++leaf) star.add_edge(0, leaf, 1.0);
        star.finalize();
        inputs.graph = &star;
        auto sel = select_representatives(RepMethod::degree_cen, m, 1, inputs, SeedStream(311));
        CHECK(sel == std::vector<int>{0});
    }
    SUBCASE("greedy worst-case selection meets the bound on hand instances") {
        // two-cluster and near-uniform matrices; the bound is heuristic in
        // general (see the non-submodularity counterexample above)
        auto hand = [&](std::function<double(int, int)> c, int n, int k) {
            PairDistanceModel rm(n, 5);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) rm.set(i, j, 1.0 - c(i, j), 0.0);
            auto sel = select_representatives(RepMethod::greedy_min, rm, k, inputs, SeedStream(313));
            double got = rho(rm, sel);
            double best = 0.0;
            for (const auto& s : all_subsets_of_size(n, k)) best = std::max(best, rho(rm, s));
            CHECK(got >= (1 - std::exp(-1.0)) * best - 1e-9);
        };
        // two tight clusters, weak cross links
        hand([](int i, int j) { return (i < 4) == (j < 4) ? 0.8 : 0.3; }, 8, 2);
        hand([](int i, int j) { return (i < 4) == (j < 4) ? 0.8 : 0.3; }, 8, 3);
        // near-uniform similarities
        hand([](int i, int j) { return 0.6 + 0.01 * ((i + j) % 3); }, 7, 2);
        // hub structure: node 0 close to everyone
        hand([](int i, int j) { return i == 0 || j == 0 ? 0.75 : 0.45; }, 8, 1);
    }
}

TEST_CASE("perturbation-insensitivity tester") {
    Rng rng(314);
    auto perms = all_perms(5);
    std::vector<Profile> bases;
    for (int b = 0; b < 3; ++b) {
        Profile p;
        for (int v = 0; v < 9; ++v) p.push_back(perms[uniform_int(rng, 0, 119)]);
        bases.push_back(p);
    }
    std::vector<double> mu_grid{0.1, 0.2};
    std::vector<double> sigma_grid{0.05};
    SUBCASE("dictatorship stays within the bound") {
        auto cells = ewi_test(make_aggregator(rule_from_string("dictatorship(0)")), bases, mu_grid,
                              sigma_grid, 400, SeedStream(315));
        for (const EwiCell& c : cells) CHECK(!c.violated);
    }
    SUBCASE("a constant rule never violates") {
        Aggregator constant = [](const Profile& p) {
            AggregateResult r;
            r.preferences = {Preference{0, 1, 2, 3, 4}};
            (void)p;
            return r;
        };
        auto cells = ewi_test(constant, bases, mu_grid, sigma_grid, 300, SeedStream(316));
        for (const EwiCell& c : cells) {
            CHECK(c.max_mean_delta == doctest::Approx(0.0));
            CHECK(!c.violated);
        }
    }
    SUBCASE("veto can overshoot the bound at some grid points") {
        auto cells = ewi_test(make_aggregator(rule_from_string("veto")), bases, {0.05, 0.1},
                              sigma_grid, 400, SeedStream(317));
        bool any = false;
        double worst_margin = 0.0;
        for (const EwiCell& c : cells)
            if (c.violated) {
                any = true;
                worst_margin = std::max(worst_margin, (c.max_mean_delta - c.mu_d) / c.mu_d);
            }
        CHECK(any);
        CHECK(worst_margin > 0.2);
    }
}

TEST_CASE("similarity game solution concepts") {
    SUBCASE("closed-form values on the three-node example") {
        std::vector<double> c{0.0, 0.5, 0.2, 0.5, 0.0, 0.4, 0.2, 0.4, 0.0};
        std::vector<double> phi = shapley_similarity(3, c);
        CHECK(phi[0] == doctest::Approx(0.35));
        CHECK(phi[1] == doctest::Approx(0.45));
        CHECK(phi[2] == doctest::Approx(0.30));
        TuGame game = similarity_game_from_matrix(3, c);
        double vn = game.value(0b111);
        CHECK(phi[0] + phi[1] + phi[2] == doctest::Approx(vn));
        bool degenerate = false;
        std::vector<double> gv = gately(game, &degenerate);
        TauDiagnostics diag;
        std::vector<double> tau = tau_value(game, &diag);
        CHECK(!degenerate);
        CHECK(diag.lambda == doctest::Approx(0.5));
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(gv[i] - phi[i]) < 1e-9);
            CHECK(std::abs(tau[i] - phi[i]) < 1e-9);
        }
    }
    SUBCASE("symmetric games split equally") {
        std::vector<double> c(9, 0.3);
        for (int i = 0; i < 3; ++i) c[i * 3 + i] = 0.0;
        TuGame game = similarity_game_from_matrix(3, c);
        std::vector<double> gv = gately(game);
        for (double v : gv) CHECK(v == doctest::Approx(0.3));
    }
    SUBCASE("coincidence over random games") {
        Rng rng(318);
        for (int rep = 0; rep < 50; ++rep) {
            int n = uniform_int(rng, 2, 6);
            std::vector<double> c(n * n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) c[i * n + j] = c[j * n + i] = uniform01(rng);
            std::vector<double> phi = shapley_similarity(n, c);
            TuGame game = similarity_game_from_matrix(n, c);
            std::vector<double> gv = gately(game);
            TauDiagnostics diag;
            std::vector<double> tau = tau_value(game, &diag);
            CHECK(diag.lambda == doctest::Approx(0.5).epsilon(1e-12));
            for (int i = 0; i < n; ++i) {
                CHECK(std::abs(gv[i] - phi[i]) <= 1e-9);
                CHECK(std::abs(tau[i] - phi[i]) <= 1e-9);
            }
        }
    }
    SUBCASE("monte-carlo estimate of the game agrees with the closed form") {
        std::vector<double> c{0.0, 0.5, 0.2, 0.5, 0.0, 0.4, 0.2, 0.4, 0.0};
        TuGame game = similarity_game_from_matrix(3, c);
        Objective obj;
        obj.exec = Exec::serial;
        obj.eval = [&](const std::vector<int>& s) {
            uint32_t mask = 0;
            for (int v : s) mask |= 1u << v;
            return game.value(mask);
        };
        NodeValues est = shapley_estimate(obj, 3, 2000, SeedStream(319));
        std::vector<double> phi = shapley_similarity(3, c);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(est.values[i] - phi[i]) < 0.05);
    }
    SUBCASE("degenerate marginals fall back to a uniform split") {
        TuGame flat;
        flat.n = 3;
        flat.value = [](uint32_t) { return 0.0; };
        bool degenerate = false;
        std::vector<double> gv = gately(flat, &degenerate);
        CHECK(degenerate);
        for (double v : gv) CHECK(v == doctest::Approx(0.0));
    }
}

TEST_CASE("application scores") {
    Preference agg{0, 1, 2, 3, 4};
    SUBCASE("perfect alignment scores ten") {
        std::vector<std::optional<Preference>> user{agg, agg};
        CHECK(social_centrality_score(user, {agg, agg}, {10, 20}) == doctest::Approx(10.0));
    }
    SUBCASE("square-root boosting and half-point rounding") {
        Preference third{1, 4, 2, 0, 3};  // similarity 1/3 to agg
        std::vector<std::optional<Preference>> user{third};
        // sqrt(1/3) = 0.577 -> 20*0.577 = 11.55 -> ceil 12 -> 6.0
        CHECK(social_centrality_score(user, {agg}, {5}) == doctest::Approx(6.0));
        // equal-weight topics at similarities 1/3 and 1/6 average to 0.25:
        // the score is exactly half of ceil(20*0.5) = 5.0
        Preference sixth{2, 4, 0, 3, 1};
        std::vector<std::optional<Preference>> user2{third, sixth};
        CHECK(social_centrality_score(user2, {agg, agg}, {5, 5}) == doctest::Approx(5.0));
    }
    SUBCASE("skipped topics renormalize") {
        std::vector<std::optional<Preference>> user{std::nullopt, agg};
        CHECK(social_centrality_score(user, {agg, agg}, {100, 10}) == doctest::Approx(10.0));
        std::vector<std::optional<Preference>> none{std::nullopt};
        CHECK_THROWS_AS(social_centrality_score(none, {agg}, {10}), ContractError);
    }
    SUBCASE("friend similarity percentage") {
        Preference p{1, 4, 2, 0, 3};
        std::vector<std::optional<Preference>> a{p};
        std::vector<std::optional<Preference>> b{agg};
        CHECK(friend_similarity(a, b) == doctest::Approx(100.0 / 3).epsilon(1e-6));
        std::vector<std::optional<Preference>> a2{p, std::nullopt};
        std::vector<std::optional<Preference>> b2{agg, agg};
        CHECK(friend_similarity(a2, b2) == doctest::Approx(100.0 / 6).epsilon(1e-6));
    }
}
