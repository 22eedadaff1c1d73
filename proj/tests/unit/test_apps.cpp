#include <doctest.h>

#include <algorithm>
#include <functional>

#include "common/fixtures.hpp"
#include "oracle/oracle.hpp"
#include "sdnsync/apps.hpp"
#include "sdnsync/knowledge.hpp"

using namespace sdnsync;

namespace {

// Exhaustive reference for one pair: the cheapest simple path on the
// perceived graph (smallest node sequence on ties), judged on the truth.
bool brute_detected(const Topology& perceived, const Topology& truth, NodeId s, NodeId d) {
    const auto n = static_cast<std::size_t>(perceived.num_nodes);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, -1.0));
    for (const auto& l : perceived.links)
        if (l.up) w[l.u][l.v] = w[l.v][l.u] = l.delay;

    double best = kUnreachable;
    std::vector<NodeId> best_path, path{s};
    std::vector<bool> on(n, false);
    on[s] = true;
    std::function<void(NodeId, double)> dfs = [&](NodeId u, double cost) {
        if (u == d) {
            if (cost < best || (cost == best && path < best_path)) {
                best = cost;
                best_path = path;
            }
            return;
        }
        for (NodeId v = 0; v < perceived.num_nodes; ++v) {
            if (on[v] || w[u][v] < 0) continue;
            on[v] = true;
            path.push_back(v);
            dfs(v, cost + w[u][v]);
            path.pop_back();
            on[v] = false;
        }
    };
    dfs(s, 0.0);
    if (best_path.empty()) return false;

    double true_cost = 0.0;
    for (std::size_t i = 0; i + 1 < best_path.size(); ++i) {
        bool live = false;
        for (const auto& l : truth.links)
            if (l.up && std::minmax(l.u, l.v) == std::minmax(best_path[i], best_path[i + 1])) {
                live = true;
                true_cost += l.delay;
            }
        if (!live) return false;
    }
    return true_cost == oracle::brute_shortest_path(truth, s, d);
}

}  // namespace

TEST_CASE("spr_detect: fresh view detects every pair") {
    const Topology t = fixtures::three_domains();
    const auto pairs = default_spr_pairs(t);
    CHECK(pairs.size() == 3 * 6);
    const auto r = spr_detect(t, t, pairs);
    CHECK(r.rate == 1.0);
    CHECK(r.detect_count == r.evaluated);
}

TEST_CASE("spr_detect: a dead link on the only short path") {
    Topology truth = fixtures::make_topology(3, {{0}, {1, 2}}, {{0, 1, 1.0, true}, {1, 2, 1.0, true}, {0, 2, 5.0, true}});
    const Topology perceived = truth;
    truth.links[1].up = false;
    const std::vector<NodePair> pairs{{0, 2}};
    const auto r = spr_detect(perceived, truth, pairs);
    CHECK(r.detect_count == 0);
    CHECK(r.evaluated == 1);
}

TEST_CASE("spr_detect: stale delays pick the 5-route over the 3-route") {
    // 0-1-3 costs 1+2 = 3, 0-2-3 costs 2+3 = 5; the view believes 0-2-3 costs 2.
    const Topology truth = fixtures::make_topology(
        4, {{0, 1}, {2, 3}}, {{0, 1, 1.0, true}, {1, 3, 2.0, true}, {0, 2, 2.0, true}, {2, 3, 3.0, true}});
    Topology perceived = truth;
    perceived.links[2].delay = 1.0;
    perceived.links[3].delay = 1.0;
    const std::vector<NodePair> pairs{{0, 3}};
    const auto r = spr_detect(perceived, truth, pairs);
    CHECK(r.detect_count == 0);
    CHECK(brute_detected(perceived, truth, 0, 3) == false);
    CHECK(oracle::brute_shortest_path(truth, 0, 3) == 3.0);
}

TEST_CASE("spr_detect matches exhaustive enumeration on random stale views") {
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 4 + static_cast<int>(uniform_index(rng, 5));
        const Topology truth = fixtures::random_small_graph(rng, n, 0.5, 0.75);
        Topology perceived = truth;
        for (auto& l : perceived.links)
            if (uniform01(rng) < 0.3) l.up = !l.up;
        const auto pairs = default_spr_pairs(truth);
        const auto r = spr_detect(perceived, truth, pairs);
        int detected = 0, evaluated = 0, excluded = 0;
        for (const auto& [s, d] : pairs) {
            if (!reachable(oracle::brute_shortest_path(truth, s, d))) {
                ++excluded;
                continue;
            }
            ++evaluated;
            detected += brute_detected(perceived, truth, s, d);
        }
        REQUIRE(r.detect_count == detected);
        CHECK(r.evaluated == evaluated);
        CHECK(r.excluded == excluded);
        if (evaluated > 0) CHECK(r.rate == doctest::Approx(static_cast<double>(detected) / evaluated));
    }
}

TEST_CASE("spr_detect excludes pairs without a true path") {
    Topology truth = fixtures::make_topology(3, {{0}, {1, 2}}, {{0, 1, 1.0, true}, {1, 2, 1.0, false}});
    const std::vector<NodePair> pairs{{0, 1}, {0, 2}};
    const auto r = spr_detect(truth, truth, pairs);
    CHECK(r.evaluated == 1);
    CHECK(r.excluded == 1);
    CHECK(r.rate == 1.0);
    CHECK_THROWS_AS(spr_detect(truth, truth, std::vector<NodePair>{}), std::invalid_argument);
}

TEST_CASE("spr_reward") {
    CHECK(spr_reward(10, 0.1) == 1.0);
    CHECK(spr_reward(0, 0.37) == 0.0);
    const int pairs = 18;
    for (int d = 0; d <= pairs; ++d) {
        const double r = spr_reward(d, 1.0 / pairs);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("spr: syncing the one changed neighbor never lowers the rate") {
    Rng rng(4);
    DynamicsConfig dyn;
    dyn.link_flip_prob = 0.4;
    for (int trial = 0; trial < 50; ++trial) {
        Topology truth = fixtures::three_domains();
        KnowledgeBase kb(truth, 0);
        dyn.rng_seed = rng();
        Topology changed = step_dynamics(truth, dyn, 0);
        // Only domain 1's own links may differ.
        const auto owners = truth.node_domains();
        for (std::size_t i = 0; i < truth.links.size(); ++i)
            if (link_owner(truth.links[i], owners) == 1) truth.links[i] = changed.links[i];
        const auto pairs = default_spr_pairs(truth);
        const double before = spr_detect(kb.perceived_global_graph(truth), truth, pairs).rate;
        kb.sync(truth, 1, 1);
        const double after = spr_detect(kb.perceived_global_graph(truth), truth, pairs).rate;
        CHECK(after >= before);
        CHECK(after == 1.0);
    }
}

TEST_CASE("lb_loss: hand fixture and degenerate cases") {
    Topology truth = fixtures::make_topology(4, {{0, 1}, {2, 3}}, {{0, 1, 1.0, true}, {1, 2, 1.0, true}, {2, 3, 1.0, true}});
    truth.domains[0].servers = {{1, 5.0}};
    truth.domains[1].servers = {{2, 2.0}, {3, 7.0}};
    Topology perceived = truth;
    perceived.domains[1].servers = {{2, 9.0}, {3, 3.0}};

    const auto r = lb_loss(perceived, truth);
    CHECK(r.perceived_best == 2);
    CHECK(r.actual_best == 3);
    CHECK(r.loss == 5.0);
    CHECK(lb_loss(truth, truth).loss == 0.0);

    Topology flat = truth;
    flat.domains[0].servers = {{1, 4.0}};
    flat.domains[1].servers = {{2, 4.0}, {3, 4.0}};
    Topology flat_view = flat;
    flat_view.domains[1].servers = {{2, 8.0}, {3, 1.0}};
    CHECK(lb_loss(flat_view, flat).loss == 0.0);

    Topology none = truth;
    for (auto& d : none.domains) d.servers.clear();
    CHECK_THROWS_AS(lb_loss(none, none), std::invalid_argument);
}

TEST_CASE("lb_reward and its argmax agreement with the loss") {
    LbConfig cfg;
    cfg.capacity_reference = 10.0;
    CHECK(lb_reward(0.0, cfg) == 10.0);
    CHECK(lb_reward(5.0, cfg) == 5.0);

    Rng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> losses(12);
        for (auto& l : losses) l = uniform(rng, 0.0, 10.0);
        std::vector<double> rewards;
        for (double l : losses) rewards.push_back(lb_reward(l, cfg));
        CHECK(std::max_element(rewards.begin(), rewards.end()) - rewards.begin() ==
              std::min_element(losses.begin(), losses.end()) - losses.begin());
    }
}

TEST_CASE("lb_loss properties on random capacities") {
    Rng rng(12);
    Topology truth = fixtures::three_domains();
    for (int trial = 0; trial < 200; ++trial) {
        Topology view = truth;
        for (auto& d : truth.domains) {
            d.servers.clear();
            for (NodeId n : d.switches)
                if (uniform01(rng) < 0.5) d.servers[n] = std::floor(uniform(rng, 0.0, 10.0));
        }
        truth.domains[0].servers[0] = 1.0;
        view = truth;
        for (auto& d : view.domains)
            for (auto& [n, c] : d.servers) c = std::floor(uniform(rng, 0.0, 10.0));
        const auto r = lb_loss(view, truth);
        CHECK(r.loss >= 0.0);
        double true_max = 0.0;
        for (const auto& d : truth.domains)
            for (const auto& [n, c] : d.servers) true_max = std::max(true_max, c);
        const double picked = truth.domains[static_cast<std::size_t>(truth.node_domains()[r.perceived_best])].servers.at(
            r.perceived_best);
        CHECK((r.loss == 0.0) == (picked == true_max));
    }
}

TEST_CASE("metrics do not depend on k or C_ref") {
    Topology truth = fixtures::three_domains();
    truth.domains[1].servers = {{4, 3.0}};
    truth.domains[2].servers = {{7, 6.0}};
    Topology view = truth;
    view.links[3].up = false;
    view.domains[2].servers[7] = 1.0;
    const auto pairs = default_spr_pairs(truth);

    ApplicationConfig a, b;
    b.spr.k = 3.5;
    const auto ea = evaluate_application(a, view, truth, pairs), eb = evaluate_application(b, view, truth, pairs);
    CHECK(ea.metrics == eb.metrics);
    CHECK(eb.r_sync == doctest::Approx(3.5 * ea.metrics.at("spr_detect_rate") * static_cast<double>(pairs.size())));

    a.kind = b.kind = AppKind::Lb;
    b.lb.capacity_reference = 50.0;
    const auto la = evaluate_application(a, view, truth, pairs), lb = evaluate_application(b, view, truth, pairs);
    CHECK(la.metrics == lb.metrics);
    CHECK(la.metrics.at("lb_loss") == 3.0);
    CHECK(lb.r_sync - la.r_sync == 40.0);
}
