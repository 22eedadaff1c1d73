#include <doctest.h>

#include <algorithm>

#include "common/fixtures.hpp"
#include "sdnsync/baselines.hpp"
#include "sdnsync/envcore.hpp"

using namespace sdnsync;

namespace {

SyncPlacementEnv make_env(const Topology& t, int tau = 5, double flip = 0.1) {
    DynamicsConfig dyn;
    dyn.link_flip_prob = flip;
    EnvConfig cfg;
    cfg.tau = tau;
    cfg.horizon = 60;
    cfg.budget_fraction = 0.5;
    return SyncPlacementEnv(t, dyn, cfg, ApplicationConfig{});
}

}  // namespace

TEST_CASE("sync_budget rounds up and stays in range") {
    CHECK(sync_budget(0.28, 6) == 2);
    CHECK(sync_budget(0.28, 4) == 2);
    CHECK(sync_budget(0.5, 4) == 2);
    CHECK(sync_budget(0.01, 3) == 1);
    CHECK(sync_budget(1.0, 5) == 5);
}

TEST_CASE("enumerate_actions: sizes and canonical endpoints") {
    const auto a = enumerate_actions(6, 2, 10);
    REQUIRE(a.size() == 150);
    CHECK(a.front() == JointAction{{0, 1}, 0});
    CHECK(a.back() == JointAction{{4, 5}, 9});
    CHECK(enumerate_actions(1, 1, 1).size() == 1);
    for (std::size_t i = 1; i < a.size(); ++i) {
        const bool same_subset = a[i].sync_set == a[i - 1].sync_set;
        if (same_subset) CHECK(a[i].place_site == a[i - 1].place_site + 1);
        else CHECK(a[i - 1].sync_set < a[i].sync_set);
    }
    const ActionSpace space(6, 2, 10);
    for (std::size_t i = 0; i < space.size(); ++i) CHECK(space.index_of(space.at(i)) == i);
    CHECK(describe(enumerate_actions(2, 1, 2).front()) == "sync={0}, site=0");
}

TEST_CASE("enumerate_actions enforces the size limit") {
    CHECK_THROWS_AS(enumerate_actions(20, 10, 3), std::invalid_argument);
    CHECK_NOTHROW(enumerate_actions(20, 10, 3, 1u << 20));
    CHECK_THROWS_AS(enumerate_actions(3, 4, 1), std::invalid_argument);
}

TEST_CASE("reset gives the zero state and fresh snapshots") {
    auto env = make_env(fixtures::three_domains());
    const auto s = env.reset(42);
    for (double x : s.encode(env.config().staleness_cap)) CHECK(x == 0.0);
    CHECK(env.state_dim() == 2 + 3);
    CHECK(env.knowledge().perceived_global_graph(env.truth()) == env.truth());
    for (int i = 0; i < 7; ++i) env.step(std::size_t{0});
    CHECK(env.reset(42) == s);
}

TEST_CASE("step: multiplicative reward and budget violation") {
    auto env = make_env(fixtures::three_domains());
    const auto out = env.step(JointAction{{1}, 0});
    CHECK(out.r_total == out.r_sync * (env.config().alpha + out.r_place));
    CHECK_THROWS_AS(env.step(JointAction{{0, 1}, 0}), BudgetViolation);
    CHECK_THROWS_AS(env.step(JointAction{{}, 0}), BudgetViolation);
    CHECK_THROWS_AS(env.step(JointAction{{0}, 7}), std::invalid_argument);
}

TEST_CASE("step: tau gating of relocations") {
    auto env = make_env(fixtures::three_domains(), 10);
    for (int t = 0; t < 7; ++t) env.step(JointAction{{0}, 0});
    REQUIRE(env.t() == 7);
    const int site = env.site_index();
    const auto out = env.step(JointAction{{0}, 2});
    CHECK_FALSE(out.placement_applied);
    CHECK_FALSE(out.relocated);
    CHECK(env.site_index() == site);

    for (int t = 8; t < 10; ++t) env.step(JointAction{{0}, 0});
    const auto epoch = env.step(JointAction{{0}, 2});
    CHECK(epoch.placement_applied);
    CHECK(epoch.relocated);
    CHECK(env.site_index() == 2);
    CHECK(env.placement_age() == 1);
    CHECK(env.truth().focal().controller_site == env.controller_site());
}

TEST_CASE("placement_reward: the 7/12 fixture") {
    const Topology t = fixtures::placement_fixture();
    const std::vector<DomainId> synced{1};
    CHECK(placement_reward(t, 0, synced, 1.0, 100.0) == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
    CHECK(placement_reward(t, 0, synced, 0.0, 100.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(placement_reward(t, 0, std::vector<DomainId>{}, 1.0, 100.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("placement_reward: empty focal sum and unreachable penalty") {
    Topology single = fixtures::make_topology(2, {{0}, {1}}, {{0, 1, 2.0, true}});
    const std::vector<DomainId> synced{1};
    CHECK(placement_reward(single, 0, synced, 1.0, 100.0) == 0.5);
    single.links[0].up = false;
    CHECK(placement_reward(single, 0, synced, 1.0, 100.0) == 0.01);
}

TEST_CASE("placement_reward: a dominating site earns strictly more") {
    // Site 1 sits in the middle of the focal chain and next to the neighbor.
    Topology t = fixtures::make_topology(
        4, {{0, 1, 2}, {3}}, {{0, 1, 1.0, true}, {1, 2, 1.0, true}, {1, 3, 1.0, true}, {0, 3, 5.0, true}});
    const std::vector<DomainId> synced{1};
    CHECK(placement_reward(t, 1, synced, 1.0, 100.0) > placement_reward(t, 0, synced, 1.0, 100.0));
    CHECK(placement_reward(t, 1, synced, 1.0, 100.0) > placement_reward(t, 2, synced, 1.0, 100.0));
}

TEST_CASE("step reports r_place of the current site and this step's syncs") {
    auto env = make_env(fixtures::placement_fixture(), 1, 0.0);
    const auto out = env.step(JointAction{{0}, 0});
    CHECK(out.r_place == doctest::Approx(7.0 / 12.0).epsilon(1e-12));
    CHECK(out.synced_domains == std::vector<DomainId>{1});
}

TEST_CASE("random rollouts: budget, staleness law, gating, reward identity") {
    GenerationConfig g;
    g.num_domains = 5;
    g.switches_min = 3;
    g.switches_max = 6;
    g.inter_density = 0.05;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        g.rng_seed = seed;
        DynamicsConfig dyn;
        dyn.link_flip_prob = 0.05;
        EnvConfig cfg;
        cfg.tau = 7;
        cfg.horizon = 100;
        cfg.staleness_cap = 30;
        SyncPlacementEnv env(generate_topology(g), dyn, cfg, ApplicationConfig{});
        env.reset(seed * 31);
        Rng rng(seed);
        auto prev = env.state();
        int relocations = 0;
        for (int t = 0; t < cfg.horizon; ++t) {
            const auto a = random_action(rng, env.budget(), env.actions().num_neighbors(), env.actions().num_sites());
            const int site_before = env.site_index();
            const auto out = env.step(a);
            CHECK(static_cast<int>(out.synced_domains.size()) == env.budget());
            CHECK(out.r_total == out.r_sync * (cfg.alpha + out.r_place));
            CHECK(out.placement_applied == (t % cfg.tau == 0));
            if (!out.placement_applied) CHECK(env.site_index() == site_before);
            relocations += out.relocated;
            for (std::size_t i = 0; i < prev.sync_part.size(); ++i) {
                const bool synced = std::find(a.sync_set.begin(), a.sync_set.end(), static_cast<int>(i)) != a.sync_set.end();
                CHECK(out.next_state.sync_part[i] == (synced ? 1 : std::min(prev.sync_part[i] + 1, cfg.staleness_cap)));
            }
            CHECK(std::count_if(out.next_state.place_part.begin(), out.next_state.place_part.end(),
                                [](int v) { return v != 0; }) == 1);
            for (double x : out.next_state.encode(cfg.staleness_cap)) {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
            }
            prev = out.next_state;
        }
        CHECK(relocations <= cfg.horizon / cfg.tau + 1);
    }
}

TEST_CASE("identical seeds reproduce a rollout exactly") {
    auto a = make_env(fixtures::three_domains(), 3, 0.2);
    auto b = make_env(fixtures::three_domains(), 3, 0.2);
    a.reset(9);
    b.reset(9);
    RoundRobinState ra, rb;
    for (int t = 0; t < 50; ++t) {
        const auto x = a.step(round_robin_action(ra, 2, a.budget(), 3, a.t(), 3));
        const auto y = b.step(round_robin_action(rb, 2, b.budget(), 3, b.t(), 3));
        CHECK(x.r_total == y.r_total);
        CHECK(x.next_state == y.next_state);
    }
    CHECK(a.truth() == b.truth());
}

TEST_CASE("EnvConfig validation names the key") {
    EnvConfig cfg;
    cfg.tau = 0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("env.tau"), std::invalid_argument);
    cfg = {};
    cfg.budget_fraction = 1.5;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("env.budget_fraction"), std::invalid_argument);
}
