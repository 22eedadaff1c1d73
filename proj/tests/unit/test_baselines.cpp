#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sdnsync/baselines.hpp"

using namespace sdnsync;

TEST_CASE("round robin cycles the sync set") {
    RoundRobinState s;
    CHECK(round_robin_action(s, 4, 2, 1, 1, 10).sync_set == std::vector<int>{0, 1});
    CHECK(round_robin_action(s, 4, 2, 1, 2, 10).sync_set == std::vector<int>{2, 3});
    CHECK(round_robin_action(s, 4, 2, 1, 3, 10).sync_set == std::vector<int>{0, 1});
}

TEST_CASE("round robin sync counts are balanced over 100 steps") {
    for (int neighbors : {3, 4, 6, 7}) {
        for (int budget = 1; budget <= neighbors; ++budget) {
            RoundRobinState s;
            std::vector<int> count(static_cast<std::size_t>(neighbors), 0);
            const int steps = 100;
            for (int t = 0; t < steps; ++t)
                for (int n : round_robin_action(s, neighbors, budget, 2, t, 5).sync_set) ++count[n];
            const double expected = static_cast<double>(budget) * steps / neighbors;
            for (int c : count) {
                CHECK(c >= expected - 1);
                CHECK(c <= expected + 1);
            }
        }
    }
}

TEST_CASE("round robin covers every neighbor within ceil(n / B) steps") {
    for (int neighbors = 1; neighbors <= 8; ++neighbors) {
        for (int budget = 1; budget <= neighbors; ++budget) {
            RoundRobinState s;
            for (int warm = 0; warm < 3; ++warm) round_robin_action(s, neighbors, budget, 1, warm, 1);
            std::vector<bool> seen(static_cast<std::size_t>(neighbors), false);
            const int window = (neighbors + budget - 1) / budget;
            for (int t = 0; t < window; ++t) {
                const auto a = round_robin_action(s, neighbors, budget, 1, t, 1);
                CHECK(static_cast<int>(a.sync_set.size()) == budget);
                for (int n : a.sync_set) seen[n] = true;
            }
            for (bool b : seen) CHECK(b);
        }
    }
}

TEST_CASE("round robin placement moves only at epochs") {
    RoundRobinState s;
    std::vector<int> sites;
    for (int t = 0; t < 12; ++t) sites.push_back(round_robin_action(s, 3, 1, 3, t, 4).place_site);
    CHECK(sites == std::vector<int>{1, 1, 1, 1, 2, 2, 2, 2, 0, 0, 0, 0});

    RoundRobinState one;
    for (int t = 0; t < 20; ++t) CHECK(round_robin_action(one, 3, 1, 1, t, 3).place_site == 0);
}

TEST_CASE("random action: full budget and exactness") {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        CHECK(random_action(rng, 5, 5, 3).sync_set == std::vector<int>{0, 1, 2, 3, 4});
        const auto a = random_action(rng, 3, 7, 4);
        CHECK(a.sync_set.size() == 3);
        CHECK(std::is_sorted(a.sync_set.begin(), a.sync_set.end()));
        CHECK(std::adjacent_find(a.sync_set.begin(), a.sync_set.end()) == a.sync_set.end());
    }
}

TEST_CASE("random action: inclusion and site frequencies") {
    Rng rng(2024);
    const int draws = 10000;
    std::vector<int> inc(6, 0), site(10, 0);
    for (int i = 0; i < draws; ++i) {
        const auto a = random_action(rng, 2, 6, 10);
        for (int n : a.sync_set) ++inc[n];
        ++site[a.place_site];
    }
    for (int c : inc) CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 3.0) <= 0.02);
    for (int c : site) CHECK(std::abs(static_cast<double>(c) / draws - 0.1) <= 0.02);
}

TEST_CASE("random policy redraws its site only at epochs and is seed-determined") {
    RandomPolicy p(5), q(5);
    int site = -1;
    for (int t = 0; t < 40; ++t) {
        const auto a = p.act(4, 2, 6, t, 8);
        CHECK(a == q.act(4, 2, 6, t, 8));
        if (t % 8 != 0) CHECK(a.place_site == site);
        site = a.place_site;
    }
}
