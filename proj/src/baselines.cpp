#include "sdnsync/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace sdnsync {

JointAction round_robin_action(RoundRobinState& state, int num_neighbors, int budget, int num_sites, std::int64_t t,
                               int tau) {
    JointAction a;
    for (int i = 0; i < budget; ++i) a.sync_set.push_back((state.sync_cursor + i) % num_neighbors);
    std::sort(a.sync_set.begin(), a.sync_set.end());
    state.sync_cursor = (state.sync_cursor + budget) % num_neighbors;

    if (t % tau == 0) state.place_cursor = (state.place_cursor + 1) % num_sites;
    state.place_cursor %= num_sites;
    a.place_site = state.place_cursor;
    return a;
}

JointAction random_action(Rng& rng, int budget, int num_neighbors, int num_sites) {
    std::vector<int> pool(static_cast<std::size_t>(num_neighbors));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < budget; ++i) {
        const auto j = static_cast<std::size_t>(i) + uniform_index(rng, static_cast<std::uint64_t>(num_neighbors - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    JointAction a;
    a.sync_set.assign(pool.begin(), pool.begin() + budget);
    std::sort(a.sync_set.begin(), a.sync_set.end());
    a.place_site = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(num_sites)));
    return a;
}

JointAction RandomPolicy::act(int num_neighbors, int budget, int num_sites, std::int64_t t, int tau) {
    JointAction a = random_action(rng_, budget, num_neighbors, num_sites);
    if (t % tau == 0) site_ = a.place_site;
    a.place_site = site_;
    return a;
}

}  // namespace sdnsync
