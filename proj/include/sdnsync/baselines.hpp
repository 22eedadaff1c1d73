#pragma once

// Non-learning comparison policies.

#include <cstdint>

#include "sdnsync/envcore.hpp"
#include "sdnsync/rng.hpp"

namespace sdnsync {

struct RoundRobinState {
    int sync_cursor = 0;
    int place_cursor = 0;
};

/// Next B_sync neighbors cyclically from the cursor. At placement epochs the
/// site cursor advances by one; otherwise the current site is repeated.
JointAction round_robin_action(RoundRobinState& state, int num_neighbors, int budget, int num_sites, std::int64_t t,
                               int tau);

/// Uniform budget-sized neighbor subset and uniform site.
JointAction random_action(Rng& rng, int budget, int num_neighbors, int num_sites);

/// Random policy that redraws its site only at placement epochs.
class RandomPolicy {
public:
    explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}

    JointAction act(int num_neighbors, int budget, int num_sites, std::int64_t t, int tau);

private:
    Rng rng_;
    int site_ = 0;
};

}  // namespace sdnsync
