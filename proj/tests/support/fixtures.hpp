#pragma once

// Shared hand-built instances used across the suites.

#include "contract_forge/model.hpp"

namespace contract_forge::testing {

// Two types {1, 4} with equal mass, four actions, three outcomes.
inline Instance two_type_four_action() {
    Instance inst;
    inst.gammas = {Rat(0), Rat(1), Rat(3), Rat(10)};
    inst.rewards = {Rat(0), Rat(10), Rat(30)};
    inst.dist = {{Rat(1), Rat(0), Rat(0)},
                 {Rat(0), Rat(1), Rat(0)},
                 {Rat(0), rat(1, 2), rat(1, 2)},
                 {Rat(0), Rat(0), Rat(1)}};
    inst.types = DiscreteTypes{{Rat(1), Rat(4)}, {rat(1, 2), rat(1, 2)}};
    return inst;
}

// Same actions with higher rewards and types {1, 3}; the setting where a
// correlated randomized menu beats every deterministic contract.
inline Instance menu_instance() {
    Instance inst = two_type_four_action();
    inst.rewards = {Rat(0), Rat(20), Rat(35)};
    inst.types = DiscreteTypes{{Rat(1), Rat(3)}, {rat(1, 2), rat(1, 2)}};
    return inst;
}

// The two-type action set over uniformly distributed costs on [0, 12].
inline Instance uniform_variant() {
    Instance inst = two_type_four_action();
    inst.types = UniformTypes{Rat(12)};
    return inst;
}

}  // namespace contract_forge::testing
