#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "contract_forge/rational.hpp"

namespace contract_forge {

// Discrete type space: support c_1 < ... < c_k with probability masses.
struct DiscreteTypes {
    std::vector<Rat> support;
    std::vector<Rat> masses;
};

// Uniform type space on [0, upper].
struct UniformTypes {
    Rat upper;
};

// Tabulated continuous type space on [0, grid.back()]. The CDF is read
// piecewise-linearly between knots, the density piecewise-constantly: pdf[i]
// rules [grid[i], grid[i+1]), pdf.back() is the density at the upper end.
struct TabulatedTypes {
    std::vector<Rat> grid;
    std::vector<Rat> cdf;
    std::vector<Rat> pdf;
};

using TypeSpace = std::variant<DiscreteTypes, UniformTypes, TabulatedTypes>;

bool is_discrete(const TypeSpace& ts);
bool is_continuous(const TypeSpace& ts);
Rat upper_bound(const TypeSpace& ts);  // c-bar; discrete -> max support

// A principal-agent instance. Action i requires gammas[i] units of effort
// and induces outcome distribution dist[i]; outcome j pays the principal
// rewards[j]. The agent's private cost per unit of effort is drawn from
// types.
struct Instance {
    std::vector<Rat> gammas;              // gamma_0 .. gamma_n
    std::vector<std::vector<Rat>> dist;   // (n+1) x (m+1), row-stochastic
    std::vector<Rat> rewards;             // r_0 .. r_m
    TypeSpace types = DiscreteTypes{};

    int n() const { return static_cast<int>(gammas.size()) - 1; }
    int m() const { return static_cast<int>(rewards.size()) - 1; }
};

struct Violation {
    std::string assumption;
    std::vector<int> witness;
    std::string detail;
};

// Checks the structural assumptions in a fixed order and reports the first
// failure: action count/shape, gamma ordering, zero base reward, row
// stochasticity, opt-out monitoring (column 0 is action 0's signature),
// strictly increasing expected rewards, reward ordering, type space sanity.
// Validation never repairs; unordered or dominated inputs are rejected.
std::optional<Violation> validate_instance(const Instance& inst);

// R_i = sum_j dist[i][j] * rewards[j]
Rat expected_reward(const Instance& inst, int action);

// T_i = sum_j dist[i][j] * t[j]
Rat expected_transfer(const Instance& inst, std::span<const Rat> payments,
                      int action);

}  // namespace contract_forge
