#include "contract_forge/model.hpp"

#include <stdexcept>

namespace contract_forge {

bool is_discrete(const TypeSpace& ts) {
    return std::holds_alternative<DiscreteTypes>(ts);
}

bool is_continuous(const TypeSpace& ts) { return !is_discrete(ts); }

Rat upper_bound(const TypeSpace& ts) {
    if (const auto* d = std::get_if<DiscreteTypes>(&ts)) {
        if (d->support.empty()) throw std::invalid_argument("empty support");
        return d->support.back();
    }
    if (const auto* u = std::get_if<UniformTypes>(&ts)) return u->upper;
    const auto& t = std::get<TabulatedTypes>(ts);
    if (t.grid.empty()) throw std::invalid_argument("empty grid");
    return t.grid.back();
}

namespace {

std::optional<Violation> check_types(const TypeSpace& ts) {
    if (const auto* d = std::get_if<DiscreteTypes>(&ts)) {
        if (d->support.empty() || d->support.size() != d->masses.size()) {
            return Violation{"type_support_shape", {},
                             "support and masses must be nonempty and equal length"};
        }
        Rat total = 0;
        for (size_t i = 0; i < d->support.size(); ++i) {
            if (d->support[i] < 0) {
                return Violation{"type_support_nonnegative",
                                 {static_cast<int>(i)},
                                 "costs must be nonnegative"};
            }
            if (i > 0 && !(d->support[i - 1] < d->support[i])) {
                return Violation{"type_support_increasing",
                                 {static_cast<int>(i)},
                                 "support must be strictly increasing"};
            }
            if (d->masses[i] < 0) {
                return Violation{"type_mass_nonnegative",
                                 {static_cast<int>(i)},
                                 "masses must be nonnegative"};
            }
            total += d->masses[i];
        }
        if (total != 1) {
            return Violation{"type_mass_sum", {}, "masses must sum to 1"};
        }
        return std::nullopt;
    }
    if (const auto* u = std::get_if<UniformTypes>(&ts)) {
        if (!(u->upper > 0)) {
            return Violation{"type_upper_positive", {},
                             "uniform upper bound must be positive"};
        }
        return std::nullopt;
    }
    const auto& t = std::get<TabulatedTypes>(ts);
    const size_t k = t.grid.size();
    if (k < 2 || t.cdf.size() != k || t.pdf.size() != k) {
        return Violation{"type_grid_shape", {},
                         "grid, cdf, pdf must share length >= 2"};
    }
    if (t.grid.front() != 0) {
        return Violation{"type_grid_origin", {0}, "grid must start at 0"};
    }
    if (!(t.grid.back() > 0)) {
        return Violation{"type_upper_positive", {}, "upper bound must be positive"};
    }
    if (t.cdf.front() != 0 || t.cdf.back() != 1) {
        return Violation{"type_cdf_range", {}, "cdf must run from 0 to 1"};
    }
    for (size_t i = 0; i < k; ++i) {
        if (i > 0 && !(t.grid[i - 1] < t.grid[i])) {
            return Violation{"type_grid_increasing", {static_cast<int>(i)},
                             "grid must be strictly increasing"};
        }
        if (i > 0 && t.cdf[i] < t.cdf[i - 1]) {
            return Violation{"type_cdf_monotone", {static_cast<int>(i)},
                             "cdf must be nondecreasing"};
        }
        if (!(t.pdf[i] > 0)) {
            return Violation{"type_density_positive", {static_cast<int>(i)},
                             "density values must be positive"};
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<Violation> validate_instance(const Instance& inst) {
    const int n = inst.n();
    const int m = inst.m();
    if (n < 1 || m < 0) {
        return Violation{"shape", {}, "need at least two actions and one outcome"};
    }
    if (static_cast<int>(inst.dist.size()) != n + 1) {
        return Violation{"shape", {}, "dist must have one row per action"};
    }
    for (int i = 0; i <= n; ++i) {
        if (static_cast<int>(inst.dist[i].size()) != m + 1) {
            return Violation{"shape", {i}, "dist row width must match rewards"};
        }
    }

    if (inst.gammas[0] != 0) {
        return Violation{"gamma_zero", {0}, "gamma_0 must be 0"};
    }
    if (!(inst.gammas[1] > 0)) {
        return Violation{"gamma_ordering", {1}, "gamma_1 must exceed gamma_0 = 0"};
    }
    for (int i = 2; i <= n; ++i) {
        if (inst.gammas[i] < inst.gammas[i - 1]) {
            return Violation{"gamma_ordering", {i}, "gammas must be nondecreasing"};
        }
    }

    if (inst.rewards[0] != 0) {
        return Violation{"reward_zero", {0}, "r_0 must be 0"};
    }
    for (int j = 0; j <= m; ++j) {
        if (inst.rewards[j] < 0) {
            return Violation{"reward_nonnegative", {j}, "rewards must be nonnegative"};
        }
    }

    for (int i = 0; i <= n; ++i) {
        Rat sum = 0;
        for (int j = 0; j <= m; ++j) {
            const Rat& p = inst.dist[i][j];
            if (p < 0 || p > 1) {
                return Violation{"probability_range", {i, j},
                                 "probabilities must lie in [0,1]"};
            }
            sum += p;
        }
        if (sum != 1) {
            return Violation{"row_stochastic", {i}, "row must sum to exactly 1"};
        }
    }

    if (inst.dist[0][0] != 1) {
        return Violation{"optout_monitoring", {0},
                         "action 0 must produce outcome 0 with certainty"};
    }
    for (int i = 1; i <= n; ++i) {
        if (inst.dist[i][0] != 0) {
            return Violation{"optout_monitoring", {i},
                             "effortful actions must never produce outcome 0"};
        }
    }

    Rat prev = expected_reward(inst, 0);
    if (prev != 0) {
        return Violation{"expected_reward_increasing", {0},
                         "expected reward of action 0 must be 0"};
    }
    for (int i = 1; i <= n; ++i) {
        Rat cur = expected_reward(inst, i);
        if (!(cur > prev)) {
            return Violation{"expected_reward_increasing", {i},
                             "expected rewards must be strictly increasing"};
        }
        prev = cur;
    }

    for (int j = 1; j <= m; ++j) {
        if (inst.rewards[j] < inst.rewards[j - 1]) {
            return Violation{"reward_ordering", {j}, "rewards must be nondecreasing"};
        }
    }

    return check_types(inst.types);
}

Rat expected_reward(const Instance& inst, int action) {
    if (action < 0 || action > inst.n()) {
        throw std::out_of_range("action index out of range");
    }
    Rat sum = 0;
    for (int j = 0; j <= inst.m(); ++j) {
        sum += inst.dist[action][j] * inst.rewards[j];
    }
    return sum;
}

Rat expected_transfer(const Instance& inst, std::span<const Rat> payments,
                      int action) {
    if (action < 0 || action > inst.n()) {
        throw std::out_of_range("action index out of range");
    }
    if (static_cast<int>(payments.size()) != inst.m() + 1) {
        throw std::invalid_argument("payment vector must have m+1 entries");
    }
    Rat sum = 0;
    for (int j = 0; j <= inst.m(); ++j) {
        sum += inst.dist[action][j] * payments[j];
    }
    return sum;
}

}  // namespace contract_forge
