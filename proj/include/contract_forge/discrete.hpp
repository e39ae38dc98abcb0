#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "contract_forge/lp.hpp"
#include "contract_forge/model.hpp"

namespace contract_forge::discrete {

// Allocation over a discrete type space, aligned with the instance's sorted
// support: action[i] is the action recommended to support[i].
struct DiscreteAllocation {
    std::vector<int> action;
};

// Deviation-plan weights lambda[(c, c', k)]: when the true type is
// support[c], with weight w the agent reports support[c'] and takes action
// k. A certifying plan is normalized per true type.
struct DeviationPlan {
    int num_types = 0;
    int num_actions = 0;  // n + 1
    std::vector<Rat> weights;

    DeviationPlan() = default;
    DeviationPlan(int types, int actions)
        : num_types(types),
          num_actions(actions),
          weights(static_cast<size_t>(types) * types * actions, Rat(0)) {}

    Rat& at(int c, int report, int k) {
        return weights[(static_cast<size_t>(c) * num_types + report) * num_actions + k];
    }
    const Rat& at(int c, int report, int k) const {
        return weights[(static_cast<size_t>(c) * num_types + report) * num_actions + k];
    }
};

struct Contract {
    DiscreteAllocation alloc;
    std::vector<std::vector<Rat>> payments;  // per type, m+1 entries
};

struct Implementable {
    std::vector<std::vector<Rat>> payments;
};
struct NotImplementable {
    DeviationPlan plan;
};
using CheckResult = std::variant<Implementable, NotImplementable>;

// Feasibility system for implementing `alloc`: one nonnegative payment
// variable per (type, outcome) and one constraint per (true type, reported
// type, action) requiring the prescribed choice to win weakly. Variable
// (c, j) sits at index c*(m+1)+j; the row for (c, c', k) sits at
// ((c*|C|)+c')*(n+1)+k.
lp::LinearProgram build_ic_lp(const Instance& inst,
                              const DiscreteAllocation& alloc);

CheckResult check_implementable(const Instance& inst,
                                const DiscreteAllocation& alloc);

enum class PlanStatus { Valid, NotNormalized, DominanceFailed, CostNotLower };

struct PlanCheck {
    PlanStatus status = PlanStatus::Valid;
    int witness_type = -1;
    int witness_outcome = -1;
    Rat plan_cost = 0;      // joint cost of the deviation plan
    Rat truthful_cost = 0;  // joint cost of truthful play
    bool valid() const { return status == PlanStatus::Valid; }
};

// Checks the two certificate conditions in exact arithmetic: the weighted
// outcome distributions deviating onto each report weakly dominate the
// prescribed one, and the plan's joint cost is strictly below truthful
// joint cost.
PlanCheck verify_deviation_plan(const Instance& inst,
                                const DiscreteAllocation& alloc,
                                const DeviationPlan& plan);

struct PricedContract {
    Contract contract;
    Rat expected_payment = 0;
    Rat revenue = 0;
};
using MinPaymentResult = std::variant<PricedContract, NotImplementable>;

// Payments minimizing the expected transfer over the feasibility region;
// revenue is expected reward minus that minimum.
MinPaymentResult min_payment_contract(const Instance& inst,
                                      const DiscreteAllocation& alloc);

bool is_monotone(const DiscreteAllocation& alloc);

// Visits every monotone allocation (actions nonincreasing in cost) exactly
// once, in lexicographic order of the action vector.
void for_each_monotone(int num_types, int n,
                       const std::function<void(const DiscreteAllocation&)>& fn);
std::uint64_t count_monotone(int num_types, int n);

struct OptimalContract {
    Contract contract;
    Rat expected_payment = 0;
    Rat revenue = 0;
    std::uint64_t rules_considered = 0;
    std::uint64_t rules_implementable = 0;
    // Why the search space is sound; carried into result documents.
    std::string search_note;
};

// Exhausts monotone allocations (implementable rules are monotone, so
// nothing is lost), pricing each via min_payment_contract. Ties keep the
// first rule in enumeration order. The zero allocation always implements,
// so a contract always exists.
OptimalContract optimal_contract(const Instance& inst);

struct CapExceeded {
    std::uint64_t required = 0;
    std::uint64_t cap = 0;
};
using BruteForceResult = std::variant<OptimalContract, CapExceeded>;

inline constexpr std::uint64_t kDefaultBruteForceCap = 1000000;

// Oracle search over all (n+1)^|C| allocations, monotone or not.
BruteForceResult brute_force_optimal(const Instance& inst,
                                     std::uint64_t cap = kDefaultBruteForceCap);

struct IcViolation {
    int type_index = -1;
    int report_index = -1;
    int action = -1;
    Rat prescribed_utility = 0;
    Rat deviation_utility = 0;
};

// Direct check of both incentive conditions by enumeration; ties break in
// the principal's favor, so the prescribed pair only needs to attain the
// maximum weakly.
std::optional<IcViolation> ic_check(const Instance& inst, const Contract& contract);

Rat contract_revenue(const Instance& inst, const Contract& contract);

// Menu of correlated (action, payment) lotteries, one lottery per type.
struct CorrelatedMenu {
    struct Entry {
        Rat prob;
        int action = 0;
        std::vector<Rat> payments;
    };
    std::vector<std::vector<Entry>> per_type;
};

struct MenuViolation {
    enum class Kind { Disobedience, Misreport };
    Kind kind = Kind::Disobedience;
    int type_index = -1;
    int report_index = -1;
    int entry_index = -1;
    int action = -1;
    Rat truthful_utility = 0;
    Rat deviation_utility = 0;
};

struct MenuVerdict {
    std::optional<MenuViolation> violation;
    Rat revenue = 0;  // expected principal revenue under obedience
    bool ic() const { return !violation.has_value(); }
};

// Obedience per realized (action, payments) pair plus truthfulness against
// misreporting and best-responding to each realization.
MenuVerdict verify_correlated_menu(const Instance& inst, const CorrelatedMenu& menu);

}  // namespace contract_forge::discrete
