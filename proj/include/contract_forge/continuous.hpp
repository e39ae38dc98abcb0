#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "contract_forge/lp.hpp"
#include "contract_forge/model.hpp"

namespace contract_forge::continuous {

// Monotone piecewise-constant allocation rule on [0, c-bar]: actions[i]
// rules [z_i, z_{i+1}) where z_0 = 0, z_{l+1} = c-bar and `breakpoints`
// holds the interior z_1 < ... < z_l. The top type c-bar keeps the last
// piece's action.
struct PiecewiseConstantRule {
    std::vector<Rat> breakpoints;
    std::vector<int> actions;

    int pieces() const { return static_cast<int>(actions.size()); }
};

struct NotPiecewiseMonotone : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotRegular : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoDmr : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroDensity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Merges equal adjacent actions and validates shape, ordering and
// monotonicity. Throws NotPiecewiseMonotone when actions increase with cost.
PiecewiseConstantRule normalize_rule(const Instance& inst,
                                     const PiecewiseConstantRule& rule);

// Full breakpoint list 0 = z_0 < ... < z_{l+1} = c-bar.
std::vector<Rat> full_breakpoints(const Instance& inst,
                                  const PiecewiseConstantRule& rule);

// Deviation plan over the duplicated breakpoints: the R copy of piece i
// lives at cost z_i, the L copy at cost z_{i+1}; both are prescribed piece
// i's payments and action. right[i][i'][k] / left[i][i'][k] weight the move
// "report piece i', take action k".
struct ContinuousDeviationPlan {
    int pieces = 0;
    int num_actions = 0;
    std::vector<Rat> right;
    std::vector<Rat> left;

    ContinuousDeviationPlan() = default;
    ContinuousDeviationPlan(int p, int actions)
        : pieces(p),
          num_actions(actions),
          right(static_cast<size_t>(p) * p * actions, Rat(0)),
          left(static_cast<size_t>(p) * p * actions, Rat(0)) {}

    Rat& r_at(int i, int report, int k) {
        return right[(static_cast<size_t>(i) * pieces + report) * num_actions + k];
    }
    const Rat& r_at(int i, int report, int k) const {
        return right[(static_cast<size_t>(i) * pieces + report) * num_actions + k];
    }
    Rat& l_at(int i, int report, int k) {
        return left[(static_cast<size_t>(i) * pieces + report) * num_actions + k];
    }
    const Rat& l_at(int i, int report, int k) const {
        return left[(static_cast<size_t>(i) * pieces + report) * num_actions + k];
    }
};

// Feasibility system for implementing `rule` over the continuum, reduced to
// its breakpoints. One payment vector per piece ((l+1)(m+1) nonnegative
// variables). Two row families per piece, both over every (report, action)
// pair: the R family holds the incentive constraints at the piece's lower
// endpoint, the L family at its upper endpoint (the top piece's upper
// endpoint is c-bar, which keeps the extension to the whole interval
// incentive compatible). With pin_zero_outcome the outcome-0 payments are
// additionally fixed to zero.
lp::LinearProgram build_lp2(const Instance& inst, const PiecewiseConstantRule& rule,
                            bool pin_zero_outcome);

struct ContImplementable {
    PiecewiseConstantRule rule;  // normalized
    std::vector<std::vector<Rat>> payments;  // per piece, m+1 entries
};
struct ContNotImplementable {
    PiecewiseConstantRule rule;  // normalized
    ContinuousDeviationPlan plan;
};
using ContCheckResult = std::variant<ContImplementable, ContNotImplementable>;

ContCheckResult check_implementable_cont(const Instance& inst,
                                         const PiecewiseConstantRule& rule);

enum class ContPlanStatus { Valid, NotNormalized, DominanceFailed, CostNotLower };

struct ContPlanCheck {
    ContPlanStatus status = ContPlanStatus::Valid;
    int witness_piece = -1;
    int witness_outcome = -1;
    Rat plan_cost = 0;
    Rat truthful_cost = 0;
    bool valid() const { return status == ContPlanStatus::Valid; }
};

ContPlanCheck verify_deviation_plan_cont(const Instance& inst,
                                         const PiecewiseConstantRule& rule,
                                         const ContinuousDeviationPlan& plan);

// Exact CDF / density readings of a continuous type space.
Rat cdf_at(const TypeSpace& ts, const Rat& c);
Rat density_at(const TypeSpace& ts, const Rat& c);

// phi(c) = c + G(c)/g(c)
Rat virtual_cost(const TypeSpace& ts, const Rat& c);

// Uniform is always regular; tabulated spaces are regular when the virtual
// cost never drops across grid knots (it always rises within a segment).
bool is_regular(const TypeSpace& ts);

// The rule picking argmax_i R_i - phi(c) * gamma_i, with breakpoints at the
// exact pairwise thresholds. Requires a regular continuous type space.
PiecewiseConstantRule virtual_welfare_rule(const Instance& inst);

struct IdentityViolation {
    int breakpoint_index = 0;  // 1-based interior breakpoint
    Rat lhs = 0;
    Rat rhs = 0;
};

// Jump condition at each interior breakpoint:
//   T^{z_i}(a_i) - T^{z_{i+1}}(a_{i+1}) = z_{i+1} (gamma_{a_i} - gamma_{a_{i+1}})
std::optional<IdentityViolation> payment_identity(
    const Instance& inst, const PiecewiseConstantRule& rule,
    const std::vector<std::vector<Rat>>& payments);

// Closed form per piece: sum_i R_{a_i} (G(z_{i+1}) - G(z_i))
//                            - gamma_{a_i} (G(z_{i+1}) z_{i+1} - G(z_i) z_i).
Rat expected_virtual_welfare(const Instance& inst, const PiecewiseConstantRule& rule);

// Direct expected revenue E[R_x] - E[T] of the given breakpoint payments.
Rat expected_revenue_cont(const Instance& inst, const PiecewiseConstantRule& rule,
                          const std::vector<std::vector<Rat>>& payments);

struct PricedRule {
    PiecewiseConstantRule rule;
    std::vector<std::vector<Rat>> payments;
    Rat expected_payment = 0;
    Rat revenue = 0;
};
using ContMinPaymentResult = std::variant<PricedRule, ContNotImplementable>;

ContMinPaymentResult min_payment_cont(const Instance& inst,
                                      const PiecewiseConstantRule& rule);

struct UniformOptimal {
    PiecewiseConstantRule rule;
    std::vector<std::vector<Rat>> payments;
    Rat revenue = 0;           // E[R_x] - E[T], from the payments
    Rat virtual_welfare = 0;   // closed form
    Rat top_type_utility = 0;
};
struct AssumptionViolated {
    int action = 0;  // effortful action whose expected reward covers c-bar
};
using UniformOptimalResult = std::variant<UniformOptimal, AssumptionViolated>;

// For uniform costs whose top type is never worth incentivizing
// (gamma_i * c-bar > R_i for every effortful i), the virtual-welfare rule is
// implementable with zero-outcome payments pinned to zero, which zeroes the
// top type's utility and makes the contract revenue-optimal.
UniformOptimalResult uniform_optimal_contract(const Instance& inst);

// Marginal reward per added unit of effort is weakly decreasing.
bool has_dmr(const Instance& inst);

// Breakpoints of the revenue-maximizing rule under regularity + DMR:
// phi(z_i) equals the i-th marginal-reward ratio from the top. Returns
// (breakpoint, ratio) pairs, clamped to [0, c-bar].
std::vector<std::pair<Rat, Rat>> dmr_breakpoints(const Instance& inst);

struct CostComparison {
    Rat joint_cost_a = 0;
    Rat joint_cost_b = 0;
    Rat joint_virtual_a = 0;
    Rat joint_virtual_b = 0;
};

// Joint (virtual) costs of two allocations over a discrete support whose
// costs are embedded in the continuous type space ts.
CostComparison joint_virtual_cost_compare(const Instance& inst,
                                          const std::vector<int>& alloc_a,
                                          const std::vector<int>& alloc_b,
                                          const TypeSpace& ts);

}  // namespace contract_forge::continuous
