#include "doctest.h"

#include <set>

#include "contract_forge/discrete.hpp"
#include "support/checkers.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace contract_forge;
using namespace contract_forge::discrete;
namespace t = contract_forge::testing;

namespace {

DiscreteAllocation alloc_of(std::vector<int> actions) { return {std::move(actions)}; }

std::vector<Rat> flatten(const std::vector<std::vector<Rat>>& payments) {
    std::vector<Rat> flat;
    for (const auto& vec : payments) flat.insert(flat.end(), vec.begin(), vec.end());
    return flat;
}

// The known incentive-compatible contract for the two-type instance.
Contract known_good_contract() {
    Contract contract;
    contract.alloc = alloc_of({3, 1});
    contract.payments = {{Rat(0), Rat(0), Rat(14)}, {Rat(0), Rat(4), Rat(0)}};
    return contract;
}

}  // namespace

TEST_CASE("feasibility system has the advertised shape") {
    Instance inst = t::two_type_four_action();
    auto lp1 = build_ic_lp(inst, alloc_of({3, 1}));
    CHECK(lp1.num_vars == 6);          // 2 types x 3 outcomes
    CHECK(lp1.rows.size() == 16);      // 2 x 2 x 4

    Instance single = inst;
    single.types = DiscreteTypes{{Rat(2)}, {Rat(1)}};
    auto collapsed = build_ic_lp(single, alloc_of({1}));
    CHECK(collapsed.rows.size() == 4);  // n + 1: the classic one-type system

    CHECK_THROWS_AS(build_ic_lp(t::uniform_variant(), alloc_of({1})),
                    std::invalid_argument);
}

TEST_CASE("identical outcome rows with positive effort gap cannot be implemented") {
    Instance inst;  // deliberately unvalidated: two actions share a distribution
    inst.gammas = {Rat(0), Rat(1)};
    inst.rewards = {Rat(0), Rat(5)};
    inst.dist = {{Rat(0), Rat(1)}, {Rat(0), Rat(1)}};
    inst.types = DiscreteTypes{{Rat(2)}, {Rat(1)}};
    auto res = check_implementable(inst, alloc_of({1}));
    CHECK(std::holds_alternative<NotImplementable>(res));
}

TEST_CASE("the known contract's allocation is implementable") {
    Instance inst = t::two_type_four_action();
    auto res = check_implementable(inst, alloc_of({3, 1}));
    auto* impl = std::get_if<Implementable>(&res);
    REQUIRE(impl != nullptr);
    auto lp1 = build_ic_lp(inst, alloc_of({3, 1}));
    CHECK(t::point_feasible(lp1, flatten(impl->payments)));
    // The hand-built payments are one feasible choice.
    CHECK(t::point_feasible(lp1, flatten(known_good_contract().payments)));
}

TEST_CASE("the flat middle-action rule is monotone yet not implementable") {
    Instance inst = t::two_type_four_action();
    CHECK(is_monotone(alloc_of({2, 2})));
    auto res = check_implementable(inst, alloc_of({2, 2}));
    auto* no = std::get_if<NotImplementable>(&res);
    REQUIRE(no != nullptr);
    CHECK(verify_deviation_plan(inst, alloc_of({2, 2}), no->plan).valid());
}

TEST_CASE("the published certificate for the flat rule verifies with costs 14 < 15") {
    Instance inst = t::two_type_four_action();
    DeviationPlan plan(2, 4);
    plan.at(0, 0, 3) = rat(1, 2);
    plan.at(0, 1, 3) = rat(1, 2);
    plan.at(1, 0, 1) = rat(1, 2);
    plan.at(1, 1, 1) = rat(1, 2);
    auto check = verify_deviation_plan(inst, alloc_of({2, 2}), plan);
    CHECK(check.valid());
    CHECK(check.plan_cost == 14);
    CHECK(check.truthful_cost == 15);
}

TEST_CASE("the truthful plan never certifies") {
    Instance inst = t::two_type_four_action();
    DiscreteAllocation alloc = alloc_of({3, 1});
    DeviationPlan plan(2, 4);
    plan.at(0, 0, 3) = 1;
    plan.at(1, 1, 1) = 1;
    auto check = verify_deviation_plan(inst, alloc, plan);
    CHECK(check.status == PlanStatus::CostNotLower);
    CHECK(check.plan_cost == check.truthful_cost);
}

TEST_CASE("swapping a non-monotone pair certifies non-implementability") {
    Instance inst = t::two_type_four_action();
    DiscreteAllocation alloc = alloc_of({1, 3});  // cheap type gets light action
    DeviationPlan plan(2, 4);
    plan.at(0, 1, 3) = 1;  // low-cost type covers the heavy action
    plan.at(1, 0, 1) = 1;  // high-cost type covers the light one
    CHECK(verify_deviation_plan(inst, alloc, plan).valid());
}

TEST_CASE("unnormalized plans are flagged") {
    Instance inst = t::two_type_four_action();
    DeviationPlan plan(2, 4);
    plan.at(0, 0, 2) = rat(1, 2);  // row sums 1/2 and 0
    auto check = verify_deviation_plan(inst, alloc_of({2, 2}), plan);
    CHECK(check.status == PlanStatus::NotNormalized);
}

TEST_CASE("minimum payments for the known allocation") {
    Instance inst = t::two_type_four_action();
    auto res = min_payment_contract(inst, alloc_of({3, 1}));
    auto* priced = std::get_if<PricedContract>(&res);
    REQUIRE(priced != nullptr);
    CHECK(priced->expected_payment <= 9);
    CHECK(priced->revenue >= 11);
    auto lp1 = build_ic_lp(inst, alloc_of({3, 1}));
    CHECK(t::point_feasible(lp1, flatten(priced->contract.payments)));
    CHECK(!ic_check(inst, priced->contract).has_value());
}

TEST_CASE("the zero allocation costs nothing") {
    Instance inst = t::two_type_four_action();
    auto res = min_payment_contract(inst, alloc_of({0, 0}));
    auto* priced = std::get_if<PricedContract>(&res);
    REQUIRE(priced != nullptr);
    CHECK(priced->expected_payment == 0);
    CHECK(priced->revenue == 0);
}

TEST_CASE("menu instance: best deterministic contract earns 19.75") {
    Instance inst = t::menu_instance();
    auto res = min_payment_contract(inst, alloc_of({2, 1}));
    auto* priced = std::get_if<PricedContract>(&res);
    REQUIRE(priced != nullptr);
    CHECK(priced->revenue == rat(79, 4));

    auto best = optimal_contract(inst);
    CHECK(best.revenue == rat(79, 4));
    auto oracle = brute_force_optimal(inst);
    CHECK(std::get<OptimalContract>(oracle).revenue == rat(79, 4));
}

TEST_CASE("monotonicity predicate") {
    CHECK(is_monotone(alloc_of({3, 1})));
    CHECK(!is_monotone(alloc_of({1, 3})));
    CHECK(is_monotone(alloc_of({2, 2, 2})));
}

TEST_CASE("monotone enumeration counts combinations with repetition") {
    CHECK(count_monotone(2, 3) == 10);
    CHECK(count_monotone(1, 3) == 4);
    CHECK(count_monotone(3, 1) == 4);
    int seen = 0;
    std::set<std::vector<int>> unique;
    for_each_monotone(2, 3, [&](const DiscreteAllocation& alloc) {
        ++seen;
        CHECK(is_monotone(alloc));
        unique.insert(alloc.action);
    });
    CHECK(seen == 10);
    CHECK(unique.size() == 10);
}

TEST_CASE("optimal equals exhaustive search on the two-type instance") {
    Instance inst = t::two_type_four_action();
    auto best = optimal_contract(inst);
    CHECK(best.revenue >= 11);
    auto oracle = brute_force_optimal(inst);
    auto* opt = std::get_if<OptimalContract>(&oracle);
    REQUIRE(opt != nullptr);
    CHECK(opt->revenue == best.revenue);
    CHECK(best.rules_considered == 10);
    CHECK(opt->rules_considered == 16);
}

TEST_CASE("exhaustive search respects its cap") {
    Instance inst = t::two_type_four_action();
    auto res = brute_force_optimal(inst, 3);
    CHECK(std::holds_alternative<CapExceeded>(res));
}

TEST_CASE("when no effort is worth buying the zero contract wins") {
    Instance inst = t::two_type_four_action();
    inst.gammas = {Rat(0), Rat(40), Rat(50), Rat(60)};  // effort costs dwarf rewards
    REQUIRE(!validate_instance(inst).has_value());
    auto best = optimal_contract(inst);
    CHECK(best.revenue == 0);
    CHECK(best.contract.alloc.action == std::vector<int>{0, 0});
    CHECK(best.expected_payment == 0);
}

TEST_CASE("single-type optima match the per-action pricing oracle") {
    t::Rng rng(4182);
    for (int trial = 0; trial < 25; ++trial) {
        Instance inst = t::random_discrete_instance(rng, 3, 3, 1);
        const Rat cost = std::get<DiscreteTypes>(inst.types).support[0];
        // Oracle: price each action with its own small program.
        Rat best = 0;
        for (int a = 0; a <= inst.n(); ++a) {
            lp::LinearProgram p;
            p.num_vars = inst.m() + 1;
            p.objective.assign(inst.dist[a].begin(), inst.dist[a].end());
            p.sense = lp::Sense::Minimize;
            for (int k = 0; k <= inst.n(); ++k) {
                std::vector<Rat> row(p.num_vars);
                for (int j = 0; j <= inst.m(); ++j) {
                    row[j] = inst.dist[a][j] - inst.dist[k][j];
                }
                p.add_row(std::move(row), lp::Relation::GreaterEq,
                          (inst.gammas[a] - inst.gammas[k]) * cost);
            }
            auto out = lp::solve(p);
            if (out.status != lp::LpStatus::Optimal) continue;
            const Rat revenue = expected_reward(inst, a) - out.objective;
            best = std::max(best, revenue);
        }
        auto oracle = brute_force_optimal(inst);
        CHECK(std::get<OptimalContract>(oracle).revenue == best);
    }
}

TEST_CASE("direct incentive checking matches the hand analysis") {
    Instance inst = t::two_type_four_action();
    CHECK(!ic_check(inst, known_good_contract()).has_value());
    CHECK(contract_revenue(inst, known_good_contract()) == 11);

    Contract skimped = known_good_contract();
    skimped.payments[0] = {Rat(0), Rat(0), Rat(9)};
    auto violation = ic_check(inst, skimped);
    REQUIRE(violation.has_value());
    CHECK(violation->type_index == 0);
    CHECK(violation->report_index == 1);
    CHECK(violation->action == 1);
    CHECK(violation->deviation_utility == 3);
    CHECK(violation->prescribed_utility == -1);

    Contract zero;
    zero.alloc = alloc_of({0, 0});
    zero.payments = {{Rat(0), Rat(0), Rat(0)}, {Rat(0), Rat(0), Rat(0)}};
    CHECK(!ic_check(inst, zero).has_value());
}

TEST_CASE("the correlated menu is incentive compatible with revenue 19.875") {
    Instance inst = t::menu_instance();
    CorrelatedMenu menu;
    menu.per_type = {
        {{rat(1, 2), 3, {Rat(0), Rat(0), Rat(14)}},
         {rat(1, 2), 2, {Rat(0), Rat(1), Rat(5)}}},
        {{Rat(1), 1, {Rat(0), Rat(3), Rat(0)}}},
    };
    auto verdict = verify_correlated_menu(inst, menu);
    CHECK(verdict.ic());
    CHECK(verdict.revenue == rat(159, 8));

    // Gutting one lottery branch breaks obedience.
    CorrelatedMenu broken = menu;
    broken.per_type[0][1].payments = {Rat(0), Rat(0), Rat(0)};
    auto bad = verify_correlated_menu(inst, broken);
    REQUIRE(!bad.ic());
    CHECK(bad.violation->kind == MenuViolation::Kind::Disobedience);
}

TEST_CASE("one-point menus agree with the direct contract check") {
    t::Rng rng(5150);
    int ic_seen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Instance inst = t::random_discrete_instance(rng, 3, 3, 3);
        const auto& types = std::get<DiscreteTypes>(inst.types);
        Contract contract;
        contract.alloc = t::random_allocation(rng, inst);
        CorrelatedMenu menu;
        for (size_t i = 0; i < types.support.size(); ++i) {
            std::vector<Rat> pay(inst.m() + 1);
            for (auto& p : pay) p = rng.next(0, 2) ? Rat(0) : rng.fraction(8, 2);
            contract.payments.push_back(pay);
            menu.per_type.push_back(
                {{Rat(1), contract.alloc.action[i], pay}});
        }
        auto direct = ic_check(inst, contract);
        auto lottery = verify_correlated_menu(inst, menu);
        CHECK(direct.has_value() == !lottery.ic());
        if (lottery.ic()) {
            ++ic_seen;
            CHECK(lottery.revenue == contract_revenue(inst, contract));
        }
    }
    CHECK(ic_seen > 0);  // the fuzz must hit both verdicts
}

TEST_CASE("random corpus: certificates, monotonicity and optimality agree") {
    t::Rng rng(90210);
    int implementable_count = 0, certified_count = 0;
    for (int trial = 0; trial < 60; ++trial) {
        Instance inst = t::random_discrete_instance(rng, 3, 3, 3);
        const auto& types = std::get<DiscreteTypes>(inst.types);
        const int k = static_cast<int>(types.support.size());

        DiscreteAllocation alloc = t::random_allocation(rng, inst);
        auto res = min_payment_contract(inst, alloc);
        if (auto* priced = std::get_if<PricedContract>(&res)) {
            ++implementable_count;
            CHECK(is_monotone(alloc));  // implementable forces monotone
            auto lp1 = build_ic_lp(inst, alloc);
            CHECK(t::point_feasible(lp1, flatten(priced->contract.payments)));
            CHECK(!ic_check(inst, priced->contract).has_value());
            // Limited liability plus opt-out keep every type's utility >= 0.
            for (int c = 0; c < k; ++c) {
                const int a = alloc.action[c];
                Rat utility =
                    expected_transfer(inst, priced->contract.payments[c], a) -
                    inst.gammas[a] * types.support[c];
                CHECK(utility >= 0);
                for (const Rat& p : priced->contract.payments[c]) CHECK(p >= 0);
            }
        } else {
            ++certified_count;
            auto& no = std::get<NotImplementable>(res);
            CHECK(verify_deviation_plan(inst, alloc, no.plan).valid());
        }

        auto best = optimal_contract(inst);
        auto oracle = brute_force_optimal(inst);
        CHECK(std::get<OptimalContract>(oracle).revenue == best.revenue);
    }
    CHECK(implementable_count > 5);
    CHECK(certified_count > 5);
}

TEST_CASE("no incentive-compatible contract beats the minimum-payment pricing") {
    t::Rng rng(161803);
    int compared = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Instance inst = t::random_discrete_instance(rng, 2, 2, 2);
        DiscreteAllocation alloc = t::random_allocation(rng, inst);
        auto res = min_payment_contract(inst, alloc);
        auto* priced = std::get_if<PricedContract>(&res);
        if (!priced) continue;
        // Fuzz IC contracts by inflating the optimal payments.
        for (int fuzz = 0; fuzz < 6; ++fuzz) {
            Contract candidate = priced->contract;
            for (auto& vec : candidate.payments) {
                for (auto& p : vec) {
                    if (rng.next(0, 2) == 0) p += rng.fraction(4, 2);
                }
            }
            if (ic_check(inst, candidate).has_value()) continue;
            ++compared;
            CHECK(contract_revenue(inst, candidate) <= priced->revenue);
        }
    }
    CHECK(compared > 10);
}
