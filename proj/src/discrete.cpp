#include "contract_forge/discrete.hpp"

#include <algorithm>
#include <stdexcept>

namespace contract_forge::discrete {

namespace {

const DiscreteTypes& discrete_types(const Instance& inst) {
    const auto* d = std::get_if<DiscreteTypes>(&inst.types);
    if (!d) throw std::invalid_argument("operation requires a discrete type space");
    return *d;
}

void check_alloc(const Instance& inst, const DiscreteAllocation& alloc) {
    const auto& types = discrete_types(inst);
    if (alloc.action.size() != types.support.size()) {
        throw std::invalid_argument("allocation must cover the whole support");
    }
    for (int a : alloc.action) {
        if (a < 0 || a > inst.n()) {
            throw std::invalid_argument("allocation action out of range");
        }
    }
}

// Lemma-style renormalization of raw nonnegative certificate weights: scale
// by the largest per-type total and park the slack on the truthful entry
// (c, c, x(c)), which preserves both certificate conditions.
DeviationPlan normalize_plan(const Instance& inst, const DiscreteAllocation& alloc,
                             const std::vector<Rat>& raw) {
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int na = inst.n() + 1;
    DeviationPlan plan(k, na);
    std::vector<Rat> rowsum(k, Rat(0));
    auto idx = [&](int c, int cp, int a) {
        return (static_cast<size_t>(c) * k + cp) * na + a;
    };
    Rat scale = 0;
    for (int c = 0; c < k; ++c) {
        for (int cp = 0; cp < k; ++cp) {
            for (int a = 0; a < na; ++a) rowsum[c] += raw[idx(c, cp, a)];
        }
        scale = std::max(scale, rowsum[c]);
    }
    if (scale == 0) throw std::logic_error("empty certificate weights");
    for (int c = 0; c < k; ++c) {
        for (int cp = 0; cp < k; ++cp) {
            for (int a = 0; a < na; ++a) plan.at(c, cp, a) = raw[idx(c, cp, a)] / scale;
        }
        const int xc = alloc.action[c];
        plan.at(c, c, xc) = 1 - (rowsum[c] - raw[idx(c, c, xc)]) / scale;
    }
    return plan;
}

Rat support_mass(const DiscreteTypes& types, int i) { return types.masses[i]; }

}  // namespace

lp::LinearProgram build_ic_lp(const Instance& inst, const DiscreteAllocation& alloc) {
    check_alloc(inst, alloc);
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int m = inst.m();
    const int n = inst.n();

    lp::LinearProgram prog;
    prog.num_vars = k * (m + 1);
    for (int c = 0; c < k; ++c) {
        const int xc = alloc.action[c];
        const Rat& cost = types.support[c];
        for (int cp = 0; cp < k; ++cp) {
            for (int a = 0; a <= n; ++a) {
                std::vector<Rat> row(prog.num_vars, Rat(0));
                for (int j = 0; j <= m; ++j) {
                    row[c * (m + 1) + j] += inst.dist[xc][j];
                    row[cp * (m + 1) + j] -= inst.dist[a][j];
                }
                Rat rhs = (inst.gammas[xc] - inst.gammas[a]) * cost;
                prog.add_row(std::move(row), lp::Relation::GreaterEq, std::move(rhs));
            }
        }
    }
    return prog;
}

CheckResult check_implementable(const Instance& inst, const DiscreteAllocation& alloc) {
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int m = inst.m();
    lp::LinearProgram prog = build_ic_lp(inst, alloc);
    lp::Feasibility fz = lp::feasible(prog);
    if (auto* yes = std::get_if<lp::FeasibleYes>(&fz)) {
        std::vector<std::vector<Rat>> payments(k);
        for (int c = 0; c < k; ++c) {
            payments[c].assign(yes->point.begin() + c * (m + 1),
                               yes->point.begin() + (c + 1) * (m + 1));
        }
        return Implementable{std::move(payments)};
    }
    auto& no = std::get<lp::FeasibleNo>(fz);
    DeviationPlan plan = normalize_plan(inst, alloc, no.farkas);
    if (!verify_deviation_plan(inst, alloc, plan).valid()) {
        throw std::logic_error("certificate renormalization failed verification");
    }
    return NotImplementable{std::move(plan)};
}

PlanCheck verify_deviation_plan(const Instance& inst, const DiscreteAllocation& alloc,
                                const DeviationPlan& plan) {
    check_alloc(inst, alloc);
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int m = inst.m();
    const int n = inst.n();
    if (plan.num_types != k || plan.num_actions != n + 1) {
        throw std::invalid_argument("plan dimensions do not match the instance");
    }

    PlanCheck check;
    for (int c = 0; c < k; ++c) {
        Rat total = 0;
        for (int cp = 0; cp < k; ++cp) {
            for (int a = 0; a <= n; ++a) {
                if (plan.at(c, cp, a) < 0) {
                    check.status = PlanStatus::NotNormalized;
                    check.witness_type = c;
                    return check;
                }
                total += plan.at(c, cp, a);
            }
        }
        if (total != 1) {
            check.status = PlanStatus::NotNormalized;
            check.witness_type = c;
            return check;
        }
    }

    // Weakly dominant distributions: deviations landing on report c must
    // cover the prescribed outcome distribution of c, outcome by outcome.
    for (int c = 0; c < k; ++c) {
        for (int j = 0; j <= m; ++j) {
            Rat mixed = 0;
            for (int cp = 0; cp < k; ++cp) {
                for (int a = 0; a <= n; ++a) {
                    mixed += inst.dist[a][j] * plan.at(cp, c, a);
                }
            }
            if (mixed < inst.dist[alloc.action[c]][j]) {
                check.status = PlanStatus::DominanceFailed;
                check.witness_type = c;
                check.witness_outcome = j;
                return check;
            }
        }
    }

    Rat plan_cost = 0;
    Rat truthful_cost = 0;
    for (int c = 0; c < k; ++c) {
        truthful_cost += inst.gammas[alloc.action[c]] * types.support[c];
        for (int cp = 0; cp < k; ++cp) {
            for (int a = 0; a <= n; ++a) {
                plan_cost += plan.at(c, cp, a) * inst.gammas[a] * types.support[c];
            }
        }
    }
    check.plan_cost = plan_cost;
    check.truthful_cost = truthful_cost;
    if (!(plan_cost < truthful_cost)) {
        check.status = PlanStatus::CostNotLower;
        return check;
    }
    return check;
}

MinPaymentResult min_payment_contract(const Instance& inst,
                                      const DiscreteAllocation& alloc) {
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int m = inst.m();
    lp::LinearProgram primal = build_ic_lp(inst, alloc);
    const int rows = static_cast<int>(primal.rows.size());
    const int vars = primal.num_vars;

    // Expected-payment objective per payment variable (c, j).
    std::vector<Rat> payment_cost(vars, Rat(0));
    for (int c = 0; c < k; ++c) {
        for (int j = 0; j <= m; ++j) {
            payment_cost[c * (m + 1) + j] =
                support_mass(types, c) * inst.dist[alloc.action[c]][j];
        }
    }

    // Solve the dual side: it starts feasible at zero, so no auxiliary
    // phase is ever needed, and its multipliers recover the payments.
    lp::LinearProgram dual;
    dual.num_vars = rows;
    dual.objective.resize(rows);
    dual.sense = lp::Sense::Maximize;
    for (int r = 0; r < rows; ++r) dual.objective[r] = primal.rows[r].rhs;
    for (int v = 0; v < vars; ++v) {
        std::vector<Rat> row(rows, Rat(0));
        for (int r = 0; r < rows; ++r) row[r] = primal.rows[r].coeffs[v];
        dual.add_row(std::move(row), lp::Relation::LessEq, payment_cost[v]);
    }

    lp::LpOutcome out = lp::solve(dual);
    if (out.status == lp::LpStatus::Unbounded) {
        DeviationPlan plan = normalize_plan(inst, alloc, out.ray);
        if (!verify_deviation_plan(inst, alloc, plan).valid()) {
            throw std::logic_error("certificate renormalization failed verification");
        }
        return NotImplementable{std::move(plan)};
    }
    if (out.status != lp::LpStatus::Optimal) {
        throw std::logic_error("dual pricing program cannot be infeasible");
    }

    PricedContract priced;
    priced.contract.alloc = alloc;
    priced.contract.payments.resize(k);
    for (int c = 0; c < k; ++c) {
        priced.contract.payments[c].assign(out.dual.begin() + c * (m + 1),
                                           out.dual.begin() + (c + 1) * (m + 1));
    }
    priced.expected_payment = out.objective;
    Rat expected_rewards = 0;
    for (int c = 0; c < k; ++c) {
        expected_rewards += support_mass(types, c) * expected_reward(inst, alloc.action[c]);
    }
    priced.revenue = expected_rewards - priced.expected_payment;
    return priced;
}

bool is_monotone(const DiscreteAllocation& alloc) {
    for (size_t i = 1; i < alloc.action.size(); ++i) {
        if (alloc.action[i] > alloc.action[i - 1]) return false;
    }
    return true;
}

namespace {

void recurse_monotone(std::vector<int>& current, int pos, int max_action,
                      const std::function<void(const DiscreteAllocation&)>& fn) {
    if (pos == static_cast<int>(current.size())) {
        fn(DiscreteAllocation{current});
        return;
    }
    for (int a = 0; a <= max_action; ++a) {
        current[pos] = a;
        recurse_monotone(current, pos + 1, a, fn);
    }
}

}  // namespace

void for_each_monotone(int num_types, int n,
                       const std::function<void(const DiscreteAllocation&)>& fn) {
    if (num_types <= 0 || n < 0) throw std::invalid_argument("bad enumeration sizes");
    std::vector<int> current(num_types, 0);
    recurse_monotone(current, 0, n, fn);
}

std::uint64_t count_monotone(int num_types, int n) {
    // binomial(num_types + n, num_types)
    std::uint64_t result = 1;
    for (int i = 1; i <= num_types; ++i) {
        result = result * static_cast<std::uint64_t>(n + i) / i;
    }
    return result;
}

namespace {

OptimalContract search_allocations(
    const Instance& inst,
    const std::function<void(const std::function<void(const DiscreteAllocation&)>&)>&
        enumerate,
    std::string note) {
    OptimalContract best;
    bool have = false;
    enumerate([&](const DiscreteAllocation& alloc) {
        ++best.rules_considered;
        MinPaymentResult res = min_payment_contract(inst, alloc);
        auto* priced = std::get_if<PricedContract>(&res);
        if (!priced) return;
        ++best.rules_implementable;
        if (!have || priced->revenue > best.revenue) {
            have = true;
            best.contract = std::move(priced->contract);
            best.expected_payment = priced->expected_payment;
            best.revenue = priced->revenue;
        }
    });
    if (!have) throw std::logic_error("no implementable allocation found");
    best.search_note = std::move(note);
    return best;
}

}  // namespace

OptimalContract optimal_contract(const Instance& inst) {
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    return search_allocations(
        inst,
        [&](const std::function<void(const DiscreteAllocation&)>& fn) {
            for_each_monotone(k, inst.n(), fn);
        },
        "searched monotone allocation rules only; every implementable "
        "allocation rule is monotone, so the restriction is lossless");
}

BruteForceResult brute_force_optimal(const Instance& inst, std::uint64_t cap) {
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int base = inst.n() + 1;
    std::uint64_t total = 1;
    for (int i = 0; i < k; ++i) {
        if (total > cap / base + 1) return CapExceeded{0, cap};
        total *= base;
        if (total > cap) return CapExceeded{total, cap};
    }
    return search_allocations(
        inst,
        [&](const std::function<void(const DiscreteAllocation&)>& fn) {
            std::vector<int> current(k, 0);
            for (;;) {
                fn(DiscreteAllocation{current});
                int pos = k - 1;
                while (pos >= 0 && current[pos] == base - 1) {
                    current[pos] = 0;
                    --pos;
                }
                if (pos < 0) break;
                ++current[pos];
            }
        },
        "exhaustive search over every allocation rule");
}

std::optional<IcViolation> ic_check(const Instance& inst, const Contract& contract) {
    check_alloc(inst, contract.alloc);
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int m = inst.m();
    const int n = inst.n();
    if (static_cast<int>(contract.payments.size()) != k) {
        throw std::invalid_argument("payments must cover the whole support");
    }
    for (const auto& t : contract.payments) {
        if (static_cast<int>(t.size()) != m + 1) {
            throw std::invalid_argument("payment vector must have m+1 entries");
        }
        for (const Rat& v : t) {
            if (v < 0) throw std::invalid_argument("payments must be nonnegative");
        }
    }

    for (int c = 0; c < k; ++c) {
        const Rat& cost = types.support[c];
        const int xc = contract.alloc.action[c];
        Rat prescribed =
            expected_transfer(inst, contract.payments[c], xc) - inst.gammas[xc] * cost;
        std::optional<IcViolation> best;
        for (int cp = 0; cp < k; ++cp) {
            for (int a = 0; a <= n; ++a) {
                Rat dev = expected_transfer(inst, contract.payments[cp], a) -
                          inst.gammas[a] * cost;
                if (dev > prescribed && (!best || dev > best->deviation_utility)) {
                    best = IcViolation{c, cp, a, prescribed, dev};
                }
            }
        }
        if (best) return best;
    }
    return std::nullopt;
}

Rat contract_revenue(const Instance& inst, const Contract& contract) {
    const auto& types = discrete_types(inst);
    Rat revenue = 0;
    for (size_t c = 0; c < types.support.size(); ++c) {
        const int xc = contract.alloc.action[c];
        revenue += types.masses[c] *
                   (expected_reward(inst, xc) -
                    expected_transfer(inst, contract.payments[c], xc));
    }
    return revenue;
}

MenuVerdict verify_correlated_menu(const Instance& inst, const CorrelatedMenu& menu) {
    const auto& types = discrete_types(inst);
    const int k = static_cast<int>(types.support.size());
    const int m = inst.m();
    const int n = inst.n();
    if (static_cast<int>(menu.per_type.size()) != k) {
        throw std::invalid_argument("menu must cover the whole support");
    }
    for (const auto& entries : menu.per_type) {
        Rat total = 0;
        for (const auto& e : entries) {
            if (e.prob < 0) throw std::invalid_argument("menu probabilities must be nonnegative");
            if (e.action < 0 || e.action > n) {
                throw std::invalid_argument("menu action out of range");
            }
            if (static_cast<int>(e.payments.size()) != m + 1) {
                throw std::invalid_argument("menu payment vector must have m+1 entries");
            }
            for (const Rat& v : e.payments) {
                if (v < 0) throw std::invalid_argument("menu payments must be nonnegative");
            }
            total += e.prob;
        }
        if (total != 1) throw std::invalid_argument("menu probabilities must sum to 1");
    }

    MenuVerdict verdict;
    // Expected utility of report cp for an agent of true cost `cost`, best
    // responding to each realized payment vector.
    auto best_response_value = [&](int cp, const Rat& cost) {
        Rat value = 0;
        for (const auto& e : menu.per_type[cp]) {
            if (e.prob == 0) continue;
            Rat best = 0;
            bool first = true;
            for (int a = 0; a <= n; ++a) {
                Rat u = expected_transfer(inst, e.payments, a) - inst.gammas[a] * cost;
                if (first || u > best) {
                    best = u;
                    first = false;
                }
            }
            value += e.prob * best;
        }
        return value;
    };

    for (int c = 0; c < k && !verdict.violation; ++c) {
        const Rat& cost = types.support[c];
        Rat truthful = 0;
        for (size_t ei = 0; ei < menu.per_type[c].size(); ++ei) {
            const auto& e = menu.per_type[c][ei];
            Rat obey = expected_transfer(inst, e.payments, e.action) -
                       inst.gammas[e.action] * cost;
            truthful += e.prob * obey;
            if (e.prob == 0) continue;
            for (int a = 0; a <= n; ++a) {
                Rat alt = expected_transfer(inst, e.payments, a) - inst.gammas[a] * cost;
                if (alt > obey) {
                    verdict.violation = MenuViolation{
                        MenuViolation::Kind::Disobedience, c, c,
                        static_cast<int>(ei), a, obey, alt};
                    break;
                }
            }
            if (verdict.violation) break;
        }
        if (verdict.violation) break;
        for (int cp = 0; cp < k; ++cp) {
            if (cp == c) continue;
            Rat dev = best_response_value(cp, cost);
            if (dev > truthful) {
                verdict.violation = MenuViolation{MenuViolation::Kind::Misreport,
                                                  c, cp, -1, -1, truthful, dev};
                break;
            }
        }
    }

    Rat revenue = 0;
    for (int c = 0; c < k; ++c) {
        for (const auto& e : menu.per_type[c]) {
            revenue += types.masses[c] * e.prob *
                       (expected_reward(inst, e.action) -
                        expected_transfer(inst, e.payments, e.action));
        }
    }
    verdict.revenue = revenue;
    return verdict;
}

}  // namespace contract_forge::discrete
