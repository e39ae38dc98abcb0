#include "contract_forge/continuous.hpp"

#include <algorithm>

namespace contract_forge::continuous {

namespace {

void require_continuous(const TypeSpace& ts) {
    if (is_discrete(ts)) {
        throw std::invalid_argument("operation requires a continuous type space");
    }
}

// Index of the tabulated segment [grid[i], grid[i+1]) containing c; the
// upper endpoint itself maps to the final knot.
int segment_of(const TabulatedTypes& t, const Rat& c) {
    const int knots = static_cast<int>(t.grid.size());
    if (c == t.grid.back()) return knots - 1;
    int lo = 0;
    for (int i = 0; i + 1 < knots; ++i) {
        if (t.grid[i] <= c && c < t.grid[i + 1]) {
            lo = i;
            break;
        }
    }
    return lo;
}

}  // namespace

Rat cdf_at(const TypeSpace& ts, const Rat& c) {
    require_continuous(ts);
    if (c < 0 || c > upper_bound(ts)) {
        throw std::out_of_range("cost outside the type space");
    }
    if (const auto* u = std::get_if<UniformTypes>(&ts)) return c / u->upper;
    const auto& t = std::get<TabulatedTypes>(ts);
    if (c == t.grid.back()) return t.cdf.back();
    const int i = segment_of(t, c);
    const Rat span = t.grid[i + 1] - t.grid[i];
    return t.cdf[i] + (t.cdf[i + 1] - t.cdf[i]) * (c - t.grid[i]) / span;
}

Rat density_at(const TypeSpace& ts, const Rat& c) {
    require_continuous(ts);
    if (c < 0 || c > upper_bound(ts)) {
        throw std::out_of_range("cost outside the type space");
    }
    if (const auto* u = std::get_if<UniformTypes>(&ts)) return 1 / u->upper;
    const auto& t = std::get<TabulatedTypes>(ts);
    return t.pdf[segment_of(t, c)];
}

Rat virtual_cost(const TypeSpace& ts, const Rat& c) {
    const Rat g = density_at(ts, c);
    if (!(g > 0)) throw ZeroDensity("density vanishes at the requested cost");
    return c + cdf_at(ts, c) / g;
}

bool is_regular(const TypeSpace& ts) {
    require_continuous(ts);
    if (std::holds_alternative<UniformTypes>(ts)) return true;
    const auto& t = std::get<TabulatedTypes>(ts);
    const int knots = static_cast<int>(t.grid.size());
    for (int i = 1; i < knots; ++i) {
        // Right value at the knot vs. the limit from the left segment.
        const Rat left_limit = t.grid[i] + t.cdf[i] / t.pdf[i - 1];
        const Rat right_value = t.grid[i] + t.cdf[i] / t.pdf[i];
        if (right_value < left_limit) return false;
    }
    return true;
}

namespace {

// Smallest c in [0, c-bar] with phi(c) >= v, for a regular type space.
std::optional<Rat> phi_reach(const TypeSpace& ts, const Rat& v) {
    if (v <= 0) return Rat(0);
    if (const auto* u = std::get_if<UniformTypes>(&ts)) {
        Rat c = v / 2;
        if (c > u->upper) return std::nullopt;
        return c;
    }
    const auto& t = std::get<TabulatedTypes>(ts);
    const int knots = static_cast<int>(t.grid.size());
    for (int i = 0; i + 1 < knots; ++i) {
        const Rat at_knot = t.grid[i] + t.cdf[i] / t.pdf[i];
        if (at_knot >= v) return t.grid[i];
        const Rat at_right = t.grid[i + 1] + t.cdf[i + 1] / t.pdf[i];
        if (at_right > v) {
            // Solve c + (G_i + s (c - g_i)) / p = v on the segment.
            const Rat s = (t.cdf[i + 1] - t.cdf[i]) / (t.grid[i + 1] - t.grid[i]);
            const Rat p = t.pdf[i];
            Rat c = (v * p - t.cdf[i] + s * t.grid[i]) / (p + s);
            return c;
        }
    }
    const Rat at_top = t.grid.back() + t.cdf.back() / t.pdf.back();
    if (at_top >= v) return t.grid.back();
    return std::nullopt;
}

}  // namespace

PiecewiseConstantRule normalize_rule(const Instance& inst,
                                     const PiecewiseConstantRule& rule) {
    require_continuous(inst.types);
    const Rat cbar = upper_bound(inst.types);
    if (rule.actions.empty() ||
        rule.actions.size() != rule.breakpoints.size() + 1) {
        throw NotPiecewiseMonotone("rule needs one action per piece");
    }
    for (int a : rule.actions) {
        if (a < 0 || a > inst.n()) throw NotPiecewiseMonotone("action out of range");
    }
    for (size_t i = 0; i < rule.breakpoints.size(); ++i) {
        const Rat& z = rule.breakpoints[i];
        if (!(z > 0) || !(z < cbar)) {
            throw NotPiecewiseMonotone("interior breakpoints must lie in (0, c-bar)");
        }
        if (i > 0 && !(rule.breakpoints[i - 1] < z)) {
            throw NotPiecewiseMonotone("breakpoints must be strictly increasing");
        }
    }
    PiecewiseConstantRule merged;
    merged.actions.push_back(rule.actions[0]);
    for (size_t i = 1; i < rule.actions.size(); ++i) {
        if (rule.actions[i] == merged.actions.back()) continue;
        merged.actions.push_back(rule.actions[i]);
        merged.breakpoints.push_back(rule.breakpoints[i - 1]);
    }
    for (size_t i = 1; i < merged.actions.size(); ++i) {
        if (merged.actions[i] > merged.actions[i - 1]) {
            throw NotPiecewiseMonotone("actions must not increase with cost");
        }
    }
    return merged;
}

std::vector<Rat> full_breakpoints(const Instance& inst,
                                  const PiecewiseConstantRule& rule) {
    std::vector<Rat> z;
    z.reserve(rule.breakpoints.size() + 2);
    z.push_back(0);
    for (const Rat& b : rule.breakpoints) z.push_back(b);
    z.push_back(upper_bound(inst.types));
    return z;
}

lp::LinearProgram build_lp2(const Instance& inst, const PiecewiseConstantRule& rule,
                            bool pin_zero_outcome) {
    PiecewiseConstantRule norm = normalize_rule(inst, rule);
    const std::vector<Rat> z = full_breakpoints(inst, norm);
    const int p = norm.pieces();
    const int m = inst.m();
    const int n = inst.n();

    lp::LinearProgram prog;
    prog.num_vars = p * (m + 1);
    auto add_family = [&](bool upper_end) {
        for (int i = 0; i < p; ++i) {
            const int ai = norm.actions[i];
            const Rat& cost = upper_end ? z[i + 1] : z[i];
            for (int ip = 0; ip < p; ++ip) {
                for (int a = 0; a <= n; ++a) {
                    std::vector<Rat> row(prog.num_vars, Rat(0));
                    for (int j = 0; j <= m; ++j) {
                        row[i * (m + 1) + j] += inst.dist[ai][j];
                        row[ip * (m + 1) + j] -= inst.dist[a][j];
                    }
                    Rat rhs = (inst.gammas[ai] - inst.gammas[a]) * cost;
                    prog.add_row(std::move(row), lp::Relation::GreaterEq,
                                 std::move(rhs));
                }
            }
        }
    };
    add_family(false);  // incentives at each piece's lower endpoint
    add_family(true);   // and at its upper endpoint, through c-bar
    if (pin_zero_outcome) {
        for (int i = 0; i < p; ++i) {
            std::vector<Rat> row(prog.num_vars, Rat(0));
            row[i * (m + 1)] = 1;
            prog.add_row(std::move(row), lp::Relation::Equal, Rat(0));
        }
    }
    return prog;
}

namespace {

// Renormalize raw certificate weights: scale by the largest copy total and
// park the slack on each copy's truthful entry, which keeps both
// certificate conditions intact.
ContinuousDeviationPlan normalize_cont_plan(const PiecewiseConstantRule& rule,
                                            int num_actions,
                                            const std::vector<Rat>& raw) {
    const int p = rule.pieces();
    ContinuousDeviationPlan plan(p, num_actions);
    const size_t family = static_cast<size_t>(p) * p * num_actions;
    std::vector<Rat> sum_r(p, Rat(0)), sum_l(p, Rat(0));
    for (int i = 0; i < p; ++i) {
        for (size_t off = static_cast<size_t>(i) * p * num_actions;
             off < static_cast<size_t>(i + 1) * p * num_actions; ++off) {
            sum_r[i] += raw[off];
            sum_l[i] += raw[family + off];
        }
    }
    Rat scale = 0;
    for (int i = 0; i < p; ++i) scale = std::max({scale, sum_r[i], sum_l[i]});
    if (scale == 0) throw std::logic_error("empty certificate weights");
    for (size_t off = 0; off < family; ++off) {
        plan.right[off] = raw[off] / scale;
        plan.left[off] = raw[family + off] / scale;
    }
    for (int i = 0; i < p; ++i) {
        plan.r_at(i, i, rule.actions[i]) += 1 - sum_r[i] / scale;
        plan.l_at(i, i, rule.actions[i]) += 1 - sum_l[i] / scale;
    }
    return plan;
}

std::vector<std::vector<Rat>> slice_payments(const std::vector<Rat>& flat, int p,
                                             int m) {
    std::vector<std::vector<Rat>> payments(p);
    for (int i = 0; i < p; ++i) {
        payments[i].assign(flat.begin() + i * (m + 1),
                           flat.begin() + (i + 1) * (m + 1));
    }
    return payments;
}

}  // namespace

ContCheckResult check_implementable_cont(const Instance& inst,
                                         const PiecewiseConstantRule& rule) {
    PiecewiseConstantRule norm = normalize_rule(inst, rule);
    lp::LinearProgram prog = build_lp2(inst, norm, false);
    lp::Feasibility fz = lp::feasible(prog);
    if (auto* yes = std::get_if<lp::FeasibleYes>(&fz)) {
        return ContImplementable{norm,
                                 slice_payments(yes->point, norm.pieces(), inst.m())};
    }
    auto& no = std::get<lp::FeasibleNo>(fz);
    ContinuousDeviationPlan plan = normalize_cont_plan(norm, inst.n() + 1, no.farkas);
    if (!verify_deviation_plan_cont(inst, norm, plan).valid()) {
        throw std::logic_error("certificate renormalization failed verification");
    }
    return ContNotImplementable{std::move(norm), std::move(plan)};
}

ContPlanCheck verify_deviation_plan_cont(const Instance& inst,
                                         const PiecewiseConstantRule& rule,
                                         const ContinuousDeviationPlan& plan) {
    const std::vector<Rat> z = full_breakpoints(inst, rule);
    const int p = rule.pieces();
    const int m = inst.m();
    const int n = inst.n();
    if (plan.pieces != p || plan.num_actions != n + 1) {
        throw std::invalid_argument("plan dimensions do not match the rule");
    }

    ContPlanCheck check;
    for (int i = 0; i < p; ++i) {
        Rat total_r = 0, total_l = 0;
        for (int ip = 0; ip < p; ++ip) {
            for (int a = 0; a <= n; ++a) {
                if (plan.r_at(i, ip, a) < 0 || plan.l_at(i, ip, a) < 0) {
                    check.status = ContPlanStatus::NotNormalized;
                    check.witness_piece = i;
                    return check;
                }
                total_r += plan.r_at(i, ip, a);
                total_l += plan.l_at(i, ip, a);
            }
        }
        if (total_r != 1 || total_l != 1) {
            check.status = ContPlanStatus::NotNormalized;
            check.witness_piece = i;
            return check;
        }
    }

    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= m; ++j) {
            Rat mixed = 0;
            for (int ip = 0; ip < p; ++ip) {
                for (int a = 0; a <= n; ++a) {
                    mixed += (plan.r_at(ip, i, a) + plan.l_at(ip, i, a)) *
                             inst.dist[a][j];
                }
            }
            if (mixed < 2 * inst.dist[rule.actions[i]][j]) {
                check.status = ContPlanStatus::DominanceFailed;
                check.witness_piece = i;
                check.witness_outcome = j;
                return check;
            }
        }
    }

    Rat plan_cost = 0, truthful_cost = 0;
    for (int i = 0; i < p; ++i) {
        truthful_cost += inst.gammas[rule.actions[i]] * (z[i] + z[i + 1]);
        for (int ip = 0; ip < p; ++ip) {
            for (int a = 0; a <= n; ++a) {
                plan_cost += inst.gammas[a] * (plan.r_at(i, ip, a) * z[i] +
                                               plan.l_at(i, ip, a) * z[i + 1]);
            }
        }
    }
    check.plan_cost = plan_cost;
    check.truthful_cost = truthful_cost;
    if (!(plan_cost < truthful_cost)) {
        check.status = ContPlanStatus::CostNotLower;
        return check;
    }
    return check;
}

PiecewiseConstantRule virtual_welfare_rule(const Instance& inst) {
    require_continuous(inst.types);
    if (!is_regular(inst.types)) {
        throw NotRegular("virtual-welfare rule needs a regular distribution");
    }
    const Rat cbar = upper_bound(inst.types);
    const int n = inst.n();
    std::vector<Rat> rewards(n + 1);
    for (int i = 0; i <= n; ++i) rewards[i] = expected_reward(inst, i);

    PiecewiseConstantRule rule;
    rule.actions.push_back(n);
    int a = n;
    Rat z_prev = 0;
    while (a > 0) {
        int next = -1;
        Rat threshold;
        for (int k = 0; k < a; ++k) {
            if (!(inst.gammas[k] < inst.gammas[a])) continue;  // dominated
            Rat v = (rewards[a] - rewards[k]) / (inst.gammas[a] - inst.gammas[k]);
            if (next < 0 || v < threshold) {
                next = k;
                threshold = v;
            }
        }
        if (next < 0) break;
        std::optional<Rat> cross = phi_reach(inst.types, threshold);
        if (!cross || *cross >= cbar) break;
        if (*cross == z_prev) {
            // Zero-length piece: the incumbent action never actually rules.
            rule.actions.back() = next;
        } else {
            rule.breakpoints.push_back(*cross);
            rule.actions.push_back(next);
            z_prev = *cross;
        }
        a = next;
    }
    return rule;
}

std::optional<IdentityViolation> payment_identity(
    const Instance& inst, const PiecewiseConstantRule& rule,
    const std::vector<std::vector<Rat>>& payments) {
    const std::vector<Rat> z = full_breakpoints(inst, rule);
    const int p = rule.pieces();
    if (static_cast<int>(payments.size()) != p) {
        throw std::invalid_argument("need one payment vector per piece");
    }
    for (int i = 0; i + 1 < p; ++i) {
        const Rat lhs = expected_transfer(inst, payments[i], rule.actions[i]) -
                        expected_transfer(inst, payments[i + 1], rule.actions[i + 1]);
        const Rat rhs =
            z[i + 1] * (inst.gammas[rule.actions[i]] - inst.gammas[rule.actions[i + 1]]);
        if (lhs != rhs) return IdentityViolation{i + 1, lhs, rhs};
    }
    return std::nullopt;
}

Rat expected_virtual_welfare(const Instance& inst, const PiecewiseConstantRule& rule) {
    const std::vector<Rat> z = full_breakpoints(inst, rule);
    Rat total = 0;
    for (int i = 0; i < rule.pieces(); ++i) {
        const int a = rule.actions[i];
        const Rat g_hi = cdf_at(inst.types, z[i + 1]);
        const Rat g_lo = cdf_at(inst.types, z[i]);
        total += expected_reward(inst, a) * (g_hi - g_lo) -
                 inst.gammas[a] * (g_hi * z[i + 1] - g_lo * z[i]);
    }
    return total;
}

Rat expected_revenue_cont(const Instance& inst, const PiecewiseConstantRule& rule,
                          const std::vector<std::vector<Rat>>& payments) {
    const std::vector<Rat> z = full_breakpoints(inst, rule);
    const int p = rule.pieces();
    if (static_cast<int>(payments.size()) != p) {
        throw std::invalid_argument("need one payment vector per piece");
    }
    Rat total = 0;
    for (int i = 0; i < p; ++i) {
        const Rat weight = cdf_at(inst.types, z[i + 1]) - cdf_at(inst.types, z[i]);
        total += weight * (expected_reward(inst, rule.actions[i]) -
                           expected_transfer(inst, payments[i], rule.actions[i]));
    }
    return total;
}

ContMinPaymentResult min_payment_cont(const Instance& inst,
                                      const PiecewiseConstantRule& rule) {
    PiecewiseConstantRule norm = normalize_rule(inst, rule);
    const std::vector<Rat> z = full_breakpoints(inst, norm);
    const int p = norm.pieces();
    const int m = inst.m();
    lp::LinearProgram primal = build_lp2(inst, norm, false);
    const int rows = static_cast<int>(primal.rows.size());
    const int vars = primal.num_vars;

    std::vector<Rat> payment_cost(vars, Rat(0));
    for (int i = 0; i < p; ++i) {
        const Rat weight = cdf_at(inst.types, z[i + 1]) - cdf_at(inst.types, z[i]);
        for (int j = 0; j <= m; ++j) {
            payment_cost[i * (m + 1) + j] = weight * inst.dist[norm.actions[i]][j];
        }
    }

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
        ContinuousDeviationPlan plan = normalize_cont_plan(norm, inst.n() + 1, out.ray);
        if (!verify_deviation_plan_cont(inst, norm, plan).valid()) {
            throw std::logic_error("certificate renormalization failed verification");
        }
        return ContNotImplementable{std::move(norm), std::move(plan)};
    }
    if (out.status != lp::LpStatus::Optimal) {
        throw std::logic_error("dual pricing program cannot be infeasible");
    }

    PricedRule priced;
    priced.payments = slice_payments(out.dual, p, m);
    priced.expected_payment = out.objective;
    Rat expected_rewards = 0;
    for (int i = 0; i < p; ++i) {
        const Rat weight = cdf_at(inst.types, z[i + 1]) - cdf_at(inst.types, z[i]);
        expected_rewards += weight * expected_reward(inst, norm.actions[i]);
    }
    priced.revenue = expected_rewards - priced.expected_payment;
    priced.rule = std::move(norm);
    return priced;
}

UniformOptimalResult uniform_optimal_contract(const Instance& inst) {
    if (!std::holds_alternative<UniformTypes>(inst.types)) {
        throw std::invalid_argument("optimal contract synthesis needs uniform types");
    }
    const Rat cbar = upper_bound(inst.types);
    for (int i = 1; i <= inst.n(); ++i) {
        if (!(inst.gammas[i] * cbar > expected_reward(inst, i))) {
            return AssumptionViolated{i};
        }
    }
    PiecewiseConstantRule rule = virtual_welfare_rule(inst);
    lp::LinearProgram prog = build_lp2(inst, rule, true);
    lp::Feasibility fz = lp::feasible(prog);
    auto* yes = std::get_if<lp::FeasibleYes>(&fz);
    if (!yes) {
        throw std::logic_error(
            "virtual-welfare rule unexpectedly not implementable with pinned "
            "zero-outcome payments");
    }
    UniformOptimal result;
    result.payments = slice_payments(yes->point, rule.pieces(), inst.m());
    const int top = rule.actions.back();
    result.top_type_utility =
        expected_transfer(inst, result.payments.back(), top) -
        inst.gammas[top] * cbar;
    result.revenue = expected_revenue_cont(inst, rule, result.payments);
    result.virtual_welfare = expected_virtual_welfare(inst, rule);
    result.rule = std::move(rule);
    return result;
}

bool has_dmr(const Instance& inst) {
    std::optional<Rat> prev;
    for (int i = 1; i <= inst.n(); ++i) {
        const Rat dg = inst.gammas[i] - inst.gammas[i - 1];
        if (dg == 0) return false;  // infinite marginal ratio
        const Rat ratio = (expected_reward(inst, i) - expected_reward(inst, i - 1)) / dg;
        if (prev && ratio > *prev) return false;
        prev = ratio;
    }
    return true;
}

std::vector<std::pair<Rat, Rat>> dmr_breakpoints(const Instance& inst) {
    require_continuous(inst.types);
    if (!is_regular(inst.types)) {
        throw NotRegular("breakpoint formula needs a regular distribution");
    }
    if (!has_dmr(inst)) {
        throw NoDmr("breakpoint formula needs diminishing marginal returns");
    }
    const Rat cbar = upper_bound(inst.types);
    const int n = inst.n();
    std::vector<std::pair<Rat, Rat>> out;
    for (int i = 1; i <= n; ++i) {
        const int hi = n + 1 - i;
        const int lo = n - i;
        const Rat ratio = (expected_reward(inst, hi) - expected_reward(inst, lo)) /
                          (inst.gammas[hi] - inst.gammas[lo]);
        std::optional<Rat> z = phi_reach(inst.types, ratio);
        out.emplace_back(z ? *z : cbar, ratio);
    }
    return out;
}

CostComparison joint_virtual_cost_compare(const Instance& inst,
                                          const std::vector<int>& alloc_a,
                                          const std::vector<int>& alloc_b,
                                          const TypeSpace& ts) {
    const auto* d = std::get_if<DiscreteTypes>(&inst.types);
    if (!d) throw std::invalid_argument("comparison needs a discrete support");
    if (alloc_a.size() != d->support.size() || alloc_b.size() != d->support.size()) {
        throw std::invalid_argument("allocations must cover the whole support");
    }
    CostComparison cmp;
    for (size_t i = 0; i < d->support.size(); ++i) {
        const Rat& c = d->support[i];
        const Rat phi = virtual_cost(ts, c);
        for (int side = 0; side < 2; ++side) {
            const int a = side == 0 ? alloc_a[i] : alloc_b[i];
            if (a < 0 || a > inst.n()) {
                throw std::invalid_argument("allocation action out of range");
            }
            if (side == 0) {
                cmp.joint_cost_a += inst.gammas[a] * c;
                cmp.joint_virtual_a += inst.gammas[a] * phi;
            } else {
                cmp.joint_cost_b += inst.gammas[a] * c;
                cmp.joint_virtual_b += inst.gammas[a] * phi;
            }
        }
    }
    return cmp;
}

}  // namespace contract_forge::continuous
