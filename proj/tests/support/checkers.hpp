#pragma once

// Re-substitution checkers for solver certificates. These are written
// directly from the optimality/infeasibility conditions and never call back
// into the solver, so they can vouch for its outputs.

#include <vector>

#include "contract_forge/lp.hpp"

namespace contract_forge::testing {

inline Rat dot(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool point_feasible(const lp::LinearProgram& p, const std::vector<Rat>& x) {
    if (x.size() != static_cast<size_t>(p.num_vars)) return false;
    for (int v = 0; v < p.num_vars; ++v) {
        const bool nonneg =
            p.bounds.empty() || p.bounds[v] == lp::VarBound::NonNegative;
        if (nonneg && x[v] < 0) return false;
    }
    for (const auto& row : p.rows) {
        const Rat lhs = dot(row.coeffs, x);
        switch (row.rel) {
            case lp::Relation::LessEq:
                if (!(lhs <= row.rhs)) return false;
                break;
            case lp::Relation::GreaterEq:
                if (!(lhs >= row.rhs)) return false;
                break;
            case lp::Relation::Equal:
                if (lhs != row.rhs) return false;
                break;
        }
    }
    return true;
}

inline Rat objective_value(const lp::LinearProgram& p, const std::vector<Rat>& x) {
    if (p.objective.empty()) return 0;
    return dot(p.objective, x);
}

// farkas[r] multiplies row r oriented as ">=": the combination must have
// nonpositive coefficients on nonnegative variables, zero on free ones, and
// a positive right-hand side.
inline bool farkas_refutes(const lp::LinearProgram& p, const std::vector<Rat>& y) {
    if (y.size() != p.rows.size()) return false;
    Rat rhs = 0;
    for (size_t r = 0; r < p.rows.size(); ++r) {
        const int orient = p.rows[r].rel == lp::Relation::LessEq ? -1 : 1;
        if (p.rows[r].rel != lp::Relation::Equal && y[r] < 0) return false;
        rhs += y[r] * Rat(orient) * p.rows[r].rhs;
    }
    if (!(rhs > 0)) return false;
    for (int v = 0; v < p.num_vars; ++v) {
        Rat combo = 0;
        for (size_t r = 0; r < p.rows.size(); ++r) {
            const int orient = p.rows[r].rel == lp::Relation::LessEq ? -1 : 1;
            combo += y[r] * Rat(orient) * p.rows[r].coeffs[v];
        }
        const bool nonneg =
            p.bounds.empty() || p.bounds[v] == lp::VarBound::NonNegative;
        if (nonneg ? !(combo <= 0) : combo != 0) return false;
    }
    return true;
}

// Dual feasibility + strong duality for the row-attached multipliers.
inline bool dual_certifies(const lp::LinearProgram& p, const std::vector<Rat>& y,
                           const Rat& objective) {
    if (y.size() != p.rows.size()) return false;
    const bool minimize = p.sense == lp::Sense::Minimize;
    Rat bound = 0;
    for (size_t r = 0; r < p.rows.size(); ++r) {
        bound += y[r] * p.rows[r].rhs;
        if (p.rows[r].rel == lp::Relation::GreaterEq && minimize && y[r] < 0) return false;
        if (p.rows[r].rel == lp::Relation::LessEq && minimize && y[r] > 0) return false;
        if (p.rows[r].rel == lp::Relation::GreaterEq && !minimize && y[r] > 0) return false;
        if (p.rows[r].rel == lp::Relation::LessEq && !minimize && y[r] < 0) return false;
    }
    if (bound != objective) return false;
    for (int v = 0; v < p.num_vars; ++v) {
        Rat combo = 0;
        for (size_t r = 0; r < p.rows.size(); ++r) combo += y[r] * p.rows[r].coeffs[v];
        const Rat c = p.objective.empty() ? Rat(0) : p.objective[v];
        const bool nonneg =
            p.bounds.empty() || p.bounds[v] == lp::VarBound::NonNegative;
        if (nonneg) {
            if (minimize ? !(combo <= c) : !(combo >= c)) return false;
        } else if (combo != c) {
            return false;
        }
    }
    return true;
}

inline bool ray_improves(const lp::LinearProgram& p, const std::vector<Rat>& d) {
    if (d.size() != static_cast<size_t>(p.num_vars)) return false;
    for (int v = 0; v < p.num_vars; ++v) {
        const bool nonneg =
            p.bounds.empty() || p.bounds[v] == lp::VarBound::NonNegative;
        if (nonneg && d[v] < 0) return false;
    }
    for (const auto& row : p.rows) {
        const Rat delta = dot(row.coeffs, d);
        switch (row.rel) {
            case lp::Relation::LessEq:
                if (!(delta <= 0)) return false;
                break;
            case lp::Relation::GreaterEq:
                if (!(delta >= 0)) return false;
                break;
            case lp::Relation::Equal:
                if (delta != 0) return false;
                break;
        }
    }
    const Rat gain = objective_value(p, d);
    return p.sense == lp::Sense::Maximize ? gain > 0 : gain < 0;
}

}  // namespace contract_forge::testing
