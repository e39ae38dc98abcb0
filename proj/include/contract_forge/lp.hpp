#pragma once

#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "contract_forge/rational.hpp"

namespace contract_forge::lp {

enum class Relation { LessEq, GreaterEq, Equal };
enum class Sense { Minimize, Maximize };
enum class VarBound { NonNegative, Free };

struct Row {
    std::vector<Rat> coeffs;
    Relation rel = Relation::GreaterEq;
    Rat rhs = 0;
};

struct LinearProgram {
    int num_vars = 0;
    std::vector<VarBound> bounds;  // empty means all NonNegative
    std::vector<Row> rows;
    std::vector<Rat> objective;    // empty means zero objective
    Sense sense = Sense::Minimize;

    void add_row(std::vector<Rat> coeffs, Relation rel, Rat rhs);
};

struct MalformedLp : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Certificate conventions, all exact:
//  - primal satisfies every row; objective = c'.primal.
//  - dual is indexed by row and attaches to the row as written;
//    sum(dual[r] * rhs[r]) == objective (strong duality).
//  - farkas is indexed by row; farkas[r] multiplies row r oriented as ">="
//    (a "<=" row enters negated). Inequality multipliers are nonnegative,
//    equality multipliers are sign-free. The combination has nonpositive
//    coefficients on every nonnegative variable, zero on free variables,
//    and a strictly positive right-hand side.
//  - ray is an unboundedness direction: feasible to add to any feasible
//    point, strictly improving the objective.
struct LpOutcome {
    LpStatus status = LpStatus::Optimal;
    std::vector<Rat> primal;
    std::vector<Rat> dual;
    std::vector<Rat> farkas;
    std::vector<Rat> ray;
    Rat objective = 0;
    std::int64_t pivots = 0;
};

// Two-phase dense simplex with Bland's rule over exact rationals.
// Deterministic: identical programs yield identical outcomes.
LpOutcome solve(const LinearProgram& program);

// Thread-local cumulative pivot count across solve() calls, for provenance
// reporting.
std::int64_t pivots_performed();
void reset_pivot_counter();

struct FeasibleYes { std::vector<Rat> point; };
struct FeasibleNo { std::vector<Rat> farkas; };
using Feasibility = std::variant<FeasibleYes, FeasibleNo>;

// solve() with a zero objective.
Feasibility feasible(const LinearProgram& program);

}  // namespace contract_forge::lp
