#include "contract_forge/lp.hpp"

#include <algorithm>
#include <cassert>

namespace contract_forge::lp {

void LinearProgram::add_row(std::vector<Rat> coeffs, Relation rel, Rat rhs) {
    Row row;
    row.coeffs = std::move(coeffs);
    row.rel = rel;
    row.rhs = std::move(rhs);
    rows.push_back(std::move(row));
}

namespace {

// Columns of the computational standard form  min c.z  s.t.  M z = d, z >= 0.
// Free user variables are split into a (+) and a (-) column; every
// inequality gets a slack column; rows without a usable unit column get an
// artificial. Rows are scaled so d >= 0.
struct Column {
    int user_var = -1;   // -1 for slack / artificial
    int sign = 1;        // -1 for the negative half of a free variable
    int slack_row = -1;  // row index if this is a slack column
    int art_row = -1;    // row index if this is an artificial column
};

class Simplex {
public:
    explicit Simplex(const LinearProgram& p) : user_(p) { build(); }

    LpOutcome run() {
        LpOutcome out;
        if (!phase1()) {
            out.status = LpStatus::Infeasible;
            out.farkas = extract_farkas();
            out.pivots = pivots_;
            return out;
        }
        int unbounded_col = -1;
        if (!phase2(&unbounded_col)) {
            out.status = LpStatus::Unbounded;
            out.ray = extract_ray(unbounded_col);
            out.pivots = pivots_;
            return out;
        }
        out.status = LpStatus::Optimal;
        out.primal = extract_primal();
        out.dual = extract_dual();
        out.objective = -obj_[ncols_];
        if (user_.sense == Sense::Maximize) out.objective = -out.objective;
        out.pivots = pivots_;
        return out;
    }

private:
    const LinearProgram& user_;

    int nrows_ = 0;
    int ncols_ = 0;
    std::vector<Column> cols_;
    std::vector<std::vector<Rat>> tab_;  // nrows_ x (ncols_ + 1), last = rhs
    std::vector<Rat> obj_;               // phase-2 reduced costs, last = -value
    std::vector<Rat> obj1_;              // phase-1 reduced costs
    std::vector<int> basis_;             // column basic in each row
    std::vector<int> row_scale_;         // +1 / -1 applied to make rhs >= 0
    std::vector<Rat> cost_;              // phase-2 cost per column
    bool in_phase1_ = false;
    std::int64_t pivots_ = 0;
    int first_artificial_ = 0;           // columns >= this are artificial

    void build() {
        const int nv = user_.num_vars;
        if (static_cast<int>(user_.objective.size()) != nv &&
            !user_.objective.empty()) {
            throw MalformedLp("objective length does not match variable count");
        }
        if (!user_.bounds.empty() &&
            static_cast<int>(user_.bounds.size()) != nv) {
            throw MalformedLp("bounds length does not match variable count");
        }
        for (const auto& row : user_.rows) {
            if (static_cast<int>(row.coeffs.size()) != nv) {
                throw MalformedLp("row length does not match variable count");
            }
        }
        nrows_ = static_cast<int>(user_.rows.size());

        std::vector<int> var_col(nv);
        for (int v = 0; v < nv; ++v) {
            var_col[v] = static_cast<int>(cols_.size());
            Column c;
            c.user_var = v;
            cols_.push_back(c);
            if (bound(v) == VarBound::Free) {
                Column neg;
                neg.user_var = v;
                neg.sign = -1;
                cols_.push_back(neg);
            }
        }
        std::vector<int> slack_col(nrows_, -1);
        for (int r = 0; r < nrows_; ++r) {
            if (user_.rows[r].rel == Relation::Equal) continue;
            Column c;
            c.slack_row = r;
            slack_col[r] = static_cast<int>(cols_.size());
            cols_.push_back(c);
        }
        first_artificial_ = static_cast<int>(cols_.size());

        row_scale_.assign(nrows_, 1);
        basis_.assign(nrows_, -1);
        tab_.assign(nrows_, {});
        std::vector<int> art_rows;
        for (int r = 0; r < nrows_; ++r) {
            const Row& row = user_.rows[r];
            int scale = row.rhs < 0 ? -1 : 1;
            row_scale_[r] = scale;
            std::vector<Rat> line(cols_.size() + 0);
            line.resize(cols_.size());
            for (int v = 0; v < nv; ++v) {
                const Rat coeff = row.coeffs[v] * scale;
                int c = var_col[v];
                line[c] = coeff;
                if (bound(v) == VarBound::Free) line[c + 1] = -coeff;
            }
            Rat slack_coef = 0;
            if (row.rel == Relation::LessEq) slack_coef = scale;
            if (row.rel == Relation::GreaterEq) slack_coef = -scale;
            if (slack_col[r] >= 0) line[slack_col[r]] = slack_coef;
            tab_[r] = std::move(line);
            tab_[r].push_back(row.rhs * scale);
            if (slack_col[r] >= 0 && slack_coef == 1) {
                basis_[r] = slack_col[r];
            } else {
                art_rows.push_back(r);
            }
        }
        for (int r : art_rows) {
            Column c;
            c.art_row = r;
            int col = static_cast<int>(cols_.size());
            cols_.push_back(c);
            for (int rr = 0; rr < nrows_; ++rr) {
                tab_[rr].insert(tab_[rr].end() - 1, rr == r ? Rat(1) : Rat(0));
            }
            basis_[r] = col;
        }
        ncols_ = static_cast<int>(cols_.size());

        cost_.assign(ncols_, Rat(0));
        if (!user_.objective.empty()) {
            for (int v = 0; v < nv; ++v) {
                Rat c = user_.objective[v];
                if (user_.sense == Sense::Maximize) c = -c;
                cost_[var_col[v]] = c;
                if (bound(v) == VarBound::Free) cost_[var_col[v] + 1] = -c;
            }
        }
    }

    VarBound bound(int v) const {
        return user_.bounds.empty() ? VarBound::NonNegative : user_.bounds[v];
    }

    void reduce_objective(std::vector<Rat>& obj, const std::vector<Rat>& raw) {
        obj.assign(ncols_ + 1, Rat(0));
        for (int c = 0; c < ncols_; ++c) obj[c] = raw[c];
        for (int r = 0; r < nrows_; ++r) {
            const Rat& cb = raw[basis_[r]];
            if (cb == 0) continue;
            for (int c = 0; c <= ncols_; ++c) obj[c] -= cb * tab_[r][c];
        }
    }

    bool phase1() {
        bool need = false;
        for (int r = 0; r < nrows_; ++r) {
            if (cols_[basis_[r]].art_row >= 0) need = true;
        }
        if (!need) {
            reduce_objective(obj_, cost_);
            return true;
        }
        std::vector<Rat> art_cost(ncols_, Rat(0));
        for (int c = first_artificial_; c < ncols_; ++c) art_cost[c] = 1;
        reduce_objective(obj1_, art_cost);
        in_phase1_ = true;
        int dummy = -1;
        bool bounded = iterate(obj1_, &dummy);
        assert(bounded);
        (void)bounded;
        if (-obj1_[ncols_] > 0) return false;  // artificials cannot all vanish
        in_phase1_ = false;

        // Pivot leftover artificials out of the basis where possible;
        // rows that cannot be cleared are redundant and stay harmless.
        for (int r = 0; r < nrows_; ++r) {
            if (cols_[basis_[r]].art_row < 0) continue;
            for (int c = 0; c < first_artificial_; ++c) {
                if (tab_[r][c] != 0) {
                    pivot(r, c);
                    break;
                }
            }
        }
        reduce_objective(obj_, cost_);
        return true;
    }

    bool phase2(int* unbounded_col) { return iterate(obj_, unbounded_col); }

    // Bland's rule: entering = lowest-index column with negative reduced
    // cost, leaving = lowest-index basic variable among minimum ratios.
    bool iterate(std::vector<Rat>& obj, int* unbounded_col) {
        for (;;) {
            int enter = -1;
            for (int c = 0; c < ncols_; ++c) {
                if (!in_phase1_ && cols_[c].art_row >= 0) continue;
                if (obj[c] < 0) {
                    enter = c;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            Rat best_ratio;
            for (int r = 0; r < nrows_; ++r) {
                if (tab_[r][enter] <= 0) continue;
                Rat ratio = tab_[r][ncols_] / tab_[r][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) {
                if (unbounded_col) *unbounded_col = enter;
                return false;
            }
            pivot(leave, enter);
            if (in_phase1_) {
                // keep the phase-2 row aligned lazily; only obj1 matters here
            }
        }
    }

    void pivot(int prow, int pcol) {
        ++pivots_;
        Rat inv = 1 / tab_[prow][pcol];
        for (int c = 0; c <= ncols_; ++c) tab_[prow][c] *= inv;
        tab_[prow][pcol] = 1;
        for (int r = 0; r < nrows_; ++r) {
            if (r == prow) continue;
            eliminate(tab_[r], prow, pcol);
        }
        if (in_phase1_) {
            eliminate(obj1_, prow, pcol);
        } else if (!obj_.empty()) {
            eliminate(obj_, prow, pcol);
        }
        basis_[prow] = pcol;
    }

    void eliminate(std::vector<Rat>& line, int prow, int pcol) {
        const Rat factor = line[pcol];
        if (factor == 0) return;
        for (int c = 0; c <= ncols_; ++c) line[c] -= factor * tab_[prow][c];
        line[pcol] = 0;
    }

    std::vector<Rat> extract_primal() const {
        std::vector<Rat> x(user_.num_vars, Rat(0));
        for (int r = 0; r < nrows_; ++r) {
            const Column& col = cols_[basis_[r]];
            if (col.user_var >= 0) {
                x[col.user_var] += Rat(col.sign) * tab_[r][ncols_];
            }
        }
        return x;
    }

    // Row multipliers y with y = c_B B^{-1}, read off the reduced costs of
    // slack / artificial columns (each has a single +-1 entry in its row).
    std::vector<Rat> standard_duals(const std::vector<Rat>& obj,
                                    const std::vector<Rat>& raw_cost) const {
        std::vector<Rat> y(nrows_, Rat(0));
        std::vector<bool> seen(nrows_, false);
        for (int c = 0; c < ncols_; ++c) {
            const Column& col = cols_[c];
            if (col.art_row >= 0 && !seen[col.art_row]) {
                y[col.art_row] = raw_cost[c] - obj[c];
                seen[col.art_row] = true;
            }
        }
        for (int c = 0; c < ncols_; ++c) {
            const Column& col = cols_[c];
            if (col.slack_row >= 0 && !seen[col.slack_row]) {
                const int r = col.slack_row;
                Rat coef = 0;
                if (user_.rows[r].rel == Relation::LessEq) coef = row_scale_[r];
                if (user_.rows[r].rel == Relation::GreaterEq) coef = -row_scale_[r];
                y[r] = (raw_cost[c] - obj[c]) / coef;
                seen[r] = true;
            }
        }
        return y;
    }

    std::vector<Rat> extract_dual() const {
        std::vector<Rat> raw(ncols_, Rat(0));
        for (int c = 0; c < ncols_; ++c) raw[c] = cost_[c];
        std::vector<Rat> y = standard_duals(obj_, raw);
        std::vector<Rat> out(nrows_);
        for (int r = 0; r < nrows_; ++r) {
            Rat u = Rat(row_scale_[r]) * y[r];
            if (user_.sense == Sense::Maximize) u = -u;
            out[r] = u;
        }
        return out;
    }

    std::vector<Rat> extract_farkas() const {
        std::vector<Rat> raw(ncols_, Rat(0));
        for (int c = first_artificial_; c < ncols_; ++c) raw[c] = 1;
        std::vector<Rat> y = standard_duals(obj1_, raw);
        std::vector<Rat> out(nrows_);
        for (int r = 0; r < nrows_; ++r) {
            Rat u = Rat(row_scale_[r]) * y[r];
            if (user_.rows[r].rel == Relation::LessEq) u = -u;
            out[r] = u;
        }
        return out;
    }

    std::vector<Rat> extract_ray(int enter) const {
        std::vector<Rat> ray(user_.num_vars, Rat(0));
        const Column& ec = cols_[enter];
        if (ec.user_var >= 0) ray[ec.user_var] += Rat(ec.sign);
        for (int r = 0; r < nrows_; ++r) {
            const Column& col = cols_[basis_[r]];
            if (col.user_var < 0) continue;
            ray[col.user_var] -= Rat(col.sign) * tab_[r][enter];
        }
        return ray;
    }
};

}  // namespace

namespace {
thread_local std::int64_t g_pivots = 0;
}

std::int64_t pivots_performed() { return g_pivots; }
void reset_pivot_counter() { g_pivots = 0; }

LpOutcome solve(const LinearProgram& program) {
    Simplex simplex(program);
    LpOutcome out = simplex.run();
    g_pivots += out.pivots;
    return out;
}

Feasibility feasible(const LinearProgram& program) {
    LinearProgram p = program;
    p.objective.clear();
    p.sense = Sense::Minimize;
    LpOutcome out = solve(p);
    if (out.status == LpStatus::Optimal) return FeasibleYes{std::move(out.primal)};
    assert(out.status == LpStatus::Infeasible);
    return FeasibleNo{std::move(out.farkas)};
}

}  // namespace contract_forge::lp
