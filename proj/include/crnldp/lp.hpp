#pragma once

// Small dense two-phase simplex over exact rationals. Bland's rule throughout,
// so termination is guaranteed; sizes here are tens of rows and columns.

#include "crnldp/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace crnldp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct LinearConstraint {
  RationalVector coeffs;
  Sense sense = Sense::LessEqual;
  Rational rhs = 0;
};

struct LinearProgram {
  explicit LinearProgram(std::size_t n) : num_vars(n), free_var(n, false), objective(n) {}

  std::size_t num_vars;
  std::vector<bool> free_var;  // false: x_j >= 0
  std::vector<LinearConstraint> constraints;
  RationalVector objective;  // maximized

  void add(RationalVector coeffs, Sense sense, Rational rhs) {
    constraints.push_back({std::move(coeffs), sense, std::move(rhs)});
  }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  RationalVector x;
  Rational value = 0;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::vector<RationalVector> rows, std::vector<std::size_t> basis, std::size_t cols)
      : rows_(std::move(rows)), basis_(std::move(basis)), cols_(cols), allowed_(cols, true) {}

  void forbid(std::size_t col) { allowed_[col] = false; }

  // Returns false when unbounded.
  bool maximize(const RationalVector& cost) {
    objective_.assign(cols_ + 1, Rational(0));
    for (std::size_t j = 0; j < cols_; ++j) objective_[j] = cost[j];
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const Rational f = objective_[basis_[i]];
      if (f != 0) axpy(objective_, -f, rows_[i]);
    }
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (allowed_[j] && objective_[j] > 0) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = rows_.size();
      Rational best_ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rational ratio = rows_[i][cols_] / rows_[i][enter];
        if (leave == rows_.size() || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = std::move(ratio);
        }
      }
      if (leave == rows_.size()) return false;
      pivot(leave, enter);
    }
  }

  Rational value() const { return -objective_[cols_]; }

  void pivot(std::size_t r, std::size_t c) {
    const Rational inv = 1 / rows_[r][c];
    for (auto& x : rows_[r]) x *= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r || rows_[i][c] == 0) continue;
      const Rational f = rows_[i][c];
      axpy(rows_[i], -f, rows_[r]);
    }
    if (!objective_.empty() && objective_[c] != 0) {
      const Rational f = objective_[c];
      axpy(objective_, -f, rows_[r]);
    }
    basis_[r] = c;
  }

  // Pivots artificial columns [first_artificial, cols) out of the basis; drops redundant rows.
  void expel(std::size_t first_artificial) {
    for (std::size_t i = 0; i < rows_.size();) {
      if (basis_[i] < first_artificial) {
        ++i;
        continue;
      }
      std::size_t c = 0;
      while (c < first_artificial && rows_[i][c] == 0) ++c;
      if (c == first_artificial) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        pivot(i, c);
        ++i;
      }
    }
  }

  RationalVector primal() const {
    RationalVector x(cols_);
    for (std::size_t i = 0; i < rows_.size(); ++i) x[basis_[i]] = rows_[i][cols_];
    return x;
  }

 private:
  static void axpy(RationalVector& y, const Rational& a, const RationalVector& x) {
    for (std::size_t j = 0; j < y.size(); ++j)
      if (x[j] != 0) y[j] += a * x[j];
  }

  std::vector<RationalVector> rows_;
  std::vector<std::size_t> basis_;
  std::size_t cols_;
  std::vector<bool> allowed_;
  RationalVector objective_;
};

}  // namespace detail

/// Maximizes lp.objective subject to lp.constraints, exactly.
inline LpSolution maximize(const LinearProgram& lp) {
  // Column layout: structural (free vars split into +/-), slacks, artificials.
  std::vector<std::size_t> pos_col(lp.num_vars);
  std::vector<std::optional<std::size_t>> neg_col(lp.num_vars);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    pos_col[j] = cols++;
    if (lp.free_var[j]) neg_col[j] = cols++;
  }
  const std::size_t structural = cols;
  std::size_t slacks = 0;
  for (const auto& c : lp.constraints)
    if (c.sense != Sense::Equal) ++slacks;
  const std::size_t first_artificial = structural + slacks;
  const std::size_t m = lp.constraints.size();
  const std::size_t total = first_artificial + m;

  std::vector<RationalVector> rows;
  std::vector<std::size_t> basis;
  rows.reserve(m);
  std::size_t slack = structural;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = lp.constraints[i];
    RationalVector row(total + 1);
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      row[pos_col[j]] = c.coeffs[j];
      if (neg_col[j]) row[*neg_col[j]] = -c.coeffs[j];
    }
    if (c.sense == Sense::LessEqual) row[slack++] = 1;
    else if (c.sense == Sense::GreaterEqual) row[slack++] = -1;
    row[total] = c.rhs;
    if (row[total] < 0)
      for (auto& x : row) x = -x;
    row[first_artificial + i] = 1;
    rows.push_back(std::move(row));
    basis.push_back(first_artificial + i);
  }

  detail::Tableau tab(std::move(rows), std::move(basis), total);
  RationalVector phase1(total);
  for (std::size_t i = 0; i < m; ++i) phase1[first_artificial + i] = -1;
  tab.maximize(phase1);
  LpSolution sol;
  if (tab.value() < 0) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  tab.expel(first_artificial);
  for (std::size_t j = first_artificial; j < total; ++j) tab.forbid(j);

  RationalVector cost(total);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    cost[pos_col[j]] = lp.objective[j];
    if (neg_col[j]) cost[*neg_col[j]] = -lp.objective[j];
  }
  if (!tab.maximize(cost)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  const auto raw = tab.primal();
  sol.status = LpStatus::Optimal;
  sol.value = tab.value();
  sol.x.resize(lp.num_vars);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    sol.x[j] = raw[pos_col[j]];
    if (neg_col[j]) sol.x[j] -= raw[*neg_col[j]];
  }
  return sol;
}

/// Feasibility only.
inline bool feasible(LinearProgram lp) {
  std::fill(lp.objective.begin(), lp.objective.end(), Rational(0));
  return maximize(lp).status != LpStatus::Infeasible;
}

}  // namespace crnldp
