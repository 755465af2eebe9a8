#include "qsc/simplex.hpp"

#include <optional>
#include <stdexcept>

namespace qsc::lp {

namespace {

class Tableau {
 public:
  Tableau(const Program& program);

  bool phase_one();
  Status phase_two(const std::vector<Rational>& objective);
  std::vector<Rational> structural_values() const;
  const Rational& objective_value() const { return z_[rhs_col()]; }

 private:
  int rhs_col() const { return columns_; }
  bool is_artificial(int col) const { return col >= first_artificial_; }

  void load_costs(const std::vector<Rational>& costs);
  Status run(bool allow_artificial);
  void pivot(std::size_t row, int col);

  int structural_ = 0;
  int columns_ = 0;
  int first_artificial_ = 0;
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> basis_;
  std::vector<Rational> z_;
};

Tableau::Tableau(const Program& program) : structural_(program.variables) {
  const auto& cons = program.constraints;
  int slacks = 0;
  int artificials = 0;
  for (const auto& c : cons) {
    const bool flip = c.rhs.sign() < 0;
    Relation rel = c.relation;
    if (flip && rel != Relation::Equal) rel = rel == Relation::LessEqual ? Relation::GreaterEqual : Relation::LessEqual;
    if (rel != Relation::Equal) ++slacks;
    if (rel != Relation::LessEqual) ++artificials;
  }
  first_artificial_ = structural_ + slacks;
  columns_ = first_artificial_ + artificials;

  int next_slack = structural_;
  int next_artificial = first_artificial_;
  for (const auto& c : cons) {
    const bool flip = c.rhs.sign() < 0;
    Relation rel = c.relation;
    if (flip && rel != Relation::Equal) rel = rel == Relation::LessEqual ? Relation::GreaterEqual : Relation::LessEqual;
    std::vector<Rational> row(static_cast<std::size_t>(columns_ + 1));
    for (const auto& t : c.terms) {
      if (t.variable < 0 || t.variable >= structural_) throw std::out_of_range("lp term variable out of range");
      row[static_cast<std::size_t>(t.variable)] += flip ? -t.coefficient : t.coefficient;
    }
    row[static_cast<std::size_t>(columns_)] = flip ? -c.rhs : c.rhs;
    int basic = -1;
    if (rel == Relation::LessEqual) {
      row[static_cast<std::size_t>(next_slack)] = 1;
      basic = next_slack++;
    } else if (rel == Relation::GreaterEqual) {
      row[static_cast<std::size_t>(next_slack++)] = -1;
      row[static_cast<std::size_t>(next_artificial)] = 1;
      basic = next_artificial++;
    } else {
      row[static_cast<std::size_t>(next_artificial)] = 1;
      basic = next_artificial++;
    }
    rows_.push_back(std::move(row));
    basis_.push_back(basic);
  }
}

void Tableau::load_costs(const std::vector<Rational>& costs) {
  // z_j = c_B . T_j - c_j ; z_rhs = c_B . b
  z_.assign(static_cast<std::size_t>(columns_ + 1), Rational());
  for (int j = 0; j < columns_; ++j) z_[static_cast<std::size_t>(j)] = -costs[static_cast<std::size_t>(j)];
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Rational& cb = costs[static_cast<std::size_t>(basis_[r])];
    if (cb.is_zero()) continue;
    for (int j = 0; j <= columns_; ++j) {
      const Rational& t = rows_[r][static_cast<std::size_t>(j)];
      if (!t.is_zero()) z_[static_cast<std::size_t>(j)] += cb * t;
    }
  }
}

void Tableau::pivot(std::size_t row, int col) {
  auto& prow = rows_[row];
  const Rational piv = prow[static_cast<std::size_t>(col)];
  std::vector<int> nonzero;
  for (int k = 0; k <= columns_; ++k) {
    if (!prow[static_cast<std::size_t>(k)].is_zero()) {
      prow[static_cast<std::size_t>(k)] /= piv;
      nonzero.push_back(k);
    }
  }
  auto eliminate = [&](std::vector<Rational>& target) {
    const Rational factor = target[static_cast<std::size_t>(col)];
    if (factor.is_zero()) return;
    for (int k : nonzero) target[static_cast<std::size_t>(k)] -= factor * prow[static_cast<std::size_t>(k)];
  };
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (r != row) eliminate(rows_[r]);
  }
  eliminate(z_);
  basis_[row] = col;
}

Status Tableau::run(bool allow_artificial) {
  for (;;) {
    int entering = -1;
    for (int j = 0; j < columns_; ++j) {
      if (!allow_artificial && is_artificial(j)) continue;
      if (z_[static_cast<std::size_t>(j)].sign() < 0) {
        entering = j;
        break;
      }
    }
    if (entering < 0) return Status::Optimal;

    std::optional<std::size_t> leaving;
    Rational best_ratio;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Rational& a = rows_[r][static_cast<std::size_t>(entering)];
      if (a.sign() <= 0) continue;
      Rational ratio = rows_[r][static_cast<std::size_t>(rhs_col())] / a;
      if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[*leaving])) {
        leaving = r;
        best_ratio = std::move(ratio);
      }
    }
    if (!leaving) return Status::Unbounded;
    pivot(*leaving, entering);
  }
}

bool Tableau::phase_one() {
  std::vector<Rational> costs(static_cast<std::size_t>(columns_));
  for (int j = first_artificial_; j < columns_; ++j) costs[static_cast<std::size_t>(j)] = -1;
  load_costs(costs);
  run(true);
  if (objective_value().sign() < 0) return false;

  // Drive zero-level artificials out of the basis; rows where that is
  // impossible are linear combinations of the others and are dropped.
  for (std::size_t r = 0; r < rows_.size();) {
    if (!is_artificial(basis_[r])) {
      ++r;
      continue;
    }
    int col = -1;
    for (int j = 0; j < first_artificial_; ++j) {
      if (!rows_[r][static_cast<std::size_t>(j)].is_zero()) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      pivot(r, col);
      ++r;
    } else {
      rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
      basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    }
  }
  return true;
}

Status Tableau::phase_two(const std::vector<Rational>& objective) {
  std::vector<Rational> costs(static_cast<std::size_t>(columns_));
  for (std::size_t j = 0; j < objective.size(); ++j) costs[j] = objective[j];
  load_costs(costs);
  return run(false);
}

std::vector<Rational> Tableau::structural_values() const {
  std::vector<Rational> x(static_cast<std::size_t>(structural_));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (basis_[r] < structural_) x[static_cast<std::size_t>(basis_[r])] = rows_[r][static_cast<std::size_t>(rhs_col())];
  }
  return x;
}

}  // namespace

Solution maximize(const Program& program) {
  if (!program.objective.empty() && static_cast<int>(program.objective.size()) != program.variables) {
    throw std::invalid_argument("objective length does not match variable count");
  }
  Tableau tableau(program);
  Solution out;
  if (!tableau.phase_one()) {
    out.status = Status::Infeasible;
    return out;
  }
  if (!program.objective.empty()) {
    out.status = tableau.phase_two(program.objective);
    if (out.status == Status::Unbounded) return out;
  } else {
    out.status = Status::Optimal;
  }
  out.values = tableau.structural_values();
  for (std::size_t j = 0; j < program.objective.size(); ++j) out.objective += program.objective[j] * out.values[j];
  return out;
}

}  // namespace qsc::lp
