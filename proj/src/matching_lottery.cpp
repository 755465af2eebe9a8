#include "qsc/matching_lottery.hpp"

#include <stdexcept>

namespace qsc {

std::vector<Rational> RationalMatrix::column(int j) const {
  std::vector<Rational> col;
  col.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) col.push_back(at(i, j));
  return col;
}

Rational RationalMatrix::row_sum(int i) const {
  Rational s;
  for (int j = 0; j < n_; ++j) s += at(i, j);
  return s;
}

Rational RationalMatrix::column_sum(int j) const {
  Rational s;
  for (int i = 0; i < n_; ++i) s += at(i, j);
  return s;
}

std::optional<std::string> doubly_stochastic_violation(const RationalMatrix& x) {
  const int n = x.size();
  if (n <= 0) return "empty matrix";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (x.at(i, j).sign() < 0) {
        return "negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (x.row_sum(i) != Rational(1)) return "row " + std::to_string(i) + " sums to " + x.row_sum(i).str();
    if (x.column_sum(i) != Rational(1)) {
      return "column " + std::to_string(i) + " sums to " + x.column_sum(i).str();
    }
  }
  return std::nullopt;
}

MatchingLottery::MatchingLottery(RationalMatrix x) : x_(std::move(x)) {
  if (auto why = doubly_stochastic_violation(x_)) {
    throw std::invalid_argument("not a doubly stochastic matrix: " + *why);
  }
}

MatchingLottery MatchingLottery::from_permutation(std::span<const int> partner) {
  const int n = static_cast<int>(partner.size());
  RationalMatrix x(n);
  for (int i = 0; i < n; ++i) {
    const int j = partner[static_cast<std::size_t>(i)];
    if (j < 0 || j >= n) throw std::invalid_argument("partner index out of range");
    x.at(i, j) = 1;
  }
  return MatchingLottery(std::move(x));
}

MatchingLottery MatchingLottery::uniform(int n) {
  RationalMatrix x(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) x.at(i, j) = Rational(1, n);
  }
  return MatchingLottery(std::move(x));
}

std::vector<Rational> MatchingLottery::marginal(Side side, int agent) const {
  if (side == Side::Columns) return column(agent);
  const auto r = row(agent);
  return {r.begin(), r.end()};
}

bool MatchingLottery::is_integral() const {
  for (int i = 0; i < size(); ++i) {
    for (int j = 0; j < size(); ++j) {
      if (!at(i, j).is_zero() && at(i, j) != Rational(1)) return false;
    }
  }
  return true;
}

}  // namespace qsc
