#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc {

/// Which index of an n x n matrix an agent owns. In one-sided instances the
/// agents are rows and items are columns; in two-sided instances the N side
/// indexes rows and the M side indexes columns.
enum class Side { Rows, Columns };

/// Square matrix of exact rationals, row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(int n) : n_(n), cells_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {}

  int size() const { return n_; }
  Rational& at(int i, int j) { return cells_.at(index(i, j)); }
  const Rational& at(int i, int j) const { return cells_.at(index(i, j)); }

  std::span<const Rational> row(int i) const {
    return std::span<const Rational>(cells_).subspan(index(i, 0), static_cast<std::size_t>(n_));
  }
  std::vector<Rational> column(int j) const;

  Rational row_sum(int i) const;
  Rational column_sum(int j) const;

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  int n_ = 0;
  std::vector<Rational> cells_;
};

/// Returns a description of the first violation, or nothing if the matrix is
/// exactly doubly stochastic.
std::optional<std::string> doubly_stochastic_violation(const RationalMatrix& x);

/// Lottery over perfect matchings, represented by its doubly stochastic
/// marginal matrix x(i, j) = Pr[i matched to j].
class MatchingLottery {
 public:
  /// Throws std::invalid_argument unless x is exactly doubly stochastic.
  explicit MatchingLottery(RationalMatrix x);

  /// partner[i] = column matched to row i, with probability one.
  static MatchingLottery from_permutation(std::span<const int> partner);
  static MatchingLottery uniform(int n);

  int size() const { return x_.size(); }
  const Rational& at(int i, int j) const { return x_.at(i, j); }
  std::span<const Rational> row(int i) const { return x_.row(i); }
  std::vector<Rational> column(int j) const { return x_.column(j); }
  const RationalMatrix& matrix() const { return x_; }

  /// Distribution seen by an agent on the given side.
  std::vector<Rational> marginal(Side side, int agent) const;

  bool is_integral() const;

  friend bool operator==(const MatchingLottery&, const MatchingLottery&) = default;

 private:
  RationalMatrix x_;
};

}  // namespace qsc
