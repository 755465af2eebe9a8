#pragma once

#include <span>
#include <vector>

#include "qsc/rational.hpp"

namespace qsc {

/// Dense option identifier in [0, m). External names live at the I/O boundary.
using Option = int;

/// Strict total order over options 0..m-1, most preferred first.
class Preference {
 public:
  /// Throws std::invalid_argument unless `order` is a permutation of 0..m-1.
  explicit Preference(std::vector<Option> order);

  static Preference identity(int m);

  int size() const { return static_cast<int>(order_.size()); }
  const std::vector<Option>& order() const { return order_; }

  /// 1-based rank; rank(top()) == 1.
  int rank(Option o) const { return rank_.at(static_cast<std::size_t>(o)); }
  Option at_rank(int rank) const { return order_.at(static_cast<std::size_t>(rank - 1)); }
  Option top() const { return order_.front(); }
  Option bottom() const { return order_.back(); }

  /// Strictly prefers a to b.
  bool prefers(Option a, Option b) const { return rank(a) < rank(b); }

  friend bool operator==(const Preference& a, const Preference& b) { return a.order_ == b.order_; }

 private:
  std::vector<Option> order_;
  std::vector<int> rank_;
};

using Profile = std::vector<Preference>;

/// All m! strict orders, in lexicographic order of their option sequences.
std::vector<Preference> all_preferences(int m);

/// Quantile parameter h in [0, 1].
class Quantile {
 public:
  Quantile() = default;
  /// Throws std::invalid_argument when h is outside [0, 1].
  explicit Quantile(Rational h);

  const Rational& value() const { return h_; }
  bool is_one() const { return h_ == Rational(1); }

  friend bool operator==(const Quantile& a, const Quantile& b) { return a.h_ == b.h_; }

 private:
  Rational h_;
};

std::vector<Quantile> uniform_quantiles(int count, const Rational& h);

/// Probability vector over options 0..m-1: nonnegative, sums to exactly one.
class Lottery {
 public:
  /// Throws std::invalid_argument on negative entries or total != 1.
  explicit Lottery(std::vector<Rational> probs);

  static Lottery deterministic(int m, Option o);
  static Lottery uniform(int m);

  int size() const { return static_cast<int>(probs_.size()); }
  const Rational& operator[](Option o) const { return probs_.at(static_cast<std::size_t>(o)); }
  std::span<const Rational> probs() const { return probs_; }

  friend bool operator==(const Lottery& a, const Lottery& b) { return a.probs_ == b.probs_; }

 private:
  std::vector<Rational> probs_;
};

}  // namespace qsc
