#include "qsc/quantile.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace qsc {

namespace {

void require_distribution(std::span<const Rational> x, const Preference& pref) {
  if (static_cast<int>(x.size()) != pref.size()) {
    throw std::invalid_argument("lottery size does not match preference size");
  }
  Rational total;
  for (const auto& p : x) {
    if (p.sign() < 0) throw std::invalid_argument("negative probability in lottery");
    total += p;
  }
  if (total != Rational(1)) throw std::invalid_argument("probabilities sum to " + total.str());
}

// cumulative[k] = mass on the options ranked k+1..m (weakly below rank k+1).
std::vector<Rational> weakly_below_masses(std::span<const Rational> x, const Preference& pref) {
  const int m = pref.size();
  std::vector<Rational> cum(static_cast<std::size_t>(m));
  Rational acc;
  for (int r = m; r >= 1; --r) {
    acc += x[static_cast<std::size_t>(pref.at_rank(r))];
    cum[static_cast<std::size_t>(r - 1)] = acc;
  }
  return cum;
}

}  // namespace

Option representative(std::span<const Rational> x, const Preference& pref, const Quantile& h) {
  require_distribution(x, pref);
  const int m = pref.size();
  if (h.is_one()) {
    for (int r = 1; r <= m; ++r) {
      const Option o = pref.at_rank(r);
      if (x[static_cast<std::size_t>(o)].sign() > 0) return o;
    }
  } else {
    Rational strictly_below;
    for (int r = m; r >= 1; --r) {
      const Option o = pref.at_rank(r);
      const Rational weakly_below = strictly_below + x[static_cast<std::size_t>(o)];
      if (strictly_below <= h.value() && h.value() < weakly_below) return o;
      strictly_below = weakly_below;
    }
  }
  assert(false && "a valid lottery always has a representative");
  throw std::logic_error("no representative found");
}

Option representative(const Lottery& x, const Preference& pref, const Quantile& h) {
  return representative(x.probs(), pref, h);
}

int representative_rank(std::span<const Rational> x, const Preference& pref, const Quantile& h) {
  return pref.rank(representative(x, pref, h));
}

LotteryPreference compare_lotteries(const Lottery& x, const Lottery& y, const Preference& pref, const Quantile& h) {
  const int rx = pref.rank(representative(x, pref, h));
  const int ry = pref.rank(representative(y, pref, h));
  if (rx < ry) return LotteryPreference::PreferX;
  if (ry < rx) return LotteryPreference::PreferY;
  return LotteryPreference::Indifferent;
}

Dominance sd_compare(const Lottery& x, const Lottery& y, const Preference& pref) {
  require_distribution(x.probs(), pref);
  require_distribution(y.probs(), pref);
  const auto cx = weakly_below_masses(x.probs(), pref);
  const auto cy = weakly_below_masses(y.probs(), pref);
  bool x_less_somewhere = false;
  bool y_less_somewhere = false;
  for (std::size_t k = 0; k < cx.size(); ++k) {
    if (cx[k] < cy[k]) x_less_somewhere = true;
    if (cy[k] < cx[k]) y_less_somewhere = true;
  }
  if (!x_less_somewhere && !y_less_somewhere) return Dominance::Equal;
  if (x_less_somewhere && !y_less_somewhere) return Dominance::XDominates;
  if (y_less_somewhere && !x_less_somewhere) return Dominance::YDominates;
  return Dominance::Incomparable;
}

std::vector<Rational> rep_breakpoints(const Lottery& x, const Preference& pref) {
  require_distribution(x.probs(), pref);
  auto cum = weakly_below_masses(x.probs(), pref);
  std::sort(cum.begin(), cum.end());
  cum.erase(std::unique(cum.begin(), cum.end()), cum.end());
  return cum;
}

std::vector<Rational> quantile_test_points(const Lottery& x, const Lottery& y, const Preference& pref) {
  std::vector<Rational> points = rep_breakpoints(x, pref);
  const auto by = rep_breakpoints(y, pref);
  points.insert(points.end(), by.begin(), by.end());
  points.emplace_back(0);
  points.emplace_back(1);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<Rational> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    out.push_back(points[k]);
    if (k + 1 < points.size()) out.push_back((points[k] + points[k + 1]) / Rational(2));
  }
  return out;
}

bool sd_equivalence_audit(const Lottery& x, const Lottery& y, const Preference& pref) {
  const Dominance d = sd_compare(x, y, pref);
  const bool dominates = d == Dominance::XDominates || d == Dominance::Equal;
  bool weakly_better_everywhere = true;
  for (const auto& h : quantile_test_points(x, y, pref)) {
    const Quantile q(h);
    if (pref.rank(representative(x, pref, q)) > pref.rank(representative(y, pref, q))) {
      weakly_better_everywhere = false;
      break;
    }
  }
  return dominates == weakly_better_everywhere;
}

}  // namespace qsc
