#include "qsc/preference.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qsc {

Preference::Preference(std::vector<Option> order) : order_(std::move(order)), rank_(order_.size(), 0) {
  if (order_.empty()) throw std::invalid_argument("preference over an empty option set");
  const int m = size();
  for (int pos = 0; pos < m; ++pos) {
    const Option o = order_[static_cast<std::size_t>(pos)];
    if (o < 0 || o >= m) {
      throw std::invalid_argument("preference mentions option " + std::to_string(o) + " outside 0.." +
                                  std::to_string(m - 1));
    }
    if (rank_[static_cast<std::size_t>(o)] != 0) {
      throw std::invalid_argument("preference repeats option " + std::to_string(o));
    }
    rank_[static_cast<std::size_t>(o)] = pos + 1;
  }
}

Preference Preference::identity(int m) {
  std::vector<Option> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  return Preference(std::move(order));
}

std::vector<Preference> all_preferences(int m) {
  std::vector<Option> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Preference> out;
  do {
    out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

Quantile::Quantile(Rational h) : h_(std::move(h)) {
  if (h_ < Rational(0) || h_ > Rational(1)) {
    throw std::invalid_argument("quantile " + h_.str() + " outside [0,1]");
  }
}

std::vector<Quantile> uniform_quantiles(int count, const Rational& h) {
  return std::vector<Quantile>(static_cast<std::size_t>(count), Quantile(h));
}

Lottery::Lottery(std::vector<Rational> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("lottery over an empty option set");
  Rational total;
  for (const auto& p : probs_) {
    if (p.sign() < 0) throw std::invalid_argument("lottery has negative probability " + p.str());
    total += p;
  }
  if (total != Rational(1)) throw std::invalid_argument("lottery sums to " + total.str() + ", not 1");
}

Lottery Lottery::deterministic(int m, Option o) {
  std::vector<Rational> p(static_cast<std::size_t>(m));
  p.at(static_cast<std::size_t>(o)) = 1;
  return Lottery(std::move(p));
}

Lottery Lottery::uniform(int m) {
  return Lottery(std::vector<Rational>(static_cast<std::size_t>(m), Rational(1, m)));
}

}  // namespace qsc
