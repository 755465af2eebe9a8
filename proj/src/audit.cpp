#include "qsc/audit.hpp"

namespace qsc {

std::vector<Rational> audit_h_grid() {
  std::vector<Rational> grid;
  for (int k = 0; k <= 12; ++k) grid.emplace_back(k, 12);
  return grid;
}

}  // namespace qsc
