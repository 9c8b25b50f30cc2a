// Measured 3-SAT transition width at small n next to the leading-order lower bound.

#include <iostream>

#include "kwidth/kwidth.hpp"

int main() {
  for (std::uint32_t n : {40U, 60U, 80U}) {
    kwidth::StudySpec spec;
    spec.n = n;
    spec.master_seed = 3;
    const auto w = kwidth::width(spec, 1.0 / 3, 200, 0, 200);
    const double bound =
        kwidth::corollary3_bound(kwidth::CorollaryInputs::with_defaults(3, 0.3, n), 2.0 / 3, 1.0 / 3);
    const auto check = kwidth::consistency_check(w, bound);
    std::cout << "n=" << n << "  width " << w.width << " +- " << w.standard_error << "  bound " << bound
              << (check.ok ? "  consistent\n" : "  INCONSISTENT\n");
  }
}
