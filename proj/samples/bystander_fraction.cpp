// Partially free clauses in one random 3-CNF formula vs the predicted fraction.

#include <iostream>

#include "kwidth/kwidth.hpp"

int main() {
  const auto u = kwidth::Universe::clauses(20000, 3);
  for (double ratio : {0.5, 1.0, 2.0, 4.0}) {
    const auto m = static_cast<std::uint64_t>(ratio * u.n());
    const auto seq = kwidth::sample(u, kwidth::EnsembleSpec::without_replacement(m), {42, 0});
    const auto report = kwidth::classify_partially_free(seq);
    std::cout << "m/n=" << ratio << "  empirical " << report.empirical_fraction() << "  predicted "
              << report.predicted_fraction << "\n";
  }
}
