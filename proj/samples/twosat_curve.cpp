// Fraction of satisfiable random 2-CNF formulas around m = n.

#include <iostream>
#include <vector>

#include "kwidth/kwidth.hpp"

int main() {
  kwidth::StudySpec spec;
  spec.property = kwidth::TwoSat{};
  spec.n = 1000;
  spec.k = 2;
  spec.master_seed = 1;

  std::vector<double> grid;
  for (std::uint32_t percent = 60; percent <= 140; percent += 10) grid.push_back(percent * spec.n / 100);

  const kwidth::PCurve curve = kwidth::pcurve(spec, grid, 200);
  std::cout << "m/n     p_hat   95% interval\n";
  for (const auto& p : curve.points) {
    std::cout << p.m / spec.n << "\t" << p.p_hat << "\t[" << p.ci_low << ", " << p.ci_high << "]\n";
  }
}
