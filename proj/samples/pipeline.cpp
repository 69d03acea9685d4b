// Duplicated symmetric pants at R = 6, glued by matching, connected by regluing, then compared
// with chart-restricted Haar measure.

#include <iostream>
#include <random>

#include "goodpants/pipeline.hpp"

int main() {
  double R = 6.0, eps = 0.5;
  std::mt19937_64 rng(7);
  gp::PantsCatalog cat = gp::duplicated_pants_catalog(R, eps, 4, 0.5 * eps / R, rng);
  std::cout << cat.pants.size() << " pants on " << cat.curves.size() << " curves\n";

  gp::LiftedEnds L = gp::lift_ends(gp::uniform_measure(cat, 1), cat);
  auto ms = gp::match_ends(L);
  for (const auto& m : ms)
    std::cout << "curve " << gp::curve_label(cat, m.curve) << ": " << (m.failure ? "Hall witness" : "matched")
              << ", max discrepancy " << m.max_discrepancy << " (eps/R = " << eps / R << ")\n";

  gp::Surface s = gp::assemble(L, ms);
  std::cout << s.component_count() << " components before surgery\n";
  gp::ReglueResult r = gp::reglue_connect(s);
  for (const auto& c : r.surface.components())
    std::cout << "after " << r.swaps.size() << " swaps: " << c.pants << " pants, chi " << c.euler << ", genus "
              << c.genus << ", area " << gp::gauss_bonnet_area(c.genus) << "\n";

  gp::EmpiricalFrameMeasure mu = gp::surface_measure(r.surface, cat, 2);
  gp::TargetMeasure nu;
  for (const auto& row : gp::discrepancy(mu, nu, gp::standard_suite(nu.bulk.radius), 4000, 1, 2))
    std::cout << row.id << ": surface " << row.empirical << ", Haar " << row.target << " +- " << row.target_se
              << "\n";

  double delta = std::exp(-R);
  std::cout << "normal flow at delta = " << delta << ": metric factor " << gp::equidistant_metric_factor(delta)
            << "\n";
}
