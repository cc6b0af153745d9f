// Grid search over the Hermitian witness family for parameters where the
// well-adapted connection differs from both the Chern and the first canonical
// connection. Prints every candidate and the one with the largest margin.

#include <iomanip>
#include <iostream>

#include "jmetric/catalog.hpp"
#include "jmetric/connection.hpp"

int main() {
  using namespace jmetric;
  const std::vector<Point> points = {
      (Point(4) << 0.5, -0.5, 0.5, 0.5).finished(),
      (Point(4) << 0.3, 0.2, -0.1, 0.4).finished(),
      (Point(4) << -0.5, 0.25, 0.75, -0.25).finished(),
  };
  double best = -1.0, best_a = 0.0, best_b = 0.0;
  std::size_t best_p = 0;
  std::cout << std::setprecision(6);
  for (int ia = 1; ia <= 6; ++ia)
    for (int ib = 1; ib <= 6; ++ib) {
      const double a = 0.05 * ia, b = 0.05 * ib;
      const Manifold m = chern_witness_family(a, b);
      if (!validate_structure(m, halton_points(unit_box(4), 50)).passed) {
        std::cout << "a=" << a << " b=" << b << " rejected: invalid on the sample box\n";
        continue;
      }
      for (std::size_t k = 0; k < points.size(); ++k) {
        const Jet jet = make_jet(m, points[k]);
        const Connection w = well_adapted(jet);
        const double wc = (w.gamma - chern(jet).gamma).max_abs();
        const double w0 = (w.gamma - first_canonical(jet).gamma).max_abs();
        std::cout << "a=" << a << " b=" << b << " point " << k << "  |w-c|=" << wc << "  |w-0|=" << w0 << "\n";
        const double margin = std::min(wc, w0);
        if (margin > best) best = margin, best_a = a, best_b = b, best_p = k;
      }
    }
  if (best <= 1e-4) {
    std::cout << "no witness found: every candidate has |w-c| or |w-0| <= 1e-4\n";
    return 1;
  }
  std::cout << "best: a=" << best_a << " b=" << best_b << " point " << best_p << " margin " << best << "\n";
  return 0;
}
