#include <cstdio>

#include "l3lab/inner.hpp"

int main() {
  const l3lab::GradientCheck g = l3lab::check_grad_K(50);
  std::printf("grad_K vs finite differences: worst relative error %.3e over %zu points\n", g.worst_rel, g.points);
  if (g.points != 50 || !(g.worst_rel <= 1e-6)) {
    std::fprintf(stderr, "gradient gate failed: tolerance 1e-6\n");
    return 1;
  }
  return 0;
}
