#pragma once

#include <cstddef>
#include <functional>

#include "l3lab/numerics/complex_path.hpp"

namespace l3lab {

struct QuadResult {
  cplx value;
  double err = 0.0;
  std::size_t evals = 0;
};

/// Quadrature node handed to endpoint-aware integrands.
///
/// `z == anchor + offset` up to rounding, where `anchor` is the nearer
/// segment endpoint. The offset is accurate even when it is many orders of
/// magnitude smaller than |anchor|.
struct PathPoint {
  cplx z;
  std::size_t segment = 0;
  double s = 0.0;
  cplx anchor;
  cplx offset;
};

using PathIntegrand = std::function<cplx(const PathPoint&)>;

struct QuadOptions {
  double tol = 1e-12;
  int max_level = 12;
};

/// Contour integral of f along `path` by per-segment tanh–sinh quadrature.
/// Integrable endpoint singularities need no special handling.
QuadResult quad_path(const PathIntegrand& f, const ComplexPath& path, const QuadOptions& opt);
QuadResult quad_path(const std::function<cplx(cplx)>& f, const ComplexPath& path, double tol);

}  // namespace l3lab
