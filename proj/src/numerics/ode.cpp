#include "l3lab/numerics/ode.hpp"

namespace l3lab {

OdeResult integrate_ode(const ComplexField& field, const ComplexPath& path,
                        std::vector<cplx> y0, const OdeOptions& opt,
                        const PathObserver& observer) {
  path.validate();
  OdeResult total;
  total.y_end = std::move(y0);
  std::vector<cplx> fz(total.y_end.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const PathSegment& seg = path.segment(k);
    const double len = segment_length(seg);
    auto rhs = [&](double tau, std::span<const cplx> y, std::span<cplx> dy) {
      field(segment_point(seg, tau), y, fz);
      const cplx dz = segment_tangent(seg, tau);
      for (std::size_t i = 0; i < dy.size(); ++i) dy[i] = dz * fz[i];
    };
    OdeOptions seg_opt = opt;
    seg_opt.max_step = opt.max_step > 0.0 ? opt.max_step / len : 0.0;
    StepObserver<cplx> obs;
    if (observer) {
      obs = [&](double, std::span<const cplx>, double tau, std::span<const cplx> y) {
        observer(k, tau, segment_point(seg, tau), y);
        return true;
      };
    }
    auto res = integrate_real<cplx>(rhs, 0.0, 1.0, std::move(total.y_end), seg_opt, obs);
    total.y_end = std::move(res.y_end);
    total.steps += res.steps;
    total.rejected += res.rejected;
    total.max_err_est = std::max(total.max_err_est, res.max_err_est);
  }
  return total;
}

OdeResult integrate_ode(const ComplexField& field, const ComplexPath& path,
                        std::vector<cplx> y0, double rtol, double atol) {
  OdeOptions opt;
  opt.rtol = rtol;
  opt.atol = atol;
  return integrate_ode(field, path, std::move(y0), opt);
}

}  // namespace l3lab
