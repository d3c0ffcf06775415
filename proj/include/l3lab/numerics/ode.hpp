#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "l3lab/error.hpp"
#include "l3lab/numerics/complex_path.hpp"

namespace l3lab {

/// Controls shared by every adaptive integration.
struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  /// Largest allowed step in units of the independent variable (path length
  /// for complex paths). Zero means unlimited.
  double max_step = 0.0;
  std::size_t max_steps = 2'000'000;
};

template <class T>
struct BasicOdeResult {
  std::vector<T> y_end;
  std::size_t steps = 0;
  std::size_t rejected = 0;
  /// Largest normalized error estimate over accepted steps (<= 1 on success).
  double max_err_est = 0.0;
};

using OdeResult = BasicOdeResult<cplx>;

namespace detail {

// Dormand–Prince 8(5,3) tableau.
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double e31 = 0.244094488188976377952755905512e+00;
inline constexpr double e32 = 0.733846688281611857341361741547e+00;
inline constexpr double e33 = 0.220588235294117647058823529412e-01;

inline constexpr double e51 = 0.1312004499419488073250102996e-01;
inline constexpr double e56 = -0.1225156446376204440720569753e+01;
inline constexpr double e57 = -0.4957589496572501915214079952e+00;
inline constexpr double e58 = 0.1664377182454986536961530415e+01;
inline constexpr double e59 = -0.3503288487499736816886487290e+00;
inline constexpr double e510 = 0.3341791187130174790297318841e+00;
inline constexpr double e511 = 0.8192320648511571246570742613e-01;
inline constexpr double e512 = -0.2235530786388629525884427845e-01;

template <class T>
bool all_finite(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(), [](const T& x) {
    if constexpr (std::is_floating_point_v<T>) {
      return std::isfinite(x);
    } else {
      return std::isfinite(x.real()) && std::isfinite(x.imag());
    }
  });
}

}  // namespace detail

/// Single-step DOP853 kernel over a real independent variable with state
/// entries of type T (double or std::complex<double>).
template <class T>
class Dop853 {
 public:
  using Rhs = std::function<void(double, std::span<const T>, std::span<T>)>;

  Dop853(Rhs rhs, std::size_t n, double rtol, double atol)
      : rhs_(std::move(rhs)), n_(n), rtol_(rtol), atol_(atol), k_(12, std::vector<T>(n)),
        tmp_(n) {}

  [[nodiscard]] std::size_t dimension() const noexcept { return n_; }
  void eval(double t, std::span<const T> y, std::span<T> dy) const { rhs_(t, y, dy); }

  /// Attempts one step of size h from (t, y) and stores the increment in
  /// `dy_out` (so ynew = y + dy_out). Returns the normalized error estimate;
  /// the step is acceptable when it is <= 1.
  double step(double t, std::span<const T> y, double h, std::span<T> dy_out) {
    using namespace detail;
    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    auto& k8 = k_[7];
    auto& k9 = k_[8];
    auto& k10 = k_[9];
    auto& k11 = k_[10];
    auto& k12 = k_[11];
    auto stage = [&](double c, auto&& combo, std::vector<T>& out) {
      for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * combo(i);
      rhs_(t + c * h, tmp_, out);
    };
    rhs_(t, y, k1);
    stage(c2, [&](std::size_t i) { return a21 * k1[i]; }, k2);
    stage(c3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }, k3);
    stage(c4, [&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; }, k4);
    stage(c5, [&](std::size_t i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; }, k5);
    stage(c6, [&](std::size_t i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; }, k6);
    stage(
        c7, [&](std::size_t i) { return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]; },
        k7);
    stage(
        c8,
        [&](std::size_t i) {
          return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i];
        },
        k8);
    stage(
        c9,
        [&](std::size_t i) {
          return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] +
                 a98 * k8[i];
        },
        k9);
    stage(
        c10,
        [&](std::size_t i) {
          return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] + a107 * k7[i] +
                 a108 * k8[i] + a109 * k9[i];
        },
        k10);
    stage(
        c11,
        [&](std::size_t i) {
          return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] + a117 * k7[i] +
                 a118 * k8[i] + a119 * k9[i] + a1110 * k10[i];
        },
        k11);
    stage(
        1.0,
        [&](std::size_t i) {
          return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] + a127 * k7[i] +
                 a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] + a1211 * k11[i];
        },
        k12);

    double err5 = 0.0;
    double err3 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const T incr = h * (b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                          b10 * k10[i] + b11 * k11[i] + b12 * k12[i]);
      dy_out[i] = incr;
      const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y[i] + incr));
      const T bhh = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                    b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
      const double r3 = std::abs(bhh - e31 * k1[i] - e32 * k9[i] - e33 * k12[i]) / sc;
      const double r5 = std::abs(e51 * k1[i] + e56 * k6[i] + e57 * k7[i] + e58 * k8[i] +
                                 e59 * k9[i] + e510 * k10[i] + e511 * k11[i] + e512 * k12[i]) /
                        sc;
      err3 += r3 * r3;
      err5 += r5 * r5;
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    return std::abs(h) * err5 / std::sqrt(static_cast<double>(n_) * deno);
  }

 private:
  Rhs rhs_;
  std::size_t n_;
  double rtol_;
  double atol_;
  std::vector<std::vector<T>> k_;
  std::vector<T> tmp_;
};

/// Called after each accepted step with (t_prev, y_prev, t, y). Returning
/// false stops the integration at t.
template <class T>
using StepObserver =
    std::function<bool(double, std::span<const T>, double, std::span<const T>)>;

/// Adaptive DOP853 integration from t0 to t1 (either direction) over a real
/// independent variable. `min_step` is the absolute step floor below which
/// StepUnderflow is raised.
template <class T>
BasicOdeResult<T> integrate_real(const typename Dop853<T>::Rhs& rhs, double t0, double t1,
                                 std::vector<T> y0, const OdeOptions& opt,
                                 const StepObserver<T>& observer = {}, double min_step = -1.0,
                                 double* t_reached = nullptr) {
  if (!(opt.rtol >= 1e-14 && opt.rtol <= 1e-2) || !(opt.atol >= 0.0 && opt.atol <= 1e-2)) {
    throw Error(ErrorCode::InvalidArgument, "tolerances outside [1e-14, 1e-2]");
  }
  const std::size_t n = y0.size();
  BasicOdeResult<T> res;
  res.y_end = std::move(y0);
  if (t_reached) *t_reached = t0;
  const double span = t1 - t0;
  if (span == 0.0) return res;
  const double dir = span > 0 ? 1.0 : -1.0;
  if (min_step < 0.0) min_step = 1e-14 * std::abs(span);
  const double hmax = opt.max_step > 0.0 ? std::min(opt.max_step, std::abs(span)) : std::abs(span);

  Dop853<T> stepper(rhs, n, opt.rtol, opt.atol);
  std::vector<T>& y = res.y_end;
  std::vector<T> dy(n), f0(n), comp(n, T{}), y_prev(n);
  if (!detail::all_finite<T>(y)) throw Error(ErrorCode::NonFinite, "initial state not finite");

  // Initial step guess from the scaled derivative norm.
  stepper.eval(t0, y, f0);
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = opt.atol + opt.rtol * std::abs(y[i]);
    d0 += std::norm(y[i]) / (sk * sk);
    d1 += std::norm(f0[i]) / (sk * sk);
  }
  double h = (d0 <= 1e-10 || d1 <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
  h = std::min({h, hmax, std::abs(span)});
  h = std::max(h, 10.0 * min_step);

  double t = t0;
  double t_comp = 0.0;
  constexpr double safe = 0.9;
  constexpr double fac_min = 0.333;
  constexpr double fac_max = 6.0;
  bool last_rejected = false;

  while (dir * (t1 - t) > 0.0) {
    if (res.steps + res.rejected >= opt.max_steps) {
      throw Error(ErrorCode::MaxSteps, "step budget exhausted");
    }
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double err = stepper.step(t, y, dir * h, dy);
    if (!std::isfinite(err) || !detail::all_finite<T>(dy)) {
      if (h <= min_step) throw Error(ErrorCode::NonFinite, "field produced non-finite values");
      h *= 0.25;
      ++res.rejected;
      last_rejected = true;
      continue;
    }
    double fac = err > 0.0 ? safe * std::pow(err, -1.0 / 8.0) : fac_max;
    fac = std::clamp(fac, fac_min, fac_max);
    if (err <= 1.0) {
      y_prev = y;
      const double t_prev = t;
      for (std::size_t i = 0; i < n; ++i) {
        // Kahan-compensated state update.
        const T yi = dy[i] - comp[i];
        const T sum = y[i] + yi;
        comp[i] = (sum - y[i]) - yi;
        y[i] = sum;
      }
      if (last) {
        t = t1;
      } else {
        const double ti = dir * h - t_comp;
        const double ts = t + ti;
        t_comp = (ts - t) - ti;
        t = ts;
      }
      ++res.steps;
      res.max_err_est = std::max(res.max_err_est, err);
      if (t_reached) *t_reached = t;
      if (observer && !observer(t_prev, y_prev, t, y)) return res;
      if (last_rejected) fac = std::min(fac, 1.0);
      last_rejected = false;
      h = std::min(h * fac, hmax);
    } else {
      ++res.rejected;
      last_rejected = true;
      h *= std::min(1.0, fac);
    }
    if (h < min_step) {
      throw Error(ErrorCode::StepUnderflow, "step size fell below the underflow threshold");
    }
  }
  return res;
}

/// Observer for path integration: (segment index, path parameter, z, y).
using PathObserver = std::function<void(std::size_t, double, cplx, std::span<const cplx>)>;

/// Field signature: (z, y, dy) with dy = dy/dz.
using ComplexField = std::function<void(cplx, std::span<const cplx>, std::span<cplx>)>;

/// Integrates dy/dz = field(z, y) along every segment of `path`, each one
/// parametrized by a real parameter in [0, 1]. `max_step` in the options is
/// measured in path length.
OdeResult integrate_ode(const ComplexField& field, const ComplexPath& path,
                        std::vector<cplx> y0, const OdeOptions& opt,
                        const PathObserver& observer = {});

OdeResult integrate_ode(const ComplexField& field, const ComplexPath& path,
                        std::vector<cplx> y0, double rtol, double atol);

}  // namespace l3lab
