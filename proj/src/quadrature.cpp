#include "harnack/quadrature.hpp"

#include <cmath>

namespace harnack {
namespace {

struct SimpsonState {
  const RealFn& f;
  double floor = 0.0;  // lower bound on the per-panel tolerance budget
  double worst = 0.0;  // largest unresolved piece, reported on failure
};

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double err = left + right - whole;
  if (std::abs(err) <= 15.0 * tol || depth <= 0) {
    if (depth <= 0 && std::abs(err) > 15.0 * tol) {
      st.worst = std::max(st.worst, std::abs(err) / 15.0);
    }
    return left + right + err / 15.0;
  }
  // Halve the budget so leaf errors sum to at most tol, but never below the
  // floor: at a jump discontinuity the Simpson error estimate of the panel
  // containing the jump only shrinks like its width, so an ever-halving
  // budget would subdivide forever; a floored budget converges there too.
  const double child = std::max(0.5 * tol, st.floor);
  return adaptive(st, a, m, fa, flm, fm, left, child, depth - 1) +
         adaptive(st, m, b, fm, frm, fb, right, child, depth - 1);
}

}  // namespace

double integrate(const RealFn& f, double a, double b, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (a == b) return 0.0;
  SimpsonState st{f, tol / 4096.0};
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = simpson(fa, fm, fb, a, b);
  const double result = adaptive(st, a, b, fa, fm, fb, whole, tol, 48);
  if (st.worst > 0.0) {
    throw QuadratureError("adaptive quadrature did not converge", st.worst);
  }
  return result;
}

double integrate_tail(const RealFn& f, double a, double tol) {
  if (!(a > 0.0)) throw std::invalid_argument("tail integration requires a > 0");
  // y = 1/u, dy = -du/u^2:  int_a^inf f(y) dy = int_0^{1/a} f(1/u)/u^2 du.
  // The substituted integrand tends to lim y^2 f(y) at u = 0; clamping u away
  // from zero evaluates that limit to relative accuracy ~1e-12 without
  // overflowing 1/u.
  const double u_floor = 1e-12 / a;
  const RealFn sub = [&f, u_floor](double u) {
    if (u < u_floor) u = u_floor;
    const double y = 1.0 / u;
    return f(y) * y * y;
  };
  return integrate(sub, 0.0, 1.0 / a, tol);
}

}  // namespace harnack
