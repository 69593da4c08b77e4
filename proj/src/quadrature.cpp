#include "mlheat/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <queue>

#include "mlheat/errors.hpp"

namespace mlheat::quad {

namespace {

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const Integrand& f, double a, double b) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

}  // namespace

Estimate gauss_kronrod(const Integrand& f, double a, double b, double rel_tol, double abs_tol, int max_intervals) {
  if (a == b) return {};
  std::priority_queue<Piece> heap;
  heap.push(rule(f, a, b));
  Estimate total{heap.top().value, heap.top().error};
  while (static_cast<int>(heap.size()) < max_intervals &&
         total.error > std::max(abs_tol, rel_tol * std::abs(total.value))) {
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const Piece l = rule(f, worst.a, mid);
    const Piece r = rule(f, mid, worst.b);
    total.value += l.value + r.value - worst.value;
    total.error += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
  }
  // Re-sum to shed the drift of the running updates.
  total = {};
  while (!heap.empty()) {
    total.value += heap.top().value;
    total.error += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(total.value)) throw NumericalError("quadrature produced a non-finite value");
  return total;
}

Estimate gauss_kronrod_panels(const Integrand& f, std::span<const double> breaks, double rel_tol, double abs_tol) {
  Estimate total;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Estimate e = gauss_kronrod(f, breaks[i], breaks[i + 1], rel_tol, abs_tol);
    total.value += e.value;
    total.error += e.error;
  }
  return total;
}

namespace {

double simpson_rec(const Integrand& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Integrand& f, std::span<const double> breaks, double tol, int max_depth) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (a == b) continue;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
  }
  return total;
}

}  // namespace mlheat::quad
