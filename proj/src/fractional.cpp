#include "mlheat/fractional.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <vector>

#include "mlheat/errors.hpp"
#include "mlheat/parallel.hpp"

namespace mlheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAbsTol = 1e-8;
constexpr double kTailStop = 1e-14;
constexpr double kPanelRel = 1e-11;
constexpr double kPanelAbs = 1e-16;

double sphere_area(int dim) { return dim == 1 ? 2.0 : 2.0 * kPi; }

void check_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw ConfigError("fractional order s must lie in (0, 1)");
}

// Evaluates fn at every index, rethrowing the first exception outside the
// parallel region.
std::vector<double> evaluate_all(std::size_t n, const std::function<double(std::size_t)>& fn) {
  std::vector<double> out(n);
  std::exception_ptr first;
  std::mutex guard;
  par::for_each(n, [&](std::size_t i) {
    try {
      out[i] = fn(i);
    } catch (...) {
      std::lock_guard lock(guard);
      if (!first) first = std::current_exception();
    }
  });
  if (first) std::rethrow_exception(first);
  return out;
}

}  // namespace

double frac_constant(int dim, double s) {
  check_s(s);
  const double N = dim;
  return s * std::pow(4.0, s) * std::tgamma(N / 2.0 + s) / (std::pow(kPi, N / 2.0) * std::tgamma(1.0 - s));
}

double bracket_profile(const Point& x, double scale, double q0) {
  const double rho2 = (x[0] * x[0] + x[1] * x[1]) / (scale * scale);
  return std::pow(1.0 + rho2, -0.5 * q0);
}

Profile Profile::bracket(int dim, double scale, double q0) {
  if (!(scale > 0.0)) throw ConfigError("profile scale must be positive");
  return {dim, [scale, q0](const Point& x) { return bracket_profile(x, scale, q0); }, {0.0, 0.0}, scale};
}

Profile Profile::gaussian(int dim, double width) {
  if (!(width > 0.0)) throw ConfigError("profile width must be positive");
  return {dim,
          [width](const Point& x) { return std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * width * width)); },
          {0.0, 0.0},
          width};
}

Profile Profile::constant(int dim, double c) {
  return {dim, [c](const Point&) { return c; }, {0.0, 0.0}, 1.0};
}

Profile Profile::translated(const Point& shift) const {
  auto fn = value;
  return {dim, [fn, shift](const Point& x) { return fn({x[0] - shift[0], x[1] - shift[1]}); },
          {center[0] + shift[0], center[1] + shift[1]}, scale};
}

Profile Profile::dilated(double R) const {
  if (!(R > 0.0)) throw ConfigError("dilation factor must be positive");
  auto fn = value;
  return {dim, [fn, R](const Point& x) { return fn({x[0] / R, x[1] / R}); }, {center[0] * R, center[1] * R},
          scale * R};
}

quad::Estimate frac_laplacian_pointwise_estimate(const Profile& pr, double s, const Point& x) {
  check_s(s);
  if (pr.dim != 1 && pr.dim != 2) throw ConfigError("profile dimension must be 1 or 2");
  const double v0 = pr.value(x);
  const double ell = pr.scale;
  const double dx0 = pr.center[0] - x[0];
  const double dx1 = pr.dim == 2 ? pr.center[1] - x[1] : 0.0;
  const double d = std::hypot(dx0, dx1);

  // Angular integral of the second difference; in 1D the two directions.
  std::function<double(double)> sbar;
  if (pr.dim == 1) {
    sbar = [&](double r) { return 2.0 * v0 - pr.value({x[0] + r, 0.0}) - pr.value({x[0] - r, 0.0}); };
  } else {
    double th_c = d > 0.0 ? std::atan2(dx1, dx0) : 0.0;
    if (th_c < 0.0) th_c += kPi;
    std::vector<double> th_breaks{0.0};
    if (th_c > 1e-12 && th_c < kPi - 1e-12) th_breaks.push_back(th_c);
    th_breaks.push_back(kPi);
    sbar = [&, th_breaks](double r) {
      auto g = [&](double th) {
        const double c = r * std::cos(th);
        const double sn = r * std::sin(th);
        return 2.0 * v0 - pr.value({x[0] + c, x[1] + sn}) - pr.value({x[0] - c, x[1] - sn});
      };
      return quad::gauss_kronrod_panels(g, th_breaks, 1e-12, kPanelAbs).value;
    };
  }
  auto radial = [&](double r) { return std::pow(r, -1.0 - 2.0 * s) * sbar(r); };

  quad::Estimate acc;
  auto add = [&acc](const quad::Estimate& e) {
    acc.value += e.value;
    acc.error += e.error;
    return e;
  };

  // Below r_min the second difference is dominated by rounding, so it is
  // replaced by its expansion c0 r^2 + c1 r^4 and integrated exactly.
  const double r_min = 1e-3 * ell;
  const double r_in = 0.25 * ell;
  const double c_a = sbar(r_min) / (r_min * r_min);
  const double c_b = sbar(2.0 * r_min) / (4.0 * r_min * r_min);
  const double c0 = (4.0 * c_a - c_b) / 3.0;
  const double c1 = (c_b - c_a) / (3.0 * r_min * r_min);
  acc.value += c0 * std::pow(r_min, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) +
               c1 * std::pow(r_min, 4.0 - 2.0 * s) / (4.0 - 2.0 * s);
  // r = r_in u^{1/(2-2s)} turns the r^{1-2s} behaviour into a smooth integrand.
  const double ex = 1.0 / (2.0 - 2.0 * s);
  add(quad::gauss_kronrod(
      [&](double u) {
        const double r = r_in * std::pow(u, ex);
        return radial(r) * r_in * ex * std::pow(u, ex - 1.0);
      },
      std::pow(r_min / r_in, 1.0 / ex), 1.0, kPanelRel, kPanelAbs));

  // Geometric panels out to the feature at distance d, refining towards it
  // from both sides.
  std::vector<double> breaks{r_in, ell, 2.0 * ell, 4.0 * ell};
  for (double r = 8.0 * ell; r < 0.5 * d; r *= 2.0) breaks.push_back(r);
  for (double w = ell; w < 0.5 * d; w *= 2.0) {
    breaks.push_back(d - w);
    breaks.push_back(d + w);
  }
  breaks.push_back(d);
  breaks.push_back(2.0 * (d + ell));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::remove_if(breaks.begin(), breaks.end(), [&](double b) { return b < r_in; }), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  add(quad::gauss_kronrod_panels(radial, breaks, kPanelRel, kPanelAbs));

  double R = breaks.back();
  for (int k = 0; k < 1000 && std::isfinite(2.0 * R); ++k) {
    const auto e = add(quad::gauss_kronrod(radial, R, 2.0 * R, kPanelRel, kPanelAbs));
    R *= 2.0;
    if (std::abs(e.value) <= kTailStop * std::abs(acc.value)) break;
  }
  const double remainder = sbar(R) * std::pow(R, -2.0 * s) / (2.0 * s);

  const double C = frac_constant(pr.dim, s);
  const quad::Estimate out{C * (acc.value + remainder), C * acc.error};
  if (!std::isfinite(out.value) || out.error > kAbsTol) {
    throw NumericalError("fractional Laplacian quadrature did not converge (error estimate " +
                         std::to_string(out.error) + ")");
  }
  return out;
}

double frac_laplacian_pointwise(const Profile& profile, double s, const Point& x) {
  return frac_laplacian_pointwise_estimate(profile, s, x).value;
}

std::pair<double, double> scaling_check(const Profile& profile, double s, double R, const Point& x) {
  if (!(R > 0.0)) throw ConfigError("scaling factor must be positive");
  const double lhs = frac_laplacian_pointwise(profile.dilated(R), s, x);
  const double rhs = std::pow(R, -2.0 * s) * frac_laplacian_pointwise(profile, s, {x[0] / R, x[1] / R});
  return {lhs, rhs};
}

double psi_ramp(double r, Ramp) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double c = std::cos(0.5 * kPi * (r - 1.0));
  return c * c;
}

double psi_ramp_derivative(double r, Ramp) {
  if (r <= 1.0 || r >= 2.0) return 0.0;
  return -0.5 * kPi * std::sin(kPi * (r - 1.0));
}

TestFunctionSpec TestFunctionSpec::make(int dim, double alpha, double p, double q0, double B, double R, Ramp ramp) {
  if (dim != 1 && dim != 2) throw ConfigError("dimension must be 1 or 2");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("alpha must lie in (0, 2)");
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must exceed 1");
  if (!(q0 > dim && q0 < dim + alpha * p)) throw ConfigError("q0 must satisfy N < q0 < N + alpha p");
  if (!(B >= 1.0) || !(R >= 1.0) || !std::isfinite(B) || !std::isfinite(R)) {
    throw ConfigError("B and R must be >= 1");
  }
  TestFunctionSpec t;
  t.dim_ = dim;
  t.alpha_ = alpha;
  t.p_ = p;
  t.q0_ = q0;
  t.B_ = B;
  t.R_ = R;
  t.ramp_ = ramp;
  return t;
}

double TestFunctionSpec::decay_exponent() const noexcept {
  return ((dim_ + alpha_) * p_ - q0_) / (p_ - 1.0);
}

double bracket_neg_laplacian(int dim, const Point& x, double scale, double q0) {
  const double rho2 = (x[0] * x[0] + x[1] * x[1]) / (scale * scale);
  const double w = 1.0 + rho2;
  return q0 / (scale * scale) *
         (dim * std::pow(w, -0.5 * q0 - 1.0) - (q0 + 2.0) * rho2 * std::pow(w, -0.5 * q0 - 2.0));
}

namespace {

// Integral of an even (1D) or radial (2D) integrand over the grid box plus
// the tail-policy check. In 1D this equals the trapezoid sum over all grid
// nodes.
double box_integral(const TestFunctionSpec& spec, const GridSpec& grid, const std::function<double(double)>& f) {
  if (grid.dim() != spec.dim()) throw ConfigError("grid and test function dimensions differ");
  const double L = grid.half_width();
  double interior = 0.0;
  if (grid.dim() == 1) {
    const std::size_t n = grid.points();
    const double h = grid.spacing();
    const std::size_t count = n / 2 + 1;  // x = 0, h, ..., L
    const auto vals = evaluate_all(count, [&](std::size_t j) { return f(static_cast<double>(j) * h); });
    double sum = 0.0;
    for (std::size_t j = 1; j + 1 < count; ++j) sum += vals[j];
    interior = h * (vals[0] + 2.0 * sum + vals[count - 1]);
  } else {
    const double a = spec.B() * spec.R();
    std::vector<double> breaks{0.0};
    for (double r = 0.5 * a; r < L; r *= 2.0) breaks.push_back(r);
    breaks.push_back(L);
    const auto parts = evaluate_all(breaks.size() - 1, [&](std::size_t i) {
      return quad::gauss_kronrod([&](double r) { return 2.0 * kPi * r * f(r); }, breaks[i], breaks[i + 1], 1e-10)
          .value;
    });
    for (double v : parts) interior += v;
  }
  const double kappa = spec.decay_exponent();
  const double tail = sphere_area(spec.dim()) * f(L) * std::pow(L, spec.dim()) / (kappa - spec.dim());
  if (!std::isfinite(interior)) throw NumericalError("capacity integral is not finite");
  if (tail > 1e-6 * interior) {
    throw ConfigError("capacity box too small: tail estimate " + std::to_string(tail / interior) +
                      " of the integral exceeds 1e-6");
  }
  return interior;
}

}  // namespace

double capacity_integral(const TestFunctionSpec& spec, const GridSpec& grid) {
  const double a = spec.B() * spec.R();
  const double q0 = spec.q0();
  const double s = 0.5 * spec.alpha();
  const double p = spec.p();
  const Profile phi = Profile::bracket(spec.dim(), a, q0);
  auto f = [&](double r) {
    const Point x{r, 0.0};
    const double op = bracket_neg_laplacian(spec.dim(), x, a, q0) + frac_laplacian_pointwise(phi, s, x);
    return std::pow(bracket_profile(x, a, q0), -1.0 / (p - 1.0)) * std::pow(std::abs(op), p / (p - 1.0));
  };
  return box_integral(spec, grid, f);
}

double capacity_integral_rescaled(const TestFunctionSpec& spec, const GridSpec& unit_grid) {
  const double a = spec.B() * spec.R();
  const double q0 = spec.q0();
  const double s = 0.5 * spec.alpha();
  const double p = spec.p();
  const double w_loc = std::pow(a, -2.0);
  const double w_frac = std::pow(a, -spec.alpha());
  const Profile phi = Profile::bracket(spec.dim(), 1.0, q0);
  auto f = [&](double r) {
    const Point y{r, 0.0};
    const double op = w_loc * bracket_neg_laplacian(spec.dim(), y, 1.0, q0) +
                      w_frac * frac_laplacian_pointwise(phi, s, y);
    return std::pow(bracket_profile(y, 1.0, q0), -1.0 / (p - 1.0)) * std::pow(std::abs(op), p / (p - 1.0));
  };
  const TestFunctionSpec unit = TestFunctionSpec::make(spec.dim(), spec.alpha(), p, q0, 1.0, 1.0, spec.ramp());
  return std::pow(a, spec.dim()) * box_integral(unit, unit_grid, f);
}

GridSpec capacity_grid(const TestFunctionSpec& spec, double spacing_units, double tail_tol) {
  if (!(spacing_units > 0.0) || !(tail_tol > 0.0)) throw ConfigError("spacing and tail tolerance must be positive");
  const double a = spec.B() * spec.R();
  const double q0 = spec.q0();
  const double p = spec.p();
  const double w_loc = std::pow(a, -2.0);
  const double w_frac = std::pow(a, -spec.alpha());
  const Profile phi = Profile::bracket(spec.dim(), 1.0, q0);
  auto f = [&](double r) {
    const Point y{r, 0.0};
    const double op = w_loc * bracket_neg_laplacian(spec.dim(), y, 1.0, q0) +
                      w_frac * frac_laplacian_pointwise(phi, 0.5 * spec.alpha(), y);
    return std::pow(bracket_profile(y, 1.0, q0), -1.0 / (p - 1.0)) * std::pow(std::abs(op), p / (p - 1.0));
  };
  // Coarse core integral in units of B R, then the far field extrapolated from y0.
  const double y0 = 64.0;
  const double h = 0.5;
  const int N = spec.dim();
  double core = 0.0;
  for (double y = 0.5 * h; y < y0; y += h) core += h * f(y) * (N == 1 ? 2.0 : 2.0 * kPi * y);
  const double kappa = spec.decay_exponent();
  const double f0 = f(y0);
  double Y = y0;
  if (f0 > 0.0) {
    const double target = 0.25 * tail_tol * core * (kappa - N) / (sphere_area(N) * f0 * std::pow(y0, kappa));
    Y = std::max(y0, std::pow(target, 1.0 / (N - kappa)));
  }
  const double wanted = std::ceil(2.0 * Y / spacing_units);
  if (!(wanted < 1e9)) throw ConfigError("capacity grid would need too many points");
  const std::size_t n = std::bit_ceil(std::max<std::size_t>(16, static_cast<std::size_t>(wanted)));
  return GridSpec::make(N, Y * a, n);
}

double time_factor_ramp(double p, double beta, Ramp ramp) {
  if (!(p > 1.0) || !(beta >= 0.0)) throw ConfigError("time factor needs p > 1 and beta >= 0");
  const double e = beta / ((beta + 1.0) * (p - 1.0));
  const double q = p / (p - 1.0);
  return quad::gauss_kronrod(
             [&](double eta) {
               return std::pow(eta, e) * psi_ramp(eta, ramp) * std::pow(std::abs(psi_ramp_derivative(eta, ramp)), q);
             },
             1.0, 2.0)
      .value;
}

double time_factor_profile(double p, double beta, double ell, Ramp ramp) {
  if (!(p > 1.0) || !(beta >= 0.0)) throw ConfigError("time factor needs p > 1 and beta >= 0");
  const double e = beta / ((beta + 1.0) * (p - 1.0));
  const std::vector<double> breaks{0.0, 1.0, 2.0};
  return quad::gauss_kronrod_panels(
             [&](double eta) { return std::pow(eta, e) * std::pow(psi_ramp(eta, ramp), ell); }, breaks)
      .value;
}

}  // namespace mlheat
