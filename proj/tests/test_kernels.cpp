#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mlheat/errors.hpp"
#include "mlheat/kernels.hpp"
#include "mlheat/spectral.hpp"

using namespace mlheat;
using std::numbers::pi;

namespace {

double value_at(const Field& f, double x, double y = 0.0) {
  const auto& g = f.grid();
  const auto j = static_cast<std::size_t>(std::lround((x + g.half_width()) / g.spacing()));
  if (g.dim() == 1) return f[j];
  const auto k = static_cast<std::size_t>(std::lround((y + g.half_width()) / g.spacing()));
  return f[j * g.points() + k];
}

}  // namespace

TEST_CASE("heat kernel equals one at the origin for t = 1/(4 pi)") {
  for (int dim : {1, 2}) {
    const auto g = GridSpec::make(dim, 4.0, 64);
    const Field k = gaussian_kernel(g, 1.0 / (4.0 * pi));
    CHECK(value_at(k, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gaussian_kernel(GridSpec::make(1, 1.0, 16), 0.0), ConfigError);
}

TEST_CASE("mixed kernel with alpha = 2 is the heat kernel at time 2t") {
  const auto g = GridSpec::make(1, 40.0, 1024);
  for (double t : {0.1, 1.0, 5.0}) {
    const Field a = mixed_kernel(g, 2.0, t, true);
    const Field b = gaussian_kernel(g, 2.0 * t);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) < 1e-12);
  }
  CHECK_THROWS_AS(mixed_kernel(g, 2.0, 1.0), ConfigError);
  CHECK_THROWS_AS(mixed_kernel(g, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(stable_kernel(g, -0.5, 1.0), ConfigError);
}

TEST_CASE("Cauchy kernel values") {
  const auto g1 = GridSpec::make(1, 4096.0, std::size_t{1} << 17);
  const Field k1 = stable_kernel(g1, 1.0, 1.0);
  CHECK(value_at(k1, 0.0) == doctest::Approx(1.0 / pi).epsilon(1e-5));

  // self-similarity: P(2, 4) = P(1/2, 1) / 4 = 1 / (5 pi)
  const Field k4 = stable_kernel(g1, 1.0, 4.0);
  CHECK(value_at(k4, 2.0) == doctest::Approx(value_at(k1, 0.5) / 4.0).epsilon(1e-5));
  CHECK(value_at(k4, 2.0) == doctest::Approx(1.0 / (5.0 * pi)).epsilon(1e-5));

  const auto g2 = GridSpec::make(2, 128.0, 2048);
  const Field k2 = stable_kernel(g2, 1.0, 1.0);
  CHECK(value_at(k2, 0.0, 0.0) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-3));
}

TEST_CASE("kernel mass is one and the ripple is small") {
  for (int dim : {1, 2}) {
    const auto g = GridSpec::make(dim, 32.0, dim == 1 ? 4096 : 256);
    for (double alpha : {0.5, 1.0, 1.5}) {
      const Field k = mixed_kernel(g, alpha, 1.0);
      CHECK(k.integral() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(negative_ripple(k) < 1e-3);
    }
  }
}

TEST_CASE("convolution with the kernel contracts every L^q norm") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto g = GridSpec::make(1, 16.0, 512);
  for (int trial = 0; trial < 20; ++trial) {
    Field f(g);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng) * u(rng);
    const double alpha = 0.1 + 1.8 * u(rng);
    const double t = 0.01 + 2.0 * u(rng);
    const Field out = apply_symbol(f, SpectralSymbol::mixed(alpha), t, SymbolMode::semigroup);
    for (double q : {1.0, 1.5, 2.0, 4.0, kInfNorm}) {
      REQUIRE(lq_norm(out, q) <= lq_norm(f, q) * (1.0 + 1e-12));
    }
    CHECK(out.integral() == doctest::Approx(f.integral()).epsilon(1e-12));
  }
}

TEST_CASE("L^q norms of simple fields") {
  const auto g = GridSpec::make(1, 2.0, 64);
  const Field c = Field::sample(g, [](const Point&) { return -2.0; });
  CHECK(lq_norm(c, 1.0) == doctest::Approx(8.0));
  CHECK(lq_norm(c, 2.0) == doctest::Approx(4.0));
  CHECK(lq_norm(c, kInfNorm) == doctest::Approx(2.0));
  CHECK_THROWS_AS(lq_norm(c, 0.5), ConfigError);

  const auto gp = GridSpec::make(1, pi, 64);
  const Field s = Field::sample(gp, [](const Point& x) { return std::sin(3.0 * x[0]); });
  CHECK(gradient_lq_norm(s, 2.0) == doctest::Approx(3.0 * std::sqrt(pi)).epsilon(1e-10));
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.25));
  CHECK(loglog_slope(x, y) == doctest::Approx(-1.25).epsilon(1e-12));
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), ConfigError);
  CHECK_THROWS_AS(loglog_slope(x, std::vector<double>{1.0, 0.0, 1.0, 1.0}), NumericalError);
}

TEST_CASE("stable tail mass scales like t L^-alpha") {
  const double a = stable_tail_mass(1, 1.0, 1.0, 10.0);
  // Cauchy: mass beyond |x| = L is about 2 / (pi L)
  CHECK(a == doctest::Approx(2.0 / (pi * 10.0)).epsilon(1e-12));
  CHECK(stable_tail_mass(2, 1.5, 2.0, 20.0) ==
        doctest::Approx(2.0 * std::pow(2.0, -1.5) * stable_tail_mass(2, 1.5, 1.0, 10.0)).epsilon(1e-12));
  const double L = tail_policy_half_width(1, 0.7, 3.0, 1e-3);
  CHECK(stable_tail_mass(1, 0.7, 3.0, L) == doctest::Approx(1e-3).epsilon(1e-10));
}

TEST_CASE("resolving grid respects the point cap") {
  const GridSpec g = resolving_grid(1, 1.0, 0.1, 10.0, 1e-3);
  CHECK(g.half_width() > 10.0);
  CHECK_THROWS_AS(resolving_grid(1, 1.0, 1e-3, 1e3, 1e-8, 1024), ConfigError);
  CHECK_THROWS_AS(resolving_grid(1, 1.0, 1.0, 2.0, 2.0), ConfigError);
}

TEST_CASE("kernel decay fit reproduces the heat rate for alpha = 2") {
  const auto g = GridSpec::make(1, 200.0, 8192);
  const DecayFit fit = kernel_decay_fit(g, 2.0 - 1e-9, kInfNorm, 10.0, 100.0);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK(fit.norms.size() == 5);
}

TEST_CASE("Taylor contraction of a delta is exact") {
  const auto g = GridSpec::make(1, 64.0, 2048);
  const std::vector<double> times{1.0, 10.0};
  const auto tc = taylor_contraction_error(Field::delta(g), 1.0, times);
  CHECK(tc.mass == doctest::Approx(1.0));
  CHECK(tc.first_moment_norm == 0.0);
  for (double e : tc.errors) CHECK(e < 1e-12);
}
