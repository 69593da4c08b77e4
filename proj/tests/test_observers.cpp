#include <doctest.h>

#include <cmath>

#include "mlheat/errors.hpp"
#include "mlheat/kernels.hpp"
#include "mlheat/observers.hpp"

using namespace mlheat;

namespace {

MassTrace synthetic(double (*mass)(double), double (*absorbed)(double)) {
  MassTrace tr;
  tr.entries.push_back({0.0, 0.0, mass(0.0), 0.0, 0.0, 0.0});
  for (double t = 1.0; t <= 1000.0 * (1 + 1e-12); t *= std::pow(10.0, 0.1)) {
    tr.entries.push_back({t, t, mass(t), absorbed(t), 0.0, 0.0});
  }
  return tr;
}

}  // namespace

TEST_CASE("critical exponent") {
  CHECK(critical_exponent(1.0, 0.0, 1) == doctest::Approx(2.0));
  CHECK(critical_exponent(1.5, 1.0, 2) == doctest::Approx(1.375));
  CHECK_THROWS_AS(critical_exponent(2.0, 0.0, 1), ConfigError);
}

TEST_CASE("condition on the absorption coefficient") {
  const auto c1 = AbsorptionSchedule::constant(1.0);
  CHECK(condition_h_check(3.0, 1.0, 0.0, 1, c1).verdict == Convergence::convergent);
  CHECK(condition_h_check(1.5, 1.0, 0.0, 1, c1).verdict == Convergence::divergent);
  // sigma - k = -1 exactly: the borderline log case diverges
  CHECK(condition_h_check(3.0, 1.0, 0.0, 1, AbsorptionSchedule::power(1.0, 1.0)).verdict == Convergence::divergent);
  CHECK(condition_h_check(3.0, 1.0, 0.0, 1, AbsorptionSchedule::power(1.0, 0.5)).verdict == Convergence::convergent);
  CHECK(condition_h_check(2.0, 1.0, 1.0, 2, AbsorptionSchedule::power(1.0, 2.5)).verdict == Convergence::convergent);

  const auto tab = AbsorptionSchedule::table({0.0, 10.0}, {1.0, 2.0});
  const auto r = condition_h_check(3.0, 1.0, 0.0, 1, tab);
  CHECK(r.numeric);
  CHECK(!r.warning.empty());
  CHECK(r.verdict == Convergence::convergent);
  CHECK(condition_h_check(1.5, 1.0, 0.0, 1, tab).verdict == Convergence::divergent);
  CHECK(to_string(Convergence::convergent) == "convergent");
}

TEST_CASE("numeric check agrees with the closed form away from the border") {
  for (double sigma : {-2.0, -0.5, 0.0, 0.8, 1.7}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto h = AbsorptionSchedule::power(1.0, sigma);
      const double k = (p - 1.0) / 1.0;
      if (std::abs(sigma - k + 1.0) < 0.15) continue;
      CHECK(condition_h_numeric(p, 1.0, 0.0, 1, h) == condition_h_check(p, 1.0, 0.0, 1, h).verdict);
    }
  }
}

TEST_CASE("mass classification of synthetic traces") {
  const auto plateau = synthetic([](double) { return 2.0; }, [](double) { return 0.0; });
  const auto c1 = classify_mass_limit(plateau);
  CHECK(c1.verdict == MassLimit::positive_plateau);
  CHECK(c1.from_ledger);
  CHECK(c1.M_inf_estimate == 2.0);

  const auto settling = synthetic([](double t) { return 1.0 + 1e-6 / (1.0 + t); },
                                  [](double t) { return 1e-6 - 1e-6 / (1.0 + t); });
  const auto c2 = classify_mass_limit(settling);
  CHECK(c2.verdict == MassLimit::positive_plateau);
  CHECK(c2.M_inf_estimate == doctest::Approx(1.0).epsilon(1e-8));

  const auto decay = synthetic([](double t) { return 1.0 / std::sqrt(1.0 + t); },
                               [](double t) { return 1.0 - 1.0 / std::sqrt(1.0 + t); });
  const auto c3 = classify_mass_limit(decay);
  CHECK(c3.verdict == MassLimit::decaying_to_zero);
  CHECK(c3.slope == doctest::Approx(-0.5).epsilon(0.02));
  CHECK(to_string(c3.verdict) == "decaying_to_zero");

  const auto wobble = synthetic([](double t) { return 1.0 + 0.1 * std::sin(std::log(t + 1.0) * 5.0); },
                                [](double) { return 0.0; });
  CHECK(classify_mass_limit(wobble).verdict == MassLimit::inconclusive);
}

TEST_CASE("classification needs two decades") {
  MassTrace tr;
  for (double t = 1.0; t <= 50.0; t *= 2.0) tr.entries.push_back({t, t, 1.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_AS(classify_mass_limit(tr), ConfigError);
}

TEST_CASE("linear run is a plateau at the initial mass") {
  const auto g = GridSpec::make(1, 64.0, 256);
  ProblemSpec pb;
  pb.alpha = 1.0;
  pb.p = 3.0;
  pb.schedule = AbsorptionSchedule::constant(1e-14);
  pb.u0 = Field::sample(g, [](const Point& x) { return 0.2 * std::exp(-x[0] * x[0]); });
  const auto times = geometric_times(1.0, 100.0, 2.0);
  const auto res = solve(pb, StepSchedule::with_snapshots(times, 0.0, 1.0));
  const auto c = classify_mass_limit(res.trace);
  CHECK(c.verdict == MassLimit::positive_plateau);
  CHECK(c.M_inf_estimate == doctest::Approx(pb.u0.integral()).epsilon(1e-10));
}

TEST_CASE("profile error of an exact kernel is zero") {
  const auto g = GridSpec::make(1, 64.0, 1024);
  const double t = 3.0, beta = 0.5;
  const Field u = 0.7 * mixed_kernel(g, 1.3, tau_of(t, beta));
  CHECK(profile_error(u, 0.7, t, 1.3, beta, 2.0) < 1e-13);
  CHECK(profile_error(u, 0.5, t, 1.3, beta, 2.0) > 1e-3);
  CHECK_THROWS_AS(profile_error(u, 0.7, t, 1.3, beta, kInfNorm), ConfigError);
}

TEST_CASE("absorption bound takes the smallest branch") {
  CHECK(h_bound_H(100.0, 2.0, 1.0, 0.0, 1, 1.0, 1.0) == doctest::Approx(1e-2));
  CHECK(h_bound_H(1e-4, 2.0, 1.0, 0.0, 1, 1.0, 0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(h_bound_H(0.0, 2.0, 1.0, 0.0, 1, 1.0, 1.0), ConfigError);
}
