#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zeno/closed_form.hpp"
#include "zeno/propagator.hpp"

using namespace zeno;
using std::numbers::pi;

namespace {

const SystemSpec kSystem = SystemSpec::two_level(0.0, 1.0);
const DriveSpec kDrive = DriveSpec::two_level(1.0, 1.0);

MeterSegment record_for_omega(double omega_over_p, double t_end, double tau) {
  if (omega_over_p == 0.0) return {0.0, t_end, 0.0, MeterError::unmeasured()};
  return {0.0, t_end, 0.0, MeterError::of(std::sqrt(1.0 / (2.0 * tau * omega_over_p)))};
}

double max_amplitude_error(const StateVector& a, const StateVector& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.amplitudes.size(); ++i) e = std::max(e, std::abs(a.amplitudes[i] - b.amplitudes[i]));
  return e;
}

}  // namespace

TEST_CASE("rhs: matched level without drive is a pure phase") {
  const SystemSpec system{{0.0, 1.0, 2.5}, 2.0};
  const StateVector s{{0.3, Complex(0.1, 0.2), Complex(0.0, 1.0)}, 0.0};
  const MeterSegment seg{0.0, 1.0, 1.0, MeterError::of(0.5)};
  const auto d = propagator::rhs(s, system, DriveSpec::none(), seg, 1.5, 0.0);
  CHECK(std::abs(d[1] - Complex(0.0, -0.5) * s.amplitudes[1]) < 1e-15);
  // Unmatched levels follow the free-decay equation per level.
  for (std::size_t n : {0u, 2u}) {
    const double gamma = std::pow(system.energies[n] - 1.0, 2) / (1.5 * 0.25);
    CHECK(std::abs(d[n] - Complex(-gamma, -system.energies[n] / 2.0) * s.amplitudes[n]) < 1e-14);
  }
}

TEST_CASE("rhs matches finite differences of the closed form") {
  const SystemSpec system = SystemSpec::two_level(0.2, 1.1, 0.9);
  const DriveSpec drive = DriveSpec::two_level(0.7, 1.3, 0.7);
  const MeterSegment seg{0.0, 2.0, 0.3, MeterError::of(0.8)};
  const double tau = 2.0;
  const StateVector s0{{Complex(0.6, 0.0), Complex(0.0, 0.8)}, 0.0};
  const auto params = regime_params(system, drive, seg, tau);

  // One-sided second-order stencil at t = 0, where the closed form starts.
  const double h = 1e-4;
  auto at = [&](double t) { return closed_form::two_level_evolve(s0, params, system, drive, seg, tau, t, drive.t0); };
  const auto c0 = at(0.0), c1 = at(h), c2 = at(2.0 * h);
  const auto d = propagator::rhs(s0, system, drive, seg, tau, 0.0);
  for (std::size_t i = 0; i < 2; ++i) {
    const Complex fd = (-3.0 * c0.amplitudes[i] + 4.0 * c1.amplitudes[i] - c2.amplitudes[i]) / (2.0 * h);
    CHECK(std::abs(fd - d[i]) < 1e-7);
  }

  // Central difference at an interior time, t = 0.5.
  const auto mid = at(0.5);
  const auto cp = at(0.5 + 1e-5), cm = at(0.5 - 1e-5);
  const auto dm = propagator::rhs(mid, system, drive, seg, tau, 0.5);
  for (std::size_t i = 0; i < 2; ++i) {
    const Complex fd = (cp.amplitudes[i] - cm.amplitudes[i]) / 2e-5;
    CHECK(std::abs(fd - dm[i]) < 1e-9);
  }
}

TEST_CASE("propagate_segment matches the closed form at step 1e-4") {
  const double tau = 2.0 * pi;
  propagator::IntegratorConfig cfg;
  cfg.step = 1e-4;
  for (double ratio : {0.0, 0.5, 1.0, 2.0}) {
    CAPTURE(ratio);
    const auto seg = record_for_omega(ratio, tau, tau);
    const auto params = regime_params(kSystem, kDrive, seg, tau);
    const auto numeric = propagator::propagate_segment(StateVector::basis(2, 0), kSystem, kDrive, seg, tau, cfg);
    const auto exact = closed_form::two_level_evolve(StateVector::basis(2, 0), params, kSystem, kDrive, seg, tau, tau, 0.0);
    CHECK(numeric.time == seg.t_end);
    CHECK(max_amplitude_error(numeric, exact) <= 1e-8);
  }
}

TEST_CASE("propagate_segment lands exactly on the segment end with a partial last step") {
  propagator::IntegratorConfig cfg;
  cfg.step = 0.3;
  const MeterSegment seg{0.25, 1.25, 0.0, MeterError::unmeasured()};
  int steps = 0;
  double last_time = 0.0;
  const auto s = propagator::propagate_segment(StateVector::basis(2, 0, 0.25), kSystem, kDrive, seg, 1.0, cfg,
                                               [&](const StateVector& st) {
                                                 ++steps;
                                                 last_time = st.time;
                                               });
  CHECK(steps == 4);
  CHECK(last_time == 1.25);
  CHECK(s.time == 1.25);
}

TEST_CASE("unmeasured, undriven propagation conserves the norm over t = 100") {
  const SystemSpec system{{0.0, 1.3, 2.9}, 1.0};
  const StateVector s0{{0.5, Complex(0.0, 0.5), Complex(0.5, 0.5)}, 0.0};
  propagator::IntegratorConfig cfg;
  cfg.step = 1e-3;
  const MeterSegment seg{0.0, 100.0, 0.0, MeterError::unmeasured()};
  const auto s = propagator::propagate_segment(s0, system, DriveSpec::none(), seg, 1.0, cfg);
  CHECK(std::abs(s.norm_squared() - s0.norm_squared()) <= 1e-12);
}

TEST_CASE("three levels, no drive, record E = E2") {
  const SystemSpec system{{0.0, 1.0, 2.0}, 1.0};
  const StateVector s0{{0.5, 0.5, Complex(0.0, std::sqrt(0.5))}, 0.0};
  const double tau = 2.0, de = 1.0;
  const MeterSegment seg{0.0, 3.0, 1.0, MeterError::of(de)};
  propagator::IntegratorConfig cfg;
  cfg.step = 1e-3;
  const auto s = propagator::propagate_segment(s0, system, DriveSpec::none(), seg, tau, cfg);
  CHECK(std::abs(s.amplitudes[1]) == doctest::Approx(0.5).epsilon(1e-12));
  // Levels 1 and 3 decay with rate (E_n - E)^2 / (τΔE^2) = 1/2.
  CHECK(std::abs(s.amplitudes[0]) == doctest::Approx(0.5 * std::exp(-1.5)).epsilon(1e-11));
  CHECK(std::abs(s.amplitudes[2]) == doctest::Approx(std::sqrt(0.5) * std::exp(-1.5)).epsilon(1e-11));
}

TEST_CASE("probabilities") {
  const auto p = propagator::probabilities(StateVector{{1.0, 0.0}, 0.0});
  CHECK(p[0] == 1.0);
  CHECK(p[1] == 0.0);
  const auto q = propagator::probabilities(StateVector{{Complex(3.0, 0.0), Complex(0.0, 3.0)}, 0.0});
  CHECK(q[0] == doctest::Approx(0.5));
  CHECK(q[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(propagator::probabilities(StateVector{{0.0, 0.0}, 0.0}), NumericError);

  SUBCASE("critical trajectory tends to 1/2") {
    const double tau = 200.0;
    const auto seg = record_for_omega(1.0, tau, tau);
    propagator::IntegratorConfig cfg;
    cfg.step = 1e-2;
    const auto s = propagator::propagate_segment(StateVector::basis(2, 0), kSystem, kDrive, seg, tau, cfg);
    CHECK(propagator::probabilities(s)[0] == doctest::Approx(0.5).epsilon(0.01));
  }
}

TEST_CASE("RK4 error is fourth order: halving the step cuts the error by 12..20") {
  const double tau = 2.0 * pi;
  for (double ratio : {0.0, 0.5, 1.0, 2.0}) {
    CAPTURE(ratio);
    const auto seg = record_for_omega(ratio, tau, tau);
    const auto params = regime_params(kSystem, kDrive, seg, tau);
    const auto exact = closed_form::two_level_evolve(StateVector::basis(2, 0), params, kSystem, kDrive, seg, tau, tau, 0.0);
    auto error = [&](double h) {
      propagator::IntegratorConfig cfg;
      cfg.step = h;
      return max_amplitude_error(
          propagator::propagate_segment(StateVector::basis(2, 0), kSystem, kDrive, seg, tau, cfg), exact);
    };
    const double ratio_err = error(0.02) / error(0.01);
    CHECK(ratio_err >= 12.0);
    CHECK(ratio_err <= 20.0);
  }
}

TEST_CASE("norm never increases across an RK4 step with finite ΔE") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const SystemSpec system = SystemSpec::two_level(0.0, u(rng));
    const DriveSpec drive = DriveSpec::two_level(u(rng), u(rng), u(rng));
    const MeterSegment seg{0.0, 5.0, u(rng) - 0.5, MeterError::of(u(rng))};
    propagator::IntegratorConfig cfg;
    cfg.step = 1e-2;
    double previous = 1.0;
    bool ok = true;
    propagator::propagate_segment(StateVector::basis(2, 0), system, drive, seg, 5.0, cfg, [&](const StateVector& s) {
      const double n = s.norm_squared();
      ok = ok && n <= previous + 1e-13;
      previous = n;
    });
    CHECK(ok);
  }
}

TEST_CASE("forward then backward propagation without measurement is reversible") {
  const SystemSpec system{{0.0, 1.0, 1.7}, 1.0};
  ComplexMatrix v(3);
  v(0, 1) = Complex(0.3, 0.1);
  v(1, 0) = std::conj(v(0, 1));
  v(1, 2) = Complex(0.0, 0.4);
  v(2, 1) = std::conj(v(1, 2));
  const DriveSpec drive = DriveSpec::general([v](double t) {
    ComplexMatrix m = v;
    m(0, 2) = 0.2 * std::cos(t);
    m(2, 0) = m(0, 2);
    return m;
  });
  const MeterSegment seg{0.0, 10.0, 0.0, MeterError::unmeasured()};
  const propagator::Derivative f = [&](const StateVector& s, double t) {
    return propagator::rhs(s, system, drive, seg, 1.0, t);
  };
  const StateVector s0{{0.6, Complex(0.0, 0.8), 0.0}, 0.0};
  StateVector s = s0;
  const double h = 1e-3;
  for (int k = 0; k < 5000; ++k) s = propagator::rk4_step(s, h, f);
  for (int k = 0; k < 5000; ++k) s = propagator::rk4_step(s, -h, f);
  CHECK(std::abs(s.time) < 1e-9);
  CHECK(max_amplitude_error(s, s0) <= 1e-9);
}

TEST_CASE("Hermitian drive with no measurement keeps the norm over 10^6 steps") {
  const SystemSpec system = SystemSpec::two_level(0.0, 1.0);
  const MeterSegment seg{0.0, 1000.0, 0.0, MeterError::unmeasured()};
  propagator::IntegratorConfig cfg;
  cfg.step = 1e-3;
  const auto s = propagator::propagate_segment(StateVector::basis(2, 0), system, kDrive, seg, 1.0, cfg);
  CHECK(std::abs(s.norm_squared() - 1.0) <= 1e-8);
}

TEST_CASE("errors: max_steps, underflow, non-Hermitian drive") {
  propagator::IntegratorConfig cfg;
  cfg.step = 1e-3;
  cfg.max_steps = 10;
  const MeterSegment seg{0.0, 1.0, 0.0, MeterError::unmeasured()};
  CHECK_THROWS_AS(propagator::propagate_segment(StateVector::basis(2, 0), kSystem, kDrive, seg, 1.0, cfg), NumericError);

  // Damping rate 1e4: the norm of |2> drops below 1e-300 after t ~ 0.035.
  propagator::IntegratorConfig fine;
  fine.step = 1e-5;
  const MeterSegment harsh{0.0, 0.05, 0.0, MeterError::of(1e-2)};
  CHECK_THROWS_AS(propagator::propagate_segment(StateVector::basis(2, 1), kSystem, DriveSpec::none(), harsh, 1.0, fine),
                  NumericError);

  ComplexMatrix bad(2);
  bad(0, 1) = 1.0;
  const auto drive = DriveSpec::general([bad](double) { return bad; });
  CHECK_THROWS_AS(propagator::propagate_segment(StateVector::basis(2, 0), kSystem, drive, seg, 1.0, fine),
                  ValidationError);
}

TEST_CASE("default step: duration/1000, capped at 1e-3 hbar/V0 when driven") {
  propagator::IntegratorConfig cfg;
  const MeterSegment seg{0.0, 10.0, 0.0, MeterError::unmeasured()};
  CHECK(propagator::resolve_step(cfg, seg, kSystem, DriveSpec::none()) == doctest::Approx(1e-2));
  CHECK(propagator::resolve_step(cfg, seg, kSystem, DriveSpec::two_level(2.0, 1.0)) == doctest::Approx(5e-4));
  cfg.step = 100.0;
  CHECK(propagator::resolve_step(cfg, seg, kSystem, kDrive) == 10.0);
}
