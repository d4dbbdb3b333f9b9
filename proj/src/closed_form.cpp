#include "zeno/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace zeno::closed_form {

namespace {

constexpr double kSeriesThreshold = 1e-6;
constexpr Complex kI{0.0, 1.0};

// exp(u) - 1 without cancellation for small |u|.
Complex expm1(Complex u) {
  const double x = u.real();
  const double y = u.imag();
  const double half_sin = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin, std::exp(x) * std::sin(y)};
}

// cos(wt) = cos_part * exp(shift), sin(wt)/w = sin_part * exp(shift), with
// |exp(-shift)| chosen so neither part overflows when w is imaginary.
struct ScaledTrig {
  Complex cos_part;
  Complex sin_part;
  Complex shift;
};

ScaledTrig scaled_trig(Complex w, double t) {
  if (w.imag() < 0.0) w = -w;  // both functions are even in w
  const Complex z = w * t;
  if (std::abs(z) < kSeriesThreshold) {
    const Complex z2 = z * z;
    return {1.0 - 0.5 * z2, t * (1.0 - z2 / 6.0), 0.0};
  }
  const Complex u = 2.0 * kI * z;
  const Complex em1 = expm1(u);
  return {1.0 + 0.5 * em1, t * em1 / u, -kI * z};
}

void require_two_level(const SystemSpec& system) {
  system.validate();
  if (system.levels() != 2) throw ValidationError("closed form needs exactly 2 levels");
}

}  // namespace

StateVector free_decay_coefficients(const StateVector& state0, const SystemSpec& system, double result_e,
                                    const MeterError& delta_e, double tau, double t) {
  system.validate();
  if (state0.amplitudes.size() != system.levels()) throw ValidationError("state size does not match system");
  if (!(t >= 0.0)) throw ValidationError("elapsed time must be non-negative");
  if (delta_e.measured() && !(tau > 0.0)) throw ValidationError("tau must be positive");

  StateVector out{ComplexVector(system.levels()), state0.time + t};
  for (std::size_t n = 0; n < system.levels(); ++n) {
    const double gamma = damping_rate(system.energies[n], result_e, delta_e, tau);
    const Complex exponent(-gamma * t, -system.energies[n] * t / system.hbar);
    out.amplitudes[n] = std::exp(exponent) * state0.amplitudes[n];
  }
  out.check_norm();
  return out;
}

StateVector two_level_evolve(const StateVector& state0, const RegimeParams& params, const SystemSpec& system,
                             const DriveSpec& drive, const MeterSegment& segment, double tau, double t,
                             double phase_origin) {
  require_two_level(system);
  if (drive.kind == DriveSpec::Kind::general_matrix)
    throw ValidationError("closed form needs a two-level drive");
  if (state0.amplitudes.size() != 2) throw ValidationError("state size does not match system");
  if (!(t >= 0.0)) throw ValidationError("elapsed time must be non-negative");
  if (segment.measured() && !(tau > 0.0)) throw ValidationError("tau must be positive");

  const double hbar = system.hbar;
  const double e1 = system.energies[0];
  const double e2 = system.energies[1];
  const double gamma1 = damping_rate(e1, segment.result_e, segment.delta_e, tau);
  const double gamma2 = damping_rate(e2, segment.result_e, segment.delta_e, tau);
  const double drive_omega = drive.kind == DriveSpec::Kind::resonant_two_level ? drive.omega : 0.0;

  const Complex a0 = state0.amplitudes[0];
  const Complex b0 = state0.amplitudes[1];
  const Complex q = params.q;
  const double p = params.p;
  const Complex phase = std::exp(Complex(0.0, drive_omega * phase_origin));  // e^{i ω t0}

  const ScaledTrig trig = scaled_trig(params.w, t);

  const Complex bracket1 = a0 * trig.cos_part - kI * (q * a0 + std::conj(phase) * p * b0) * trig.sin_part;
  const Complex bracket2 = b0 * trig.cos_part + kI * (q * b0 - phase * p * a0) * trig.sin_part;

  const Complex exponent1 = Complex(-gamma1 * t, -e1 * t / hbar) + kI * q * t + trig.shift;
  const Complex exponent2 = Complex(-gamma2 * t, -e2 * t / hbar) - kI * q * t + trig.shift;

  StateVector out{{std::exp(exponent1) * bracket1, std::exp(exponent2) * bracket2}, state0.time + t};
  for (const auto& c : out.amplitudes)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw NumericError("closed-form evolution produced a non-finite amplitude");
  out.check_norm();
  return out;
}

double survival_probability(const RegimeParams& params, double t) {
  if (t < 0.0 || std::isnan(t)) throw ValidationError("survival probability needs t >= 0");
  if (t == 0.0) return 1.0;

  const double x = params.w_squared.real();
  const double scale = std::max({params.p * params.p, std::abs(params.w_squared), 1.0});
  if (std::abs(params.w_squared.imag()) > 1e-12 * scale)
    throw ValidationError("survival probability formula needs the resonant case (real w^2)");

  const double p = params.p;
  const double big_omega = params.omega;
  const double root = std::sqrt(std::abs(x));

  double num = 0.0;
  double den = 0.0;
  if (root * t < kSeriesThreshold) {
    // w cot(wt) ~ 1/t - w^2 t/3, scaled by t
    num = p * t;
    den = big_omega * t + 1.0 - x * t * t / 3.0;
  } else if (x > 0.0) {
    const double s = std::sin(root * t);
    num = p * s;
    den = big_omega * s + root * std::cos(root * t);
  } else {
    // w cot(wt) = |w| coth(|w| t) for imaginary w
    const double th = std::tanh(root * t);
    num = p * th;
    den = big_omega * th + root;
  }
  const double den2 = den * den;
  const double total = den2 + num * num;
  if (total == 0.0) return 1.0;
  return den2 / total;
}

double critical_error(const SystemSpec& system, const DriveSpec& drive, double tau) {
  require_two_level(system);
  if (!(tau > 0.0)) throw ValidationError("critical error needs tau > 0");
  if (drive.kind != DriveSpec::Kind::resonant_two_level || !(drive.v0 > 0.0))
    throw ValidationError("critical error needs a two-level drive with V0 > 0");
  const double gap = std::abs(system.energies[1] - system.energies[0]);
  return gap * std::sqrt(system.hbar / (2.0 * drive.v0 * tau));
}

double pi_pulse_duration(const SystemSpec& system, const DriveSpec& drive) {
  if (drive.kind != DriveSpec::Kind::resonant_two_level || !(drive.v0 > 0.0))
    throw ValidationError("pi pulse needs a two-level drive with V0 > 0");
  return std::numbers::pi * system.hbar / (2.0 * drive.v0);
}

double rabi_probability_period(const SystemSpec& system, const DriveSpec& drive) {
  return 2.0 * pi_pulse_duration(system, drive);
}

}  // namespace zeno::closed_form
