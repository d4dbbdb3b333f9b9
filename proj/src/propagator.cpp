#include "zeno/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zeno::propagator {

namespace {

constexpr Complex kI{0.0, 1.0};

void axpy_into(ComplexVector& out, const ComplexVector& base, const ComplexVector& k, double scale) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = base[i] + scale * k[i];
}

}  // namespace

double resolve_step(const IntegratorConfig& config, const MeterSegment& segment, const SystemSpec& system,
                    const DriveSpec& drive) {
  const double duration = segment.duration();
  double step = 0.0;
  if (config.step) {
    step = *config.step;
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("integrator step must be positive");
  } else {
    step = duration / 1000.0;
    if (drive.kind == DriveSpec::Kind::resonant_two_level && drive.v0 > 0.0)
      step = std::min(step, 1e-3 * system.hbar / drive.v0);
    if (drive.kind == DriveSpec::Kind::general_matrix) {
      // Largest row sum of V at the segment start stands in for V0.
      const ComplexMatrix v = drive.at(segment.t_start, system.levels());
      double v0 = 0.0;
      for (std::size_t i = 0; i < v.dim; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < v.dim; ++j) row += std::abs(v(i, j));
        v0 = std::max(v0, row);
      }
      if (v0 > 0.0) step = std::min(step, 1e-3 * system.hbar / v0);
    }
  }
  return std::min(step, duration);
}

ComplexVector rhs(const StateVector& state, const SystemSpec& system, const DriveSpec& drive,
                  const MeterSegment& segment, double tau, double t) {
  const std::size_t n = system.levels();
  ComplexVector d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double gamma = damping_rate(system.energies[i], segment.result_e, segment.delta_e, tau);
    d[i] = Complex(-gamma, -system.energies[i] / system.hbar) * state.amplitudes[i];
  }
  if (drive.kind == DriveSpec::Kind::none) return d;

  const ComplexMatrix v = drive.at(t, n);
  const Complex coupling = -kI / system.hbar;
  for (std::size_t i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += v(i, k) * state.amplitudes[k];
    d[i] += coupling * acc;
  }
  return d;
}

StateVector rk4_step(const StateVector& state, double h, const Derivative& derivative) {
  const double t = state.time;
  const std::size_t n = state.amplitudes.size();
  StateVector probe{ComplexVector(n), t};

  const ComplexVector k1 = derivative(state, t);
  axpy_into(probe.amplitudes, state.amplitudes, k1, 0.5 * h);
  probe.time = t + 0.5 * h;
  const ComplexVector k2 = derivative(probe, probe.time);
  axpy_into(probe.amplitudes, state.amplitudes, k2, 0.5 * h);
  const ComplexVector k3 = derivative(probe, probe.time);
  axpy_into(probe.amplitudes, state.amplitudes, k3, h);
  probe.time = t + h;
  const ComplexVector k4 = derivative(probe, probe.time);

  StateVector out{ComplexVector(n), t + h};
  for (std::size_t i = 0; i < n; ++i)
    out.amplitudes[i] = state.amplitudes[i] + (h / 6.0) * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
  return out;
}

StateVector propagate_to(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                         const MeterSegment& segment, double tau, double t_end, const IntegratorConfig& config,
                         const StepObserver& observer) {
  system.validate();
  if (state0.amplitudes.size() != system.levels()) throw ValidationError("state size does not match system");
  if (segment.measured() && !(tau > 0.0)) throw ValidationError("tau must be positive");
  if (t_end < state0.time || t_end > segment.t_end) throw ValidationError("target time outside the segment");
  if (state0.time < segment.t_start) throw ValidationError("state time precedes the segment");

  const double span = t_end - state0.time;
  if (span == 0.0) return state0;

  const double step = std::min(resolve_step(config, segment, system, drive), span);
  // Steps whose remainder is below 1e-9 of a step are absorbed into the last one.
  const auto steps = static_cast<std::uint64_t>(std::max(1.0, std::ceil(span / step - 1e-9)));
  if (steps > config.max_steps) {
    std::ostringstream os;
    os << "segment needs " << steps << " steps, more than max_steps=" << config.max_steps;
    throw NumericError(os.str());
  }

  const Derivative derivative = [&](const StateVector& s, double t) {
    return rhs(s, system, drive, segment, tau, t);
  };

  const double start = state0.time;
  StateVector state = state0;
  for (std::uint64_t k = 0; k < steps; ++k) {
    const double next = (k + 1 == steps) ? t_end : start + static_cast<double>(k + 1) * step;
    state = rk4_step(state, next - state.time, derivative);
    state.time = next;
    state.check_norm();
    if (observer) observer(state);
  }
  return state;
}

StateVector propagate_segment(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                              const MeterSegment& segment, double tau, const IntegratorConfig& config,
                              const StepObserver& observer) {
  if (state0.time != segment.t_start) throw ValidationError("state time must equal the segment start");
  return propagate_to(state0, system, drive, segment, tau, segment.t_end, config, observer);
}

std::vector<double> probabilities(const StateVector& state) {
  state.check_norm();
  const double total = state.norm_squared();
  std::vector<double> p(state.amplitudes.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state.amplitudes[i]) / total;
  return p;
}

}  // namespace zeno::propagator
