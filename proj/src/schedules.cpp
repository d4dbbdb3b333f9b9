#include "zeno/schedules.hpp"

#include <cmath>

#include "zeno/closed_form.hpp"

namespace zeno::schedules {

namespace {

constexpr double kContiguousTol = 1e-12;

void require_time(double t, const char* what) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ValidationError(std::string(what) + " must be positive");
}

MeterSegment segment(double a, double b, double result_e, MeterError delta_e) { return {a, b, result_e, delta_e}; }

// Evolve `start` (at segment.t_start) by local time `dt` in closed form.
StateVector closed_form_step(const StateVector& start, const SystemSpec& system, const DriveSpec& drive,
                             const MeterSegment& seg, const RegimeParams& params, double tau, double target) {
  StateVector s = closed_form::two_level_evolve(start, params, system, drive, seg, tau, target - seg.t_start,
                                                drive.t0 - seg.t_start);
  s.time = target;
  return s;
}

}  // namespace

MeasurementSchedule continuous(double tau, double result_e, MeterError delta_e) {
  require_time(tau, "measurement time");
  MeasurementSchedule s;
  s.segments.push_back(segment(0.0, tau, result_e, delta_e));
  s.tau_total_measurement = tau;
  s.tau_overridden = !delta_e.measured();
  return validate_schedule(s);
}

MeasurementSchedule pulsed(int n, double total_time, double duty, double result_e, MeterError delta_e) {
  if (n < 1) throw ValidationError("pulse count must be at least 1");
  require_time(total_time, "pulse train duration");
  if (!(duty > 0.0 && duty <= 1.0)) throw ValidationError("duty must lie in (0, 1]");
  const double coverage = n * duty;
  if (coverage > 1.0 + kContiguousTol) throw ValidationError("pulses do not fit: n * duty > 1");

  const double width = duty * total_time;
  MeasurementSchedule s;
  for (int k = 0; k < n; ++k) {
    const double start = total_time * k / n;
    const double next = (k + 1 == n) ? total_time : total_time * (k + 1) / n;
    double end = start + width;
    if (end >= next - kContiguousTol * total_time) end = next;
    s.segments.push_back(segment(start, end, result_e, delta_e));
    if (end < next) s.segments.push_back(segment(end, next, result_e, MeterError::unmeasured()));
  }
  s.tau_total_measurement = coverage >= 1.0 - kContiguousTol ? total_time : n * width;
  s.tau_overridden = !delta_e.measured();
  return validate_schedule(s);
}

MeasurementSchedule stroboscopic_qnd(int periods, double pulse_width, double result_e, MeterError delta_e,
                                     const SystemSpec& system, const DriveSpec& drive, std::optional<double> tail) {
  if (periods < 1) throw ValidationError("QND schedule needs at least one period");
  require_time(pulse_width, "pulse width");
  system.validate();
  if (system.levels() != 2) throw ValidationError("QND schedule needs a two-level system");
  const double period = closed_form::rabi_probability_period(system, drive);
  if (pulse_width >= 0.5 * period) throw ValidationError("pulse width must be below half the Rabi period");
  const double tail_length = tail.value_or(closed_form::pi_pulse_duration(system, drive));
  if (!(tail_length > 0.5 * pulse_width)) throw ValidationError("tail must extend past the last pulse");

  MeasurementSchedule s;
  double cursor = 0.0;
  for (int k = 1; k <= periods; ++k) {
    const double centre = k * period;
    const double a = centre - 0.5 * pulse_width;
    const double b = centre + 0.5 * pulse_width;
    s.segments.push_back(segment(cursor, a, result_e, MeterError::unmeasured()));
    s.segments.push_back(segment(a, b, result_e, delta_e));
    cursor = b;
  }
  s.segments.push_back(segment(cursor, periods * period + tail_length, result_e, MeterError::unmeasured()));
  s.tau_total_measurement = periods * pulse_width;
  s.tau_overridden = !delta_e.measured();
  return validate_schedule(s);
}

Trajectory run_schedule(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                        const MeasurementSchedule& schedule, const RunOptions& options) {
  validate_schedule(schedule);
  system.validate();
  drive.validate(system);
  if (state0.amplitudes.size() != system.levels()) throw ValidationError("state size does not match system");
  if (std::abs(state0.time - schedule.segments.front().t_start) > 1e-12)
    throw ValidationError("initial state time must equal the schedule start");
  if (options.method == Method::closed_form && system.levels() != 2)
    throw ValidationError("closed-form method needs exactly 2 levels");
  if (options.sample_interval && !(*options.sample_interval > 0.0))
    throw ValidationError("sample interval must be positive");
  state0.check_norm();

  Trajectory traj;
  StateVector state = state0;
  state.time = schedule.segments.front().t_start;
  traj.points.push_back({state, true});

  for (const auto& seg : schedule.segments) {
    state.time = seg.t_start;
    const double tau =
        options.tau_convention == TauConvention::total ? schedule.tau_total_measurement : seg.duration();

    std::vector<double> samples;
    if (options.sample_interval) {
      const double dt = *options.sample_interval;
      for (auto k = static_cast<long long>(std::floor(seg.t_start / dt)) + 1;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (t >= seg.t_end) break;
        if (t > seg.t_start) samples.push_back(t);
      }
    }

    if (options.method == Method::closed_form) {
      const RegimeParams params = regime_params(system, drive, seg, tau);
      for (double t : samples) traj.points.push_back({closed_form_step(state, system, drive, seg, params, tau, t), false});
      state = closed_form_step(state, system, drive, seg, params, tau, seg.t_end);
    } else {
      for (double t : samples) {
        state = propagator::propagate_to(state, system, drive, seg, tau, t, options.integrator);
        traj.points.push_back({state, false});
      }
      state = propagator::propagate_to(state, system, drive, seg, tau, seg.t_end, options.integrator);
    }
    traj.points.push_back({state, true});
  }
  return traj;
}

StateVector final_state(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                        const MeasurementSchedule& schedule, const RunOptions& options) {
  RunOptions opts = options;
  opts.sample_interval.reset();
  return run_schedule(state0, system, drive, schedule, opts).final_state();
}

}  // namespace zeno::schedules
