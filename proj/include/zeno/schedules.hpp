#pragma once

// Measurement strategies (continuous, pulsed, stroboscopic) and chained
// propagation of a state across a schedule.

#include <optional>
#include <vector>

#include "zeno/core.hpp"
#include "zeno/propagator.hpp"

namespace zeno::schedules {

/// Fraction of T covered by each pulse in the pulsed strategy by default.
inline constexpr double kDefaultDuty = 1e-2;

/// One measured segment [0, tau].
MeasurementSchedule continuous(double tau, double result_e, MeterError delta_e);

/// n pulses of width duty*T starting at kT/n, free evolution in between.
/// τ is the total measured time n*duty*T; zero-length gaps are elided.
MeasurementSchedule pulsed(int n, double total_time, double duty, double result_e, MeterError delta_e);

/// Pulses of width `pulse_width` centred at k*pi*hbar/V0 (k = 1..periods),
/// followed by an unmeasured tail of length `tail` (a π pulse by default).
MeasurementSchedule stroboscopic_qnd(int periods, double pulse_width, double result_e, MeterError delta_e,
                                     const SystemSpec& system, const DriveSpec& drive,
                                     std::optional<double> tail = std::nullopt);

enum class Method { closed_form, rk4 };

/// Which τ enters the damping rate on each segment.
enum class TauConvention { total, per_segment };

struct RunOptions {
  Method method = Method::closed_form;
  TauConvention tau_convention = TauConvention::total;
  propagator::IntegratorConfig integrator;
  /// Dense output spacing; segment boundaries are always recorded.
  std::optional<double> sample_interval;
};

struct TrajectoryPoint {
  StateVector state;
  bool boundary = false;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;

  const StateVector& final_state() const { return points.back().state; }
};

/// Advance state0 through every segment of the schedule.
Trajectory run_schedule(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                        const MeasurementSchedule& schedule, const RunOptions& options = {});

/// Final state only; equivalent to run_schedule(...).final_state().
StateVector final_state(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                        const MeasurementSchedule& schedule, const RunOptions& options = {});

}  // namespace zeno::schedules
