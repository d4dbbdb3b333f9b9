#pragma once

// Fixed-step RK4 integration of the measured, driven coefficient equation
// for any number of levels.

#include <cstdint>
#include <functional>
#include <optional>

#include "zeno/core.hpp"

namespace zeno::propagator {

struct IntegratorConfig {
  /// Fixed step; when empty, segment_duration/1000 capped at 1e-3 hbar/V0 for driven runs.
  std::optional<double> step;
  std::uint64_t max_steps = 100'000'000;
};

/// Step actually used on `segment`, never longer than the segment itself.
double resolve_step(const IntegratorConfig& config, const MeterSegment& segment, const SystemSpec& system,
                    const DriveSpec& drive);

/// dc_n/dt = [-i E_n/hbar - (E_n - E)^2/(τ ΔE^2)] c_n - (i/hbar) sum_k V_nk(t) c_k
ComplexVector rhs(const StateVector& state, const SystemSpec& system, const DriveSpec& drive,
                  const MeterSegment& segment, double tau, double t);

using Derivative = std::function<ComplexVector(const StateVector&, double)>;

/// One classical RK4 step of size h (negative h integrates backwards).
StateVector rk4_step(const StateVector& state, double h, const Derivative& derivative);

/// Called after every accepted step.
using StepObserver = std::function<void(const StateVector&)>;

/// Integrate from state0.time (== segment.t_start) to `t_end` inside the segment.
/// Steps have the configured size; the last one is shortened to land on t_end.
StateVector propagate_to(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                         const MeterSegment& segment, double tau, double t_end, const IntegratorConfig& config,
                         const StepObserver& observer = {});

/// Integrate across the whole segment; the result's time is exactly segment.t_end.
StateVector propagate_segment(const StateVector& state0, const SystemSpec& system, const DriveSpec& drive,
                              const MeterSegment& segment, double tau, const IntegratorConfig& config,
                              const StepObserver& observer = {});

/// P_n = |c_n|^2 / sum_k |c_k|^2.
std::vector<double> probabilities(const StateVector& state);

}  // namespace zeno::propagator
