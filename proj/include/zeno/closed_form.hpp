#pragma once

// Exact two-level solutions under the measurement-damped effective Hamiltonian.

#include "zeno/core.hpp"

namespace zeno::closed_form {

/// c_n(t) = exp(-i E_n t/hbar - (E_n - E)^2 t / (τ ΔE^2)) c_n(0), no drive.
/// `t` is the elapsed time; the returned state carries state0.time + t.
StateVector free_decay_coefficients(const StateVector& state0, const SystemSpec& system, double result_e,
                                    const MeterError& delta_e, double tau, double t);

/// Driven, measured two-level amplitudes after local time `t`; E and ΔE come
/// from `segment`, whose times are not used.
///
/// The segment clock starts at 0; `phase_origin` is the drive phase origin t0
/// expressed on that local clock (global t0 minus the segment start time).
/// Uses an overflow-free scaled form of cos(wt) and sin(wt)/w that stays
/// accurate on both sides of critical damping and at w = 0.
StateVector two_level_evolve(const StateVector& state0, const RegimeParams& params, const SystemSpec& system,
                             const DriveSpec& drive, const MeterSegment& segment, double tau, double t,
                             double phase_origin);

/// Normalized P1(t) for the resonant case starting in |1> with record E = E1.
/// P1(0) = 1 by continuity; negative t throws.
double survival_probability(const RegimeParams& params, double t);

/// ΔE at which w = 0: (E2 - E1) sqrt(hbar / (2 V0 τ)).
double critical_error(const SystemSpec& system, const DriveSpec& drive, double tau);

/// Duration of a resonant π pulse, pi hbar / (2 V0).
double pi_pulse_duration(const SystemSpec& system, const DriveSpec& drive);

/// Period of P1 in the unmeasured limit, pi hbar / V0.
double rabi_probability_period(const SystemSpec& system, const DriveSpec& drive);

}  // namespace zeno::closed_form
