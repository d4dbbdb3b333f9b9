#pragma once

// Parameter sweeps behind the survival-probability surface, the pulse-count
// scan and the regime report. All tables are deterministic and independent of
// the worker count.

#include <optional>
#include <string>
#include <vector>

#include "zeno/core.hpp"
#include "zeno/schedules.hpp"

namespace zeno::experiments {

/// Two-level resonant setup shared by the sweeps; defaults are natural units.
struct TwoLevelSetup {
  double gap = 1.0;  // E2 - E1, with E1 = 0
  double v0 = 1.0;
  double hbar = 1.0;

  SystemSpec system() const { return SystemSpec::two_level(0.0, gap, hbar); }
  DriveSpec drive() const { return DriveSpec::resonant(system(), v0); }
};

/// Log-spaced ΔE/ΔE_crit axis.
struct ErrorAxis {
  int points = 100;
  double lo = 0.1;
  double hi = 10.0;

  std::vector<double> values() const;
};

struct Fig1Options {
  TwoLevelSetup setup;
  double tau = 6.283185307179586;  // 2 pi hbar / V0
  int t_points = 200;
  ErrorAxis errors;
  schedules::Method method = schedules::Method::closed_form;
  propagator::IntegratorConfig integrator;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct Fig1Row {
  double de_over_decrit;
  double t;
  double p1;
};

/// P1 on a (ΔE, t) grid, t linearly spaced on [0, τ]; rows ordered ΔE outer, t inner.
std::vector<Fig1Row> fig1_surface(const Fig1Options& options);

/// A pulse count, or continuous measurement when empty.
struct PulseSetting {
  std::optional<int> pulses;

  static PulseSetting continuous() { return {}; }
  static PulseSetting count(int n) { return {n}; }
  std::string label() const;
};

struct Fig2Options {
  TwoLevelSetup setup;
  std::vector<PulseSetting> pulse_settings{PulseSetting::count(1), PulseSetting::count(4), PulseSetting::count(16),
                                           PulseSetting::count(64), PulseSetting::count(100)};
  ErrorAxis errors;
  double duty = schedules::kDefaultDuty;
  schedules::Method method = schedules::Method::closed_form;
  schedules::TauConvention tau_convention = schedules::TauConvention::total;
  propagator::IntegratorConfig integrator;
  unsigned jobs = 0;
};

struct Fig2Row {
  PulseSetting setting;
  double de_over_decrit;
  double p12;
};

/// Transition probability at the end of a π pulse; rows ordered setting outer, ΔE inner.
/// ΔE is normalized by ΔE_crit evaluated at the π-pulse duration.
std::vector<Fig2Row> fig2_pulse_scan(const Fig2Options& options);

/// P(1 -> 2) after a π pulse for one setting and one ΔE/ΔE_crit.
double pi_pulse_transition(const Fig2Options& options, const PulseSetting& setting, double de_over_decrit);

struct RegimeReport {
  double de_crit;
  Regime regime;
  Complex w;
  double omega;
  double rabi_period;
};

/// Continuous measurement of length τ with result E = E1 + result_offset.
RegimeReport regime_report(const TwoLevelSetup& setup, double tau, MeterError delta_e, double result_offset = 0.0);

/// Mean spacing of interior local maxima; empty with fewer than two maxima.
std::optional<double> peak_spacing_period(const std::vector<double>& times, const std::vector<double>& values);

/// |X_k|, k = 0..N/2, of the discrete Fourier transform of `values`.
std::vector<double> dft_magnitudes(const std::vector<double>& values);

}  // namespace zeno::experiments
