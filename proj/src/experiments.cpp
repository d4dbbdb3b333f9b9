#include "zeno/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

#include "zeno/closed_form.hpp"
#include "zeno/propagator.hpp"

namespace zeno::experiments {

namespace {

// Runs task(i) for i in [0, count) on up to `jobs` threads. Tasks write to
// disjoint slots, so output order never depends on scheduling.
template <typename Task>
void parallel_for(std::size_t count, unsigned jobs, Task task) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned j = 0; j < jobs; ++j) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> linear_times(double tau, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  if (points == 1) {
    t[0] = tau;
    return t;
  }
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = tau * i / (points - 1);
  return t;
}

}  // namespace

std::vector<double> ErrorAxis::values() const {
  if (points < 1) throw ValidationError("error axis needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) throw ValidationError("error range needs 0 < lo <= hi");
  std::vector<double> v(static_cast<std::size_t>(points));
  if (points == 1 || lo == hi) {
    std::fill(v.begin(), v.end(), lo);
    return v;
  }
  const double log_lo = std::log(lo);
  const double log_hi = std::log(hi);
  for (int i = 0; i < points; ++i)
    v[static_cast<std::size_t>(i)] = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::vector<Fig1Row> fig1_surface(const Fig1Options& options) {
  if (options.t_points < 1) throw ValidationError("t grid needs at least one point");
  if (!(options.tau > 0.0)) throw ValidationError("tau must be positive");
  const std::vector<double> ratios = options.errors.values();
  const std::vector<double> times = linear_times(options.tau, options.t_points);

  const SystemSpec system = options.setup.system();
  const DriveSpec drive = options.setup.drive();
  const double de_crit = closed_form::critical_error(system, drive, options.tau);
  const double e1 = system.energies[0];

  std::vector<Fig1Row> rows(ratios.size() * times.size());
  parallel_for(ratios.size(), options.jobs, [&](std::size_t i) {
    const MeterSegment seg{0.0, options.tau, e1, MeterError::of(ratios[i] * de_crit)};
    Fig1Row* out = rows.data() + i * times.size();
    if (options.method == schedules::Method::closed_form) {
      const RegimeParams params = regime_params(system, drive, seg, options.tau);
      for (std::size_t j = 0; j < times.size(); ++j)
        out[j] = {ratios[i], times[j], closed_form::survival_probability(params, times[j])};
      return;
    }
    StateVector state = StateVector::basis(2, 0);
    for (std::size_t j = 0; j < times.size(); ++j) {
      state = propagator::propagate_to(state, system, drive, seg, options.tau, times[j], options.integrator);
      out[j] = {ratios[i], times[j], propagator::probabilities(state)[0]};
    }
  });
  return rows;
}

std::string PulseSetting::label() const { return pulses ? std::to_string(*pulses) : "continuous"; }

double pi_pulse_transition(const Fig2Options& options, const PulseSetting& setting, double de_over_decrit) {
  const SystemSpec system = options.setup.system();
  const DriveSpec drive = options.setup.drive();
  const double duration = closed_form::pi_pulse_duration(system, drive);
  const double de = de_over_decrit * closed_form::critical_error(system, drive, duration);
  const double e1 = system.energies[0];

  const MeasurementSchedule schedule = setting.pulses
                                           ? schedules::pulsed(*setting.pulses, duration, options.duty, e1, MeterError::of(de))
                                           : schedules::continuous(duration, e1, MeterError::of(de));
  schedules::RunOptions run;
  run.method = options.method;
  run.tau_convention = options.tau_convention;
  run.integrator = options.integrator;
  const StateVector end = schedules::final_state(StateVector::basis(2, 0), system, drive, schedule, run);
  return propagator::probabilities(end)[1];
}

std::vector<Fig2Row> fig2_pulse_scan(const Fig2Options& options) {
  if (options.pulse_settings.empty()) throw ValidationError("no pulse settings given");
  const std::vector<double> ratios = options.errors.values();
  const std::size_t per_setting = ratios.size();

  std::vector<Fig2Row> rows(options.pulse_settings.size() * per_setting);
  parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
    const PulseSetting& setting = options.pulse_settings[i / per_setting];
    const double ratio = ratios[i % per_setting];
    rows[i] = {setting, ratio, pi_pulse_transition(options, setting, ratio)};
  });
  return rows;
}

RegimeReport regime_report(const TwoLevelSetup& setup, double tau, MeterError delta_e, double result_offset) {
  const SystemSpec system = setup.system();
  const DriveSpec drive = setup.drive();
  const MeterSegment seg{0.0, tau, system.energies[0] + result_offset, delta_e};
  const RegimeParams params = regime_params(system, drive, seg, tau);
  return {closed_form::critical_error(system, drive, tau), params.regime, params.w, params.omega,
          closed_form::rabi_probability_period(system, drive)};
}

std::optional<double> peak_spacing_period(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw ValidationError("times and values differ in length");
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < values.size(); ++i)
    if (values[i] > values[i - 1] && values[i] >= values[i + 1]) peaks.push_back(times[i]);
  if (peaks.size() < 2) return std::nullopt;
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

std::vector<double> dft_magnitudes(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> mags(n / 2 + 1);
  for (std::size_t k = 0; k < mags.size(); ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
      acc += values[j] * Complex(std::cos(angle), std::sin(angle));
    }
    mags[k] = std::abs(acc);
  }
  return mags;
}

}  // namespace zeno::experiments
