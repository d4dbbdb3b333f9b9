#include "zeno/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zeno {

namespace {

constexpr double kTilingTol = 1e-12;

std::string segment_message(std::size_t index, const std::string& what) {
  std::ostringstream os;
  os << "segment " << index << ": " << what;
  return os.str();
}

}  // namespace

SystemSpec SystemSpec::two_level(double e1, double e2, double hbar) { return SystemSpec{{e1, e2}, hbar}; }

void SystemSpec::validate() const {
  if (energies.size() < 2) throw ValidationError("system needs at least 2 levels");
  for (double e : energies)
    if (!std::isfinite(e)) throw ValidationError("system energies must be finite");
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw ValidationError("hbar must be positive and finite");
}

bool ComplexMatrix::is_hermitian(double rel_tol) const {
  double scale = 0.0;
  for (const auto& z : data) scale = std::max(scale, std::abs(z));
  const double tol = rel_tol * std::max(scale, 1.0);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = r; c < dim; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

DriveSpec DriveSpec::none() { return DriveSpec{}; }

DriveSpec DriveSpec::two_level(double v0, double omega, double t0) {
  DriveSpec d;
  d.kind = Kind::resonant_two_level;
  d.v0 = v0;
  d.omega = omega;
  d.t0 = t0;
  return d;
}

DriveSpec DriveSpec::resonant(const SystemSpec& system, double v0, double t0) {
  system.validate();
  if (system.levels() != 2) throw ValidationError("resonant drive needs exactly 2 levels");
  return two_level(v0, (system.energies[1] - system.energies[0]) / system.hbar, t0);
}

DriveSpec DriveSpec::general(std::function<ComplexMatrix(double)> matrix) {
  DriveSpec d;
  d.kind = Kind::general_matrix;
  d.matrix = std::move(matrix);
  return d;
}

DriveSpec DriveSpec::constant(ComplexMatrix matrix) {
  if (!matrix.is_hermitian()) throw ValidationError("drive matrix is not Hermitian");
  return general([m = std::move(matrix)](double) { return m; });
}

ComplexMatrix DriveSpec::at(double t, std::size_t levels) const {
  switch (kind) {
    case Kind::none:
      return ComplexMatrix(levels);
    case Kind::resonant_two_level: {
      ComplexMatrix m(2);
      m(0, 1) = v0 * std::exp(Complex(0.0, omega * (t - t0)));
      m(1, 0) = std::conj(m(0, 1));
      return m;
    }
    case Kind::general_matrix: {
      ComplexMatrix m = matrix(t);
      if (m.dim != levels) throw ValidationError("drive matrix dimension does not match the system");
      if (!m.is_hermitian()) {
        std::ostringstream os;
        os << "drive matrix is not Hermitian at t=" << t;
        throw ValidationError(os.str());
      }
      return m;
    }
  }
  return ComplexMatrix(levels);
}

void DriveSpec::validate(const SystemSpec& system) const {
  switch (kind) {
    case Kind::none:
      break;
    case Kind::resonant_two_level:
      if (system.levels() != 2) throw ValidationError("two-level drive on a system without exactly 2 levels");
      if (!(v0 >= 0.0) || !std::isfinite(v0)) throw ValidationError("drive v0 must be non-negative");
      if (!std::isfinite(omega) || !std::isfinite(t0)) throw ValidationError("drive omega and t0 must be finite");
      break;
    case Kind::general_matrix:
      if (!matrix) throw ValidationError("general drive has no matrix function");
      (void)at(0.0, system.levels());
      break;
  }
}

double MeasurementSchedule::measured_duration() const {
  double sum = 0.0;
  for (const auto& s : segments)
    if (s.measured()) sum += s.duration();
  return sum;
}

const MeasurementSchedule& validate_schedule(const MeasurementSchedule& schedule) {
  using K = ScheduleError::Kind;
  const auto& segs = schedule.segments;
  if (segs.empty()) throw ScheduleError(K::empty, 0, "schedule has no segments");
  if (std::abs(segs.front().t_start) > kTilingTol)
    throw ScheduleError(K::gap, 0, segment_message(0, "schedule must start at t=0"));

  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    if (!std::isfinite(s.t_start) || !std::isfinite(s.t_end) || !(s.t_end > s.t_start))
      throw ScheduleError(K::non_positive_duration, i, segment_message(i, "non-positive duration"));
    if (!std::isfinite(s.result_e))
      throw ScheduleError(K::non_positive_duration, i, segment_message(i, "measurement result is not finite"));
    if (s.measured() && !(s.delta_e.value() > 0.0 && std::isfinite(s.delta_e.value())))
      throw ScheduleError(K::non_positive_error, i, segment_message(i, "measurement error must be positive"));
    if (i > 0) {
      const double jump = s.t_start - segs[i - 1].t_end;
      if (jump > kTilingTol) throw ScheduleError(K::gap, i, segment_message(i, "gap before segment"));
      if (jump < -kTilingTol) throw ScheduleError(K::overlap, i, segment_message(i, "overlaps previous segment"));
    }
  }

  const double tau = schedule.tau_total_measurement;
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw ScheduleError(K::tau_mismatch, 0, "total measurement time must be positive");
  if (!schedule.tau_overridden) {
    const double measured = schedule.measured_duration();
    if (measured > 0.0 && std::abs(tau - measured) > kTilingTol * std::max(1.0, measured))
      throw ScheduleError(K::tau_mismatch, 0, "total measurement time differs from the measured duration");
  }
  return schedule;
}

double StateVector::norm_squared() const noexcept {
  double sum = 0.0;
  for (const auto& c : amplitudes) sum += std::norm(c);
  return sum;
}

void StateVector::check_norm() const {
  const double n = norm_squared();
  if (!std::isfinite(n)) throw NumericError("state norm is not finite");
  if (n < kNormUnderflow) throw NumericError("state norm underflowed below 1e-300");
}

StateVector StateVector::basis(std::size_t levels, std::size_t n, double t) {
  if (n >= levels) throw ValidationError("basis index out of range");
  StateVector s{ComplexVector(levels), t};
  s.amplitudes[n] = 1.0;
  return s;
}

double damping_rate(double level_energy, double result_e, const MeterError& delta_e, double tau) {
  if (!delta_e.measured()) return 0.0;
  const double d = level_energy - result_e;
  const double de = delta_e.value();
  return d * d / (tau * de * de);
}

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::underdamped: return "underdamped";
    case Regime::critical: return "critical";
    case Regime::overdamped: return "overdamped";
  }
  return "unknown";
}

Regime classify(Complex w_squared, double p) {
  const double tol = 1e-12 * p * p;
  if (w_squared.real() > tol) return Regime::underdamped;
  if (w_squared.real() < -tol) return Regime::overdamped;
  return Regime::critical;
}

RegimeParams regime_params(const SystemSpec& system, const DriveSpec& drive, const MeterSegment& segment,
                           double tau) {
  system.validate();
  if (system.levels() != 2) throw ValidationError("regime parameters need exactly 2 levels");
  if (drive.kind == DriveSpec::Kind::general_matrix)
    throw ValidationError("regime parameters need a two-level drive");
  if (segment.measured() && !(tau > 0.0)) throw ValidationError("tau must be positive");

  const double e1 = system.energies[0];
  const double e2 = system.energies[1];
  const double hbar = system.hbar;
  const bool driven = drive.kind == DriveSpec::Kind::resonant_two_level;

  RegimeParams r;
  r.p = driven ? drive.v0 / hbar : 0.0;
  if (segment.measured()) {
    const double d1 = e1 - segment.result_e;
    const double d2 = e2 - segment.result_e;
    const double de = segment.delta_e.value();
    r.omega = (d2 * d2 - d1 * d1) / (2.0 * tau * de * de);
  }
  const double omega_drive = driven ? drive.omega : 0.0;
  r.q = Complex((omega_drive - (e2 - e1) / hbar) / 2.0, r.omega);
  r.w_squared = r.q * r.q + r.p * r.p;
  r.w = std::sqrt(r.w_squared);
  r.regime = classify(r.w_squared, r.p);
  return r;
}

}  // namespace zeno
