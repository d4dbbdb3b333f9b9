#pragma once

// Domain types shared by the whole simulator: level structure, drive,
// piecewise-constant measurement record, state and derived regime parameters.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeno {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid input: bad schedule, bad parameters, precondition violated.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// The simulation left double precision or exceeded its step budget.
class NumericError : public Error {
public:
  using Error::Error;
};

/// Schedule invariant violation, carrying the offending segment index.
class ScheduleError : public ValidationError {
public:
  enum class Kind { empty, non_positive_duration, non_positive_error, gap, overlap, tau_mismatch };

  ScheduleError(Kind kind, std::size_t index, const std::string& what)
      : ValidationError(what), kind_(kind), index_(index) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t index() const noexcept { return index_; }

private:
  Kind kind_;
  std::size_t index_;
};

/// Squared norm below which a state is considered lost to underflow.
inline constexpr double kNormUnderflow = 1e-300;

/// Eigenenergies of the unmeasured, unperturbed Hamiltonian, indexed by position.
struct SystemSpec {
  std::vector<double> energies;
  double hbar = 1.0;

  std::size_t levels() const noexcept { return energies.size(); }

  /// Two-level system with the given energies.
  static SystemSpec two_level(double e1, double e2, double hbar = 1.0);
  /// Throws ValidationError unless there are >= 2 finite levels and hbar > 0.
  void validate() const;
};

/// Dense row-major complex matrix, used for general drives.
struct ComplexMatrix {
  std::size_t dim = 0;
  ComplexVector data;

  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : dim(n), data(n * n) {}

  Complex& operator()(std::size_t r, std::size_t c) { return data[r * dim + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data[r * dim + c]; }

  bool is_hermitian(double rel_tol = 1e-12) const;
};

/// Perturbation V(t) in the H0 eigenbasis.
struct DriveSpec {
  enum class Kind { none, resonant_two_level, general_matrix };

  Kind kind = Kind::none;
  double v0 = 0.0;     // amplitude V0 (energy)
  double omega = 0.0;  // angular frequency
  double t0 = 0.0;     // global phase origin
  std::function<ComplexMatrix(double)> matrix;  // general_matrix only

  static DriveSpec none();
  /// V12 = V0 exp(i omega (t - t0)), V21 = conj(V12), diagonal zero.
  static DriveSpec two_level(double v0, double omega, double t0 = 0.0);
  /// Resonant drive for the given two-level system (hbar omega = E2 - E1).
  static DriveSpec resonant(const SystemSpec& system, double v0, double t0 = 0.0);
  static DriveSpec general(std::function<ComplexMatrix(double)> matrix);
  /// Constant Hermitian matrix drive.
  static DriveSpec constant(ComplexMatrix matrix);

  /// Matrix element V_nk(t). Throws ValidationError on non-Hermitian general drives.
  ComplexMatrix at(double t, std::size_t levels) const;

  void validate(const SystemSpec& system) const;
};

/// Instrument error ΔE, or the unmeasured sentinel (ΔE = ∞, no damping).
class MeterError {
public:
  static MeterError unmeasured() noexcept { return MeterError(); }
  static MeterError of(double delta_e) noexcept { return MeterError(delta_e); }

  bool measured() const noexcept { return value_.has_value(); }
  /// Finite ΔE; only valid when measured().
  double value() const { return value_.value(); }

  friend bool operator==(const MeterError&, const MeterError&) = default;

private:
  MeterError() = default;
  explicit MeterError(double v) : value_(v) {}
  std::optional<double> value_;
};

/// One piece of the measurement record with constant result E and error ΔE.
struct MeterSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  double result_e = 0.0;
  MeterError delta_e = MeterError::unmeasured();

  double duration() const noexcept { return t_end - t_start; }
  bool measured() const noexcept { return delta_e.measured(); }
};

/// Gap-free tiling of [0, t_total] by meter segments, plus the total measurement time τ.
struct MeasurementSchedule {
  std::vector<MeterSegment> segments;
  double tau_total_measurement = 0.0;
  /// When true, tau_total_measurement need not equal the measured duration.
  bool tau_overridden = false;

  double t_total() const { return segments.empty() ? 0.0 : segments.back().t_end; }
  double measured_duration() const;
};

/// Throws ScheduleError naming the offending segment; returns the schedule unchanged otherwise.
const MeasurementSchedule& validate_schedule(const MeasurementSchedule& schedule);

/// Unnormalized amplitudes c_n(t) in the H0 eigenbasis.
struct StateVector {
  ComplexVector amplitudes;
  double time = 0.0;

  double norm_squared() const noexcept;
  /// Throws NumericError when the squared norm is below kNormUnderflow or not finite.
  void check_norm() const;

  /// |n> at time t for a system with `levels` levels (n is zero-based).
  static StateVector basis(std::size_t levels, std::size_t n, double t = 0.0);
};

/// Damping rate (E_n - E)^2 / (τ ΔE^2); exactly zero when unmeasured.
double damping_rate(double level_energy, double result_e, const MeterError& delta_e, double tau);

enum class Regime { underdamped, critical, overdamped };

const char* to_string(Regime regime);

/// Two-level parameters p, q, Ω, w and the damping regime they imply.
struct RegimeParams {
  double p = 0.0;
  Complex q;
  double omega = 0.0;  // Ω
  Complex w;
  Complex w_squared;
  Regime regime = Regime::underdamped;
};

/// Classification by sign of Re(w^2) with tolerance 1e-12 p^2.
Regime classify(Complex w_squared, double p);

RegimeParams regime_params(const SystemSpec& system, const DriveSpec& drive, const MeterSegment& segment,
                           double tau);

}  // namespace zeno
