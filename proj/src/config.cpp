#include "zeno/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace zeno {

namespace {

using nlohmann::json;

// Reads keys from one JSON object and rejects whatever was not consumed.
class ObjectReader {
public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string child(const std::string& key) const { return path_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& get(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) throw ConfigError(child(key), "missing required key");
    return node_.at(key);
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  double number(const std::string& key) { return as_number(get(key), child(key)); }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = find(key);
    if (!v) return std::nullopt;
    return as_number(*v, child(key));
  }

  std::string string(const std::string& key) {
    const json& v = get(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  long long integer(const std::string& key) {
    const json& v = get(key);
    if (!v.is_number_integer()) throw ConfigError(child(key), "expected an integer");
    return v.get<long long>();
  }

  void finish() const {
    for (const auto& [key, value] : node_.items())
      if (!seen_.count(key)) throw ConfigError(child(key), "unknown key");
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
    return d;
  }

private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

MeterError parse_meter_error(const json& v, const std::string& path) {
  if (v.is_null()) return MeterError::unmeasured();
  if (v.is_string()) {
    if (v.get<std::string>() == "unmeasured") return MeterError::unmeasured();
    throw ConfigError(path, "expected a positive number, \"unmeasured\" or null");
  }
  const double d = ObjectReader::as_number(v, path);
  if (!(d > 0.0)) throw ConfigError(path, "measurement error must be positive");
  return MeterError::of(d);
}

Complex parse_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {ObjectReader::as_number(v, path), 0.0};
  if (!v.is_array() || v.size() != 2) throw ConfigError(path, "expected a number or [re, im]");
  return {ObjectReader::as_number(v[0], path + "[0]"), ObjectReader::as_number(v[1], path + "[1]")};
}

SystemSpec parse_system(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  SystemSpec s;
  const json& energies = r.get("energies");
  if (!energies.is_array()) throw ConfigError(r.child("energies"), "expected an array");
  for (std::size_t i = 0; i < energies.size(); ++i)
    s.energies.push_back(ObjectReader::as_number(energies[i], r.child("energies") + "[" + std::to_string(i) + "]"));
  if (s.energies.size() < 2) throw ConfigError(r.child("energies"), "need at least 2 levels");
  s.hbar = r.optional_number("hbar").value_or(1.0);
  if (!(s.hbar > 0.0)) throw ConfigError(r.child("hbar"), "must be positive");
  r.finish();
  return s;
}

DriveSpec parse_drive(const json& node, const std::string& path, const SystemSpec& system) {
  ObjectReader r(node, path);
  const std::string kind = r.string("kind");
  DriveSpec d;
  if (kind == "none") {
    d = DriveSpec::none();
  } else if (kind == "resonant_two_level") {
    if (system.levels() != 2) throw ConfigError(r.child("kind"), "two-level drive needs exactly 2 levels");
    const double v0 = r.number("v0");
    if (v0 < 0.0) throw ConfigError(r.child("v0"), "must be non-negative");
    const double resonance = (system.energies[1] - system.energies[0]) / system.hbar;
    d = DriveSpec::two_level(v0, r.optional_number("omega").value_or(resonance), r.optional_number("t0").value_or(0.0));
  } else if (kind == "general_matrix") {
    const json& m = r.get("matrix");
    const std::string mpath = r.child("matrix");
    const std::size_t n = system.levels();
    if (!m.is_array() || m.size() != n) throw ConfigError(mpath, "expected an N x N array");
    ComplexMatrix matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string rpath = mpath + "[" + std::to_string(i) + "]";
      if (!m[i].is_array() || m[i].size() != n) throw ConfigError(rpath, "expected a row of length N");
      for (std::size_t k = 0; k < n; ++k) matrix(i, k) = parse_complex(m[i][k], rpath + "[" + std::to_string(k) + "]");
    }
    if (!matrix.is_hermitian()) throw ConfigError(mpath, "matrix is not Hermitian");
    d = DriveSpec::constant(std::move(matrix));
  } else {
    throw ConfigError(r.child("kind"), "expected none, resonant_two_level or general_matrix");
  }
  r.finish();
  return d;
}

MeasurementSchedule parse_schedule(const json& node, const std::string& path, const SystemSpec& system,
                                   const DriveSpec& drive) {
  ObjectReader r(node, path);
  MeasurementSchedule s;
  try {
    if (r.has("preset")) {
      const std::string preset = r.string("preset");
      const double e = r.number("E");
      const MeterError de = parse_meter_error(r.get("delta_E"), r.child("delta_E"));
      if (preset == "continuous") {
        s = schedules::continuous(r.number("tau"), e, de);
      } else if (preset == "pulsed") {
        const long long n = r.integer("n");
        if (n < 1 || n > 1'000'000) throw ConfigError(r.child("n"), "must be in [1, 1000000]");
        s = schedules::pulsed(static_cast<int>(n), r.number("T"), r.optional_number("duty").value_or(schedules::kDefaultDuty),
                              e, de);
      } else if (preset == "qnd") {
        const long long periods = r.integer("periods");
        if (periods < 1 || periods > 1'000'000) throw ConfigError(r.child("periods"), "must be in [1, 1000000]");
        s = schedules::stroboscopic_qnd(static_cast<int>(periods), r.number("pulse_width"), e, de, system, drive,
                                        r.optional_number("tail"));
      } else {
        throw ConfigError(r.child("preset"), "expected continuous, pulsed or qnd");
      }
    } else {
      const json& segs = r.get("segments");
      if (!segs.is_array()) throw ConfigError(r.child("segments"), "expected an array");
      for (std::size_t i = 0; i < segs.size(); ++i) {
        ObjectReader sr(segs[i], r.child("segments") + "[" + std::to_string(i) + "]");
        MeterSegment seg;
        seg.t_start = sr.number("t_start");
        seg.t_end = sr.number("t_end");
        seg.result_e = sr.number("result_E");
        seg.delta_e = parse_meter_error(sr.get("delta_E"), sr.child("delta_E"));
        sr.finish();
        s.segments.push_back(seg);
      }
      if (auto tau = r.optional_number("tau_total_measurement")) {
        s.tau_total_measurement = *tau;
        s.tau_overridden = true;
      } else {
        s.tau_total_measurement = s.measured_duration();
        // A record without any measured segment still needs a positive τ.
        if (s.tau_total_measurement <= 0.0) {
          s.tau_total_measurement = s.t_total() > 0.0 ? s.t_total() : 1.0;
          s.tau_overridden = true;
        }
      }
      validate_schedule(s);
    }
  } catch (const ScheduleError& e) {
    throw ConfigError(r.child("segments") + "[" + std::to_string(e.index()) + "]", e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
  r.finish();
  return s;
}

}  // namespace

schedules::Method parse_method(const std::string& name) {
  if (name == "closed-form" || name == "closed_form") return schedules::Method::closed_form;
  if (name == "rk4") return schedules::Method::rk4;
  throw ValidationError("unknown method '" + name + "' (expected closed-form or rk4)");
}

schedules::TauConvention parse_tau_convention(const std::string& name) {
  if (name == "total") return schedules::TauConvention::total;
  if (name == "per-segment" || name == "per_segment") return schedules::TauConvention::per_segment;
  throw ValidationError("unknown tau convention '" + name + "' (expected total or per-segment)");
}

EvolveConfig parse_evolve_config(const json& doc) {
  ObjectReader r(doc, "$");
  const json& version = r.get("version");
  if (!version.is_number_integer() || version.get<long long>() != 1)
    throw ConfigError(r.child("version"), "unsupported schema version (expected 1)");

  EvolveConfig cfg;
  cfg.system = parse_system(r.get("system"), r.child("system"));
  if (const json* drive = r.find("drive"))
    cfg.drive = parse_drive(*drive, r.child("drive"), cfg.system);
  cfg.schedule = parse_schedule(r.get("schedule"), r.child("schedule"), cfg.system, cfg.drive);

  if (const json* m = r.find("method")) {
    if (!m->is_string()) throw ConfigError(r.child("method"), "expected a string");
    try {
      cfg.run.method = parse_method(m->get<std::string>());
    } catch (const ValidationError& e) {
      throw ConfigError(r.child("method"), e.what());
    }
  }
  if (const json* tc = r.find("tau_convention")) {
    if (!tc->is_string()) throw ConfigError(r.child("tau_convention"), "expected a string");
    try {
      cfg.run.tau_convention = parse_tau_convention(tc->get<std::string>());
    } catch (const ValidationError& e) {
      throw ConfigError(r.child("tau_convention"), e.what());
    }
  }
  if (const json* integ = r.find("integrator")) {
    ObjectReader ir(*integ, r.child("integrator"));
    if (auto step = ir.optional_number("step")) {
      if (!(*step > 0.0)) throw ConfigError(ir.child("step"), "must be positive");
      cfg.run.integrator.step = *step;
    }
    if (ir.has("max_steps")) {
      const long long max_steps = ir.integer("max_steps");
      if (max_steps < 1) throw ConfigError(ir.child("max_steps"), "must be positive");
      cfg.run.integrator.max_steps = static_cast<std::uint64_t>(max_steps);
    }
    ir.finish();
  }
  if (auto dt = r.optional_number("sample_interval")) {
    if (!(*dt > 0.0)) throw ConfigError(r.child("sample_interval"), "must be positive");
    cfg.run.sample_interval = *dt;
  }

  const std::size_t n = cfg.system.levels();
  if (const json* init = r.find("initial_state")) {
    const std::string ipath = r.child("initial_state");
    if (!init->is_array() || init->size() != n) throw ConfigError(ipath, "expected one amplitude per level");
    cfg.initial_state.amplitudes.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      cfg.initial_state.amplitudes[i] = parse_complex((*init)[i], ipath + "[" + std::to_string(i) + "]");
    if (cfg.initial_state.norm_squared() < kNormUnderflow) throw ConfigError(ipath, "initial state has zero norm");
  } else {
    cfg.initial_state = StateVector::basis(n, 0);
  }
  r.finish();
  return cfg;
}

EvolveConfig load_evolve_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_evolve_config(doc);
}

}  // namespace zeno
