#include "zeno/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "zeno/closed_form.hpp"
#include "zeno/config.hpp"
#include "zeno/experiments.hpp"
#include "zeno/propagator.hpp"
#include "zeno/table.hpp"

namespace zeno::cli {

namespace {

// Usage error that already names the offending flag.
class FlagError : public ValidationError {
public:
  FlagError(const std::string& flag, const std::string& message) : ValidationError(flag + ": " + message) {}
};

struct OutputFlags {
  std::string format = "csv";
  std::string output;
  bool seedless = false;
};

struct SetupFlags {
  double gap = 1.0;
  double v0 = 1.0;
  double hbar = 1.0;
};

void add_output_flags(CLI::App* cmd, OutputFlags& flags) {
  cmd->add_option("--format", flags.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output", flags.output, "Output file (default: standard output)");
  cmd->add_flag("--seedless", flags.seedless, "Accepted for scripts; every run is deterministic");
}

void add_setup_flags(CLI::App* cmd, SetupFlags& flags) {
  cmd->add_option("--gap", flags.gap, "Level spacing E2 - E1")->check(CLI::PositiveNumber);
  cmd->add_option("--v0", flags.v0, "Drive amplitude V0")->check(CLI::PositiveNumber);
  cmd->add_option("--hbar", flags.hbar, "Reduced Planck constant")->check(CLI::PositiveNumber);
}

experiments::TwoLevelSetup to_setup(const SetupFlags& flags) { return {flags.gap, flags.v0, flags.hbar}; }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_number(const std::string& text, const std::string& flag) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  double v = 0.0;
  if (!(is >> v) || !(is >> std::ws).eof() || !std::isfinite(v)) throw FlagError(flag, "'" + text + "' is not a number");
  return v;
}

experiments::ErrorAxis parse_error_axis(const std::string& range, int points) {
  const auto parts = split(range, ',');
  if (parts.size() != 2) throw FlagError("--de-range", "expected LO,HI");
  experiments::ErrorAxis axis{points, parse_number(parts[0], "--de-range"), parse_number(parts[1], "--de-range")};
  if (!(axis.lo > 0.0) || axis.hi < axis.lo) throw FlagError("--de-range", "need 0 < LO <= HI");
  return axis;
}

std::vector<experiments::PulseSetting> parse_pulses(const std::string& list) {
  std::vector<experiments::PulseSetting> settings;
  for (const auto& item : split(list, ',')) {
    if (item == "continuous") {
      settings.push_back(experiments::PulseSetting::continuous());
      continue;
    }
    const double v = parse_number(item, "--pulses");
    if (v < 1.0 || v > 1e6 || v != std::floor(v)) throw FlagError("--pulses", "'" + item + "' is not a pulse count");
    settings.push_back(experiments::PulseSetting::count(static_cast<int>(v)));
  }
  if (settings.empty()) throw FlagError("--pulses", "empty list");
  return settings;
}

schedules::Method method_flag(const std::string& name) {
  try {
    return parse_method(name);
  } catch (const ValidationError& e) {
    throw FlagError("--method", e.what());
  }
}

void emit(const Table& table, const OutputFlags& flags, std::ostream& out) {
  std::ofstream file;
  std::ostream* os = &out;
  if (!flags.output.empty()) {
    file.open(flags.output, std::ios::binary);
    if (!file) throw FlagError("--output", "cannot open '" + flags.output + "' for writing");
    os = &file;
  }
  os->imbue(std::locale::classic());
  if (flags.format == "json")
    write_json(*os, table);
  else
    write_csv(*os, table);
  os->flush();
}

struct Fig1Flags {
  int t_points = 200;
  int de_points = 100;
  std::string de_range = "0.1,10";
  double tau = 2.0 * std::numbers::pi;
  std::string method = "closed-form";
  std::optional<double> step;
  unsigned jobs = 0;
  SetupFlags setup;
  OutputFlags output;
};

Table fig1_table(const Fig1Flags& f) {
  experiments::Fig1Options opts;
  opts.setup = to_setup(f.setup);
  opts.tau = f.tau;
  opts.t_points = f.t_points;
  opts.errors = parse_error_axis(f.de_range, f.de_points);
  opts.method = method_flag(f.method);
  opts.integrator.step = f.step;
  opts.jobs = f.jobs;

  Table table{{"de_over_decrit", "t", "p1"}, {}};
  for (const auto& row : experiments::fig1_surface(opts)) table.rows.push_back({row.de_over_decrit, row.t, row.p1});
  return table;
}

struct Fig2Flags {
  std::string pulses = "1,4,16,64,continuous";
  int de_points = 100;
  std::string de_range = "0.1,10";
  double duty = schedules::kDefaultDuty;
  std::string method = "closed-form";
  std::string tau_convention = "total";
  std::optional<double> step;
  unsigned jobs = 0;
  SetupFlags setup;
  OutputFlags output;
};

Table fig2_table(const Fig2Flags& f) {
  experiments::Fig2Options opts;
  opts.setup = to_setup(f.setup);
  opts.pulse_settings = parse_pulses(f.pulses);
  opts.errors = parse_error_axis(f.de_range, f.de_points);
  if (!(f.duty > 0.0)) throw FlagError("--duty", "must be positive");
  opts.duty = f.duty;
  for (const auto& s : opts.pulse_settings)
    if (s.pulses && *s.pulses * f.duty > 1.0 + 1e-12)
      throw FlagError("--duty", "pulses do not fit: " + std::to_string(*s.pulses) + " x duty exceeds the pulse train");
  opts.method = method_flag(f.method);
  try {
    opts.tau_convention = parse_tau_convention(f.tau_convention);
  } catch (const ValidationError& e) {
    throw FlagError("--tau-convention", e.what());
  }
  opts.integrator.step = f.step;
  opts.jobs = f.jobs;

  Table table{{"pulses", "de_over_decrit", "p12"}, {}};
  for (const auto& row : experiments::fig2_pulse_scan(opts)) {
    Cell label = row.setting.pulses ? Cell(static_cast<long long>(*row.setting.pulses)) : Cell(std::string("continuous"));
    table.rows.push_back({label, row.de_over_decrit, row.p12});
  }
  return table;
}

struct EvolveFlags {
  std::string config;
  std::string method;
  std::optional<double> sample_interval;
  std::optional<double> step;
  OutputFlags output;
};

Table evolve_table(const EvolveFlags& f) {
  EvolveConfig cfg = load_evolve_config(f.config);
  if (!f.method.empty()) cfg.run.method = method_flag(f.method);
  if (f.sample_interval) cfg.run.sample_interval = f.sample_interval;
  if (f.step) cfg.run.integrator.step = f.step;

  const auto traj = schedules::run_schedule(cfg.initial_state, cfg.system, cfg.drive, cfg.schedule, cfg.run);
  Table table;
  table.columns.push_back("t");
  for (std::size_t n = 1; n <= cfg.system.levels(); ++n) table.columns.push_back("p_" + std::to_string(n));
  table.columns.push_back("norm");

  for (const auto& point : traj.points) {
    std::vector<Cell> row{point.state.time};
    for (double p : propagator::probabilities(point.state)) row.emplace_back(p);
    row.emplace_back(point.state.norm_squared());
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct RegimeFlags {
  double tau = 2.0 * std::numbers::pi;
  std::optional<double> de_ratio;
  std::optional<double> delta_e;
  bool unmeasured = false;
  double result_offset = 0.0;
  SetupFlags setup;
  OutputFlags output;
};

Table regime_table(const RegimeFlags& f) {
  const auto setup = to_setup(f.setup);
  const int given = (f.de_ratio ? 1 : 0) + (f.delta_e ? 1 : 0) + (f.unmeasured ? 1 : 0);
  if (given != 1) throw FlagError("--de-ratio", "give exactly one of --de-ratio, --delta-e, --unmeasured");

  MeterError de = MeterError::unmeasured();
  if (f.delta_e) de = MeterError::of(*f.delta_e);
  if (f.de_ratio) de = MeterError::of(*f.de_ratio * closed_form::critical_error(setup.system(), setup.drive(), f.tau));

  const auto report = experiments::regime_report(setup, f.tau, de, f.result_offset);
  Table table{{"de_crit", "delta_e", "regime", "omega", "w_re", "w_im", "rabi_period"}, {}};
  table.rows.push_back({report.de_crit, de.measured() ? Cell(de.value()) : Cell(std::string("unmeasured")),
                        std::string(to_string(report.regime)), report.omega, report.w.real(), report.w.imag(),
                        report.rabi_period});
  return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Zeno simulator: survival probabilities under continuous and pulsed energy measurement"};
  app.name("zeno");
  app.require_subcommand(1);

  Fig1Flags fig1;
  auto* fig1_cmd = app.add_subcommand("fig1", "P1 over time and normalized measurement error (continuous measurement)");
  fig1_cmd->add_option("--t-points", fig1.t_points, "Time samples on [0, tau]")->check(CLI::Range(1, 1'000'000));
  fig1_cmd->add_option("--de-points", fig1.de_points, "Measurement error samples")->check(CLI::Range(1, 1'000'000));
  fig1_cmd->add_option("--de-range", fig1.de_range, "LO,HI of dE/dE_crit (log spaced)");
  fig1_cmd->add_option("--tau", fig1.tau, "Measurement time")->check(CLI::PositiveNumber);
  fig1_cmd->add_option("--method", fig1.method, "closed-form or rk4");
  fig1_cmd->add_option("--step", fig1.step, "RK4 step")->check(CLI::PositiveNumber);
  fig1_cmd->add_option("--jobs", fig1.jobs, "Worker threads (0: all cores)");
  add_setup_flags(fig1_cmd, fig1.setup);
  add_output_flags(fig1_cmd, fig1.output);

  Fig2Flags fig2;
  auto* fig2_cmd = app.add_subcommand("fig2", "P(1->2) after a pi pulse versus measurement error and pulse count");
  fig2_cmd->add_option("--pulses", fig2.pulses, "Comma list of pulse counts and/or 'continuous'");
  fig2_cmd->add_option("--de-points", fig2.de_points, "Measurement error samples")->check(CLI::Range(1, 1'000'000));
  fig2_cmd->add_option("--de-range", fig2.de_range, "LO,HI of dE/dE_crit (log spaced)");
  fig2_cmd->add_option("--duty", fig2.duty, "Pulse width as a fraction of the pi pulse")->check(CLI::Range(0.0, 1.0));
  fig2_cmd->add_option("--method", fig2.method, "closed-form or rk4");
  fig2_cmd->add_option("--tau-convention", fig2.tau_convention, "total or per-segment");
  fig2_cmd->add_option("--step", fig2.step, "RK4 step")->check(CLI::PositiveNumber);
  fig2_cmd->add_option("--jobs", fig2.jobs, "Worker threads (0: all cores)");
  add_setup_flags(fig2_cmd, fig2.setup);
  add_output_flags(fig2_cmd, fig2.output);

  EvolveFlags evolve;
  auto* evolve_cmd = app.add_subcommand("evolve", "Single trajectory from a JSON config");
  evolve_cmd->add_option("--config", evolve.config, "Config file (JSON, version 1)")->required();
  evolve_cmd->add_option("--method", evolve.method, "Override the config method: closed-form or rk4");
  evolve_cmd->add_option("--sample-interval", evolve.sample_interval, "Dense output spacing")->check(CLI::PositiveNumber);
  evolve_cmd->add_option("--step", evolve.step, "RK4 step")->check(CLI::PositiveNumber);
  add_output_flags(evolve_cmd, evolve.output);

  RegimeFlags regime;
  auto* regime_cmd = app.add_subcommand("regime", "Critical error and damping regime for a continuous measurement");
  regime_cmd->add_option("--tau", regime.tau, "Measurement time")->check(CLI::PositiveNumber);
  regime_cmd->add_option("--de-ratio", regime.de_ratio, "Measurement error in units of dE_crit")->check(CLI::PositiveNumber);
  regime_cmd->add_option("--delta-e", regime.delta_e, "Measurement error")->check(CLI::PositiveNumber);
  regime_cmd->add_flag("--unmeasured", regime.unmeasured, "No measurement (infinite error)");
  regime_cmd->add_option("--result-offset", regime.result_offset, "Measurement result minus E1");
  add_setup_flags(regime_cmd, regime.setup);
  add_output_flags(regime_cmd, regime.output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fig1_cmd) emit(fig1_table(fig1), fig1.output, out);
    else if (*fig2_cmd) emit(fig2_table(fig2), fig2.output, out);
    else if (*evolve_cmd) emit(evolve_table(evolve), evolve.output, out);
    else if (*regime_cmd) emit(regime_table(regime), regime.output, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace zeno::cli
