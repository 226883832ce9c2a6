#include "diffdrive/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "diffdrive/errors.hpp"
#include "diffdrive/regulator.hpp"
#include "diffdrive/roots.hpp"
#include "diffdrive/scenario.hpp"
#include "diffdrive/sim.hpp"
#include "diffdrive/tracking.hpp"

namespace diffdrive::cli {

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("diffdrive", sink);
  logger->set_pattern("[%l] %v");
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("DIFFDRIVE_LOG")) {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
  return logger;
}

std::string format_root(const std::complex<double>& root) {
  if (root.imag() == 0.0) {
    return fmt::format("{:.9g}", root.real());
  }
  return fmt::format("{:.9g}{:+.9g}i", root.real(), root.imag());
}

std::string format_roots(const Roots3& roots) {
  return fmt::format("{}, {}, {}", format_root(roots[0]), format_root(roots[1]),
                     format_root(roots[2]));
}

struct SimulateOptions {
  std::string scenario;
  std::string out = "-";
  std::string format = "csv";
  std::vector<std::string> overrides;
  std::string sweep;
};

struct Sweep {
  std::string key;
  std::vector<double> values;
};

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidArgument("--sweep expects key=start:step:end");
  }
  Sweep sweep{text.substr(0, eq), {}};
  std::vector<double> parts;
  std::stringstream range(text.substr(eq + 1));
  std::string item;
  while (std::getline(range, item, ':')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw InvalidArgument("--sweep: '" + item + "' is not a number");
    }
    parts.push_back(value);
  }
  if (parts.size() != 3) {
    throw InvalidArgument("--sweep expects key=start:step:end");
  }
  const double start = parts[0], step = parts[1], end = parts[2];
  if (step == 0.0 || (end - start) * step < 0.0) {
    throw InvalidArgument("--sweep: step must move from start toward end");
  }
  const auto count = static_cast<std::size_t>(std::floor((end - start) / step + 1e-9)) + 1;
  if (count > 10000) {
    throw InvalidArgument("--sweep: more than 10000 runs");
  }
  for (std::size_t i = 0; i < count; ++i) {
    sweep.values.push_back(start + static_cast<double>(i) * step);
  }
  return sweep;
}

void write_result(const SimTrace& trace, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    write_trace_csv(trace, out);
  } else {
    out << summary_to_json(trace).dump(2) << '\n';
  }
}

void write_result_to(const SimTrace& trace, const std::string& format,
                     const std::string& path, std::ostream& stdout_stream) {
  if (path == "-") {
    write_result(trace, format, stdout_stream);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    throw Error("cannot open " + path + " for writing");
  }
  write_result(trace, format, file);
  file.flush();
  if (!file) {
    throw Error("failed writing " + path);
  }
}

class IoError : public Error {
 public:
  using Error::Error;
};

void log_summary(spdlog::logger& log, const SimTrace& trace) {
  const SimSummary& s = trace.summary;
  log.info("steps={} final_time={:.3f}s converged={} diverged={} final_error={:.6g} "
           "peak_raw_power={:.4g} wall_time={:.3f}s",
           trace.records.size(), s.final_time, s.converged, s.diverged,
           s.final_error_norm, s.peak_raw_power, s.wall_time_s);
}

int simulate(const SimulateOptions& opts, ScenarioMode expected, std::ostream& out,
             spdlog::logger& log) {
  const char* wanted = expected == ScenarioMode::kRegulation ? "regulation" : "tracking";
  auto load = [&](const std::vector<std::string>& overrides) {
    ScenarioConfig config = load_scenario(opts.scenario, overrides);
    if (config.mode != expected) {
      throw ConfigError("mode", std::string("this subcommand needs a ") + wanted +
                                    " scenario");
    }
    return config;
  };

  if (opts.sweep.empty()) {
    const SimTrace trace = run_scenario(load(opts.overrides));
    log_summary(log, trace);
    try {
      write_result_to(trace, opts.format, opts.out, out);
    } catch (const Error& e) {
      throw IoError(e.what());
    }
    if (trace.summary.diverged) {
      log.error("simulation diverged at t = {:.3f} s", trace.summary.final_time);
      return kDiverged;
    }
    return kOk;
  }

  if (opts.out == "-") {
    throw InvalidArgument("--sweep needs --out <path>; one file is written per run");
  }
  const Sweep sweep = parse_sweep(opts.sweep);
  const std::filesystem::path base(opts.out);
  const std::string stem = (base.parent_path() / base.stem()).string();
  const std::string ext = base.extension().string();

  // Configs are loaded up front so config errors surface before any run.
  std::vector<ScenarioConfig> configs;
  for (double value : sweep.values) {
    std::vector<std::string> overrides = opts.overrides;
    overrides.push_back(fmt::format("{}={:.17g}", sweep.key, value));
    configs.push_back(load(overrides));
  }

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<SimTrace> traces(configs.size());
  for (std::size_t begin = 0; begin < configs.size(); begin += workers) {
    const std::size_t end = std::min(configs.size(), begin + workers);
    std::vector<std::future<SimTrace>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async,
                                 [&configs, i] { return run_scenario(configs[i]); }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      traces[i] = batch[i - begin].get();
    }
  }

  bool any_diverged = false;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const std::string path = fmt::format("{}_{:03d}{}", stem, i, ext);
    try {
      write_result_to(traces[i], opts.format, path, out);
    } catch (const Error& e) {
      throw IoError(e.what());
    }
    log_summary(log, traces[i]);
    any_diverged = any_diverged || traces[i].summary.diverged;
    out << fmt::format("{} {}={:.9g} {} converged={} diverged={}\n", i, sweep.key,
                       sweep.values[i], path, traces[i].summary.converged,
                       traces[i].summary.diverged);
  }
  return any_diverged ? kDiverged : kOk;
}

void add_simulate_options(CLI::App& cmd, SimulateOptions& opts) {
  cmd.add_option("--scenario", opts.scenario, "Scenario JSON file")->required();
  cmd.add_option("--out", opts.out, "Output path, '-' for stdout")->capture_default_str();
  cmd.add_option("--format", opts.format, "csv or summary")
      ->check(CLI::IsMember({"csv", "summary"}))
      ->capture_default_str();
  cmd.add_option("--override", opts.overrides, "Set a scenario key, key=value (repeatable)");
  cmd.add_option("--sweep", opts.sweep, "Run once per value, key=start:step:end");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto log = make_logger(err);

  CLI::App app{"Differential-drive tracking and pose regulation simulator"};
  app.require_subcommand(1);

  SimulateOptions track_opts;
  SimulateOptions regulate_opts;
  auto* track = app.add_subcommand("simulate-track", "Simulate trajectory tracking");
  add_simulate_options(*track, track_opts);
  auto* regulate = app.add_subcommand("simulate-regulate", "Simulate pose regulation");
  add_simulate_options(*regulate, regulate_opts);

  TrackingDesignSpec design_spec;
  double v_ref = 0.0;
  double omega_ref = 0.0;
  double epsilon_v = kDefaultEpsilonV;
  auto* design = app.add_subcommand("design-gains", "Tracking gains from damping and natural frequency");
  design->add_option("--xi", design_spec.xi, "Damping factor")->required();
  design->add_option("--omega-n", design_spec.omega_n, "Natural frequency, rad/s")->required();
  design->add_option("--v-ref", v_ref, "Reference speed, m/s")->required();
  design->add_option("--omega-ref", omega_ref, "Reference turn rate, rad/s")->capture_default_str();
  design->add_option("--epsilon-v", epsilon_v, "Minimum |v_ref|, m/s")->capture_default_str();

  RegulatorGains reg_gains;
  auto* stability = app.add_subcommand("check-stability", "Stability test for regulator gains");
  stability->add_option("--k-r", reg_gains.k_r)->required();
  stability->add_option("--k-etheta", reg_gains.k_etheta)->required();
  stability->add_option("--k-thetaE", reg_gains.k_thetaE)->required();

  std::vector<double> entries;
  auto* roots = app.add_subcommand("roots", "Characteristic roots of a 3x3 matrix");
  roots->add_option("--matrix", entries, "Nine entries, row-major")->expected(9)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*track) {
      return simulate(track_opts, ScenarioMode::kTracking, out, *log);
    }
    if (*regulate) {
      return simulate(regulate_opts, ScenarioMode::kRegulation, out, *log);
    }
    if (*design) {
      const GainDesign result = design_gains(design_spec, v_ref, omega_ref, epsilon_v);
      const TrackingGains& g = result.gains;
      out << fmt::format("k1 = {:.9g}\nk2 = {:.9g}\nk3 = {:.9g}\n", g.k1, g.k2, g.k3);
      out << "roots = "
          << format_roots(characteristic_roots(tracking_closed_loop_matrix(g, v_ref, omega_ref)))
          << '\n';
      if (result.outside_damped_form) {
        log->warn("omega_n <= |omega_ref|: k2 <= 0, outside the damped design form");
      }
      return kOk;
    }
    if (*stability) {
      const StabilityVerdict verdict = stability_check(reg_gains);
      out << "verdict = " << (verdict.stable ? "stable" : "unstable") << '\n';
      for (StabilityCondition c : verdict.violated) {
        out << "violated = " << to_string(c) << '\n';
      }
      out << "roots = "
          << format_roots(characteristic_roots(regulator_linearized_matrix(reg_gains)))
          << '\n';
      return kOk;
    }
    if (*roots) {
      Matrix3 m;
      for (int i = 0; i < 9; ++i) {
        m(i / 3, i % 3) = entries[static_cast<std::size_t>(i)];
      }
      out << "roots = " << format_roots(characteristic_roots(m)) << '\n';
      return kOk;
    }
  } catch (const ReferenceTooSlow& e) {
    err << "error: " << e.what() << '\n';
    return kReferenceTooSlow;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace diffdrive::cli
