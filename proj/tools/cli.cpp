#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "rydsim/analysis.hpp"
#include "rydsim/config.hpp"
#include "rydsim/crystal_transport.hpp"
#include "rydsim/errors.hpp"
#include "rydsim/format.hpp"
#include "rydsim/sequence.hpp"
#include "rydsim/sequence_engine.hpp"
#include "rydsim/units.hpp"

namespace rydsim::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path);
  out << contents;
}

double quantity(const std::string& flag, const std::string& text, Dimension dim) {
  auto v = parse_quantity(text, dim);
  if (!v) throw InputError("bad value '" + text + "' for " + flag);
  return *v;
}

// Shortest decimal, always with a decimal point or exponent ("0.0", "1.5e-06").
std::string format_si(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::string s = format_double(v);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::size_t> parse_ion_list(const std::string& text) {
  std::vector<std::size_t> ions;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || p != item.data() + item.size()) {
      throw InputError("bad ion index '" + item + "'");
    }
    ions.push_back(v);
  }
  return ions;
}

ExperimentConfig config_or_default(const std::string& path) {
  return path.empty() ? ExperimentConfig{} : load_config(path);
}

void warn_geometry(const ExperimentConfig& cfg, std::ostream& err) {
  if (!cfg.trap().is_linear()) {
    err << "warning: omega_ax >= omega_rad; a linear crystal is not guaranteed\n";
  }
}

void write_trace(const std::string& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_file(path, text);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo simulator of addressed Rydberg excitation in trapped-ion crystals",
               "rydsim"};
  app.require_subcommand(1);

  // parse
  std::string parse_seq;
  auto* parse_cmd = app.add_subcommand("parse", "Validate a sequence file and print it normalized");
  parse_cmd->add_option("sequence", parse_seq, "Sequence file")->required();

  // run
  std::string run_seq, run_config, run_detuning = "0", run_trace;
  std::uint64_t run_shots = 1000, run_seed = 0;
  unsigned run_threads = 0;
  auto* run_cmd = app.add_subcommand("run", "Execute a sequence and print per-ion bright fractions");
  run_cmd->add_option("sequence", run_seq, "Sequence file")->required();
  run_cmd->add_option("--config", run_config, "JSON config file");
  run_cmd->add_option("--shots", run_shots, "Number of shots")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run_seed, "RNG seed");
  run_cmd->add_option("--detuning", run_detuning, "VUV detuning (Hz, kHz, MHz)");
  run_cmd->add_option("--threads", run_threads, "Worker threads (0: all cores)");
  run_cmd->add_option("--trace", run_trace, "Write per-shot event logs to this file");

  // scan
  std::string scan_seq, scan_config, scan_param = "detuning", scan_from, scan_to, scan_out,
                                     scan_trace, scan_addressed;
  std::size_t scan_npoints = 61;
  std::uint64_t scan_shots = 1000, scan_seed = 0;
  unsigned scan_threads = 0;
  std::optional<double> scan_background;
  auto* scan_cmd = app.add_subcommand("scan", "Sweep the VUV detuning and write a CSV");
  scan_cmd->add_option("sequence", scan_seq, "Sequence file")->required();
  scan_cmd->add_option("--config", scan_config, "JSON config file");
  scan_cmd->add_option("--param", scan_param, "Scanned parameter")
      ->check(CLI::IsMember({"detuning"}));
  scan_cmd->add_option("--from", scan_from, "First detuning")->required();
  scan_cmd->add_option("--to", scan_to, "Last detuning")->required();
  scan_cmd->add_option("--points", scan_npoints, "Grid points")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--shots", scan_shots, "Shots per point")->check(CLI::PositiveNumber);
  scan_cmd->add_option("--seed", scan_seed, "RNG seed");
  scan_cmd->add_option("--threads", scan_threads, "Worker threads (0: all cores)");
  scan_cmd->add_option("--out", scan_out, "Output CSV (stdout if omitted)");
  scan_cmd->add_option("--trace", scan_trace, "Write per-shot event logs to this file");
  scan_cmd->add_option("--background", scan_background,
                       "Constant background added to the addressed ions' columns");
  scan_cmd->add_option("--addressed", scan_addressed, "Comma-separated addressed ion indices");

  // fit
  std::string fit_in, fit_out;
  std::size_t fit_ion = 0;
  std::optional<double> fit_background;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one ion's scan column with a Gaussian");
  fit_cmd->add_option("--in", fit_in, "Scan CSV")->required();
  fit_cmd->add_option("--ion", fit_ion, "Ion index")->required();
  fit_cmd->add_option("--background", fit_background,
                      "Constant background added to the ion's column before fitting");
  fit_cmd->add_option("--out", fit_out, "Output JSON (stdout if omitted)");

  // positions
  std::size_t pos_n = 0;
  std::string pos_config, pos_omega;
  auto* pos_cmd = app.add_subcommand("positions", "Print equilibrium ion positions in metres");
  pos_cmd->add_option("--n", pos_n, "Number of ions")->required()->check(CLI::PositiveNumber);
  pos_cmd->add_option("--config", pos_config, "JSON config file");
  pos_cmd->add_option("--omega-ax", pos_omega, "Axial secular frequency (overrides config)");

  // transport
  std::string tr_dv = "280mV", tr_t = "500us", tr_shape = "linear", tr_config, tr_out,
              tr_dt;
  auto* tr_cmd = app.add_subcommand("transport", "Final displacement and residual motional quanta");
  tr_cmd->add_option("--dv", tr_dv, "Voltage step");
  tr_cmd->add_option("--t", tr_t, "Ramp duration");
  tr_cmd->add_option("--shape", tr_shape, "Ramp shape")
      ->check(CLI::IsMember({"linear", "smoothstep"}));
  tr_cmd->add_option("--config", tr_config, "JSON config file");
  tr_cmd->add_option("--dt", tr_dt, "Sampling step (default duration/1000)");
  tr_cmd->add_option("--out", tr_out, "Write the trajectory CSV here");

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInput;
  }

  try {
    if (*parse_cmd) {
      const auto program = parse_program(read_file(parse_seq));
      out << to_string(program);
      return kExitOk;
    }
    if (*run_cmd) {
      const auto cfg = config_or_default(run_config);
      warn_geometry(cfg, err);
      Experiment exp(parse_program(read_file(run_seq)), cfg);
      RunOptions opts;
      opts.shots = run_shots;
      opts.seed = run_seed;
      opts.vuv_detuning = quantity("--detuning", run_detuning, Dimension::Frequency);
      opts.threads = run_threads;
      opts.trace = !run_trace.empty();
      const auto r = exp.run(opts);
      out << "shots=" << r.shots << " seed=" << run_seed
          << " detuning_hz=" << format_double(opts.vuv_detuning)
          << " signal=" << (r.signal == Signal::Dark ? "dark" : "bright") << "\n";
      for (std::size_t i = 0; i < r.n_ions(); ++i) {
        out << "ion" << i << " bright=" << format_fixed(r.bright_fraction(i), 6)
            << " signal=" << format_fixed(r.signal_probability(i), 6)
            << " err=" << format_fixed(r.signal_error(i), 6) << "\n";
      }
      if (opts.trace) write_trace(run_trace, r.trace);
      return kExitOk;
    }
    if (*scan_cmd) {
      const auto cfg = config_or_default(scan_config);
      warn_geometry(cfg, err);
      Experiment exp(parse_program(read_file(scan_seq)), cfg);
      const auto grid = linear_grid(quantity("--from", scan_from, Dimension::Frequency),
                                    quantity("--to", scan_to, Dimension::Frequency), scan_npoints);
      std::vector<std::string> trace;
      auto result = exp.scan(grid, scan_shots, scan_seed, scan_threads,
                             scan_trace.empty() ? nullptr : &trace);
      if (scan_background) {
        if (scan_addressed.empty()) throw InputError("--background needs --addressed");
        result = annotate_background(std::move(result), parse_ion_list(scan_addressed),
                                     *scan_background);
      } else if (!scan_addressed.empty()) {
        throw InputError("--addressed needs --background");
      }
      std::ostringstream csv;
      write_scan_csv(csv, result);
      if (scan_out.empty()) {
        out << csv.str();
      } else {
        write_file(scan_out, csv.str());
      }
      if (!scan_trace.empty()) write_trace(scan_trace, trace);
      return kExitOk;
    }
    if (*fit_cmd) {
      std::ifstream in(fit_in, std::ios::binary);
      if (!in) throw InputError("cannot open " + fit_in);
      auto scan = read_scan_csv(in);
      if (fit_background) scan = annotate_background(std::move(scan), {fit_ion}, *fit_background);
      const auto fit = fit_gaussian(scan_points(scan, fit_ion));
      std::vector<BackgroundCorrection> corrections;
      for (const auto& c : scan.corrections) {
        if (c.ion == fit_ion) corrections.push_back(c);
      }
      const auto report = fit_report_json(fit, corrections);
      if (fit_out.empty()) {
        out << report;
      } else {
        write_file(fit_out, report);
      }
      if (!fit.converged) {
        err << "error: fit did not converge after " << fit.iterations << " iterations\n";
        return kExitNumeric;
      }
      return kExitOk;
    }
    if (*pos_cmd) {
      auto cfg = config_or_default(pos_config);
      if (!pos_omega.empty()) cfg.omega_ax = quantity("--omega-ax", pos_omega, Dimension::Frequency);
      cfg.validate();
      warn_geometry(cfg, err);
      for (double x : equilibrium_positions(pos_n, cfg.trap())) out << format_si(x) << "\n";
      return kExitOk;
    }
    if (*tr_cmd) {
      const auto cfg = config_or_default(tr_config);
      TransportRamp ramp;
      ramp.delta_v = quantity("--dv", tr_dv, Dimension::Voltage);
      ramp.duration = quantity("--t", tr_t, Dimension::Time);
      ramp.shape = tr_shape == "smoothstep" ? RampShape::SmoothStep : RampShape::Linear;
      ramp.kappa = cfg.kappa;
      ramp.filter_cutoff = cfg.filter_cutoff;
      ramp.validate();
      const double dt = tr_dt.empty() ? ramp.duration / 1000.0
                                      : quantity("--dt", tr_dt, Dimension::Time);
      const auto traj = minimum_trajectory(ramp, dt);
      const double quanta = residual_excitation(traj, cfg.trap());
      out << "final_displacement_m=" << format_si(ramp.final_displacement()) << "\n"
          << "residual_quanta=" << format_si(quanta) << "\n";
      if (!tr_out.empty()) {
        std::ostringstream csv;
        write_trajectory_csv(csv, traj);
        write_file(tr_out, csv.str());
      }
      return kExitOk;
    }
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace rydsim::cli
