#include "spdc/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spdc/bench.hpp"
#include "spdc/correlation.hpp"
#include "spdc/covariance.hpp"
#include "spdc/error.hpp"
#include "spdc/io.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/thermal.hpp"

namespace spdc {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> settings;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "key=value configuration file");
  cmd->add_option("-s,--set", args.settings, "override one setting, key=value (repeatable)");
  cmd->add_option("-o,--out", args.out, "output path")->required();
}

io::RunConfig load_config(const CommonArgs& args) {
  io::RunConfig config;
  if (!args.config_path.empty()) config = io::parse_config(io::read_text(args.config_path));
  for (const std::string& s : args.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::usage, "--set expects key=value, got '" + s + "'");
    io::apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  config.crystal.validate();
  config.grid.validate();
  return config;
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += i == 0 ? fs::path(argv[0]).filename().string() : argv[i];
  }
  return out;
}

OneDDecomposition<double> theory_decomposition(const io::RunConfig& config) {
  return diagonalize_1d(g1_slice(config.crystal, config.grid, config.quad));
}

SynthesisSpec synthesis_spec(const io::RunConfig& config, OneDDecomposition<double> one_d) {
  SynthesisSpec spec;
  spec.one_d = config.peak_mean > 0 ? scaled_to_peak(std::move(one_d), config.peak_mean) : std::move(one_d);
  spec.n_frames = config.n_frames;
  spec.read_noise = config.read_noise;
  spec.offset = config.offset;
  spec.seed = config.seed;
  spec.quantize = config.quantize;
  spec.gain_label = config.crystal.gain;
  return spec;
}

std::string gain_label(double g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "g_%.4g", g);
  return buf;
}

void run_simulate(const CommonArgs& args, const std::string& cmdline) {
  const io::RunConfig config = load_config(args);
  const CorrelationMatrix corr = g1_slice(config.crystal, config.grid, config.quad);
  const fs::path dir = args.out;
  fs::create_directories(dir);
  io::write_correlation(dir / "correlation.tsv", corr);
  IntensityProfile profile{corr.values.diagonal(), corr.grid};
  io::write_intensity(dir / "intensity.tsv", profile);
  io::write_text(dir / "config.txt", "# command: " + cmdline + "\n" + io::format_config(config));
}

void run_decompose(const CommonArgs& args, const std::string& input, const std::string& cmdline) {
  const io::RunConfig config = load_config(args);
  const CorrelationMatrix corr = io::read_correlation(input);
  SchmidtResult<double> result = schmidt_analysis(diagonalize_1d(corr), config.recon.n_keep);
  io::BundleContext ctx{cmdline, &config, {{"imag_residual", corr.imag_residual}}};
  io::write_result_bundle(args.out, result, ctx);
}

void run_generate(const CommonArgs& args, const std::string& bundle, const std::string& cmdline) {
  (void)cmdline;
  const io::RunConfig config = load_config(args);
  OneDDecomposition<double> one_d =
      bundle.empty() ? theory_decomposition(config) : io::read_result_bundle(bundle).decomposition();
  const ImageStack stack = synthesize_stack(synthesis_spec(config, std::move(one_d)));
  io::write_stack(args.out, stack);
}

void run_reconstruct(const CommonArgs& args, const std::string& input, const std::string& cmdline) {
  const io::RunConfig config = load_config(args);
  const ImageStack stack = io::read_stack(input);
  const Reconstruction rec = reconstruct_pipeline(stack, config.recon);
  io::BundleContext ctx{cmdline,
                        &config,
                        {{"center_row", double(rec.center.row)},
                         {"center_col", double(rec.center.col)},
                         {"clamped_entries", double(rec.clamped_entries)},
                         {"accidental_ratio", rec.accidental_ratio},
                         {"negative_mass", rec.negative_mass},
                         {"frames", double(stack.n_frames())}}};
  io::write_result_bundle(args.out, rec.result, ctx);
  io::write_correlation(fs::path(args.out) / "g1_slice.tsv", rec.g1);
}

void run_sweep(const CommonArgs& args, const std::string& cmdline) {
  const io::RunConfig base = load_config(args);
  const fs::path dir = args.out;
  fs::create_directories(dir);
  io::Table summary;
  summary.comments = {{"command", cmdline}};
  summary.header = {"g", "total_intensity", "schmidt_number", "fwhm_u0_mrad"};
  summary.values.resize(Eigen::Index(base.gains.size()), 4);
  for (std::size_t k = 0; k < base.gains.size(); ++k) {
    io::RunConfig config = base;
    config.crystal.gain = base.gains[k];
    config.crystal.validate();
    const CorrelationMatrix corr = g1_slice(config.crystal, config.grid, config.quad);
    SchmidtResult<double> result = schmidt_analysis(diagonalize_1d(corr), config.recon.n_keep);
    const double trace = result.one_d.mu.sum();
    io::BundleContext ctx{cmdline, &config, {{"gain", config.crystal.gain}}};
    io::write_result_bundle(dir / gain_label(config.crystal.gain), result, ctx);
    const double fwhm = result.metrics.mode_fwhm_mrad.empty() ? NAN : result.metrics.mode_fwhm_mrad[0];
    summary.values.row(Eigen::Index(k)) << config.crystal.gain, trace,
        result.metrics.schmidt_number, fwhm;
  }
  io::write_table(dir / "summary.tsv", summary);
  io::write_text(dir / "config.txt", "# command: " + cmdline + "\n" + io::format_config(base));
}

void run_bench(const CommonArgs& args, const std::string& input, const std::string& cmdline) {
  const io::RunConfig config = load_config(args);
  ImageStack stack;
  double io_s = 0.0;
  if (!input.empty()) {
    const auto start = std::chrono::steady_clock::now();
    stack = io::read_stack(input);
    io_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  } else {
    stack = synthesize_stack(synthesis_spec(config, theory_decomposition(config)));
  }
  BenchConfig bench;
  bench.repetitions = config.repetitions;
  bench.m_top = config.m_top;
  bench.recon = config.recon;
  bench.cap = config.cap;
  BenchReport report = compare_methods(stack, bench);
  report.io_s = io_s;
  io::write_bench_report(args.out, report, {cmdline, &config, {}});
}

}  // namespace

int run_command(int argc, char** argv) {
  CLI::App app{"Spatial mode analysis of high-gain parametric down-conversion", "spdc-modes"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string input;
  std::string bundle;

  auto* simulate = app.add_subcommand("simulate", "theory correlation and far-field intensity");
  add_common(simulate, args);

  auto* decompose = app.add_subcommand("decompose", "correlation file to result bundle");
  add_common(decompose, args);
  decompose->add_option("-i,--input", input, "correlation.tsv")->required();

  auto* generate = app.add_subcommand("generate", "synthetic thermal image stack");
  add_common(generate, args);
  generate->add_option("-b,--bundle", bundle, "result bundle supplying the decomposition (default: simulate)");

  auto* reconstruct = app.add_subcommand("reconstruct", "image stack to result bundle");
  add_common(reconstruct, args);
  reconstruct->add_option("-i,--input", input, "stack file")->required();

  auto* sweep = app.add_subcommand("sweep", "result bundle per gain plus a summary table");
  add_common(sweep, args);

  auto* bench = app.add_subcommand("bench", "slice method against the dense 4D method");
  add_common(bench, args);
  bench->add_option("-i,--input", input, "stack file (default: synthesize from the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << error_name(ErrorKind::usage) << ": " << e.what() << '\n';
    return 10 + static_cast<int>(ErrorKind::usage);
  }

  const std::string cmdline = command_line(argc, argv);
  try {
    if (*simulate) run_simulate(args, cmdline);
    else if (*decompose) run_decompose(args, input, cmdline);
    else if (*generate) run_generate(args, bundle, cmdline);
    else if (*reconstruct) run_reconstruct(args, input, cmdline);
    else if (*sweep) run_sweep(args, cmdline);
    else if (*bench) run_bench(args, input, cmdline);
  } catch (const Error& e) {
    std::cerr << "error: " << error_name(e.kind()) << ": " << e.what() << '\n';
    return 10 + static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << error_name(ErrorKind::io) << ": " << e.what() << '\n';
    return 10 + static_cast<int>(ErrorKind::io);
  } catch (const std::bad_alloc&) {
    std::cerr << "error: " << error_name(ErrorKind::resource) << ": out of memory\n";
    return 10 + static_cast<int>(ErrorKind::resource);
  }
  return 0;
}

}  // namespace spdc
