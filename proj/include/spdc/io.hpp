#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spdc/bench.hpp"
#include "spdc/correlation.hpp"
#include "spdc/covariance.hpp"
#include "spdc/image_stack.hpp"
#include "spdc/optics.hpp"
#include "spdc/schmidt.hpp"

namespace spdc::io {

// ---------------------------------------------------------------------------
// Stack files
//
// 24-byte little-endian header:
//   0  "QSTK"
//   4  u32 version (1)
//   8  u32 n_rows
//  12  u32 n_cols
//  16  u32 n_frames
//  20  u8  dtype (1 = float32 LE)
//  21  3 reserved zero bytes
// then n_frames row-major frames. Metadata lives in "<path>.meta" as key=value lines.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kStackHeaderSize = 24;
inline constexpr std::uint32_t kStackVersion = 1;
inline constexpr std::uint8_t kDtypeFloat32 = 1;

std::vector<std::uint8_t> encode_stack(const ImageStack& stack);
/// Frames only; metadata is left default.
ImageStack decode_stack(std::span<const std::uint8_t> bytes);

std::string encode_metadata(const StackMetadata& meta);
StackMetadata decode_metadata(const std::string& text);

/// Writes the stack and its sidecar.
void write_stack(const std::filesystem::path& path, const ImageStack& stack);
/// Reads the stack and, when present, its sidecar.
ImageStack read_stack(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Everything a CLI run depends on. Serialised as flat key=value lines.
struct RunConfig {
  CrystalPumpConfig crystal;
  WavevectorGrid grid = default_grid();
  QuadratureSettings quad;
  ReconstructionConfig recon;

  int n_frames = 1000;
  std::uint64_t seed = 1;
  double read_noise = 0.0;
  double offset = 0.0;
  bool quantize = false;
  double peak_mean = 1000.0;  // synthetic stacks are scaled to this peak mean count; 0 keeps the input scale

  int repetitions = 3;
  int m_top = 8;
  int cap = kDefaultFull4DCap;

  std::vector<double> gains = {1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8};
};

/// Applies one key=value assignment. Throws Error{config} for unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
/// Parses key=value lines; '#' starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
std::string format_config(const RunConfig& config);

// ---------------------------------------------------------------------------
// Delimited text
// ---------------------------------------------------------------------------

/// Numbers are written with 9 significant digits.
std::string format_number(double x);

/// A tab-separated table with a leading "# key: value" comment block.
struct Table {
  std::vector<std::pair<std::string, std::string>> comments;
  std::vector<std::string> header;
  Eigen::MatrixXd values;

  std::string comment(const std::string& key) const;
};

std::string format_table(const Table& table);
Table parse_table(const std::string& text);
void write_table(const std::filesystem::path& path, const Table& table);
Table read_table(const std::filesystem::path& path);

/// Correlation matrix files carry their grid and provenance in the comments.
void write_correlation(const std::filesystem::path& path, const CorrelationMatrix& corr);
CorrelationMatrix read_correlation(const std::filesystem::path& path);

void write_intensity(const std::filesystem::path& path, const IntensityProfile& profile);

// ---------------------------------------------------------------------------
// Result bundles
// ---------------------------------------------------------------------------

/// Extra provenance for a bundle: the run's effective config and free-form
/// diagnostics written into metrics.txt.
struct BundleContext {
  std::string command;
  const RunConfig* config = nullptr;
  std::vector<std::pair<std::string, double>> metrics;
};

/// Writes spectrum.tsv, mu.tsv, modes_1d.tsv, mode_2d_<k>.tsv for the modes
/// with measured widths, metrics.txt and config.txt into `dir`.
void write_result_bundle(const std::filesystem::path& dir, const SchmidtResult<double>& result,
                         const BundleContext& context);

/// bench_report.txt (human readable) and bench.kv (key=value).
void write_bench_report(const std::filesystem::path& dir, const BenchReport& report,
                        const BundleContext& context);

struct BundleData {
  Table spectrum;
  Table mu;
  Table modes_1d;
  std::vector<Table> modes_2d;
  std::map<std::string, std::string> metrics;

  double metric(const std::string& key) const;
  /// Decomposition rebuilt from mu.tsv and modes_1d.tsv.
  OneDDecomposition<double> decomposition() const;
};

BundleData read_result_bundle(const std::filesystem::path& dir);

std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace spdc::io
