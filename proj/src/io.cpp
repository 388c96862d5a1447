#include <cmath>
#include <cstdio>
#include <sstream>

#include "spdc/eigensolver.hpp"
#include "spdc/error.hpp"
#include "spdc/io.hpp"
#include "spdc/version.hpp"

namespace spdc::io {

namespace {

std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::config, "'" + key + "' expects a number, got '" + value + "'");
}

int to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long x = std::stol(value, &used);
    if (used == value.size() && x >= INT32_MIN && x <= INT32_MAX) return static_cast<int>(x);
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::config, "'" + key + "' expects an integer, got '" + value + "'");
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (!value.empty() && value[0] != '-') {
      const unsigned long long x = std::stoull(value, &used);
      if (used == value.size()) return x;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::config, "'" + key + "' expects an unsigned integer, got '" + value + "'");
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw Error(ErrorKind::config, "'" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

bool is_number(const std::string& token) {
  if (token.empty()) return false;
  char* end = nullptr;
  std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size();
}

std::string mismatch_name(MismatchModel m) {
  return m == MismatchModel::nondegenerate ? "nondegenerate" : "degenerate";
}

std::vector<std::pair<std::string, std::string>> provenance_comments(const BundleContext& context) {
  std::vector<std::pair<std::string, std::string>> out;
  out.emplace_back("program", std::string("spdc-modes ") + kVersion);
  out.emplace_back("eigensolver", eigensolver_backend());
  if (!context.command.empty()) out.emplace_back("command", context.command);
  if (context.config) out.emplace_back("seed", std::to_string(context.config->seed));
  return out;
}

std::string comment_block(const BundleContext& context) {
  std::string out;
  for (const auto& [k, v] : provenance_comments(context)) out += "# " + k + ": " + v + "\n";
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  auto& x = c.crystal;
  if (key == "lambda_p") x.lambda_p = to_double(key, value);
  else if (key == "lambda_s") x.lambda_s = to_double(key, value);
  else if (key == "length_um") x.length = to_double(key, value);
  else if (key == "pump_waist_um") x.pump_waist = to_double(key, value);
  else if (key == "gain") x.gain = to_double(key, value);
  else if (key == "theta_p_deg") x.theta_p = to_double(key, value);
  else if (key == "c1") x.c1 = to_double(key, value);
  else if (key == "c2") {
    if (value == "auto") x.c2.reset();
    else x.c2 = to_double(key, value);
  } else if (key == "mismatch") {
    if (value == "nondegenerate") x.mismatch = MismatchModel::nondegenerate;
    else if (value == "degenerate") x.mismatch = MismatchModel::degenerate;
    else throw Error(ErrorKind::config, "unknown mismatch model '" + value + "'");
  } else if (key == "n_points") {
    c.grid.n_points = to_int(key, value);
  } else if (key == "pitch_mrad") {
    c.grid.pitch_mrad = to_double(key, value);
  } else if (key == "quad_initial_nodes") {
    c.quad.initial_nodes = to_int(key, value);
  } else if (key == "quad_max_nodes") {
    c.quad.max_nodes = to_int(key, value);
  } else if (key == "quad_rel_tol") {
    c.quad.rel_tol = to_double(key, value);
  } else if (key == "quad_cutoff_waists") {
    c.quad.cutoff_waists = to_double(key, value);
  } else if (key == "n_angles") {
    c.recon.n_angles = to_int(key, value);
  } else if (key == "slice_length") {
    c.recon.length = to_int(key, value);
  } else if (key == "center") {
    if (value == "centroid") {
      c.recon.center_policy = CenterPolicy::centroid;
    } else if (value == "metadata") {
      c.recon.center_policy = CenterPolicy::metadata;
    } else {
      const auto parts = split(value, ',');
      if (parts.size() != 2) {
        throw Error(ErrorKind::config, "center expects centroid, metadata or row,col; got '" + value + "'");
      }
      c.recon.center_policy = CenterPolicy::explicit_pixel;
      c.recon.center = {to_int(key, trim(parts[0])), to_int(key, trim(parts[1]))};
    }
  } else if (key == "estimator") {
    c.recon.estimator = parse_estimator(value);
  } else if (key == "n_keep") {
    c.recon.n_keep = to_int(key, value);
  } else if (key == "frames") {
    c.n_frames = to_int(key, value);
  } else if (key == "seed") {
    c.seed = to_u64(key, value);
  } else if (key == "read_noise") {
    c.read_noise = to_double(key, value);
  } else if (key == "offset") {
    c.offset = to_double(key, value);
  } else if (key == "quantize") {
    c.quantize = to_bool(key, value);
  } else if (key == "peak_mean") {
    c.peak_mean = to_double(key, value);
  } else if (key == "repetitions") {
    c.repetitions = to_int(key, value);
  } else if (key == "m_top") {
    c.m_top = to_int(key, value);
  } else if (key == "cap") {
    c.cap = to_int(key, value);
  } else if (key == "gains") {
    c.gains.clear();
    for (const std::string& g : split(value, ',')) c.gains.push_back(to_double(key, trim(g)));
    if (c.gains.empty()) throw Error(ErrorKind::config, "gains must list at least one value");
  } else {
    throw Error(ErrorKind::config, "unknown config key '" + key + "'");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  for (const auto& [key, value] : parse_key_values(text)) apply_setting(base, key, value);
  return base;
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  const auto& x = c.crystal;
  out << "lambda_p=" << exact(x.lambda_p) << '\n'
      << "lambda_s=" << exact(x.lambda_s) << '\n'
      << "length_um=" << exact(x.length) << '\n'
      << "pump_waist_um=" << exact(x.pump_waist) << '\n'
      << "gain=" << exact(x.gain) << '\n'
      << "theta_p_deg=" << exact(x.theta_p) << '\n'
      << "c1=" << exact(x.c1) << '\n'
      << "c2=" << (x.c2 ? exact(*x.c2) : std::string("auto")) << '\n'
      << "mismatch=" << mismatch_name(x.mismatch) << '\n'
      << "n_points=" << c.grid.n_points << '\n'
      << "pitch_mrad=" << exact(c.grid.pitch_mrad) << '\n'
      << "quad_initial_nodes=" << c.quad.initial_nodes << '\n'
      << "quad_max_nodes=" << c.quad.max_nodes << '\n'
      << "quad_rel_tol=" << exact(c.quad.rel_tol) << '\n'
      << "quad_cutoff_waists=" << exact(c.quad.cutoff_waists) << '\n'
      << "n_angles=" << c.recon.n_angles << '\n'
      << "slice_length=" << c.recon.length << '\n';
  switch (c.recon.center_policy) {
    case CenterPolicy::centroid: out << "center=centroid\n"; break;
    case CenterPolicy::metadata: out << "center=metadata\n"; break;
    case CenterPolicy::explicit_pixel:
      out << "center=" << c.recon.center.row << ',' << c.recon.center.col << '\n';
      break;
  }
  out << "estimator=" << estimator_name(c.recon.estimator) << '\n'
      << "n_keep=" << c.recon.n_keep << '\n'
      << "frames=" << c.n_frames << '\n'
      << "seed=" << c.seed << '\n'
      << "read_noise=" << exact(c.read_noise) << '\n'
      << "offset=" << exact(c.offset) << '\n'
      << "quantize=" << (c.quantize ? 1 : 0) << '\n'
      << "peak_mean=" << exact(c.peak_mean) << '\n'
      << "repetitions=" << c.repetitions << '\n'
      << "m_top=" << c.m_top << '\n'
      << "cap=" << c.cap << '\n'
      << "gains=";
  for (std::size_t i = 0; i < c.gains.size(); ++i) out << (i ? "," : "") << exact(c.gains[i]);
  out << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Tables

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string Table::comment(const std::string& key) const {
  for (const auto& [k, v] : comments) {
    if (k == key) return v;
  }
  throw Error(ErrorKind::format, "table has no '" + key + "' comment");
}

std::string format_table(const Table& table) {
  std::string out;
  for (const auto& [k, v] : table.comments) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    out += (i ? "\t" : "") + table.header[i];
  }
  if (!table.header.empty()) out += '\n';
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
      if (c) out += '\t';
      out += format_number(table.values(r, c));
    }
    out += '\n';
  }
  return out;
}

Table parse_table(const std::string& text) {
  Table table;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon == std::string::npos) {
        table.comments.emplace_back(body, "");
      } else {
        table.comments.emplace_back(trim(body.substr(0, colon)), trim(body.substr(colon + 1)));
      }
      continue;
    }
    const std::vector<std::string> tokens = split(line, '\t');
    if (rows.empty() && table.header.empty() && !is_number(tokens.front())) {
      table.header = tokens;
      continue;
    }
    std::vector<double> row;
    for (const std::string& t : tokens) {
      if (!is_number(t)) {
        throw Error(ErrorKind::format, "line " + std::to_string(line_no) + ": '" + t + "' is not a number");
      }
      row.push_back(std::strtod(t.c_str(), nullptr));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::format, "line " + std::to_string(line_no) + " has " +
                                         std::to_string(row.size()) + " fields, expected " +
                                         std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index cols = rows.empty() ? Eigen::Index(table.header.size()) : Eigen::Index(rows.front().size());
  table.values.resize(Eigen::Index(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) table.values(Eigen::Index(r), c) = rows[r][c];
  }
  return table;
}

void write_table(const std::filesystem::path& path, const Table& table) {
  write_text(path, format_table(table));
}

Table read_table(const std::filesystem::path& path) { return parse_table(read_text(path)); }

void write_correlation(const std::filesystem::path& path, const CorrelationMatrix& corr) {
  Table t;
  t.comments = {{"kind", "correlation"},
                {"n_points", std::to_string(corr.grid.n_points)},
                {"pitch_mrad", exact(corr.grid.pitch_mrad)},
                {"provenance", corr.provenance == Provenance::theory ? "theory" : "reconstructed"},
                {"imag_residual", format_number(corr.imag_residual)},
                {"radial_nodes", std::to_string(corr.radial_nodes)}};
  t.values = corr.values;
  write_table(path, t);
}

CorrelationMatrix read_correlation(const std::filesystem::path& path) {
  const Table t = read_table(path);
  CorrelationMatrix corr;
  if (t.comment("kind") != "correlation") {
    throw Error(ErrorKind::format, path.string() + " is not a correlation file");
  }
  corr.grid.n_points = to_int("n_points", t.comment("n_points"));
  corr.grid.pitch_mrad = to_double("pitch_mrad", t.comment("pitch_mrad"));
  corr.provenance = t.comment("provenance") == "theory" ? Provenance::theory : Provenance::reconstructed;
  corr.imag_residual = to_double("imag_residual", t.comment("imag_residual"));
  corr.radial_nodes = to_int("radial_nodes", t.comment("radial_nodes"));
  if (t.values.rows() != corr.grid.n_points || t.values.cols() != corr.grid.n_points) {
    throw Error(ErrorKind::format, path.string() + ": matrix shape does not match n_points");
  }
  corr.values = t.values;
  return corr;
}

void write_intensity(const std::filesystem::path& path, const IntensityProfile& profile) {
  Table t;
  t.comments = {{"kind", "intensity"},
                {"n_points", std::to_string(profile.grid.n_points)},
                {"pitch_mrad", exact(profile.grid.pitch_mrad)}};
  t.header = {"angle_mrad", "intensity"};
  t.values.resize(profile.values.size(), 2);
  for (Eigen::Index i = 0; i < profile.values.size(); ++i) {
    t.values(i, 0) = profile.grid.angle_mrad(static_cast<int>(i));
    t.values(i, 1) = profile.values(i);
  }
  write_table(path, t);
}

// ---------------------------------------------------------------------------
// Bundles

void write_result_bundle(const std::filesystem::path& dir, const SchmidtResult<double>& result,
                         const BundleContext& context) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  const auto base = provenance_comments(context);
  const auto& one_d = result.one_d;
  const auto& spec = result.spectrum;
  const auto n = static_cast<int>(one_d.mu.size());

  Table spectrum;
  spectrum.comments = base;
  spectrum.comments.emplace_back("order", "lambda descending, then i + j ascending, then i ascending");
  spectrum.header = {"k", "i", "j", "lambda"};
  spectrum.values.resize(spec.lambda.size(), 4);
  for (Eigen::Index k = 0; k < spec.lambda.size(); ++k) {
    spectrum.values.row(k) << double(k), spec.pairs[k].i, spec.pairs[k].j, spec.lambda(k);
  }
  write_table(dir / "spectrum.tsv", spectrum);

  Table mu;
  mu.comments = base;
  mu.header = {"i", "mu"};
  mu.values.resize(n, 2);
  for (int i = 0; i < n; ++i) mu.values.row(i) << double(i), one_d.mu(i);
  write_table(dir / "mu.tsv", mu);

  Table modes;
  modes.comments = base;
  modes.comments.emplace_back("n_points", std::to_string(one_d.grid.n_points));
  modes.comments.emplace_back("pitch_mrad", exact(one_d.grid.pitch_mrad));
  modes.comments.emplace_back("layout", "column i is mode i sampled on the grid");
  modes.values = one_d.modes;
  write_table(dir / "modes_1d.tsv", modes);

  for (std::size_t k = 0; k < result.metrics.mode_fwhm_mrad.size(); ++k) {
    const IndexPair p = spec.pairs[k];
    Table grid;
    grid.comments = base;
    grid.comments.emplace_back("mode", std::to_string(k));
    grid.comments.emplace_back("i", std::to_string(p.i));
    grid.comments.emplace_back("j", std::to_string(p.j));
    grid.comments.emplace_back("pitch_mrad", exact(one_d.grid.pitch_mrad));
    grid.values = tensor_mode(one_d, p.i, p.j);
    write_table(dir / ("mode_2d_" + std::to_string(k) + ".tsv"), grid);
  }

  const double trace = one_d.mu.sum();
  std::string metrics = comment_block(context);
  metrics += "schmidt_number=" + format_number(result.metrics.schmidt_number) + "\n";
  metrics += "schmidt_number_1d=" + format_number(trace > 0 ? schmidt_number_1d(one_d.mu) : NAN) + "\n";
  metrics += "total_intensity=" + format_number(trace) + "\n";
  metrics += "total_intensity_2d=" + format_number(trace * trace) + "\n";
  for (std::size_t k = 0; k < result.metrics.mode_fwhm_mrad.size(); ++k) {
    metrics += "fwhm_mode_" + std::to_string(k) + "_mrad=" + format_number(result.metrics.mode_fwhm_mrad[k]) + "\n";
  }
  metrics += "n_keep=" + std::to_string(spec.lambda.size()) + "\n";
  metrics += "n_points=" + std::to_string(n) + "\n";
  metrics += "clamped_negative=" + format_number(one_d.clamped_negative) + "\n";
  for (const auto& [k, v] : context.metrics) metrics += k + "=" + format_number(v) + "\n";
  write_text(dir / "metrics.txt", metrics);

  if (context.config) write_text(dir / "config.txt", comment_block(context) + format_config(*context.config));
}

void write_bench_report(const std::filesystem::path& dir, const BenchReport& r, const BundleContext& context) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());

  auto f = [](double x) { return format_number(x); };
  std::ostringstream txt;
  txt << comment_block(context);
  txt << "Stack: " << r.rows << " x " << r.cols << " pixels, " << r.n_frames << " frames\n";
  txt << "Timing: median of " << r.repetitions << " runs, eigensolver " << r.eigensolver << "\n\n";
  txt << "Symmetric slice method\n"
      << "  slicing        " << f(r.symmetric.slicing_s) << " s\n"
      << "  covariance     " << f(r.symmetric.covariance_s) << " s\n"
      << "  estimate       " << f(r.symmetric.estimate_s) << " s\n"
      << "  decomposition  " << f(r.symmetric.decomposition_s) << " s\n"
      << "  total          " << f(r.symmetric_total_s) << " s\n"
      << "  memory         " << r.symmetric_bytes << " bytes\n\n";
  txt << "Full 4D method\n"
      << "  covariance     " << f(r.full4d.covariance_s) << " s\n"
      << "  diagonalize    " << f(r.full4d.diagonalization_s) << " s\n"
      << "  total          " << f(r.full4d_total_s) << " s\n"
      << "  memory         " << r.full4d_bytes << " bytes\n\n";
  txt << "Speedup (compute only)  " << f(r.speedup) << "\n";
  txt << "Speedup (with stack I/O " << f(r.io_s) << " s)  " << f(r.end_to_end_speedup()) << "\n\n";
  txt << "Top " << r.symmetric_spectrum.size() << " normalised eigenvalues\n  k\tsymmetric\tfull4d\n";
  for (Eigen::Index k = 0; k < r.symmetric_spectrum.size(); ++k) {
    txt << "  " << k << '\t' << f(r.symmetric_spectrum(k)) << '\t'
        << (k < r.full4d_spectrum.size() ? f(r.full4d_spectrum(k)) : "nan") << '\n';
  }
  txt << "Relative L1 distance    " << f(r.spectrum_l1) << "\n";
  txt << "Subspace dimension      " << r.subspace_dim << "\n";
  txt << "Subspace overlap        " << f(r.subspace_overlap) << "\n";
  txt << "Principal cosines      ";
  for (Eigen::Index k = 0; k < r.principal_cosines.size(); ++k) txt << ' ' << f(r.principal_cosines(k));
  txt << '\n';
  write_text(dir / "bench_report.txt", txt.str());

  std::ostringstream kv;
  kv << comment_block(context);
  kv << "rows=" << r.rows << "\ncols=" << r.cols << "\nframes=" << r.n_frames
     << "\nrepetitions=" << r.repetitions << "\neigensolver=" << r.eigensolver
     << "\nsymmetric_slicing_s=" << f(r.symmetric.slicing_s)
     << "\nsymmetric_covariance_s=" << f(r.symmetric.covariance_s)
     << "\nsymmetric_estimate_s=" << f(r.symmetric.estimate_s)
     << "\nsymmetric_decomposition_s=" << f(r.symmetric.decomposition_s)
     << "\nsymmetric_total_s=" << f(r.symmetric_total_s)
     << "\nfull4d_covariance_s=" << f(r.full4d.covariance_s)
     << "\nfull4d_diagonalization_s=" << f(r.full4d.diagonalization_s)
     << "\nfull4d_total_s=" << f(r.full4d_total_s)
     << "\nspeedup=" << f(r.speedup)
     << "\nio_s=" << f(r.io_s)
     << "\nspeedup_end_to_end=" << f(r.end_to_end_speedup())
     << "\nsymmetric_bytes=" << r.symmetric_bytes
     << "\nfull4d_bytes=" << r.full4d_bytes
     << "\nspectrum_l1=" << f(r.spectrum_l1)
     << "\nsubspace_dim=" << r.subspace_dim
     << "\nsubspace_overlap=" << f(r.subspace_overlap) << '\n';
  for (Eigen::Index k = 0; k < r.symmetric_spectrum.size(); ++k) {
    kv << "symmetric_lambda_" << k << '=' << f(r.symmetric_spectrum(k)) << '\n';
  }
  for (Eigen::Index k = 0; k < r.full4d_spectrum.size(); ++k) {
    kv << "full4d_lambda_" << k << '=' << f(r.full4d_spectrum(k)) << '\n';
  }
  write_text(dir / "bench.kv", kv.str());
  if (context.config) write_text(dir / "config.txt", comment_block(context) + format_config(*context.config));
}

double BundleData::metric(const std::string& key) const {
  const auto it = metrics.find(key);
  if (it == metrics.end()) throw Error(ErrorKind::format, "bundle has no metric '" + key + "'");
  return std::strtod(it->second.c_str(), nullptr);
}

OneDDecomposition<double> BundleData::decomposition() const {
  OneDDecomposition<double> d;
  d.grid.n_points = to_int("n_points", modes_1d.comment("n_points"));
  d.grid.pitch_mrad = to_double("pitch_mrad", modes_1d.comment("pitch_mrad"));
  if (mu.values.cols() != 2 || mu.values.rows() != d.grid.n_points ||
      modes_1d.values.rows() != d.grid.n_points || modes_1d.values.cols() != d.grid.n_points) {
    throw Error(ErrorKind::format, "bundle decomposition tables have inconsistent shapes");
  }
  d.mu = mu.values.col(1);
  d.modes = modes_1d.values;
  return d;
}

BundleData read_result_bundle(const std::filesystem::path& dir) {
  BundleData b;
  b.spectrum = read_table(dir / "spectrum.tsv");
  b.mu = read_table(dir / "mu.tsv");
  b.modes_1d = read_table(dir / "modes_1d.tsv");
  for (int k = 0;; ++k) {
    const auto path = dir / ("mode_2d_" + std::to_string(k) + ".tsv");
    if (!std::filesystem::exists(path)) break;
    b.modes_2d.push_back(read_table(path));
  }
  b.metrics = parse_key_values(read_text(dir / "metrics.txt"));
  return b;
}

}  // namespace spdc::io
