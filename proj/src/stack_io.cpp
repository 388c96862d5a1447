#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc::io {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes[at + i]) << (8 * i);
  return v;
}

std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used == value.size()) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::format, "metadata key '" + key + "' has non-numeric value '" + value + "'");
}

}  // namespace

std::vector<std::uint8_t> encode_stack(const ImageStack& stack) {
  for (const Frame& f : stack.frames) {
    if (f.rows() != stack.rows || f.cols() != stack.cols) {
      throw Error(ErrorKind::format, "frame shape differs from the stack shape");
    }
  }
  std::vector<std::uint8_t> out;
  const std::size_t pixels = std::size_t(stack.rows) * stack.cols;
  out.reserve(kStackHeaderSize + 4 * pixels * stack.frames.size());
  out.insert(out.end(), {'Q', 'S', 'T', 'K'});
  put_u32(out, kStackVersion);
  put_u32(out, static_cast<std::uint32_t>(stack.rows));
  put_u32(out, static_cast<std::uint32_t>(stack.cols));
  put_u32(out, static_cast<std::uint32_t>(stack.frames.size()));
  out.push_back(kDtypeFloat32);
  out.insert(out.end(), {0, 0, 0});
  for (const Frame& f : stack.frames) {
    for (std::size_t i = 0; i < pixels; ++i) put_u32(out, std::bit_cast<std::uint32_t>(f.data()[i]));
  }
  return out;
}

ImageStack decode_stack(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kStackHeaderSize) {
    throw FormatError(ErrorKind::format,
                      "truncated header: expected 24 bytes, got " + std::to_string(bytes.size()),
                      bytes.size());
  }
  if (!(bytes[0] == 'Q' && bytes[1] == 'S' && bytes[2] == 'T' && bytes[3] == 'K')) {
    throw FormatError(ErrorKind::format, "bad magic at byte 0", 0);
  }
  const std::uint32_t version = get_u32(bytes, 4);
  if (version != kStackVersion) {
    throw FormatError(ErrorKind::format, "unsupported version " + std::to_string(version) + " at byte 4", 4);
  }
  const std::uint8_t dtype = bytes[20];
  if (dtype != kDtypeFloat32) {
    throw FormatError(ErrorKind::unsupported_dtype,
                      "unsupported dtype " + std::to_string(dtype) + " at byte 20", 20);
  }
  for (std::size_t i = 21; i < kStackHeaderSize; ++i) {
    if (bytes[i] != 0) throw FormatError(ErrorKind::format, "reserved byte " + std::to_string(i) + " is not zero", i);
  }

  ImageStack stack;
  const std::uint32_t rows = get_u32(bytes, 8);
  const std::uint32_t cols = get_u32(bytes, 12);
  const std::uint32_t frames = get_u32(bytes, 16);
  const std::uint64_t expected = std::uint64_t(4) * rows * cols * frames;
  const std::uint64_t actual = bytes.size() - kStackHeaderSize;
  if (actual != expected) {
    throw FormatError(ErrorKind::format,
                      "payload size mismatch at byte 24: expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(actual),
                      kStackHeaderSize + std::min(actual, expected));
  }
  stack.rows = static_cast<int>(rows);
  stack.cols = static_cast<int>(cols);
  stack.frames.resize(frames);
  const std::size_t pixels = std::size_t(rows) * cols;
  std::size_t at = kStackHeaderSize;
  for (Frame& f : stack.frames) {
    f.resize(rows, cols);
    for (std::size_t i = 0; i < pixels; ++i, at += 4) f.data()[i] = std::bit_cast<float>(get_u32(bytes, at));
  }
  return stack;
}

std::string encode_metadata(const StackMetadata& meta) {
  std::ostringstream out;
  out << "pitch_mrad=" << exact(meta.pitch_mrad) << '\n';
  if (meta.center_row) out << "center_row=" << *meta.center_row << '\n';
  if (meta.center_col) out << "center_col=" << *meta.center_col << '\n';
  out << "gain=" << exact(meta.gain) << '\n';
  out << "seed=" << meta.seed << '\n';
  out << "read_noise=" << exact(meta.read_noise) << '\n';
  out << "offset=" << exact(meta.offset) << '\n';
  out << "quantize=" << (meta.quantize ? 1 : 0) << '\n';
  return out.str();
}

StackMetadata decode_metadata(const std::string& text) {
  StackMetadata meta;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "pitch_mrad") {
      meta.pitch_mrad = parse_double(key, value);
    } else if (key == "center_row") {
      meta.center_row = static_cast<int>(parse_double(key, value));
    } else if (key == "center_col") {
      meta.center_col = static_cast<int>(parse_double(key, value));
    } else if (key == "gain") {
      meta.gain = parse_double(key, value);
    } else if (key == "seed") {
      std::uint64_t seed = 0;
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error(ErrorKind::format, "metadata seed '" + value + "' is not an unsigned integer");
      }
      meta.seed = seed;
    } else if (key == "read_noise") {
      meta.read_noise = parse_double(key, value);
    } else if (key == "offset") {
      meta.offset = parse_double(key, value);
    } else if (key == "quantize") {
      meta.quantize = parse_double(key, value) != 0.0;
    } else {
      throw Error(ErrorKind::format, "unknown metadata key '" + key + "'");
    }
  }
  return meta;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

void write_stack(const std::filesystem::path& path, const ImageStack& stack) {
  const std::vector<std::uint8_t> bytes = encode_stack(stack);
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
  }
  write_text(path.string() + ".meta", encode_metadata(stack.meta));
}

ImageStack read_stack(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_bytes(path);
  ImageStack stack = decode_stack(bytes);
  const std::filesystem::path meta = path.string() + ".meta";
  if (std::filesystem::exists(meta)) stack.meta = decode_metadata(read_text(meta));
  return stack;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::config, "expected key=value, got '" + line + "'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace spdc::io
