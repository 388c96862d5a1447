#include "spdc/thermal.hpp"

#include <cmath>
#include <complex>

#include "spdc/error.hpp"

namespace spdc {

namespace {

/// sqrt(mu_i) v_i for the modes that carry weight.
Eigen::MatrixXd weighted_modes(const OneDDecomposition<double>& one_d) {
  Eigen::Index rank = 0;
  while (rank < one_d.mu.size() && one_d.mu(rank) > 0) ++rank;
  return one_d.modes.leftCols(rank) * one_d.mu.head(rank).cwiseSqrt().asDiagonal();
}

Eigen::MatrixXcd sample_field(const Eigen::MatrixXd& v, NormalStream& rng) {
  const Eigen::Index r = v.cols();
  Eigen::MatrixXcd c(r, r);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      const double re = rng();
      const double im = rng();
      c(i, j) = {s * re, s * im};
    }
  }
  const Eigen::MatrixXcd vc = v.cast<std::complex<double>>();
  return vc * (c * vc.transpose());
}

}  // namespace

void SynthesisSpec::validate() const {
  if (n_frames < 2) throw Error(ErrorKind::domain, "synthesis needs at least 2 frames");
  if (!(read_noise >= 0) || !(offset >= 0)) {
    throw Error(ErrorKind::domain, "noise parameters must be non-negative");
  }
  if (one_d.modes.rows() != one_d.mu.size() || one_d.modes.cols() != one_d.mu.size()) {
    throw Error(ErrorKind::domain, "decomposition shape mismatch");
  }
}

Eigen::MatrixXcd sample_field_frame(const SynthesisSpec& spec, NormalStream& rng) {
  const Eigen::MatrixXd v = weighted_modes(spec.one_d);
  if (v.cols() == 0) {
    const Eigen::Index n = spec.one_d.modes.rows();
    return Eigen::MatrixXcd::Zero(n, n);
  }
  return sample_field(v, rng);
}

ImageStack synthesize_stack(const SynthesisSpec& spec) {
  spec.validate();
  const auto n = static_cast<int>(spec.one_d.modes.rows());
  const Eigen::MatrixXd v = weighted_modes(spec.one_d);

  ImageStack stack;
  stack.rows = n;
  stack.cols = n;
  stack.meta.pitch_mrad = spec.one_d.grid.pitch_mrad;
  stack.meta.center_row = spec.one_d.grid.center_index();
  stack.meta.center_col = spec.one_d.grid.center_index();
  stack.meta.gain = spec.gain_label;
  stack.meta.seed = spec.seed;
  stack.meta.read_noise = spec.read_noise;
  stack.meta.offset = spec.offset;
  stack.meta.quantize = spec.quantize;
  stack.frames.resize(spec.n_frames);

  for (int j = 0; j < spec.n_frames; ++j) {
    NormalStream rng = NormalStream::for_item(spec.seed, static_cast<std::uint64_t>(j));
    Eigen::MatrixXd intensity = v.cols() > 0 ? Eigen::MatrixXd(sample_field(v, rng).cwiseAbs2())
                                             : Eigen::MatrixXd::Zero(n, n);
    Frame& frame = stack.frames[j];
    frame.resize(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        double value = intensity(r, c) + spec.offset;
        if (spec.read_noise > 0) value += spec.read_noise * rng();
        if (spec.quantize) value = std::round(value);
        frame(r, c) = static_cast<float>(std::max(value, 0.0));
      }
    }
  }
  return stack;
}

Eigen::MatrixXd expected_intensity(const OneDDecomposition<double>& one_d) {
  const Eigen::VectorXd d = (one_d.modes.array().square().rowwise() *
                             one_d.mu.transpose().array()).rowwise().sum();
  return d * d.transpose();
}

OneDDecomposition<double> scaled_to_peak(OneDDecomposition<double> one_d, double peak) {
  const Eigen::VectorXd d = (one_d.modes.array().square().rowwise() *
                             one_d.mu.transpose().array()).rowwise().sum();
  const double top = d.maxCoeff();
  if (!(top > 0)) throw Error(ErrorKind::degenerate_input, "decomposition carries no intensity");
  one_d.mu *= std::sqrt(peak) / top;
  return one_d;
}

}  // namespace spdc
