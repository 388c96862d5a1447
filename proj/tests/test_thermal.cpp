#include <cmath>
#include <complex>

#include <doctest.h>

#include "spdc/correlation.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/thermal.hpp"

using namespace spdc;

namespace {

OneDDecomposition<double> gsm_decomposition(int n, double sigma_i, double sigma_c) {
  return diagonalize_1d(gaussian_schell_matrix({n, 1.0}, sigma_i, sigma_c));
}

}  // namespace

TEST_CASE("normal stream") {
  NormalStream a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  NormalStream c = NormalStream::for_item(42, 0), d = NormalStream::for_item(42, 1);
  CHECK(c() != d());

  NormalStream s(3);
  const int m = 200000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < m; ++i) {
    const double x = s();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / m) < 5 / std::sqrt(double(m)));
  CHECK(std::abs(sum2 / m - 1) < 5 * std::sqrt(2.0 / m));
}

TEST_CASE("zero and rank one spectra") {
  SynthesisSpec spec;
  spec.one_d = gsm_decomposition(8, 2.0, 1.0);
  spec.one_d.mu.setZero();
  NormalStream rng(1);
  CHECK(sample_field_frame(spec, rng).cwiseAbs().maxCoeff() == 0.0);

  spec.one_d = gsm_decomposition(8, 2.0, 1.0);
  spec.one_d.mu.tail(7).setZero();
  const Eigen::VectorXd v = spec.one_d.modes.col(0);
  const Eigen::MatrixXd outer = v * v.transpose();
  for (int f = 0; f < 5; ++f) {
    const Eigen::MatrixXcd e = sample_field_frame(spec, rng);
    const std::complex<double> c = e(4, 4) / outer(4, 4);
    CHECK((e - c * outer).cwiseAbs().maxCoeff() < 1e-12 * std::abs(c));
  }
}

TEST_CASE("field covariance") {
  // <E(x, y) E*(x', y)> = G(x, x') G(y, y).
  const int n = 6;
  SynthesisSpec spec;
  spec.one_d = gsm_decomposition(n, 1.5, 1.0);
  const Eigen::MatrixXd g = reconstruct(spec.one_d);
  const int m = 10000;
  const int y = 3;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
  NormalStream rng(11);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXcd col = sample_field_frame(spec, rng).col(y);
    acc += col * col.adjoint();
  }
  acc /= double(m);
  const Eigen::MatrixXd expected = g * g(y, y);
  const double scale = expected.cwiseAbs().maxCoeff();
  CHECK((acc.real() - expected).cwiseAbs().maxCoeff() < 3 / std::sqrt(double(m)) * scale);
  CHECK(acc.imag().cwiseAbs().maxCoeff() < 3 / std::sqrt(double(m)) * scale);
}

TEST_CASE("stack statistics") {
  const int n = 16;
  SynthesisSpec spec;
  spec.one_d = scaled_to_peak(gsm_decomposition(n, 3.0, 1.5), 500.0);
  spec.n_frames = 5000;
  spec.seed = 9;
  const ImageStack stack = synthesize_stack(spec);
  CHECK(stack.rows == n);
  CHECK(stack.n_frames() == 5000);
  CHECK(stack.meta.center_row == n / 2);
  CHECK(stack.meta.seed == 9u);

  const Eigen::MatrixXd expected = expected_intensity(spec.one_d);
  CHECK(expected.maxCoeff() == doctest::Approx(500.0));
  const Eigen::MatrixXd mean = stack.mean_frame();
  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
  for (const Frame& f : stack.frames) second += f.cast<double>().cwiseAbs2();
  second /= double(stack.n_frames());

  int lit = 0;
  const double m = stack.n_frames();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (expected(r, c) < 0.1 * expected.maxCoeff()) continue;
      ++lit;
      CHECK(std::abs(mean(r, c) / expected(r, c) - 1) < 5 / std::sqrt(m));
      const double g2 = second(r, c) / (mean(r, c) * mean(r, c));
      CHECK(std::abs(g2 - 2) < 0.1);
    }
  }
  CHECK(lit > 20);
}

TEST_CASE("determinism and independence") {
  SynthesisSpec spec;
  spec.one_d = scaled_to_peak(gsm_decomposition(12, 2.5, 1.2), 100.0);
  spec.n_frames = 2000;
  spec.seed = 5;
  const ImageStack a = synthesize_stack(spec);
  const ImageStack b = synthesize_stack(spec);
  for (int j = 0; j < a.n_frames(); ++j) CHECK(a.frames[j] == b.frames[j]);

  spec.seed = 6;
  const ImageStack c = synthesize_stack(spec);
  const int p = 6;
  const Eigen::MatrixXd ma = a.mean_frame(), mc = c.mean_frame();
  double cross = 0, va = 0, vc = 0;
  for (int j = 0; j < a.n_frames(); ++j) {
    const double da = a.frames[j](p, p) - ma(p, p);
    const double dc = c.frames[j](p, p) - mc(p, p);
    cross += da * dc;
    va += da * da;
    vc += dc * dc;
  }
  CHECK(std::abs(cross / std::sqrt(va * vc)) < 3 / std::sqrt(double(a.n_frames())));
}

TEST_CASE("noise and quantisation") {
  SynthesisSpec spec;
  spec.one_d = scaled_to_peak(gsm_decomposition(8, 2.0, 1.0), 50.0);
  spec.n_frames = 50;
  spec.read_noise = 3.0;
  spec.offset = 10.0;
  spec.quantize = true;
  const ImageStack s = synthesize_stack(spec);
  for (const Frame& f : s.frames) {
    CHECK(f.minCoeff() >= 0.0f);
    CHECK((f.array() - f.array().round()).abs().maxCoeff() == 0.0f);
  }
  CHECK(s.meta.quantize);
  CHECK(s.meta.read_noise == 3.0);

  spec.read_noise = -1;
  CHECK_THROWS_AS(synthesize_stack(spec), Error);
  spec.read_noise = 0;
  spec.n_frames = 1;
  CHECK_THROWS_AS(synthesize_stack(spec), Error);
  OneDDecomposition<double> empty = spec.one_d;
  empty.mu.setZero();
  CHECK_THROWS_AS(scaled_to_peak(empty, 1.0), Error);
}
