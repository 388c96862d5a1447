#include <cmath>

#include <doctest.h>

#include "spdc/bench.hpp"
#include "spdc/correlation.hpp"
#include "spdc/full4d.hpp"
#include "spdc/subspace.hpp"
#include "spdc/thermal.hpp"

using namespace spdc;

namespace {

ImageStack gsm_stack(int n, int frames, std::uint64_t seed) {
  SynthesisSpec spec;
  spec.one_d = scaled_to_peak(diagonalize_1d(gaussian_schell_matrix({n, 1.0}, n / 8.0, 1.5)), 1000.0);
  spec.n_frames = frames;
  spec.seed = seed;
  return synthesize_stack(spec);
}

}  // namespace

TEST_CASE("brute force toy stack") {
  // Two frames of 2 x 2 pixels. Means (2, 3, 1, 5); fluctuations are +-d.
  ImageStack s;
  s.rows = s.cols = 2;
  Frame a(2, 2), b(2, 2);
  a << 1, 4, 1, 7;
  b << 3, 2, 1, 3;
  s.frames = {a, b};
  const double d[2][4] = {{-1, 1, 0, 2}, {1, -1, 0, -2}};

  const Full4DCovariance cov = full4d_covariances(s);
  const Eigen::MatrixXd g = full4d_estimate(s);
  for (int p = 0; p < 4; ++p) {
    for (int q = 0; q < 4; ++q) {
      const double ct = (d[0][p] * d[0][q] + d[1][p] * d[1][q]) / 2;
      const double ca = (d[0][p] * d[1][q] + d[1][p] * d[0][q]) / 2;  // wraps; already symmetric
      CHECK(cov.c_true(p, q) == doctest::Approx(ct));
      CHECK(cov.c_acc(p, q) == doctest::Approx(ca));
      CHECK(g(p, q) == doctest::Approx(std::sqrt(std::max(ct - ca, 0.0))));
    }
  }
}

TEST_CASE("identical frames and cap") {
  ImageStack s;
  s.rows = s.cols = 4;
  s.frames.assign(3, Frame::Constant(4, 4, 2.0f));
  CHECK(full4d_estimate(s).cwiseAbs().maxCoeff() == 0.0);
  try {
    full4d_estimate(s, 3);
    FAIL("expected a resource error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resource);
  }
}

TEST_CASE("diagonal is the variance map") {
  const ImageStack s = gsm_stack(8, 300, 4);
  const Full4DCovariance cov = full4d_covariances(s);
  const Eigen::MatrixXd mean = s.mean_frame();
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      double var = 0;
      for (const Frame& f : s.frames) var += std::pow(f(r, c) - mean(r, c), 2);
      var /= s.n_frames();
      CHECK(cov.c_true(r * 8 + c, r * 8 + c) == doctest::Approx(var).epsilon(1e-6));
    }
  }
}

TEST_CASE("decompose known structure") {
  const int rows = 3, cols = 4, p = 12;
  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(p, 1, 12);
  const Full4DResult one = full4d_decompose(w * w.transpose(), rows, cols, 2);
  CHECK(one.spectrum(0) == doctest::Approx(1.0));
  CHECK(std::abs(one.spectrum(1)) < 1e-12);
  const Eigen::VectorXd u = w.normalized();
  CHECK(std::abs(one.mode_vectors.col(0).dot(u)) == doctest::Approx(1.0));
  REQUIRE(one.modes.size() == 2);
  CHECK(one.modes[0].rows() == rows);
  CHECK(std::abs(one.modes[0](1, 2)) == doctest::Approx(std::abs(u(1 * cols + 2))));

  Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(p, p)).householderQ();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(p);
  lambda.head(4) << 0.4, 0.3, 0.2, 0.1;
  const Full4DResult r = full4d_decompose(q * lambda.asDiagonal() * q.transpose(), rows, cols, 4);
  CHECK((r.spectrum.head(4) - lambda.head(4)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(subspace_overlap<double>(r.mode_vectors, q.leftCols(4)) == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS_AS(full4d_decompose(Eigen::MatrixXd::Identity(5, 5), rows, cols, 1), Error);
}

TEST_CASE("bench smoke") {
  const ImageStack s = gsm_stack(16, 200, 12);
  BenchConfig cfg;
  cfg.repetitions = 1;
  cfg.recon.center_policy = CenterPolicy::metadata;
  const BenchReport r = compare_methods(s, cfg);
  CHECK(r.rows == 16);
  CHECK(r.n_frames == 200);
  CHECK(r.symmetric_total_s > 0);
  CHECK(r.full4d_total_s > 0);
  CHECK(r.speedup == doctest::Approx(r.full4d_total_s / r.symmetric_total_s));
  CHECK(r.symmetric_spectrum.size() == 8);
  CHECK(r.full4d_bytes > r.symmetric_bytes);
  CHECK(r.subspace_dim >= 8);
  CHECK(r.spectrum_l1 < 0.2);
  MESSAGE("N=16 speedup " << r.speedup << " l1 " << r.spectrum_l1 << " overlap " << r.subspace_overlap);
}
