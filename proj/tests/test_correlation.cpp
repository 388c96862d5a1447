#include <cmath>
#include <numbers>

#include <doctest.h>

#include "spdc/correlation.hpp"
#include "spdc/error.hpp"
#include "spdc/quadrature.hpp"

using namespace spdc;

TEST_CASE("gauss-legendre rule") {
  for (int n : {1, 2, 5, 16, 64}) {
    const QuadratureRule r = gauss_legendre(n, -1.0, 3.0);
    CHECK(r.weights.sum() == doctest::Approx(4.0).epsilon(1e-13));
    // Exact for polynomials up to degree 2n - 1.
    for (int p = 0; p <= 2 * n - 1 && p <= 20; ++p) {
      double sum = 0;
      for (int i = 0; i < n; ++i) sum += r.weights(i) * std::pow(r.nodes(i), p);
      const double exact = (std::pow(3.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
      CHECK(sum == doctest::Approx(exact).epsilon(1e-11));
    }
  }
  const QuadratureRule r = gauss_legendre(40, 0.0, std::numbers::pi);
  CHECK(r.weights.dot(r.nodes.array().sin().matrix()) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("low gain limit") {
  // At g -> 0 the kernel is L sinc(dk L / 2) and the radial integral of a
  // Gaussian pump against J0 is (pi w^2 / 2) exp(-dq^2 w^2 / 8).
  CrystalPumpConfig c;
  c.gain = 1e-4;
  const WavevectorGrid grid{41, 1.0};
  const CorrelationMatrix g = g1_slice(c, grid);

  const Wavevectors k = wavevectors(c);
  const double w = c.pump_waist, L = c.length;
  Eigen::MatrixXd oracle(41, 41);
  for (int a = 0; a < 41; ++a) {
    for (int b = 0; b < 41; ++b) {
      const double qa = grid.q(a, k.k_s), qb = grid.q(b, k.k_s);
      const double da = longitudinal_mismatch(qa, c), db = longitudinal_mismatch(qb, c);
      auto sinc_l = [L](double d) { return d == 0 ? L : std::sin(0.5 * d * L) / (0.5 * d); };
      const double dq = qa - qb;
      oracle(a, b) = c.gain * c.gain * 0.5 * std::numbers::pi * w * w * std::exp(-dq * dq * w * w / 8) *
                     sinc_l(da) * sinc_l(db) * std::cos(0.5 * (da - db) * L) /
                     (std::sqrt(k.k_s * k.k_s - qa * qa) * std::sqrt(k.k_s * k.k_s - qb * qb));
    }
  }
  const double peak = oracle.cwiseAbs().maxCoeff();
  CHECK((g.values - oracle).cwiseAbs().maxCoeff() < 1e-6 * peak);
}

TEST_CASE("theory slice structure") {
  CrystalPumpConfig c;
  c.gain = 1.49;
  const WavevectorGrid grid{65, 2.5};
  const CorrelationMatrix g = g1_slice(c, grid);
  const Eigen::Index n = g.values.rows();

  CHECK(g.provenance == Provenance::theory);
  CHECK(g.radial_nodes >= 512);
  CHECK(g.values == g.values.transpose());
  CHECK(g.values.diagonal().minCoeff() >= 0.0);
  CHECK(g.imag_residual >= 0.0);

  const double peak = g.values.cwiseAbs().maxCoeff();
  double reflection = 0;
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      reflection = std::max(reflection, std::abs(g.values(a, b) - g.values(n - 1 - a, n - 1 - b)));
  CHECK(reflection < 1e-6 * peak);

  const IntensityProfile i = far_field_intensity(c, grid);
  CHECK((i.values - g.values.diagonal()).cwiseAbs().maxCoeff() < 1e-8 * i.values.maxCoeff());
  CHECK(total_intensity(i) == doctest::Approx(g.values.trace()).epsilon(1e-8));

  // Doubling the radial resolution from the converged count changes nothing.
  QuadratureSettings finer;
  finer.initial_nodes = g.radial_nodes;
  const CorrelationMatrix h = g1_slice(c, grid, finer);
  CHECK((h.values - g.values).cwiseAbs().maxCoeff() < 1e-6 * peak);

  // Entries far off the ridge vanish.
  const auto coh = coherence_degree(g, 0.1);
  CHECK(coh.degree(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(coh.degree(10)) < 1e-3);
}

TEST_CASE("coherence degree") {
  const WavevectorGrid grid{64, 0.5};
  const CorrelationMatrix gsm = gaussian_schell_matrix(grid, 5.0, 1.5);
  const CoherenceProfile p = coherence_degree(gsm);
  CHECK(p.degree(0) == 1.0);
  CHECK(p.max_spread() < 1e-10);
  for (int d = 1; d < 10; ++d) {
    const double x = d * 0.5 / 1.5;
    CHECK(p.degree(d) == doctest::Approx(std::exp(-0.5 * x * x)).epsilon(1e-10));
  }

  CorrelationMatrix zero = gsm;
  zero.values.setZero();
  CHECK_THROWS_AS(coherence_degree(zero), Error);

  // Default crystal at g = 1.49: the quasi-homogeneous form holds only approximately.
  CrystalPumpConfig c;
  c.gain = 1.49;
  const CorrelationMatrix g = g1_slice(c, default_grid(128));
  // Central support: samples above 30% of the peak intensity.
  const CoherenceProfile t = coherence_degree(g, 0.3);
  CHECK(t.degree(0) == doctest::Approx(1.0));
  MESSAGE("theory coherence spread " << t.max_spread());
  CHECK(t.max_spread() < 0.1);
}

TEST_CASE("gain dependence") {
  // Full width between the outermost half-maximum crossings, interpolated.
  auto outer_fwhm = [](const IntensityProfile& p) {
    const Eigen::VectorXd& v = p.values;
    const double h = 0.5 * v.maxCoeff();
    Eigen::Index lo = 0, hi = v.size() - 1;
    while (v(lo) < h) ++lo;
    while (v(hi) < h) --hi;
    const double left = lo - 1 + (h - v(lo - 1)) / (v(lo) - v(lo - 1));
    const double right = hi + (v(hi) - h) / (v(hi) - v(hi + 1));
    return (right - left) * p.grid.pitch_mrad;
  };
  CrystalPumpConfig c;
  const WavevectorGrid grid{1024, 0.15625};
  double prev_total = 0, prev_g = 0, prev_width = 0;
  for (double g : {1.0, 1.2, 1.4, 1.6, 1.8}) {
    c.gain = g;
    const IntensityProfile i = far_field_intensity(c, grid);
    const double total = total_intensity(i);
    const double width = outer_fwhm(i);
    if (prev_total > 0) {
      CHECK(total / prev_total > (g * g) / (prev_g * prev_g));
      CHECK(width > prev_width);
    }
    prev_total = total;
    prev_g = g;
    prev_width = width;
  }
}

TEST_CASE("grid and quadrature errors") {
  CrystalPumpConfig c;
  CHECK_THROWS_AS(g1_slice(c, {1, 1.0}), Error);
  CHECK_THROWS_AS(g1_slice(c, {8, 0.0}), Error);
  QuadratureSettings q;
  q.initial_nodes = 4;
  q.max_nodes = 8;
  q.rel_tol = 1e-14;
  try {
    g1_slice(c, {16, 5.0}, q);
    FAIL("expected an accuracy error");
  } catch (const AccuracyError& e) {
    CHECK(e.kind() == ErrorKind::accuracy);
    CHECK(e.achieved() > 1e-14);
  }
  CHECK(default_grid(256).angle_mrad(0) == -80.0);
}
