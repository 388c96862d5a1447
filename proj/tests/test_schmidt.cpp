#include <cmath>
#include <map>
#include <random>

#include <doctest.h>

#include "spdc/correlation.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/subspace.hpp"

using namespace spdc;

namespace {

OneDDecomposition<double> from_mu(std::initializer_list<double> mu) {
  OneDDecomposition<double> d;
  const int n = static_cast<int>(mu.size());
  d.mu = Eigen::Map<const Eigen::VectorXd>(mu.begin(), n);
  d.modes = Eigen::MatrixXd::Identity(n, n);
  d.grid = {n, 1.0};
  return d;
}

}  // namespace

TEST_CASE("two by two") {
  Eigen::Matrix2d m;
  m << 2, 1, 1, 2;
  const auto d = diagonalize_1d<double>(m, {2, 1.0});
  CHECK(d.mu(0) == doctest::Approx(3.0));
  CHECK(d.mu(1) == doctest::Approx(1.0));
  const double s = 1 / std::sqrt(2.0);
  CHECK(std::abs(d.modes(0, 0)) == doctest::Approx(s));
  CHECK(d.modes(0, 0) * d.modes(1, 0) > 0);
  CHECK(d.modes(0, 1) * d.modes(1, 1) < 0);
}

TEST_CASE("degenerate and rank one") {
  const auto id = diagonalize_1d<double>(Eigen::MatrixXd::Identity(4, 4), {4, 1.0});
  CHECK((id.mu.array() - 1.0).abs().maxCoeff() < 1e-14);
  CHECK((reconstruct(id) - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-12);

  Eigen::VectorXd w(5);
  w << 0, 1, 2, 0, 0;  // |w|^2 = 5
  const auto r = diagonalize_1d<double>(w * w.transpose(), {5, 1.0});
  CHECK(r.mu(0) == doctest::Approx(5.0));
  CHECK(r.mu.tail(4).cwiseAbs().maxCoeff() == 0.0);
  CHECK((r.modes.col(0) - w / std::sqrt(5.0)).norm() < 1e-12);
}

TEST_CASE("diagonalize errors") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(3, 3);
  m(0, 1) = 1;
  CHECK_THROWS_AS(diagonalize_1d<double>(m, {3, 1.0}), Error);
  m(0, 1) = std::nan("");
  try {
    diagonalize_1d<double>(m, {3, 1.0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
  }
  CHECK_THROWS_AS(diagonalize_1d<double>(Eigen::MatrixXd(2, 3), {2, 1.0}), Error);
}

TEST_CASE("clamping") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(2, 2) = -1e-3;
  const auto d = diagonalize_1d<double>(m, {3, 1.0});
  CHECK(d.mu(2) == 0.0);
  CHECK(d.clamped_negative == doctest::Approx(1e-3));
  CHECK(d.mu.minCoeff() >= 0.0);
}

TEST_CASE("tensor spectrum") {
  auto s = tensor_spectrum(from_mu({0.8, 0.2}), 4);
  CHECK(s.lambda(0) == doctest::Approx(0.64));
  CHECK(s.lambda(1) == doctest::Approx(0.16));
  CHECK(s.lambda(2) == doctest::Approx(0.16));
  CHECK(s.lambda(3) == doctest::Approx(0.04));
  CHECK(s.pairs[1] == IndexPair{0, 1});
  CHECK(s.pairs[2] == IndexPair{1, 0});
  CHECK(s.schmidt_number == doctest::Approx(1.0 / (0.4096 + 0.0256 + 0.0256 + 0.0016)));

  auto one = tensor_spectrum(from_mu({1.0}), 1);
  CHECK(one.lambda(0) == 1.0);
  CHECK(one.schmidt_number == 1.0);

  auto three = tensor_spectrum(from_mu({0.5, 0.3, 0.2}), 9);
  CHECK(three.lambda(0) == doctest::Approx(0.25));
  CHECK(three.lambda.sum() == doctest::Approx(1.0));
  int found = 0;
  for (int k = 0; k < 9; ++k) {
    const auto p = three.pairs[k];
    if ((p == IndexPair{1, 2} || p == IndexPair{2, 1})) {
      CHECK(three.lambda(k) == doctest::Approx(0.06));
      ++found;
    }
    if ((p == IndexPair{0, 1} || p == IndexPair{1, 0})) CHECK(three.lambda(k) == doctest::Approx(0.15));
  }
  CHECK(found == 2);

  // Truncation keeps the normalisation of the full set.
  auto cut = tensor_spectrum(from_mu({0.5, 0.3, 0.2}), 2);
  CHECK(cut.lambda.size() == 2);
  CHECK(cut.lambda(1) == doctest::Approx(0.15));
  CHECK(cut.schmidt_number == three.schmidt_number);

  CHECK_THROWS_AS(tensor_spectrum(from_mu({0.0, 0.0}), 1), Error);
  CHECK_THROWS_AS(tensor_spectrum(from_mu({1.0, 0.0}), 5), Error);
}

TEST_CASE("schmidt number") {
  CHECK(schmidt_number(Eigen::VectorXd::Ones(1)) == 1.0);
  CHECK(schmidt_number(Eigen::VectorXd::Constant(4, 0.25)) == doctest::Approx(4.0));
  Eigen::Vector4d l(0.64, 0.16, 0.16, 0.04);
  CHECK(schmidt_number(l) == doctest::Approx(2.1626).epsilon(1e-4));
  try {
    schmidt_number(Eigen::Vector2d(0.5, 0.6));
    FAIL("expected a contract error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::contract);
  }
  CHECK(schmidt_number_1d(Eigen::Vector2d(8, 2)) == doctest::Approx(1 / 0.68));
}

TEST_CASE("tensor modes") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(6, 6);
  for (int i = 0; i < 36; ++i) a(i) = normal(rng);
  const auto d = diagonalize_1d<double>(a * a.transpose(), {6, 1.0});

  CHECK(tensor_mode(d, 1, 3) == tensor_mode(d, 3, 1).transpose());
  CHECK(tensor_mode(d, 2, 2) == tensor_mode(d, 2, 2).transpose());
  CHECK(tensor_mode(d, 0, 4).norm() == doctest::Approx(1.0));
  CHECK(std::abs((tensor_mode(d, 0, 1).array() * tensor_mode(d, 1, 0).array()).sum()) < 1e-12);
  CHECK(std::abs((tensor_mode(d, 0, 1).array() * tensor_mode(d, 2, 5).array()).sum()) < 1e-12);

  OneDDecomposition<double> basis = from_mu({1.0, 1.0, 1.0, 1.0});
  const Eigen::MatrixXd u = tensor_mode(basis, 2, 1);
  CHECK(u(2, 1) == 1.0);
  CHECK(u.cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(tensor_mode(basis, 4, 0), Error);
}

TEST_CASE("fwhm") {
  const WavevectorGrid grid{401, 0.1};
  Eigen::VectorXd gauss(401);
  for (int i = 0; i < 401; ++i) gauss(i) = std::exp(-std::pow(grid.angle_mrad(i) / 10.0, 2));
  CHECK(mode_fwhm<double>(gauss, grid) == doctest::Approx(2 * std::sqrt(std::log(2.0)) * 10).epsilon(1e-3));
  CHECK(mode_fwhm<double>(Eigen::VectorXd(-gauss), grid) == doctest::Approx(16.65).epsilon(1e-3));

  Eigen::MatrixXd mode = gauss * gauss.transpose();
  CHECK(mode_fwhm<double>(mode, grid) == doctest::Approx(16.65).epsilon(1e-3));

  auto kind = [&](const Eigen::VectorXd& v) {
    try {
      mode_fwhm<double>(v, grid);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind{};
  };
  CHECK(kind(Eigen::VectorXd::Ones(401)) == ErrorKind::not_measurable);
  Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(401, 0, 1);
  CHECK(kind(ramp) == ErrorKind::not_measurable);
}

TEST_CASE("theory decomposition properties") {
  CrystalPumpConfig c;
  c.gain = 1.49;
  const CorrelationMatrix g = g1_slice(c, default_grid(96));
  const auto d = diagonalize_1d(g);
  const Eigen::Index n = d.mu.size();

  CHECK((reconstruct(d) - g.values).norm() < 1e-8 * g.values.norm());
  CHECK((d.modes.transpose() * d.modes - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index i = 1; i < n; ++i) CHECK(d.mu(i) <= d.mu(i - 1));

  const auto r = schmidt_analysis(d, 25);
  const double k1 = schmidt_number_1d(d.mu);
  CHECK(r.spectrum.schmidt_number == doctest::Approx(k1 * k1).epsilon(1e-10));
  CHECK(r.metrics.mode_fwhm_mrad.size() == 4);

  std::map<long long, int> counts;
  for (std::size_t k = 0; k < r.spectrum.pairs.size(); ++k) {
    const auto p = r.spectrum.pairs[k];
    CHECK(r.spectrum.lambda(Eigen::Index(k)) == d.mu(p.i) * d.mu(p.j) / (d.mu.sum() * d.mu.sum()));
    if (p.i != p.j) counts[std::min(p.i, p.j) * 100000LL + std::max(p.i, p.j)]++;
  }
  // A pair whose partner fell past the truncation is the only unmatched one allowed.
  int odd = 0;
  for (auto [key, count] : counts) odd += count % 2;
  CHECK(odd <= 1);
}

TEST_CASE("subspace helpers") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 2);
  Eigen::MatrixXd b(4, 2);
  b << 1, 1, 1, -1, 0, 0, 0, 0;
  CHECK(subspace_overlap<double>(a, b) == doctest::Approx(1.0));
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, 2);
  c(2, 0) = 1;
  c(3, 1) = 1;
  CHECK(subspace_overlap<double>(a, c) == doctest::Approx(0.0));

  Eigen::VectorXd mu(5);
  mu << 1.0, 0.99, 0.5, 0.2, 0.199;
  auto clusters = degenerate_clusters(mu, 0.05);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0] == std::pair{0, 2});
  CHECK(cluster_aligned_count(mu, 1, 0.05) == 2);
  CHECK(cluster_aligned_count(mu, 3, 0.05) == 3);
  CHECK(cluster_aligned_count(mu, 4, 0.05) == 5);
}
