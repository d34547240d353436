#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "oracles.hpp"
#include "shotrf/error.hpp"
#include "shotrf/stats.hpp"
#include "shotrf/texture.hpp"

using namespace shotrf;

TEST_CASE("glcm of a constant plane is one diagonal entry") {
  for (int d : kGlcmDistances) {
    const GlcmMatrix m = glcm(testutil::constant_plane(12, 9, 77), d);
    const int g = 77 * 16 / 256;
    for (int i = 0; i < 16; ++i) {
      for (int j = 0; j < 16; ++j) CHECK(m.at(i, j) == (i == g && j == g ? 1.0 : 0.0));
    }
    const HaralickFeatures f = glcm_features(m);
    CHECK(f.energy == 1.0);
    CHECK(f.entropy == 0.0);
    CHECK(f.homogeneity == 1.0);
    CHECK(f.contrast == 0.0);
    CHECK(f.correlation == 1.0);
  }
}

TEST_CASE("glcm of the 2x2 two-column plane") {
  const Plane p(2, 2, {0, 255, 0, 255});
  const GlcmMatrix m = glcm(p, 1, 16);
  CHECK(m.at(0, 15) == 0.25);
  CHECK(m.at(15, 0) == 0.25);
  CHECK(m.at(0, 0) == 0.25);
  CHECK(m.at(15, 15) == 0.25);
  double total = 0;
  for (double v : m.probs) total += v;
  CHECK(total == 1.0);
}

TEST_CASE("checkerboard features have closed forms") {
  Plane p(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) p.at(x, y) = (x + y) % 2 ? 255 : 0;
  }
  const GlcmMatrix m = glcm(p, 1, 16);
  CHECK(m.at(0, 15) == 0.5);
  CHECK(m.at(15, 0) == 0.5);
  const HaralickFeatures f = glcm_features(m);
  CHECK(f.energy == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f.entropy == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.contrast == doctest::Approx(225.0).epsilon(1e-15));
  CHECK(f.homogeneity == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(f.correlation == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("glcm and Haralick features match the neighbour-walk oracle") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(8, 24);
  for (int trial = 0; trial < 200; ++trial) {
    const Plane p = testutil::random_plane(rng, size(rng), size(rng));
    for (int d : kGlcmDistances) {
      const GlcmMatrix m = glcm(p, d);
      const auto ref = testutil::glcm_reference(p, d, 16);
      double mass = 0;
      for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
          CHECK(std::abs(m.at(i, j) - static_cast<double>(ref[i * 16 + j])) < 1e-15);
          CHECK(m.at(i, j) == m.at(j, i));
          mass += m.at(i, j);
        }
      }
      CHECK(std::abs(mass - 1.0) < 1e-9);
      const auto f = glcm_features(m);
      const auto r = testutil::haralick_reference(ref, 16);
      CHECK(std::abs(f.energy - static_cast<double>(r.energy)) < 1e-12);
      CHECK(std::abs(f.entropy - static_cast<double>(r.entropy)) < 1e-12);
      CHECK(std::abs(f.homogeneity - static_cast<double>(r.homogeneity)) < 1e-12);
      CHECK(std::abs(f.correlation - static_cast<double>(r.correlation)) < 1e-12);
      CHECK(std::abs(f.contrast - static_cast<double>(r.contrast)) < 1e-12);
    }
  }
}

TEST_CASE("glcm works with other level counts and rejects tiny planes") {
  std::mt19937_64 rng(3);
  const Plane p = testutil::random_plane(rng, 10, 6);
  for (int levels : {2, 7, 32, 256}) {
    const GlcmMatrix m = glcm(p, 3, levels);
    const auto ref = testutil::glcm_reference(p, 3, levels);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(m.probs[i] - static_cast<double>(ref[i])) < 1e-15);
  }
  CHECK_THROWS_AS(glcm(testutil::constant_plane(3, 3, 0), 3), DimensionError);
  CHECK_NOTHROW(glcm(testutil::constant_plane(4, 1, 0), 3));
  CHECK_THROWS(glcm(p, 1, 1));
}

TEST_CASE("ncc_matrix degeneracy and sign rules") {
  std::mt19937_64 rng(8);
  const Plane a = testutil::random_plane(rng, 40, 35);  // 2x2 full tiles, edges dropped
  Plane inv = a;
  for (auto& v : inv.samples()) v = static_cast<std::uint8_t>(255 - v);

  const NccMatrix same = ncc_matrix(a, a);
  CHECK(same.rows == 2);
  CHECK(same.cols == 2);
  for (double c : same.coeffs) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
  for (double c : ncc_matrix(a, inv).coeffs) CHECK(c == doctest::Approx(-1.0).epsilon(1e-12));
  for (double c : ncc_matrix(a, testutil::constant_plane(40, 35, 9)).coeffs) CHECK(c == 0.0);
  for (double c : ncc_matrix(testutil::constant_plane(40, 35, 9), testutil::constant_plane(40, 35, 200)).coeffs) {
    CHECK(c == 1.0);
  }
  CHECK_THROWS_AS(ncc_matrix(a, testutil::constant_plane(40, 36, 0)), DimensionError);
}

TEST_CASE("ncc coefficients stay within [-1, 1] and match a direct formula") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const Plane a = testutil::random_plane(rng, 32, 16);
    Plane b = testutil::random_plane(rng, 32, 16);
    // Correlate half the pixels so coefficients spread out.
    for (std::size_t i = 0; i < b.size(); i += 2) b.samples()[i] = a.samples()[i];
    const NccMatrix m = ncc_matrix(a, b, 8);
    REQUIRE(m.coeffs.size() == 8);
    for (int ty = 0; ty < m.rows; ++ty) {
      for (int tx = 0; tx < m.cols; ++tx) {
        long double ma = 0, mb = 0;
        for (int y = 0; y < 8; ++y) {
          for (int x = 0; x < 8; ++x) {
            ma += a.at(tx * 8 + x, ty * 8 + y);
            mb += b.at(tx * 8 + x, ty * 8 + y);
          }
        }
        ma /= 64;
        mb /= 64;
        long double sab = 0, saa = 0, sbb = 0;
        for (int y = 0; y < 8; ++y) {
          for (int x = 0; x < 8; ++x) {
            const long double da = a.at(tx * 8 + x, ty * 8 + y) - ma;
            const long double db = b.at(tx * 8 + x, ty * 8 + y) - mb;
            sab += da * db;
            saa += da * da;
            sbb += db * db;
          }
        }
        const double c = m.coeffs[static_cast<std::size_t>(ty * m.cols + tx)];
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
        CHECK(c == doctest::Approx(static_cast<double>(sab / std::sqrt(saa * sbb))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("moments: documented fixtures") {
  const std::vector<double> five{5, 5, 5};
  const StatSummary c = moments(five, 16);
  CHECK(c.mean == 5);
  CHECK(c.std == 0);
  CHECK(c.skew == 0);
  CHECK(c.kurtosis == 0);
  CHECK(c.entropy == 0);

  const std::vector<double> two{0, 2};
  const StatSummary s = moments(two, 16);
  CHECK(s.mean == 1);
  CHECK(s.std == 1);
  CHECK(s.skew == 0);
  CHECK(s.kurtosis == -2);
  CHECK(s.entropy == 1);
  CHECK_THROWS(moments(std::vector<double>{}, 16));
}

TEST_CASE("moments match the extended-precision oracle") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(1, 120);
  std::normal_distribution<double> normal(0, 1);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> xs(static_cast<std::size_t>(len(rng)));
    const double scale = std::pow(10.0, trial % 5 - 2);
    for (auto& x : xs) x = (trial % 2 ? normal(rng) : expo(rng)) * scale + (trial % 3) * scale;
    const int bins = trial % 2 ? kNccHistBins : kPrecodeHistBins;
    const StatSummary s = moments(xs, bins);
    const auto r = testutil::moments_reference(xs, bins);
    CHECK(std::abs(s.mean - r.mean) < 1e-10);
    CHECK(std::abs(s.std - r.std) < 1e-10);
    CHECK(std::abs(s.skew - r.skew) < 1e-10);
    CHECK(std::abs(s.kurtosis - r.kurtosis) < 1e-10);
    CHECK(std::abs(s.entropy - r.entropy) < 1e-10);
  }
}

TEST_CASE("moments are invariant in shape under positive affine maps") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(50);
    for (auto& x : a) x = u(rng) * u(rng);
    const double alpha = 0.5 + std::abs(u(rng));
    const double beta = u(rng);
    std::vector<double> b;
    for (double x : a) b.push_back(alpha * x + beta);
    const StatSummary sa = moments(a, 16);
    const StatSummary sb = moments(b, 16);
    CHECK(std::abs(sb.skew - sa.skew) < 1e-9);
    CHECK(std::abs(sb.kurtosis - sa.kurtosis) < 1e-9);
    CHECK(std::abs(sb.entropy - sa.entropy) < 1e-9);
    CHECK(std::abs(sb.mean - (alpha * sa.mean + beta)) < 1e-9);
    CHECK(std::abs(sb.std - alpha * sa.std) < 1e-9);
  }
}

TEST_CASE("spatial_temporal_vector") {
  std::mt19937_64 rng(17);
  SUBCASE("length and finiteness on noise") {
    const auto v = spatial_temporal_vector(testutil::random_sequence(rng, 33, 40, 4));
    CHECK(v.size() == kSpatialTemporalDim);
    for (double x : v) CHECK(std::isfinite(x));
    CHECK(spatial_temporal_names().size() == kSpatialTemporalDim);
  }
  SUBCASE("constant frames reproduce the constant-plane pattern") {
    const auto v = spatial_temporal_vector(testutil::constant_sequence(20, 20, 3, 140));
    const double expected[10] = {1, 0, 0, 0, 1, 0, 1, 0, 0, 0};
    for (std::size_t d = 0; d < 3; ++d) {
      for (std::size_t i = 0; i < 10; ++i) CHECK(v[d * 10 + i] == expected[i]);
    }
  }
  SUBCASE("single frame is rejected") {
    CHECK_THROWS(spatial_temporal_vector(testutil::constant_sequence(20, 20, 1, 0)));
  }
  SUBCASE("reordering frames only moves the NCC spreads") {
    // Frames a, b, c with pairs (a,b), (b,c) versus b, a, c with pairs (b,a), (a,c).
    const Plane a = testutil::random_plane(rng, 32, 32);
    Plane b = a;
    for (std::size_t i = 0; i < b.size(); i += 3) b.samples()[i] = static_cast<std::uint8_t>(255 - b.samples()[i]);
    const Plane c = testutil::random_plane(rng, 32, 32);
    const auto v1 = spatial_temporal_vector(FrameSequence({a, b, c}));
    const auto v2 = spatial_temporal_vector(FrameSequence({b, a, c}));
    // GLCM statistics are order-free; NCC pair statistics depend on adjacency.
    for (std::size_t i = 0; i < 30; ++i) CHECK(v1[i] == doctest::Approx(v2[i]).epsilon(1e-14));
    bool ncc_changed = false;
    for (std::size_t i = 30; i < 40; ++i) ncc_changed = ncc_changed || v1[i] != v2[i];
    CHECK(ncc_changed);
    // Reversal keeps the same unordered pairs, so everything is preserved.
    const auto v3 = spatial_temporal_vector(FrameSequence({c, b, a}));
    for (std::size_t i = 0; i < 40; ++i) CHECK(v1[i] == doctest::Approx(v3[i]).epsilon(1e-12));
  }
}
