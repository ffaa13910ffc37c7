#include <algorithm>
#include <random>

#include "doctest.h"
#include "test_util.h"

using namespace camcond;
using camcond::testing::RandomCamera;
using camcond::testing::SimpleCamera;

TEST_CASE("single sample reprojects onto its pixel") {
  PinholeCamera cam = SimpleCamera(500, 320, 240);
  const ProxyPointSet set = SampleFrustum(cam, 1, 0.5, 10, 42);
  REQUIRE(set.points.size() == 1);
  // Replay the sampler's draws: u, v, s.
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng) * cam.width;
  const double v = unit(rng) * cam.height;
  CHECK((Project(cam, set.points[0]) - Pixel(u, v)).norm() <= 1e-8);
}

TEST_CASE("invalid depth range") {
  const PinholeCamera cam = SimpleCamera(500, 320, 240);
  CHECK_THROWS_AS(SampleFrustum(cam, 10, 1.0, 1.0, 0), Error);
  CHECK_THROWS_AS(SampleFrustum(cam, 10, 0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(SampleFrustum(cam, 0, 0.5, 1.0, 0), Error);
}

TEST_CASE("median depth of the disparity-uniform law") {
  std::mt19937_64 rng(1);
  const PinholeCamera cam = RandomCamera(rng);
  const double near = 0.2, far = 100.0;
  const ProxyPointSet set = SampleFrustum(cam, 10000, near, far, 5);
  std::vector<double> depth;
  for (const Vec3& x : set.points) depth.push_back(cam.pose(x).z());
  std::nth_element(depth.begin(), depth.begin() + 5000, depth.end());
  const double expected = 2 * near * far / (near + far);
  CHECK(std::abs(depth[5000] - expected) <= 0.02 * expected);
  CHECK(*std::min_element(depth.begin(), depth.end()) >= near * (1 - 1e-12));
  CHECK(*std::max_element(depth.begin(), depth.end()) <= far * (1 + 1e-12));
}

TEST_CASE("pixels are uniform over the image") {
  std::mt19937_64 rng(2);
  const PinholeCamera cam = RandomCamera(rng);
  const int m = 16000;
  const ProxyPointSet set = SampleFrustum(cam, m, 1.0, 10.0, 7);
  int counts[4][4] = {};
  for (const Vec3& x : set.points) {
    const Pixel p = Project(cam, x);
    REQUIRE(InImage(cam, p));
    const int i = std::min(3, static_cast<int>(4 * p.x() / cam.width));
    const int j = std::min(3, static_cast<int>(4 * p.y() / cam.height));
    ++counts[i][j];
  }
  double chi2 = 0.0;
  const double expected = m / 16.0;
  for (auto& row : counts) {
    for (int c : row) chi2 += (c - expected) * (c - expected) / expected;
  }
  // 15 degrees of freedom; the 0.999 quantile is 37.7.
  CHECK(chi2 < 37.7);
}

TEST_CASE("sampling is seeded") {
  std::mt19937_64 rng(3);
  const PinholeCamera cam = RandomCamera(rng);
  const ProxyPointSet a = SampleFrustum(cam, 50, 1, 5, 9);
  const ProxyPointSet b = SampleFrustum(cam, 50, 1, 5, 9);
  const ProxyPointSet c = SampleFrustum(cam, 50, 1, 5, 10);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
}

TEST_CASE("custom depth curve") {
  const PinholeCamera cam = SimpleCamera(500, 320, 240);
  const ProxyPointSet set =
      SampleFrustum(cam, 20, 1, 5, 0, [](double, double, double far) { return far; });
  for (const Vec3& x : set.points) CHECK(cam.pose(x).z() == doctest::Approx(5.0));
}
