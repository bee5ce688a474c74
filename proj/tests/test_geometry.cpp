#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mink/errors.hpp"
#include "mink/geometry.hpp"
#include "test_util.hpp"

using namespace mink;
using namespace mink::testutil;

namespace {

GraphSurface negated(const GraphSurface& s) {
  return make_surface("-(" + s.psi.render() + ")", s.n);
}

}  // namespace

TEST_CASE("causal classification") {
  const double p1[1] = {2.0};
  CHECK(classify_point(make_surface("0.5*u1", 1), p1) == CausalType::SpaceLike);
  CHECK(classify_point(make_surface("u1", 1), p1) == CausalType::LightLike);

  const double p2[2] = {0.3, -1.0};
  // |grad|^2 = 2, well above the light cone.
  CHECK(classify_point(make_surface("u1 + u2", 2), p2) == CausalType::TimeLike);
}

TEST_CASE("tilt") {
  const double p[2] = {5.0, -3.0};
  // 0.6/sqrt(1-0.36) = 0.75
  CHECK(tilt(make_surface("0.6*u1", 2), p) == doctest::Approx(0.75).epsilon(1e-14));
  // sqrt(2)/sqrt(2-1)
  CHECK(tilt(make_surface("u1 + u2", 2), p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // Hyperboloid with H = 1 at radius 2: tilt = H*r.
  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  const double pr[2] = {2.0, 0.0};
  CHECK(tilt(hyp, pr) == doctest::Approx(2.0).epsilon(1e-13));
  const double pd[2] = {std::sqrt(2.0), std::sqrt(2.0)};
  CHECK(tilt(hyp, pd) == doctest::Approx(2.0).epsilon(1e-13));

  const double q[1] = {0.0};
  CHECK_THROWS_AS(tilt(make_surface("u1", 1), q), UndefinedQuantityError);
}

TEST_CASE("hyperbolic angle") {
  const double p[2] = {1.0, 1.0};
  CHECK(hyperbolic_angle(make_surface("3", 2), p) == 0.0);
  CHECK(hyperbolic_angle(make_surface("0.6*u2", 2), p) ==
        doctest::Approx(std::asinh(0.75)).epsilon(1e-14));

  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  const double pr[2] = {1.0, 0.0};
  CHECK(std::sinh(hyperbolic_angle(hyp, pr)) == doctest::Approx(1.0).epsilon(1e-13));

  CHECK_THROWS_AS(hyperbolic_angle(make_surface("u1 + u2", 2), p), UndefinedQuantityError);
}

TEST_CASE("unit normal") {
  const double p0[2] = {0.4, 0.9};
  auto nu0 = unit_normal(make_surface("7", 2), p0);
  CHECK(nu0[0] == 0.0);
  CHECK(nu0[1] == 0.0);
  CHECK(nu0[2] == 1.0);

  const double p1[1] = {0.0};
  auto nu1 = unit_normal(make_surface("0.5*u1", 1), p1);
  CHECK(nu1[0] == doctest::Approx(0.5 / std::sqrt(0.75)).epsilon(1e-14));
  CHECK(nu1[1] == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-14));

  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  const double o[2] = {0.0, 0.0};
  auto nu_h = unit_normal(hyp, o);
  CHECK(nu_h[0] == 0.0);
  CHECK(nu_h[1] == 0.0);
  CHECK(nu_h[2] == doctest::Approx(1.0).epsilon(1e-14));

  // Lorentz norm -1, last component positive, <nu, e_{n+1}>_L = -cosh(theta).
  std::mt19937_64 rng(42);
  for (int t = 0; t < 30; ++t) {
    GraphSurface s = make_surface(random_spacelike_field(rng, 2), 2);
    auto p = random_point(rng, 2, -2.0, 2.0);
    auto nu = unit_normal(s, p);
    CHECK(std::fabs(lorentz_product(nu, nu) + 1.0) < 1e-10);
    CHECK(nu.back() > 0.0);
    std::vector<double> e3 = {0.0, 0.0, 1.0};
    const double theta = hyperbolic_angle(s, p);
    CHECK(std::fabs(lorentz_product(nu, e3) + std::cosh(theta)) < 1e-10);
  }
}

TEST_CASE("mean curvature of catalog surfaces") {
  // Hyperboloid family: exactly H at every point, all n and H.
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 3, 4}) {
    for (double H : {0.5, 1.0, 2.0}) {
      GraphSurface s = catalog_hyperboloid(n, H);
      for (int t = 0; t < 100; ++t) {
        auto p = random_point(rng, n, -10.0, 10.0);
        CHECK(std::fabs(mean_curvature(s, p) - H) <= 1e-9);
      }
    }
  }

  // Linear graphs are flat on both branches.
  const double p[2] = {1.7, -0.4};
  CHECK(mean_curvature(make_surface("0.3*u1 - 0.2*u2 + 5", 2), p) == 0.0);
  CHECK(mean_curvature(make_surface("2*u1 + u2", 2), p) == 0.0);

  // Time-like translation graphs are minimal.
  GraphSurface tr = catalog_translation(2, "exp(u1)");
  for (int t = 0; t < 100; ++t) {
    auto q = random_point(rng, 2, -2.0, 2.0);
    CHECK(std::fabs(mean_curvature(tr, q)) <= 1e-12);
  }

  const double lz[1] = {0.3};
  CHECK_THROWS_AS(mean_curvature(make_surface("u1", 1), lz), UndefinedQuantityError);
}

TEST_CASE("expanded curvature formulas agree with the divergence oracle") {
  // Both causal branches, 50 random fields, against central differences of
  // the flux field. Validates the quotient-rule expansion.
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const bool spacelike = t % 2 == 0;
    GraphSurface s = make_surface(
        spacelike ? random_spacelike_field(rng, n) : random_timelike_field(rng, n), n);
    auto p = random_point(rng, n, -1.5, 1.5);
    const double implemented = s.n * mean_curvature(s, p);
    const double oracle = fd_divergence_nH(s.psi, p, 1e-5);
    CHECK(std::fabs(implemented - oracle) <= 1e-6);
  }
}

TEST_CASE("induced metric") {
  const double p[2] = {0.2, 0.8};
  MetricData id = induced_metric(make_surface("4", 2), p);
  CHECK(id.det == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(id.g[0] == 1.0);
  CHECK(id.g[3] == 1.0);
  CHECK(id.g[1] == 0.0);

  // det(I - a a^T) = 1 - |a|^2 = -1 for a = (1,1).
  MetricData tl = induced_metric(make_surface("u1 + u2", 2), p);
  CHECK(tl.det == doctest::Approx(-1.0).epsilon(1e-14));

  MetricData ll = induced_metric(make_surface("u1", 2), p);
  CHECK(std::fabs(ll.det) < 1e-14);

  // Determinant identity and sign/classification consistency on random fields.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + static_cast<int>(rng() % 3);
    GraphSurface s = make_surface(
        t % 2 == 0 ? random_spacelike_field(rng, n) : random_timelike_field(rng, n), n);
    auto q = random_point(rng, n, -2.0, 2.0);
    MetricData m = induced_metric(s, q);
    const double g2 = s.psi.jet(q).gradient_norm_sq();
    CHECK(std::fabs(m.det - (1.0 - g2)) <= 1e-10);
    const CausalType c = classify_point(s, q);
    if (c == CausalType::SpaceLike) CHECK(m.det > 0.0);
    if (c == CausalType::TimeLike) CHECK(m.det < 0.0);
  }
}

TEST_CASE("sinh of the angle equals the tilt") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 3);
    GraphSurface s = make_surface(random_spacelike_field(rng, n), n);
    auto p = random_point(rng, n, -2.0, 2.0);
    CHECK(std::fabs(std::sinh(hyperbolic_angle(s, p)) - tilt(s, p)) <= 1e-12);
  }
}

TEST_CASE("tilt is monotone on each causal branch") {
  // Space-like branch increases with the gradient norm, time-like branch
  // decreases.
  const double p[1] = {0.0};
  double prev = -1.0;
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const double t = tilt(make_surface(coeff(a) + "*u1", 1), p);
    CHECK(t > prev);
    prev = t;
  }
  prev = 1e300;
  for (double a : {1.01, 1.1, 1.5, 2.0, 5.0, 50.0}) {
    const double t = tilt(make_surface(coeff(a) + "*u1", 1), p);
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("negating psi negates the mean curvature") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 40; ++t) {
    const int n = 1 + static_cast<int>(rng() % 3);
    GraphSurface s = make_surface(
        t % 2 == 0 ? random_spacelike_field(rng, n) : random_timelike_field(rng, n), n);
    auto p = random_point(rng, n, -1.5, 1.5);
    CHECK(mean_curvature(negated(s), p) ==
          doctest::Approx(-mean_curvature(s, p)).epsilon(1e-12));
  }
  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  const double p[2] = {0.3, 0.4};
  CHECK(mean_curvature(negated(hyp), p) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("point report invariants") {
  std::mt19937_64 rng(63);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng() % 2);
    GraphSurface s = make_surface(
        t % 2 == 0 ? random_spacelike_field(rng, n) : random_timelike_field(rng, n), n);
    auto p = random_point(rng, n, -2.0, 2.0);
    PointReport r = point_report(s, p);
    CHECK(r.tilt.has_value());
    CHECK(r.mean_curvature.has_value());
    if (r.causal == CausalType::SpaceLike) {
      REQUIRE(r.sinh_theta.has_value());
      CHECK(*r.sinh_theta == *r.tilt);
    } else {
      CHECK(!r.sinh_theta.has_value());
    }
  }
  GraphSurface ll = catalog_lightlike_plane(2);
  const double p[2] = {1.0, 2.0};
  PointReport r = point_report(ll, p);
  CHECK(r.causal == CausalType::LightLike);
  CHECK(!r.tilt.has_value());
  CHECK(!r.sinh_theta.has_value());
  CHECK(!r.mean_curvature.has_value());
}

TEST_CASE("catalog surfaces and their parameter validation") {
  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  CHECK(hyp.reference_mean_curvature == 1.0);
  CHECK(hyp.reference_causal == CausalType::SpaceLike);
  const double o[2] = {0.0, 0.0};
  CHECK(hyp.psi.value(o) == 1.0);

  std::vector<double> a = {0.2, 0.0, 0.0};
  GraphSurface plane = catalog_hyperplane(3, a, 5.0);
  CHECK(plane.reference_mean_curvature == 0.0);
  CHECK(plane.reference_causal == CausalType::SpaceLike);
  const double o3[3] = {0.0, 0.0, 0.0};
  CHECK(plane.psi.value(o3) == 5.0);
  CHECK(mean_curvature(plane, o3) == 0.0);

  GraphSurface tr = catalog_translation(2, "exp(u1)");
  CHECK(tr.reference_mean_curvature == 0.0);
  CHECK(tr.reference_causal == CausalType::TimeLike);
  const double q[2] = {0.0, 3.0};
  CHECK(tr.psi.value(q) == 4.0);

  CHECK_THROWS_AS(catalog_hyperboloid(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(catalog_hyperboloid(2, -1.0), std::invalid_argument);
  std::vector<double> light = {1.0};
  CHECK_THROWS_AS(catalog_hyperplane(1, light, 0.0), std::invalid_argument);
  std::vector<double> light2 = {0.6, 0.8};
  CHECK_THROWS_AS(catalog_hyperplane(2, light2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(catalog_translation(2, "exp(u2)"), ParseError);  // h must be h(u1)
}
