#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mink/analysis.hpp"
#include "mink/errors.hpp"
#include "test_util.hpp"

using namespace mink;
using namespace mink::testutil;

namespace {
constexpr double kPi = std::numbers::pi;
const QuadratureSpec kFast{Scheme::TensorPolar, 64, 0};
}  // namespace

TEST_CASE("unit ball constants") {
  auto c1 = unit_ball_constants(1);
  CHECK(c1.volume == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(c1.sphere_area == doctest::Approx(2.0).epsilon(1e-15));
  auto c2 = unit_ball_constants(2);
  CHECK(c2.volume == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(c2.sphere_area == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  auto c3 = unit_ball_constants(3);
  CHECK(c3.volume == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-15));
  CHECK(c3.sphere_area == doctest::Approx(4.0 * kPi).epsilon(1e-15));

  // n V_n = A_{n-1} via two independent gamma routes.
  for (int n = 1; n <= 10; ++n) {
    auto c = unit_ball_constants(n);
    CHECK(std::fabs(n * c.volume - c.sphere_area) / c.sphere_area <= 1e-14);
  }
  CHECK_THROWS_AS(unit_ball_constants(0), std::invalid_argument);
  CHECK_THROWS_AS(unit_ball_constants(11), std::invalid_argument);
}

TEST_CASE("stokes identity on catalog surfaces") {
  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  CheckReport r = stokes_check(hyp, 1.0, kFast);
  CHECK(r.passed);
  CHECK(r.lhs == doctest::Approx(2.0 * kPi).epsilon(1e-10));
  CHECK(r.rhs == doctest::Approx(2.0 * kPi).epsilon(1e-10));

  std::vector<double> a = {0.2, 0.1, 0.0};
  CheckReport rp = stokes_check(catalog_hyperplane(3, a, 1.0), 2.0, kFast);
  CHECK(rp.passed);
  CHECK(std::fabs(rp.lhs) < 1e-10);
  CHECK(std::fabs(rp.rhs) < 1e-10);

  CheckReport rt = stokes_check(catalog_translation(2, "exp(u1)"), 1.0, kFast);
  CHECK(rt.passed);
  CHECK(std::fabs(rt.lhs) < 1e-8);
  CHECK(std::fabs(rt.rhs) < 1e-8);
}

TEST_CASE("stokes identity on random perturbation surfaces") {
  std::mt19937_64 rng(1001);
  for (int t = 0; t < 8; ++t) {
    const int n = 2 + t % 2;
    GraphSurface s = make_surface(
        t % 2 == 0 ? random_spacelike_field(rng, n) : random_timelike_field(rng, n), n);
    for (double R : {0.5, 1.5}) {
      CheckReport r = stokes_check(s, R, kFast);
      CHECK(r.passed);
      CHECK(std::fabs(r.residual) <= r.tolerance + r.quadrature_error);
    }
  }
}

TEST_CASE("stokes rejects mixed and light-like domains") {
  GraphSurface bowl = make_surface("(u1^2 + u2^2)/2", 2);  // |grad| = r
  CHECK_THROWS_AS(stokes_check(bowl, 2.0, kFast), CausalTypeError);
  GraphSurface ll = catalog_lightlike_plane(2);
  CHECK_THROWS_AS(stokes_check(ll, 1.0, kFast), CausalTypeError);
}

TEST_CASE("gradient bound fit") {
  SampleLattice lat{64, true, true};

  // Hyperboloid: tilt = H r, so the k = 1/2 ratio is exactly H everywhere.
  for (double H : {0.5, 2.0}) {
    BoundFit fit = fit_gradient_bound(catalog_hyperboloid(2, H), 1.5, 0.5, lat);
    CHECK(fit.valid);
    CHECK(fit.M == doctest::Approx(H).epsilon(1e-12));
  }

  // Constant-tilt families at k = 0.
  std::vector<double> a = {0.6, 0.0};
  BoundFit fp = fit_gradient_bound(catalog_hyperplane(2, a, 0.0), 2.0, 0.0, lat);
  CHECK(fp.M == doctest::Approx(0.75).epsilon(1e-13));
  BoundFit ft = fit_gradient_bound(make_surface("u1 + u2", 2), 2.0, 0.0, lat);
  CHECK(ft.M == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));

  // k > 0 with nonzero tilt at the origin: no finite constant exists.
  CHECK_THROWS_AS(fit_gradient_bound(catalog_hyperplane(2, a, 0.0), 2.0, 0.3, lat),
                  UnboundedFitError);
  // Light-like sample.
  CHECK_THROWS_AS(fit_gradient_bound(catalog_lightlike_plane(2), 1.0, 0.0, lat),
                  CausalTypeError);
}

TEST_CASE("heinz equality case on the hyperboloid") {
  for (int n : {1, 2, 3}) {
    for (double H : {0.5, 1.0, 2.0}) {
      GraphSurface s = catalog_hyperboloid(n, H);
      for (double R : {0.5, 1.0, 5.0}) {
        CheckReport r = heinz_check(s, R, H, 0.5, kFast);
        CHECK(r.passed);
        CHECK(std::fabs(r.lhs - H) <= 1e-9);
        CHECK(std::fabs(r.rhs - H) <= 1e-9);
      }
    }
  }
}

TEST_CASE("heinz on flat graphs") {
  std::vector<double> a = {0.6, 0.0};
  GraphSurface plane = catalog_hyperplane(2, a, 1.0);
  CheckReport r = heinz_check(plane, 5.0, 0.7500000001, 0.0, kFast);
  CHECK(r.passed);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == doctest::Approx(0.7500000001 / 5.0).epsilon(1e-12));
}

TEST_CASE("heinz verifies its hypothesis at every node") {
  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  // M = 0.5 understates the tilt: reject before checking the conclusion.
  CHECK_THROWS_AS(heinz_check(hyp, 1.0, 0.5, 0.5, kFast), PreconditionError);
  CHECK_THROWS_AS(heinz_check(catalog_lightlike_plane(2), 1.0, 1.0, 0.0, kFast),
                  CausalTypeError);
  CHECK_THROWS_AS(heinz_check(make_surface("(u1^2 + u2^2)/2", 2), 2.0, 10.0, 0.0, kFast),
                  CausalTypeError);
}

TEST_CASE("salavessa equality on the hyperboloid") {
  GraphSurface hyp = catalog_hyperboloid(2, 1.0);
  for (double R : {0.5, 1.0, 2.0}) {
    CheckReport r = salavessa_check(hyp, R, kFast);
    CHECK(r.passed);
    CHECK(std::fabs(r.lhs - r.rhs) <= 1e-6);
    CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-9));
  }
  // Any H, any R: both sides reduce to H.
  CheckReport r2 = salavessa_check(catalog_hyperboloid(2, 2.0), 1.3, kFast);
  CHECK(std::fabs(r2.lhs - 2.0) <= 1e-9);
  CHECK(std::fabs(r2.rhs - 2.0) <= 1e-8);
}

TEST_CASE("salavessa on planes and time-like graphs") {
  std::vector<double> a = {0.6, 0.0};
  CheckReport r = salavessa_check(catalog_hyperplane(2, a, 0.0), 3.0, kFast);
  CHECK(r.passed);
  CHECK(r.lhs == 0.0);
  CHECK(r.rhs == doctest::Approx(0.25).epsilon(1e-12));

  // Time-like: m_D is the minimum gradient norm over the closure.
  CheckReport rt = salavessa_check(catalog_translation(2, "exp(u1)"), 1.0, kFast);
  CHECK(rt.passed);
  CHECK(std::fabs(rt.lhs) <= 1e-10);
  double m_D = 0.0;
  for (auto& [k, v] : rt.metadata)
    if (k == "m_D") m_D = v;
  // min over closure of sqrt(1 + e^{2 u1}) is at u1 = -R.
  CHECK(m_D == doctest::Approx(std::sqrt(1.0 + std::exp(-2.0))).epsilon(1e-6));
}

TEST_CASE("heinz and salavessa never fail under verified hypotheses") {
  std::mt19937_64 rng(4242);
  QuadratureSpec q{Scheme::TensorPolar, 48, 0};
  for (int t = 0; t < 25; ++t) {
    const int n = 1 + static_cast<int>(rng() % 2);
    GraphSurface s = make_surface(
        t % 2 == 0 ? random_spacelike_field(rng, n) : random_timelike_field(rng, n), n);
    std::uniform_real_distribution<double> rad(0.4, 2.0);
    const double R = rad(rng);
    std::uniform_real_distribution<double> kd(-0.5, 0.0);
    const double k = t % 3 == 0 ? 0.0 : kd(rng);
    BoundFit fit = fit_gradient_bound(s, R, k, SampleLattice{48, true, true});
    // Tiny cushion: M itself came from the same lattice.
    CheckReport hr = heinz_check(s, R, fit.M * (1.0 + 1e-12) + 1e-300, k, q);
    CHECK(hr.passed);
    CheckReport sr = salavessa_check(s, R, q);
    CHECK(sr.passed);
  }
}

TEST_CASE("bernstein probe") {
  std::vector<double> radii = {1.0, 10.0, 100.0};

  std::vector<double> a = {0.6, 0.0};
  BernsteinReport flat = bernstein_probe(catalog_hyperplane(2, a, 0.0), 0.5, radii, kFast);
  CHECK(flat.verdict == "consistent-with-vanishing");
  REQUIRE(flat.rows.size() == 3);
  CHECK(flat.rows[0].M == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(flat.rows[2].M == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(flat.rows[2].ceiling == doctest::Approx(0.0075).epsilon(1e-10));
  CHECK(flat.rows[2].alpha == 0.0);

  // Bounded time-like tilt: psi = u1 + u2.
  BernsteinReport tl = bernstein_probe(make_surface("u1 + u2", 2), 0.5, radii, kFast);
  CHECK(tl.verdict == "consistent-with-vanishing");
  CHECK(tl.rows[0].M == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  // Hyperboloid at eps = 1/4: tilt/r^{1/2} grows like r^{1/2}; the fit does
  // not stabilize and the probe must say so.
  BernsteinReport hyp =
      bernstein_probe(catalog_hyperboloid(2, 1.0), 0.25, {radii.data(), radii.size()}, kFast);
  CHECK(hyp.verdict == "hypothesis-fails");

  // k = 1/2 - eps > 0 with nonzero tilt at the origin.
  BernsteinReport ub = bernstein_probe(catalog_hyperplane(2, a, 0.0), 0.25, radii, kFast);
  CHECK(ub.verdict == "hypothesis-fails");

  CHECK_THROWS_AS(bernstein_probe(catalog_hyperboloid(2, 1.0), 0.0, radii, kFast),
                  std::invalid_argument);
  std::vector<double> bad = {2.0, 1.0};
  CHECK_THROWS_AS(bernstein_probe(catalog_hyperboloid(2, 1.0), 0.5, bad, kFast),
                  std::invalid_argument);
}

TEST_CASE("dong condition probe") {
  std::vector<double> radii = {1.0, 10.0, 100.0};

  std::vector<double> a = {0.6, 0.0};
  DongReport flat = dong_condition_probe(catalog_hyperplane(2, a, 0.0), radii, kFast);
  CHECK(flat.verdict == "consistent");
  CHECK(flat.rows[0].ratio == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(flat.rows[2].ratio == doctest::Approx(0.0125).epsilon(1e-12));
  CHECK(flat.decay_slope == doctest::Approx(-1.0).epsilon(1e-10));

  DongReport cst = dong_condition_probe(make_surface("3", 2), radii, kFast);
  CHECK(cst.verdict == "consistent");

  // Hyperboloid: the ratio tends to 1, not 0 (as it must: H = 1).
  DongReport hyp = dong_condition_probe(catalog_hyperboloid(2, 1.0), radii, kFast);
  CHECK(hyp.verdict == "hypothesis-fails");
  CHECK(hyp.rows[2].ratio == doctest::Approx(std::sqrt(1.0 + 100.0 * 100.0) / 100.0).epsilon(1e-6));

  CHECK_THROWS_AS(dong_condition_probe(make_surface("u1 + u2", 2), radii, kFast),
                  CausalTypeError);
}

TEST_CASE("bounded tilt is equivalent to a gradient bound below 1") {
  std::mt19937_64 rng(88);
  for (int t = 0; t < 20; ++t) {
    const int n = 1 + static_cast<int>(rng() % 2);
    GraphSurface s = make_surface(random_spacelike_field(rng, n), n);
    double sup_tilt = 0.0, sup_grad = 0.0;
    for_each_sample_node(n, 2.0, 64, true, [&](std::span<const double> p) {
      const double g2 = s.psi.jet(p).gradient_norm_sq();
      sup_tilt = std::max(sup_tilt, tilt_from_gradient_sq(g2));
      sup_grad = std::max(sup_grad, std::sqrt(g2));
    });
    const double C = sup_tilt / std::sqrt(1.0 + sup_tilt * sup_tilt);
    CHECK(std::fabs(C - sup_grad) <= 1e-12);
    CHECK(C < 1.0);
  }
}

TEST_CASE("check reports serialize with stable key order") {
  CheckReport r = stokes_check(catalog_hyperboloid(2, 1.0), 1.0, kFast);
  const std::string a = r.to_json().dump();
  const std::string b = stokes_check(catalog_hyperboloid(2, 1.0), 1.0, kFast).to_json().dump();
  CHECK(a == b);
  CHECK(a.find("\"check\":\"stokes\"") != std::string::npos);
  // Key order is fixed: check, lhs, rhs, residual, tolerance, ...
  CHECK(a.find("\"check\"") < a.find("\"lhs\""));
  CHECK(a.find("\"lhs\"") < a.find("\"rhs\""));
  CHECK(a.find("\"rhs\"") < a.find("\"residual\""));

  BernsteinReport bp =
      bernstein_probe(make_surface("u1 + u2", 2), 0.5, std::vector<double>{1.0, 2.0}, kFast);
  const std::string csv = bp.to_csv();
  CHECK(csv.rfind("R,M,alpha,ceiling\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
