#include "mink/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "mink/errors.hpp"

namespace mink {

namespace {

std::string point_text(std::span<const double> p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p[i]);
    if (i) out += ", ";
    out += buf;
  }
  return out + ")";
}

std::string coefficient_text(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

const char* to_string(CausalType t) {
  switch (t) {
    case CausalType::SpaceLike: return "SpaceLike";
    case CausalType::TimeLike: return "TimeLike";
    case CausalType::LightLike: return "LightLike";
  }
  return "?";
}

GraphSurface make_surface(std::string_view psi_text, int n) {
  return GraphSurface{n, parse(psi_text, n)};
}

CausalType classify_gradient_sq(double grad_norm_sq, double tol) {
  if (grad_norm_sq < 1.0 - tol) return CausalType::SpaceLike;
  if (grad_norm_sq > 1.0 + tol) return CausalType::TimeLike;
  return CausalType::LightLike;
}

CausalType classify_point(const GraphSurface& s, std::span<const double> p, double tol) {
  return classify_gradient_sq(s.psi.jet(p).gradient_norm_sq(), tol);
}

double tilt_from_gradient_sq(double grad_norm_sq) {
  return std::sqrt(grad_norm_sq) / std::sqrt(std::fabs(1.0 - grad_norm_sq));
}

double tilt(const GraphSurface& s, std::span<const double> p) {
  const double g2 = s.psi.jet(p).gradient_norm_sq();
  if (classify_gradient_sq(g2) == CausalType::LightLike)
    throw UndefinedQuantityError("tilt undefined at light-like point " + point_text(p));
  return tilt_from_gradient_sq(g2);
}

double hyperbolic_angle(const GraphSurface& s, std::span<const double> p) {
  const double g2 = s.psi.jet(p).gradient_norm_sq();
  if (classify_gradient_sq(g2) != CausalType::SpaceLike)
    throw UndefinedQuantityError("hyperbolic angle requires a space-like point, got " +
                                 std::string(to_string(classify_gradient_sq(g2))) + " at " +
                                 point_text(p));
  return std::asinh(tilt_from_gradient_sq(g2));
}

std::vector<double> unit_normal(const GraphSurface& s, std::span<const double> p) {
  const Jet jet = s.psi.jet(p);
  const double g2 = jet.gradient_norm_sq();
  if (classify_gradient_sq(g2) != CausalType::SpaceLike)
    throw UndefinedQuantityError("unit normal requires a space-like point at " + point_text(p));
  const double scale = 1.0 / std::sqrt(1.0 - g2);
  std::vector<double> nu(static_cast<std::size_t>(s.n) + 1);
  for (int i = 0; i < s.n; ++i) nu[static_cast<std::size_t>(i)] = jet.gradient[static_cast<std::size_t>(i)] * scale;
  nu[static_cast<std::size_t>(s.n)] = scale;
  return nu;
}

double mean_curvature_from_jet(const Jet& jet) {
  const int n = jet.dim();
  const double g2 = jet.gradient_norm_sq();
  const CausalType type = classify_gradient_sq(g2);
  if (type == CausalType::LightLike)
    throw UndefinedQuantityError("mean curvature undefined at a light-like point");

  double quad = 0.0;  // sum_ij psi_i psi_j psi_ij
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      quad += jet.gradient[static_cast<std::size_t>(i)] * jet.gradient[static_cast<std::size_t>(j)] * jet.hess(i, j);
  const double lap = jet.laplacian();

  if (type == CausalType::SpaceLike) {
    const double w = 1.0 - g2;
    return ((w * lap + quad) / (n * w * std::sqrt(w)));
  }
  // Time-like branch: the divergence form expanded by the quotient rule.
  const double w = g2 - 1.0;
  return ((w * lap - quad) / (n * w * std::sqrt(w)));
}

double mean_curvature(const GraphSurface& s, std::span<const double> p) {
  try {
    return mean_curvature_from_jet(s.psi.jet(p));
  } catch (const UndefinedQuantityError&) {
    throw UndefinedQuantityError("mean curvature undefined at light-like point " + point_text(p));
  }
}

MetricData induced_metric(const GraphSurface& s, std::span<const double> p) {
  const Jet jet = s.psi.jet(p);
  const int n = s.n;
  MetricData m;
  m.n = n;
  m.g.assign(static_cast<std::size_t>(n) * n, 0.0);
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = (i == j ? 1.0 : 0.0) -
                       jet.gradient[static_cast<std::size_t>(i)] * jet.gradient[static_cast<std::size_t>(j)];
      m.g[static_cast<std::size_t>(i) * n + j] = v;
      g(i, j) = v;
    }
  m.det = g.determinant();
  return m;
}

PointReport point_report(const GraphSurface& s, std::span<const double> p, double tol) {
  const Jet jet = s.psi.jet(p);
  const double g2 = jet.gradient_norm_sq();
  PointReport r;
  r.point.assign(p.begin(), p.end());
  r.grad_norm = std::sqrt(g2);
  r.causal = classify_gradient_sq(g2, tol);
  if (r.causal != CausalType::LightLike) {
    r.tilt = tilt_from_gradient_sq(g2);
    r.mean_curvature = mean_curvature_from_jet(jet);
  }
  if (r.causal == CausalType::SpaceLike) r.sinh_theta = r.tilt;
  return r;
}

double lorentz_product(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty())
    throw std::invalid_argument("lorentz_product needs two vectors of equal size");
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += x[i] * y[i];
  return s - x.back() * y.back();
}

GraphSurface catalog_hyperboloid(int n, double H) {
  if (n < 1) throw std::invalid_argument("hyperboloid: dimension must be >= 1");
  if (!(H > 0.0)) throw std::invalid_argument("hyperboloid: H must be > 0");
  std::string text = "sqrt(";
  for (int i = 1; i <= n; ++i) text += "u" + std::to_string(i) + "^2 + ";
  text += coefficient_text(1.0 / (H * H)) + ")";
  GraphSurface s = make_surface(text, n);
  s.name = "hyperboloid";
  s.reference_mean_curvature = H;
  s.reference_causal = CausalType::SpaceLike;
  return s;
}

GraphSurface catalog_hyperplane(int n, std::span<const double> slope, double offset) {
  if (n < 1) throw std::invalid_argument("hyperplane: dimension must be >= 1");
  if (static_cast<int>(slope.size()) != n)
    throw std::invalid_argument("hyperplane: slope vector must have length n");
  double a2 = 0.0;
  for (double a : slope) a2 += a * a;
  if (std::fabs(a2 - 1.0) <= kLightLikeTol)
    throw std::invalid_argument("hyperplane: |slope| = 1 is light-like");
  std::string text;
  for (int i = 0; i < n; ++i)
    text += coefficient_text(slope[static_cast<std::size_t>(i)]) + "*u" + std::to_string(i + 1) + " + ";
  text += coefficient_text(offset);
  GraphSurface s = make_surface(text, n);
  s.name = "hyperplane";
  s.reference_mean_curvature = 0.0;
  s.reference_causal = a2 < 1.0 ? CausalType::SpaceLike : CausalType::TimeLike;
  return s;
}

GraphSurface catalog_translation(int n, std::string_view h_text) {
  if (n < 2) throw std::invalid_argument("translation: dimension must be >= 2");
  Expression h = parse(h_text, 1);  // h(u1) only; rejects other variables
  std::string text = "u" + std::to_string(n) + " + (" + h.render() + ")";
  GraphSurface s = make_surface(text, n);
  s.name = "translation";
  s.reference_mean_curvature = 0.0;
  s.reference_causal = CausalType::TimeLike;
  return s;
}

GraphSurface catalog_lightlike_plane(int n) {
  if (n < 1) throw std::invalid_argument("lightlike_plane: dimension must be >= 1");
  GraphSurface s = make_surface("u1", n);
  s.name = "lightlike_plane";
  s.reference_causal = CausalType::LightLike;
  return s;
}

}  // namespace mink
