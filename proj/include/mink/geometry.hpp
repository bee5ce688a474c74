#ifndef MINK_GEOMETRY_HPP
#define MINK_GEOMETRY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mink/expr.hpp"

namespace mink {

// Tolerance band around |grad psi|^2 = 1 separating genuine light-like
// loci from round-off.
inline constexpr double kLightLikeTol = 1e-9;

enum class CausalType { SpaceLike, TimeLike, LightLike };

const char* to_string(CausalType t);

// The graph of psi over R^n, embedded in Lorentz-Minkowski R^{n+1}_1 with
// the normal oriented toward positive (n+1)-component. Catalog surfaces
// carry their exact reference curvature and causal type so tests never
// compare two numerical approximations.
struct GraphSurface {
  int n;
  Expression psi;
  std::string name = "expression";
  std::optional<double> reference_mean_curvature;
  std::optional<CausalType> reference_causal;
};

GraphSurface make_surface(std::string_view psi_text, int n);

// Per-point classification with derived scalars. tilt is undefined iff the
// point is light-like; sinh_theta is defined iff space-like (and equals
// tilt there); mean_curvature is undefined iff light-like.
struct PointReport {
  std::vector<double> point;
  double grad_norm = 0.0;
  CausalType causal = CausalType::LightLike;
  std::optional<double> tilt;
  std::optional<double> sinh_theta;
  std::optional<double> mean_curvature;
};

// Induced metric g_ij = delta_ij - psi_i psi_j and its determinant.
struct MetricData {
  int n = 0;
  std::vector<double> g;  // n*n, row-major
  double det = 0.0;
};

CausalType classify_point(const GraphSurface& s, std::span<const double> p,
                          double tol = kLightLikeTol);
CausalType classify_gradient_sq(double grad_norm_sq, double tol = kLightLikeTol);

// |grad psi| / sqrt(|1 - |grad psi|^2|); throws UndefinedQuantityError at a
// light-like point.
double tilt(const GraphSurface& s, std::span<const double> p);
double tilt_from_gradient_sq(double grad_norm_sq);

// theta >= 0 with <nu, e_{n+1}>_L = -cosh(theta); space-like points only.
double hyperbolic_angle(const GraphSurface& s, std::span<const double> p);

// nu = (grad psi, 1)/sqrt(1 - |grad psi|^2); space-like points only.
std::vector<double> unit_normal(const GraphSurface& s, std::span<const double> p);

double mean_curvature(const GraphSurface& s, std::span<const double> p);
// Same formulas applied to an externally supplied jet (e.g. an interpolant
// of a discrete solution).
double mean_curvature_from_jet(const Jet& jet);

MetricData induced_metric(const GraphSurface& s, std::span<const double> p);

// One jet evaluation, everything derivable from it.
PointReport point_report(const GraphSurface& s, std::span<const double> p,
                         double tol = kLightLikeTol);

// x^1 y^1 + ... + x^n y^n - x^{n+1} y^{n+1}
double lorentz_product(std::span<const double> x, std::span<const double> y);

// Closed-form surfaces with exact reference values.
GraphSurface catalog_hyperboloid(int n, double H);
GraphSurface catalog_hyperplane(int n, std::span<const double> slope, double offset);
GraphSurface catalog_translation(int n, std::string_view h_text);
GraphSurface catalog_lightlike_plane(int n);

}  // namespace mink

#endif  // MINK_GEOMETRY_HPP
