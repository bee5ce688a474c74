#ifndef MINK_ANALYSIS_HPP
#define MINK_ANALYSIS_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mink/geometry.hpp"
#include "mink/quadrature.hpp"

namespace mink {

// Default absolute tolerance for check comparisons; the reported
// quadrature error is added on top.
inline constexpr double kCheckTol = 1e-6;

// Volume of the closed unit n-ball and area of the unit (n-1)-sphere,
// computed by two independent gamma-function routes.
struct BallConstants {
  double volume;       // V_n
  double sphere_area;  // A_{n-1}
};
BallConstants unit_ball_constants(int n);

// Deterministic sampling lattice for sup/inf estimation: a cube grid
// intersected with the closed ball, optional boundary shell nodes, and one
// local refinement pass around extremal nodes. Extrema are certified only
// at nodes; the spacing is attached to every result.
struct SampleLattice {
  int per_axis = 128;
  bool include_boundary = true;
  bool refine = true;
};

// Gradient-bound fit: M is the lattice sup of tilt(u)/(|u|^2)^k, origin
// excluded.
struct BoundFit {
  double M = 0.0;
  double k = 0.0;
  bool valid = false;
  double lattice_spacing = 0.0;
};

// Auditable record of one verification: both sides, the residual, and the
// tolerances that decided `passed`.
struct CheckReport {
  std::string check;
  bool identity = false;  // |lhs-rhs| <= tol+qerr, else lhs <= rhs+tol+qerr
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double tolerance = kCheckTol;
  double quadrature_error = 0.0;
  bool passed = false;
  std::vector<std::pair<std::string, double>> metadata;

  nlohmann::ordered_json to_json() const;
};

// ---- theorem checks -----------------------------------------------------

// Both sides of the divergence-theorem identity on the ball: volume
// integral of n*H against the boundary flux of grad(psi)/sqrt(|1-|grad|^2|).
CheckReport stokes_check(const GraphSurface& s, double R, const QuadratureSpec& q);

// Throws UnboundedFitError when k > 0 and the tilt does not vanish at the
// origin (no finite constant exists); CausalTypeError on light-like nodes.
BoundFit fit_gradient_bound(const GraphSurface& s, double R, double k,
                            const SampleLattice& sampling);

// Lower curvature bound against M*R^(2k-1). Verifies the gradient-bound
// hypothesis at every node first (PreconditionError names the node). A
// fail with verified hypothesis indicates a numerical or usage bug, never
// the estimate itself.
CheckReport heinz_check(const GraphSurface& s, double R, double M, double k,
                        const QuadratureSpec& q);

// min |H| against (1/n) * m_D/sqrt(|1-m_D^2|) * A(boundary)/V(closure) on
// the ball, with m_D the max (space-like) or min (time-like) sampled
// gradient norm over the closure.
CheckReport salavessa_check(const GraphSurface& s, double R, const QuadratureSpec& q);

// ---- decay probes --------------------------------------------------------

struct BernsteinRow {
  double R;
  double M;        // fitted constant at this radius
  double alpha;    // inf sampled |H|
  double ceiling;  // M * R^(-2 eps)
};

struct BernsteinReport {
  double eps = 0.0;
  std::vector<BernsteinRow> rows;
  // "consistent-with-vanishing" | "hypothesis-fails" | "inconsistent"
  std::string verdict;
  std::string note;

  bool passed() const { return verdict == "consistent-with-vanishing"; }
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Vanishing-curvature probe with exponent k = 1/2 - eps over increasing
// radii. An unstable fit is reported as a hypothesis failure, not as an
// error of the surface.
BernsteinReport bernstein_probe(const GraphSurface& s, double eps, std::span<const double> radii,
                                const QuadratureSpec& q);

struct DongRow {
  double R;
  double ratio;      // sup 1/sqrt(1-|grad|^2) divided by R
  double sup_abs_H;
};

struct DongReport {
  std::vector<DongRow> rows;
  std::string verdict;  // "consistent" | "hypothesis-fails" | "inconsistent"
  std::string note;
  double decay_slope = 0.0;

  bool passed() const { return verdict == "consistent"; }
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Sub-linear growth probe for 1/sqrt(1-|grad psi|^2); space-like only.
DongReport dong_condition_probe(const GraphSurface& s, std::span<const double> radii,
                                const QuadratureSpec& q);

// ---- shared sampling helpers ----------------------------------------------

// Single causal type over the sampled closed ball; throws CausalTypeError
// (naming the node) on a mixed or light-like sample.
CausalType uniform_causal_type(const GraphSurface& s, double R, int per_axis);

// Effective lattice density: per-axis counts are capped for n >= 3 to keep
// node counts at desk scale.
int effective_per_axis(int n, int per_axis);

// Visits every cube-lattice node inside the closed ball, then boundary
// shell nodes when requested. Deterministic order.
void for_each_sample_node(int n, double R, int per_axis, bool include_boundary,
                          const std::function<void(std::span<const double>)>& fn);

double lattice_spacing(double R, int per_axis);

}  // namespace mink

#endif  // MINK_ANALYSIS_HPP
