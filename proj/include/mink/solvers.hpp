#ifndef MINK_SOLVERS_HPP
#define MINK_SOLVERS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mink/expr.hpp"
#include "mink/geometry.hpp"

namespace mink {

// Radial constant-mean-curvature profile on the space-like branch,
// gauge-fixed to psi(0) = 1/H.
struct RadialProfile {
  int n = 0;
  double H = 0.0;
  std::vector<double> r_grid;
  std::vector<double> psi_values;
  std::vector<double> psi_prime_values;  // in (-1, 1)

  // r^(n-1) psi'/sqrt(1-psi'^2) - H r^n at grid index i.
  double first_integral_residual(std::size_t i) const;
  std::string to_csv() const;  // r,psi,psi_prime
};

// The radial reduction has first integral r^(n-1) psi'/sqrt(1-psi'^2) =
// H r^n (regularity at the origin forces the constant to zero), so
// psi'(r) = H r/sqrt(1+H^2 r^2); psi is then accumulated by per-interval
// Simpson with midpoints.
RadialProfile solve_radial_cmc(int n, double H, double r_max, double step);

struct SolverConfig {
  double newton_tol = 1e-10;
  int max_iters = 50;
  int max_halvings = 20;
  double delta_guard = 1e-3;  // keeps |discrete grad| <= 1 - delta
};

// Dirichlet solution on the uniform (2m+1)x(2m+1) lattice covering
// [-R,R]^2; edge nodes carry the boundary data, interior nodes are the
// Newton unknowns.
struct GridSolution {
  int m = 0;
  double R = 0.0;
  double H_target = 0.0;
  std::vector<double> values;  // (2m+1)^2, row-major, index = j*(2m+1)+i
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;

  int points_per_axis() const { return 2 * m + 1; }
  double spacing() const { return R / m; }
  double coord(int i) const { return -R + spacing() * i; }
  double at(int i, int j) const {
    return values[static_cast<std::size_t>(j) * points_per_axis() + i];
  }

  std::string to_csv() const;  // u1,u2,psi
  nlohmann::ordered_json header_json() const;
};

using BoundaryFn = std::function<double(double, double)>;

// Damped Newton on the second-order central-difference discretization of
// the space-like mean curvature operator, starting from the harmonic
// extension of the boundary data (damped toward its mean if that violates
// the gradient guard).
GridSolution solve_dirichlet_cmc(double H, double R, const BoundaryFn& boundary, int m,
                                 const SolverConfig& config = {});

struct ResidualReport {
  double pde_residual_sup = 0.0;
  std::optional<double> reference_sup_error;
};

// Recomputes the discrete operator at every interior node; compares node
// values against a reference surface when given.
ResidualReport residual(const GridSolution& sol, const GraphSurface* reference = nullptr);

// Value/gradient/Hessian of the local bicubic (4x4 Lagrange) interpolant
// of the grid at (x, y); needs the point at least 1 cell away from the
// lattice edge.
Jet grid_jet(const GridSolution& sol, double x, double y);

}  // namespace mink

#endif  // MINK_SOLVERS_HPP
