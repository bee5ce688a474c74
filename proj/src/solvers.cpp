#include "mink/solvers.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mink/errors.hpp"

namespace mink {

namespace {

std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double radial_slope(double H, double r) { return H * r / std::sqrt(1.0 + H * H * r * r); }

// Local quantities at one interior node of the 2D grid.
struct Stencil {
  double p, q;     // first derivatives
  double A, B, C;  // psi_xx, psi_yy, psi_xy
};

Stencil stencil_at(const GridSolution& g, int i, int j) {
  const double h = g.spacing();
  Stencil st;
  st.p = (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * h);
  st.q = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * h);
  st.A = (g.at(i + 1, j) - 2.0 * g.at(i, j) + g.at(i - 1, j)) / (h * h);
  st.B = (g.at(i, j + 1) - 2.0 * g.at(i, j) + g.at(i, j - 1)) / (h * h);
  st.C = (g.at(i + 1, j + 1) - g.at(i + 1, j - 1) - g.at(i - 1, j + 1) + g.at(i - 1, j - 1)) /
         (4.0 * h * h);
  return st;
}

// Expanded space-like operator: (1-|grad|^2) Lap + sum psi_i psi_j psi_ij
// - n H (1-|grad|^2)^{3/2} with n = 2.
double node_residual(const Stencil& st, double H) {
  const double s = 1.0 - st.p * st.p - st.q * st.q;
  return s * (st.A + st.B) + st.p * st.p * st.A + 2.0 * st.p * st.q * st.C +
         st.q * st.q * st.B - 2.0 * H * s * std::sqrt(s);
}

struct GuardViolation {
  int i, j;
  double grad_norm;
};

// Checks |discrete grad| <= 1 - delta at every interior node.
std::optional<GuardViolation> check_guard(const GridSolution& g, double delta) {
  const int N = g.points_per_axis();
  const double h = g.spacing();
  const double limit = (1.0 - delta) * (1.0 - delta);
  for (int j = 1; j < N - 1; ++j)
    for (int i = 1; i < N - 1; ++i) {
      const double p = (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * h);
      const double q = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * h);
      if (p * p + q * q > limit) return GuardViolation{i, j, std::sqrt(p * p + q * q)};
    }
  return std::nullopt;
}

double sup_residual(const GridSolution& g, double H) {
  const int N = g.points_per_axis();
  double sup = 0.0;
  for (int j = 1; j < N - 1; ++j)
    for (int i = 1; i < N - 1; ++i)
      sup = std::max(sup, std::fabs(node_residual(stencil_at(g, i, j), H)));
  return sup;
}

// Discrete 5-point harmonic extension of the boundary values.
void harmonic_extension(GridSolution& g) {
  const int N = g.points_per_axis();
  const int K = (N - 2) * (N - 2);
  auto interior_index = [N](int i, int j) { return (j - 1) * (N - 2) + (i - 1); };

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(K) * 5);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
  for (int j = 1; j < N - 1; ++j)
    for (int i = 1; i < N - 1; ++i) {
      const int row = interior_index(i, j);
      trip.emplace_back(row, row, 4.0);
      const int ni[4] = {i + 1, i - 1, i, i};
      const int nj[4] = {j, j, j + 1, j - 1};
      for (int t = 0; t < 4; ++t) {
        if (ni[t] == 0 || ni[t] == N - 1 || nj[t] == 0 || nj[t] == N - 1)
          rhs(row) += g.at(ni[t], nj[t]);
        else
          trip.emplace_back(row, interior_index(ni[t], nj[t]), -1.0);
      }
    }
  Eigen::SparseMatrix<double> lap(K, K);
  lap.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(lap);
  if (lu.info() != Eigen::Success)
    throw SolverError(SolverError::Kind::NonConvergence, "harmonic extension factorization failed");
  Eigen::VectorXd sol = lu.solve(rhs);
  for (int j = 1; j < N - 1; ++j)
    for (int i = 1; i < N - 1; ++i)
      g.values[static_cast<std::size_t>(j) * N + i] = sol(interior_index(i, j));
}

}  // namespace

double RadialProfile::first_integral_residual(std::size_t i) const {
  const double r = r_grid[i];
  const double dp = psi_prime_values[i];
  const double lhs = std::pow(r, n - 1) * dp / std::sqrt(1.0 - dp * dp);
  return lhs - H * std::pow(r, n);
}

std::string RadialProfile::to_csv() const {
  std::string out = "r,psi,psi_prime\n";
  for (std::size_t i = 0; i < r_grid.size(); ++i)
    out += format_g17(r_grid[i]) + "," + format_g17(psi_values[i]) + "," +
           format_g17(psi_prime_values[i]) + "\n";
  return out;
}

RadialProfile solve_radial_cmc(int n, double H, double r_max, double step) {
  if (n < 1) throw std::invalid_argument("solve_radial_cmc: n must be >= 1");
  if (!(H > 0.0)) throw std::invalid_argument("solve_radial_cmc: H must be > 0");
  if (!(r_max > 0.0) || !(step > 0.0))
    throw std::invalid_argument("solve_radial_cmc: r_max and step must be > 0");

  const int cells = std::max(1, static_cast<int>(std::ceil(r_max / step - 1e-12)));
  const double h = r_max / cells;

  RadialProfile prof;
  prof.n = n;
  prof.H = H;
  prof.r_grid.resize(static_cast<std::size_t>(cells) + 1);
  prof.psi_values.resize(static_cast<std::size_t>(cells) + 1);
  prof.psi_prime_values.resize(static_cast<std::size_t>(cells) + 1);

  prof.r_grid[0] = 0.0;
  prof.psi_values[0] = 1.0 / H;
  prof.psi_prime_values[0] = 0.0;
  for (int i = 1; i <= cells; ++i) {
    const double r0 = h * (i - 1);
    const double r1 = h * i;
    const double inc =
        (h / 6.0) * (radial_slope(H, r0) + 4.0 * radial_slope(H, 0.5 * (r0 + r1)) +
                     radial_slope(H, r1));
    prof.r_grid[static_cast<std::size_t>(i)] = r1;
    prof.psi_values[static_cast<std::size_t>(i)] = prof.psi_values[static_cast<std::size_t>(i) - 1] + inc;
    prof.psi_prime_values[static_cast<std::size_t>(i)] = radial_slope(H, r1);
  }
  return prof;
}

std::string GridSolution::to_csv() const {
  std::string out = "u1,u2,psi\n";
  const int N = points_per_axis();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      out += format_g17(coord(i)) + "," + format_g17(coord(j)) + "," + format_g17(at(i, j)) + "\n";
  return out;
}

nlohmann::ordered_json GridSolution::header_json() const {
  nlohmann::ordered_json j;
  j["H"] = H_target;
  j["R"] = R;
  j["m"] = m;
  j["iterations"] = iterations;
  j["final_residual"] = final_residual;
  return j;
}

GridSolution solve_dirichlet_cmc(double H, double R, const BoundaryFn& boundary, int m,
                                 const SolverConfig& config) {
  if (m < 16) throw std::invalid_argument("solve_dirichlet_cmc: m must be >= 16");
  if (!(R > 0.0)) throw std::invalid_argument("solve_dirichlet_cmc: R must be > 0");

  GridSolution g;
  g.m = m;
  g.R = R;
  g.H_target = H;
  const int N = g.points_per_axis();
  g.values.assign(static_cast<std::size_t>(N) * N, 0.0);

  double boundary_sum = 0.0;
  int boundary_count = 0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      if (i == 0 || i == N - 1 || j == 0 || j == N - 1) {
        const double v = boundary(g.coord(i), g.coord(j));
        g.values[static_cast<std::size_t>(j) * N + i] = v;
        boundary_sum += v;
        ++boundary_count;
      }
  harmonic_extension(g);

  // Clip toward the boundary mean if the extension already breaks the guard.
  if (auto viol = check_guard(g, config.delta_guard)) {
    const double mean = boundary_sum / boundary_count;
    double lambda = 0.5;
    bool ok = false;
    for (int t = 0; t < config.max_halvings; ++t, lambda *= 0.5) {
      GridSolution trial = g;
      for (int j = 1; j < N - 1; ++j)
        for (int i = 1; i < N - 1; ++i)
          trial.values[static_cast<std::size_t>(j) * N + i] =
              mean + lambda * (g.at(i, j) - mean);
      if (!check_guard(trial, config.delta_guard)) {
        g.values = trial.values;
        ok = true;
        break;
      }
    }
    if (!ok)
      throw SolverError(SolverError::Kind::CausalBreakdown,
                        "causal breakdown in the initial guess: |grad| = " +
                            format_g17(viol->grad_norm) + " at node (" + std::to_string(viol->i) +
                            ", " + std::to_string(viol->j) + ")");
  }

  const double h = g.spacing();
  const int K = (N - 2) * (N - 2);
  auto interior_index = [N](int i, int j) { return (j - 1) * (N - 2) + (i - 1); };

  double res = sup_residual(g, H);
  g.residual_history.push_back(res);

  Eigen::VectorXd F(K), delta(K);
  std::vector<Eigen::Triplet<double>> trip;

  while (res > config.newton_tol) {
    if (g.iterations >= config.max_iters)
      throw SolverError(SolverError::Kind::NonConvergence,
                        "Newton did not converge in " + std::to_string(config.max_iters) +
                            " iterations (residual " + format_g17(res) + ")",
                        g.residual_history);

    trip.clear();
    for (int j = 1; j < N - 1; ++j)
      for (int i = 1; i < N - 1; ++i) {
        const int row = interior_index(i, j);
        const Stencil st = stencil_at(g, i, j);
        F(row) = -node_residual(st, H);

        const double s = 1.0 - st.p * st.p - st.q * st.q;
        const double rs = std::sqrt(s);
        const double dFdp = -2.0 * st.p * st.B + 2.0 * st.q * st.C + 6.0 * H * st.p * rs;
        const double dFdq = -2.0 * st.q * st.A + 2.0 * st.p * st.C + 6.0 * H * st.q * rs;
        const double dFdA = s + st.p * st.p;
        const double dFdB = s + st.q * st.q;
        const double dFdC = 2.0 * st.p * st.q;

        const double inv2h = 1.0 / (2.0 * h), invh2 = 1.0 / (h * h), inv4h2 = 1.0 / (4.0 * h * h);
        auto put = [&](int ii, int jj, double coeff) {
          if (coeff == 0.0) return;
          if (ii == 0 || ii == N - 1 || jj == 0 || jj == N - 1) return;  // Dirichlet data
          trip.emplace_back(row, interior_index(ii, jj), coeff);
        };
        put(i, j, dFdA * (-2.0 * invh2) + dFdB * (-2.0 * invh2));
        put(i + 1, j, dFdp * inv2h + dFdA * invh2);
        put(i - 1, j, -dFdp * inv2h + dFdA * invh2);
        put(i, j + 1, dFdq * inv2h + dFdB * invh2);
        put(i, j - 1, -dFdq * inv2h + dFdB * invh2);
        put(i + 1, j + 1, dFdC * inv4h2);
        put(i - 1, j - 1, dFdC * inv4h2);
        put(i + 1, j - 1, -dFdC * inv4h2);
        put(i - 1, j + 1, -dFdC * inv4h2);
      }

    Eigen::SparseMatrix<double> J(K, K);
    J.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success)
      throw SolverError(SolverError::Kind::NonConvergence, "Jacobian factorization failed",
                        g.residual_history);
    delta = lu.solve(F);

    double lambda = 1.0;
    bool accepted = false;
    std::optional<GuardViolation> last_violation;
    for (int t = 0; t <= config.max_halvings; ++t, lambda *= 0.5) {
      GridSolution trial = g;
      for (int j = 1; j < N - 1; ++j)
        for (int i = 1; i < N - 1; ++i)
          trial.values[static_cast<std::size_t>(j) * N + i] += lambda * delta(interior_index(i, j));
      if (auto viol = check_guard(trial, config.delta_guard)) {
        last_violation = viol;
        continue;
      }
      const double trial_res = sup_residual(trial, H);
      if (trial_res < res) {
        g.values = std::move(trial.values);
        res = trial_res;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (last_violation)
        throw SolverError(SolverError::Kind::CausalBreakdown,
                          "causal breakdown: |grad| = " + format_g17(last_violation->grad_norm) +
                              " at node (" + std::to_string(last_violation->i) + ", " +
                              std::to_string(last_violation->j) + ") after all damping halvings",
                          g.residual_history);
      throw SolverError(SolverError::Kind::NonConvergence,
                        "line search stalled at residual " + format_g17(res), g.residual_history);
    }
    ++g.iterations;
    g.residual_history.push_back(res);
  }

  g.final_residual = res;
  return g;
}

ResidualReport residual(const GridSolution& sol, const GraphSurface* reference) {
  ResidualReport rep;
  rep.pde_residual_sup = sup_residual(sol, sol.H_target);
  if (reference) {
    if (reference->n != 2) throw std::invalid_argument("reference surface must have n = 2");
    double sup = 0.0;
    const int N = sol.points_per_axis();
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        const double x[2] = {sol.coord(i), sol.coord(j)};
        sup = std::max(sup, std::fabs(sol.at(i, j) - reference->psi.value(x)));
      }
    rep.reference_sup_error = sup;
  }
  return rep;
}

namespace {

// Cubic Lagrange basis through 4 nodes: value, first and second derivative.
void lagrange4(const double nodes[4], double x, double L[4], double dL[4], double ddL[4]) {
  for (int a = 0; a < 4; ++a) {
    double others[3];
    int c = 0;
    for (int b = 0; b < 4; ++b)
      if (b != a) others[c++] = nodes[b];
    const double denom =
        (nodes[a] - others[0]) * (nodes[a] - others[1]) * (nodes[a] - others[2]);
    const double d0 = x - others[0], d1 = x - others[1], d2 = x - others[2];
    L[a] = d0 * d1 * d2 / denom;
    dL[a] = (d1 * d2 + d0 * d2 + d0 * d1) / denom;
    ddL[a] = 2.0 * (d0 + d1 + d2) / denom;
  }
}

}  // namespace

Jet grid_jet(const GridSolution& sol, double x, double y) {
  const int N = sol.points_per_axis();
  const double h = sol.spacing();
  auto window = [&](double t) {
    int i0 = static_cast<int>(std::floor((t + sol.R) / h)) - 1;
    return std::clamp(i0, 0, N - 4);
  };
  const int i0 = window(x), j0 = window(y);

  double xn[4], yn[4];
  for (int a = 0; a < 4; ++a) {
    xn[a] = sol.coord(i0 + a);
    yn[a] = sol.coord(j0 + a);
  }
  double Lx[4], dLx[4], ddLx[4], Ly[4], dLy[4], ddLy[4];
  lagrange4(xn, x, Lx, dLx, ddLx);
  lagrange4(yn, y, Ly, dLy, ddLy);

  Jet jet;
  jet.gradient.assign(2, 0.0);
  jet.hessian.assign(4, 0.0);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double v = sol.at(i0 + a, j0 + b);
      jet.value += v * Lx[a] * Ly[b];
      jet.gradient[0] += v * dLx[a] * Ly[b];
      jet.gradient[1] += v * Lx[a] * dLy[b];
      jet.hessian[0] += v * ddLx[a] * Ly[b];
      jet.hessian[1] += v * dLx[a] * dLy[b];
      jet.hessian[3] += v * Lx[a] * ddLy[b];
    }
  jet.hessian[2] = jet.hessian[1];
  return jet;
}

}  // namespace mink
