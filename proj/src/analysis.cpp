#include "mink/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "mink/errors.hpp"

namespace mink {

namespace {

constexpr double kPi = std::numbers::pi;

std::string node_text(std::span<const double> p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", p[i]);
    if (i) out += ", ";
    out += buf;
  }
  return out + ")";
}

std::string format_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double norm_sq(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

struct Extremum {
  bool maximize;
  bool found = false;
  double value = 0.0;
  std::vector<double> arg;

  void offer(double v, std::span<const double> p) {
    if (!found || (maximize ? v > value : v < value)) {
      found = true;
      value = v;
      arg.assign(p.begin(), p.end());
    }
  }
};

// One refinement pass: a 5^n sub-lattice of half/quarter spacing around the
// extremal node, clipped to the closed ball.
void refine_extremum(int n, double R, double h, Extremum& ex, bool exclude_origin,
                     const std::function<double(std::span<const double>)>& fn) {
  if (!ex.found) return;
  static constexpr double kSteps[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  const std::vector<double> center = ex.arg;
  for (;;) {
    bool all_zero = true;
    for (int i = 0; i < n; ++i) {
      x[static_cast<std::size_t>(i)] =
          center[static_cast<std::size_t>(i)] + h * kSteps[idx[static_cast<std::size_t>(i)]];
      if (kSteps[idx[static_cast<std::size_t>(i)]] != 0.0) all_zero = false;
    }
    const double r2 = norm_sq(x);
    if (!all_zero && r2 <= R * R * (1.0 + 1e-14) && !(exclude_origin && r2 == 0.0))
      ex.offer(fn(x), x);
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == 5) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }
}

}  // namespace

int effective_per_axis(int n, int per_axis) {
  if (n <= 2) return per_axis;
  if (n == 3) return std::min(per_axis, 48);
  return std::min(per_axis, 12);
}

double lattice_spacing(double R, int per_axis) { return 2.0 * R / (per_axis - 1); }

void for_each_sample_node(int n, double R, int per_axis, bool include_boundary,
                          const std::function<void(std::span<const double>)>& fn) {
  if (per_axis < 2) throw std::invalid_argument("sample lattice needs per_axis >= 2");
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> x(static_cast<std::size_t>(n));
  const double h = lattice_spacing(R, per_axis);
  for (;;) {
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = -R + h * idx[static_cast<std::size_t>(i)];
    if (norm_sq(x) <= R * R * (1.0 + 1e-14)) fn(x);
    int d = 0;
    while (d < n && ++idx[static_cast<std::size_t>(d)] == per_axis) {
      idx[static_cast<std::size_t>(d)] = 0;
      ++d;
    }
    if (d == n) break;
  }
  if (!include_boundary) return;
  if (n == 1) {
    const double a[1] = {-R}, b[1] = {R};
    fn(a);
    fn(b);
  } else if (n == 2) {
    for (int k = 0; k < per_axis; ++k) {
      const double phi = 2.0 * kPi * k / per_axis;
      const double p[2] = {R * std::cos(phi), R * std::sin(phi)};
      fn(p);
    }
  } else if (n == 3) {
    const int mt = std::max(8, per_axis / 2);
    Rule1D g = gauss_legendre(mt);
    for (int j = 0; j < mt; ++j) {
      const double t = g.x[static_cast<std::size_t>(j)];
      const double rho = R * std::sqrt(1.0 - t * t);
      for (int k = 0; k < per_axis; ++k) {
        const double phi = 2.0 * kPi * k / per_axis;
        const double p[3] = {rho * std::cos(phi), rho * std::sin(phi), R * t};
        fn(p);
      }
    }
  } else {
    // Axis points only for n >= 4.
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
      p[static_cast<std::size_t>(i)] = R;
      fn(p);
      p[static_cast<std::size_t>(i)] = -R;
      fn(p);
      p[static_cast<std::size_t>(i)] = 0.0;
    }
  }
}

BallConstants unit_ball_constants(int n) {
  if (n < 1 || n > 10) throw std::invalid_argument("unit_ball_constants: need 1 <= n <= 10");
  const double volume = std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  const double area = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
  return {volume, area};
}

CausalType uniform_causal_type(const GraphSurface& s, double R, int per_axis) {
  bool seen = false;
  CausalType type = CausalType::SpaceLike;
  const int m = effective_per_axis(s.n, per_axis);
  for_each_sample_node(s.n, R, m, true, [&](std::span<const double> p) {
    const CausalType t = classify_gradient_sq(s.psi.jet(p).gradient_norm_sq());
    if (t == CausalType::LightLike)
      throw CausalTypeError("light-like sample node at " + node_text(p));
    if (!seen) {
      seen = true;
      type = t;
    } else if (t != type) {
      throw CausalTypeError("mixed causal type: " + std::string(to_string(t)) + " at " +
                            node_text(p) + " (checks require a uniform type)");
    }
  });
  if (!seen) throw std::invalid_argument("empty sample lattice");
  return type;
}

nlohmann::ordered_json CheckReport::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["residual"] = residual;
  j["tolerance"] = tolerance;
  j["quadrature_error"] = quadrature_error;
  j["passed"] = passed;
  nlohmann::ordered_json meta;
  for (const auto& [key, value] : metadata) meta[key] = value;
  j["metadata"] = meta;
  return j;
}

CheckReport stokes_check(const GraphSurface& s, double R, const QuadratureSpec& q) {
  uniform_causal_type(s, R, std::min(q.resolution, 64));

  const ScalarField n_times_H = [&s](std::span<const double> p) {
    return s.n * mean_curvature_from_jet(s.psi.jet(p));
  };
  const IntegralResult lhs = integrate_ball(n_times_H, BallDomain{s.n, R}, q);
  const IntegralResult rhs = integrate_sphere_flux(s, R, q);

  CheckReport rep;
  rep.check = "stokes";
  rep.identity = true;
  rep.lhs = lhs.value;
  rep.rhs = rhs.value;
  rep.residual = lhs.value - rhs.value;
  rep.quadrature_error = lhs.error + rhs.error;
  rep.passed = std::fabs(rep.residual) <= rep.tolerance + rep.quadrature_error;
  rep.metadata = {{"n", static_cast<double>(s.n)}, {"R", R},
                  {"resolution", static_cast<double>(q.resolution)}};
  return rep;
}

BoundFit fit_gradient_bound(const GraphSurface& s, double R, double k,
                            const SampleLattice& sampling) {
  const int n = s.n;
  const int m = effective_per_axis(n, sampling.per_axis);
  const double h = lattice_spacing(R, m);

  const auto ratio_at = [&](std::span<const double> p) {
    const double g2 = s.psi.jet(p).gradient_norm_sq();
    if (classify_gradient_sq(g2) == CausalType::LightLike)
      throw CausalTypeError("light-like sample node at " + node_text(p));
    return tilt_from_gradient_sq(g2) / std::pow(norm_sq(p), k);
  };

  if (k > 0.0) {
    const std::vector<double> origin(static_cast<std::size_t>(n), 0.0);
    const double g2 = s.psi.jet(origin).gradient_norm_sq();
    if (classify_gradient_sq(g2) == CausalType::LightLike)
      throw CausalTypeError("light-like sample node at the origin");
    const double t0 = tilt_from_gradient_sq(g2);
    if (t0 > 1e-9)
      throw UnboundedFitError("no finite bound for exponent k = " + format_g17(k) +
                              ": tilt at the origin is " + format_g17(t0));
  }

  Extremum sup{true};
  for_each_sample_node(n, R, m, sampling.include_boundary, [&](std::span<const double> p) {
    if (norm_sq(p) == 0.0) return;  // origin excluded from the sup
    sup.offer(ratio_at(p), p);
  });
  if (sampling.refine) refine_extremum(n, R, h, sup, true, ratio_at);
  if (!sup.found) throw std::invalid_argument("empty sample lattice");

  BoundFit fit;
  fit.M = sup.value;
  fit.k = k;
  fit.valid = std::isfinite(sup.value);
  fit.lattice_spacing = h;
  return fit;
}

CheckReport heinz_check(const GraphSurface& s, double R, double M, double k,
                        const QuadratureSpec& q) {
  if (!(M > 0.0)) throw std::invalid_argument("heinz_check: M must be > 0");
  const int n = s.n;
  const int m = effective_per_axis(n, q.resolution);
  const double h = lattice_spacing(R, m);

  bool seen = false;
  CausalType type = CausalType::SpaceLike;
  Extremum alpha{false};

  const auto abs_H_at = [&](std::span<const double> p) {
    return std::fabs(mean_curvature_from_jet(s.psi.jet(p)));
  };

  for_each_sample_node(n, R, m, true, [&](std::span<const double> p) {
    const Jet jet = s.psi.jet(p);
    const double g2 = jet.gradient_norm_sq();
    const CausalType t = classify_gradient_sq(g2);
    if (t == CausalType::LightLike)
      throw CausalTypeError("light-like sample node at " + node_text(p));
    if (!seen) {
      seen = true;
      type = t;
    } else if (t != type) {
      throw CausalTypeError("mixed causal type at " + node_text(p));
    }
    const double bound = M * std::pow(norm_sq(p), k);
    const double tlt = tilt_from_gradient_sq(g2);
    if (tlt > bound * (1.0 + 1e-9) + 1e-12)
      throw PreconditionError("gradient bound fails at node " + node_text(p) + ": tilt " +
                              format_g17(tlt) + " > " + format_g17(bound));
    alpha.offer(std::fabs(mean_curvature_from_jet(jet)), p);
  });
  refine_extremum(n, R, h, alpha, false, abs_H_at);

  CheckReport rep;
  rep.check = "heinz";
  rep.identity = false;
  rep.lhs = alpha.value;
  rep.rhs = M * std::pow(R, 2.0 * k - 1.0);
  rep.residual = rep.lhs - rep.rhs;
  rep.quadrature_error = 0.0;  // lattice estimate, no quadrature involved
  rep.passed = rep.lhs <= rep.rhs + rep.tolerance;
  rep.metadata = {{"alpha", alpha.value}, {"M", M},        {"k", k},
                  {"R", R},               {"n", static_cast<double>(n)}, {"lattice_h", h}};
  return rep;
}

CheckReport salavessa_check(const GraphSurface& s, double R, const QuadratureSpec& q) {
  const int n = s.n;
  const int m = effective_per_axis(n, q.resolution);
  const double h = lattice_spacing(R, m);

  bool seen = false;
  CausalType type = CausalType::SpaceLike;
  Extremum max_grad{true}, min_grad{false};
  Extremum min_abs_H{false};

  for_each_sample_node(n, R, m, true, [&](std::span<const double> p) {
    const Jet jet = s.psi.jet(p);
    const double g2 = jet.gradient_norm_sq();
    const CausalType t = classify_gradient_sq(g2);
    if (t == CausalType::LightLike)
      throw CausalTypeError("light-like sample node at " + node_text(p));
    if (!seen) {
      seen = true;
      type = t;
    } else if (t != type) {
      throw CausalTypeError("mixed causal type at " + node_text(p));
    }
    const double gnorm = std::sqrt(g2);
    max_grad.offer(gnorm, p);
    min_grad.offer(gnorm, p);
    min_abs_H.offer(std::fabs(mean_curvature_from_jet(jet)), p);
  });
  if (!seen) throw std::invalid_argument("empty sample lattice");

  const auto grad_norm_at = [&](std::span<const double> p) {
    return s.psi.jet(p).gradient_norm();
  };
  const auto abs_H_at = [&](std::span<const double> p) {
    return std::fabs(mean_curvature_from_jet(s.psi.jet(p)));
  };
  Extremum& m_D_ex = (type == CausalType::SpaceLike) ? max_grad : min_grad;
  refine_extremum(n, R, h, m_D_ex, false, grad_norm_at);
  refine_extremum(n, R, h, min_abs_H, false, abs_H_at);

  const double m_D = m_D_ex.value;
  if (std::fabs(1.0 - m_D * m_D) <= kLightLikeTol)
    throw CausalTypeError("m_D is within the light-like tolerance of 1");

  const BallConstants bc = unit_ball_constants(n);
  const double area_over_volume =
      (bc.sphere_area * std::pow(R, n - 1)) / (bc.volume * std::pow(R, n));
  const double rhs = (1.0 / n) * (m_D / std::sqrt(std::fabs(1.0 - m_D * m_D))) * area_over_volume;

  CheckReport rep;
  rep.check = "salavessa";
  rep.identity = false;
  rep.lhs = min_abs_H.value;
  rep.rhs = rhs;
  rep.residual = rep.lhs - rep.rhs;
  rep.quadrature_error = 0.0;
  rep.passed = rep.lhs <= rep.rhs + rep.tolerance;
  rep.metadata = {{"m_D", m_D},
                  {"V_n", bc.volume},
                  {"A_{n-1}", bc.sphere_area},
                  {"R", R},
                  {"n", static_cast<double>(n)},
                  {"lattice_h", h}};
  return rep;
}

nlohmann::ordered_json BernsteinReport::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = "bernstein";
  j["eps"] = eps;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const BernsteinRow& r : rows) {
    nlohmann::ordered_json row;
    row["R"] = r.R;
    row["M"] = r.M;
    row["alpha"] = r.alpha;
    row["ceiling"] = r.ceiling;
    arr.push_back(row);
  }
  j["rows"] = arr;
  j["verdict"] = verdict;
  j["note"] = note;
  return j;
}

std::string BernsteinReport::to_csv() const {
  std::string out = "R,M,alpha,ceiling\n";
  for (const BernsteinRow& r : rows)
    out += format_g17(r.R) + "," + format_g17(r.M) + "," + format_g17(r.alpha) + "," +
           format_g17(r.ceiling) + "\n";
  return out;
}

BernsteinReport bernstein_probe(const GraphSurface& s, double eps, std::span<const double> radii,
                                const QuadratureSpec& q) {
  if (!(eps > 0.0)) throw std::invalid_argument("bernstein_probe: eps must be > 0");
  if (radii.empty()) throw std::invalid_argument("bernstein_probe: need at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1]))
      throw std::invalid_argument("bernstein_probe: radii must be positive and increasing");

  uniform_causal_type(s, radii.back(), std::min(q.resolution, 64));

  const double k = 0.5 - eps;
  BernsteinReport rep;
  rep.eps = eps;

  SampleLattice lat;
  lat.per_axis = q.resolution;

  for (double R : radii) {
    BoundFit fit;
    try {
      fit = fit_gradient_bound(s, R, k, lat);
    } catch (const UnboundedFitError& e) {
      rep.verdict = "hypothesis-fails";
      rep.note = e.what();
      return rep;
    }
    const int m = effective_per_axis(s.n, q.resolution);
    Extremum alpha{false};
    const auto abs_H_at = [&](std::span<const double> p) {
      return std::fabs(mean_curvature_from_jet(s.psi.jet(p)));
    };
    for_each_sample_node(s.n, R, m, true,
                         [&](std::span<const double> p) { alpha.offer(abs_H_at(p), p); });
    refine_extremum(s.n, R, lattice_spacing(R, m), alpha, false, abs_H_at);

    rep.rows.push_back({R, fit.M, alpha.value, fit.M * std::pow(R, -2.0 * eps)});
  }

  // The fitted constant is nondecreasing in R by construction. A growing
  // fit means no single finite constant works at the probed scales.
  const double M_first = rep.rows.front().M;
  const double M_last = rep.rows.back().M;
  if (rep.rows.size() > 1 && M_last > M_first * 1.10 + 1e-12) {
    rep.verdict = "hypothesis-fails";
    rep.note = "gradient-bound fit does not stabilize: M grows from " + format_g17(M_first) +
               " to " + format_g17(M_last) + " across the probed radii";
    return rep;
  }

  bool all_below = true;
  for (const BernsteinRow& r : rep.rows)
    if (r.alpha > r.ceiling + kCheckTol) all_below = false;

  if (all_below) {
    rep.verdict = "consistent-with-vanishing";
    rep.note = "ceiling decays from " + format_g17(rep.rows.front().ceiling) + " to " +
               format_g17(rep.rows.back().ceiling);
  } else {
    rep.verdict = "inconsistent";
    rep.note = "alpha exceeds the ceiling under a verified hypothesis; this indicates a "
               "numerical or usage bug";
  }
  return rep;
}

nlohmann::ordered_json DongReport::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = "dong";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const DongRow& r : rows) {
    nlohmann::ordered_json row;
    row["R"] = r.R;
    row["ratio"] = r.ratio;
    row["sup_abs_H"] = r.sup_abs_H;
    arr.push_back(row);
  }
  j["rows"] = arr;
  j["decay_slope"] = decay_slope;
  j["verdict"] = verdict;
  j["note"] = note;
  return j;
}

std::string DongReport::to_csv() const {
  std::string out = "R,ratio,sup_abs_H\n";
  for (const DongRow& r : rows)
    out += format_g17(r.R) + "," + format_g17(r.ratio) + "," + format_g17(r.sup_abs_H) + "\n";
  return out;
}

DongReport dong_condition_probe(const GraphSurface& s, std::span<const double> radii,
                                const QuadratureSpec& q) {
  if (radii.size() < 2) throw std::invalid_argument("dong_condition_probe: need >= 2 radii");
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (!(radii[i] > 0.0) || (i > 0 && radii[i] <= radii[i - 1]))
      throw std::invalid_argument("dong_condition_probe: radii must be positive and increasing");

  const CausalType type = uniform_causal_type(s, radii.back(), std::min(q.resolution, 64));
  if (type != CausalType::SpaceLike)
    throw CausalTypeError("dong probe requires a space-like graph on all sampled balls");

  DongReport rep;
  const int m = effective_per_axis(s.n, q.resolution);
  const auto growth_at = [&](std::span<const double> p) {
    const double g2 = s.psi.jet(p).gradient_norm_sq();
    if (classify_gradient_sq(g2) != CausalType::SpaceLike)
      throw CausalTypeError("non-space-like sample at " + node_text(p));
    return 1.0 / std::sqrt(1.0 - g2);
  };
  const auto abs_H_at = [&](std::span<const double> p) {
    return std::fabs(mean_curvature_from_jet(s.psi.jet(p)));
  };

  for (double R : radii) {
    Extremum growth{true}, supH{true};
    for_each_sample_node(s.n, R, m, true, [&](std::span<const double> p) {
      growth.offer(growth_at(p), p);
      supH.offer(abs_H_at(p), p);
    });
    refine_extremum(s.n, R, lattice_spacing(R, m), growth, false, growth_at);
    rep.rows.push_back({R, growth.value / R, supH.value});
  }

  const DongRow& first = rep.rows.front();
  const DongRow& last = rep.rows.back();
  rep.decay_slope = std::log(last.ratio / first.ratio) / std::log(last.R / first.R);
  const bool decays = rep.decay_slope <= -0.25;
  double worst_H = 0.0;
  for (const DongRow& r : rep.rows) worst_H = std::max(worst_H, r.sup_abs_H);
  const bool vanishes = worst_H <= kCheckTol;

  if (decays && vanishes) {
    rep.verdict = "consistent";
    rep.note = "ratio decays (slope " + format_g17(rep.decay_slope) + ") and |H| vanishes";
  } else if (!decays) {
    rep.verdict = "hypothesis-fails";
    rep.note = "ratio does not decay toward 0 (slope " + format_g17(rep.decay_slope) + ")";
  } else {
    rep.verdict = "inconsistent";
    rep.note = "ratio decays but sup |H| = " + format_g17(worst_H) + " does not vanish";
  }
  return rep;
}

}  // namespace mink
