// Command-line front end: every operation of the toolkit behind one binary
// with deterministic, machine-readable output.
//
// Exit codes: 0 = computation succeeded / check passed; 1 = a check failed
// (the JSON distinguishes "hypothesis-failure" from "theorem-violation");
// 2 = usage, parse, domain or causal-type error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mink/analysis.hpp"
#include "mink/errors.hpp"
#include "mink/geometry.hpp"
#include "mink/quadrature.hpp"
#include "mink/solvers.hpp"

namespace {

using nlohmann::ordered_json;

struct SurfaceFlags {
  std::string catalog_name;
  std::string expr_text;
  int n = 2;
  double H = 1.0;
  std::vector<double> slope;
  double offset = 0.0;
  std::string h_expr = "exp(u1)";
};

struct QuadFlags {
  std::string scheme = "tensor-polar";
  int resolution = 128;
  std::uint64_t seed = 0;
};

struct OutputFlags {
  std::string path;
  std::string format = "json";
};

void add_surface_options(CLI::App* cmd, SurfaceFlags& f, bool required = true) {
  auto* surface = cmd->add_option("--surface", f.catalog_name,
                                  "catalog surface: hyperboloid | hyperplane | translation | "
                                  "lightlike-plane")
                      ->check(CLI::IsMember(
                          {"hyperboloid", "hyperplane", "translation", "lightlike-plane"}));
  auto* expr = cmd->add_option("--expr", f.expr_text, "psi as expression text over u1..un");
  expr->excludes(surface);
  surface->excludes(expr);
  cmd->add_option("--n", f.n, "graph dimension")->default_val(2);
  cmd->add_option("--H", f.H, "hyperboloid mean curvature")->default_val(1.0);
  cmd->add_option("--a", f.slope, "hyperplane slope vector (comma separated)")->delimiter(',');
  cmd->add_option("--b", f.offset, "hyperplane offset")->default_val(0.0);
  cmd->add_option("--h-expr", f.h_expr, "translation profile h(u1)");
  if (required) {
    cmd->callback([cmd]() {
      if (cmd->count("--surface") == 0 && cmd->count("--expr") == 0)
        throw CLI::RequiredError("one of --surface or --expr");
    });
  }
}

void add_quadrature_options(CLI::App* cmd, QuadFlags& f) {
  cmd->add_option("--scheme", f.scheme, "quadrature scheme")
      ->check(CLI::IsMember({"tensor-polar", "monte-carlo"}))
      ->default_val("tensor-polar");
  cmd->add_option("--resolution", f.resolution,
                  "points per axis (tensor-polar) or sample count (monte-carlo)")
      ->default_val(128);
  cmd->add_option("--seed", f.seed, "RNG seed for monte-carlo")->default_val(0);
}

void add_output_options(CLI::App* cmd, OutputFlags& f, bool with_format) {
  cmd->add_option("--output", f.path, "write the payload to this file instead of stdout");
  if (with_format)
    cmd->add_option("--format", f.format, "payload format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->default_val("json");
  cmd->set_config("--config", "", "plain key=value config file; command line overrides it");
}

mink::GraphSurface build_surface(const SurfaceFlags& f) {
  if (!f.expr_text.empty()) return mink::make_surface(f.expr_text, f.n);
  if (f.catalog_name == "hyperboloid") return mink::catalog_hyperboloid(f.n, f.H);
  if (f.catalog_name == "hyperplane") {
    if (static_cast<int>(f.slope.size()) != f.n)
      throw std::invalid_argument("hyperplane needs --a with exactly n components");
    return mink::catalog_hyperplane(f.n, f.slope, f.offset);
  }
  if (f.catalog_name == "translation") return mink::catalog_translation(f.n, f.h_expr);
  if (f.catalog_name == "lightlike-plane") return mink::catalog_lightlike_plane(f.n);
  throw std::invalid_argument("no surface given: use --surface or --expr");
}

void write_payload(const std::string& text, const OutputFlags& out) {
  if (out.path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out.path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file " + out.path);
  file << text;
}

void emit_json(const ordered_json& j, const OutputFlags& out) {
  write_payload(j.dump(2) + "\n", out);
}

ordered_json point_report_json(const char* check, const mink::GraphSurface& s,
                               const mink::PointReport& r) {
  ordered_json j;
  j["check"] = check;
  j["surface"] = s.name;
  j["psi"] = s.psi.render();
  j["n"] = s.n;
  j["point"] = r.point;
  j["grad_norm"] = r.grad_norm;
  j["causal"] = mink::to_string(r.causal);
  j["tilt"] = r.tilt ? ordered_json(*r.tilt) : ordered_json(nullptr);
  j["sinh_theta"] = r.sinh_theta ? ordered_json(*r.sinh_theta) : ordered_json(nullptr);
  j["mean_curvature"] =
      r.mean_curvature ? ordered_json(*r.mean_curvature) : ordered_json(nullptr);
  return j;
}

// passed=false on a verified-hypothesis check indicates a numerical or
// usage bug, never the estimate itself.
int emit_check(const mink::CheckReport& rep, const OutputFlags& out) {
  ordered_json j = rep.to_json();
  j["failure"] = rep.passed ? ordered_json(nullptr) : ordered_json("theorem-violation");
  emit_json(j, out);
  return rep.passed ? 0 : 1;
}

mink::QuadratureSpec build_spec(const QuadFlags& f) {
  mink::QuadratureSpec q;
  q.scheme = f.scheme == "monte-carlo" ? mink::Scheme::MonteCarlo : mink::Scheme::TensorPolar;
  q.resolution = f.resolution;
  q.seed = f.seed;
  return q;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph hypersurfaces in Lorentz-Minkowski space: curvature, causal type, "
               "Heinz/Salavessa estimates, CMC solvers"};
  app.require_subcommand(1);

  SurfaceFlags surf;
  QuadFlags quad;
  OutputFlags out;
  std::vector<double> point;
  double R = 1.0;
  std::vector<double> radii;
  double M = 1.0, k = 0.0, eps = 0.5;
  double target_H = 1.0;
  double light_tol = mink::kLightLikeTol;
  int ball_n = 2;
  int grid_m = 32;
  double r_max = 5.0, step = 1e-3;
  std::string boundary_expr;
  mink::SolverConfig solver_cfg;

  auto add_point = [&](CLI::App* cmd) {
    cmd->add_option("--point", point, "evaluation point (comma separated)")
        ->delimiter(',')
        ->required();
  };

  CLI::App* classify = app.add_subcommand("classify", "causal type and per-point scalars");
  add_surface_options(classify, surf);
  add_point(classify);
  classify->add_option("--light-tol", light_tol, "light-like tolerance")->default_val(1e-9);
  add_output_options(classify, out, false);

  CLI::App* curvature = app.add_subcommand("curvature", "mean curvature at a point");
  add_surface_options(curvature, surf);
  add_point(curvature);
  add_output_options(curvature, out, false);

  CLI::App* angle = app.add_subcommand("angle", "hyperbolic angle at a space-like point");
  add_surface_options(angle, surf);
  add_point(angle);
  add_output_options(angle, out, false);

  CLI::App* metric = app.add_subcommand("metric", "induced metric and determinant at a point");
  add_surface_options(metric, surf);
  add_point(metric);
  add_output_options(metric, out, false);

  CLI::App* stokes = app.add_subcommand("stokes", "ball integral of n*H against boundary flux");
  add_surface_options(stokes, surf);
  stokes->add_option("--R", R, "ball radius")->required();
  add_quadrature_options(stokes, quad);
  add_output_options(stokes, out, false);

  CLI::App* heinz = app.add_subcommand("heinz", "curvature bound alpha <= M R^(2k-1)");
  add_surface_options(heinz, surf);
  heinz->add_option("--R", R, "ball radius")->required();
  heinz->add_option("--M", M, "gradient bound constant")->required();
  heinz->add_option("--k", k, "gradient bound exponent")->required();
  add_quadrature_options(heinz, quad);
  add_output_options(heinz, out, false);

  CLI::App* sala = app.add_subcommand("salavessa", "min |H| against the isoperimetric bound");
  add_surface_options(sala, surf);
  sala->add_option("--R", R, "ball radius")->required();
  add_quadrature_options(sala, quad);
  add_output_options(sala, out, false);

  CLI::App* bern = app.add_subcommand("bernstein", "vanishing-curvature probe over radii");
  add_surface_options(bern, surf);
  bern->add_option("--eps", eps, "decay exponent (k = 1/2 - eps)")->required();
  bern->add_option("--radii", radii, "increasing radii (comma separated)")
      ->delimiter(',')
      ->required();
  add_quadrature_options(bern, quad);
  add_output_options(bern, out, true);

  CLI::App* dong = app.add_subcommand("dong", "sub-linear growth probe for 1/sqrt(1-|grad|^2)");
  add_surface_options(dong, surf);
  dong->add_option("--radii", radii, "increasing radii (comma separated)")
      ->delimiter(',')
      ->required();
  add_quadrature_options(dong, quad);
  add_output_options(dong, out, true);

  CLI::App* fitb = app.add_subcommand("fit-bound", "fit the gradient-bound constant M");
  add_surface_options(fitb, surf);
  fitb->add_option("--R", R, "ball radius")->required();
  fitb->add_option("--k", k, "exponent")->required();
  add_quadrature_options(fitb, quad);
  add_output_options(fitb, out, false);

  CLI::App* sradial = app.add_subcommand("solve-radial", "radial CMC profile");
  sradial->add_option("--n", ball_n, "dimension")->default_val(2);
  sradial->add_option("--H", target_H, "target mean curvature")->required();
  sradial->add_option("--r-max", r_max, "profile extent")->default_val(5.0);
  sradial->add_option("--step", step, "grid step")->default_val(1e-3);
  add_output_options(sradial, out, true);

  // --H doubles as the hyperboloid parameter when a reference surface is
  // given; use --boundary for data that does not match the target.
  CLI::App* sdir = app.add_subcommand("solve-dirichlet", "2D Dirichlet CMC problem");
  add_surface_options(sdir, surf, false);
  sdir->add_option("--R", R, "half-width of the grid")->required();
  sdir->add_option("--m", grid_m, "grid parameter; (2m+1)^2 nodes")->default_val(32);
  sdir->add_option("--boundary", boundary_expr,
                   "boundary data as an expression in u1, u2 (default: the surface trace)");
  sdir->add_option("--newton-tol", solver_cfg.newton_tol)->default_val(1e-10);
  sdir->add_option("--max-iters", solver_cfg.max_iters)->default_val(50);
  add_output_options(sdir, out, true);

  CLI::App* cat = app.add_subcommand("catalog", "closed-form surface metadata");
  add_surface_options(cat, surf);
  add_output_options(cat, out, false);

  CLI::App* consts = app.add_subcommand("constants", "unit ball volume and sphere area");
  consts->add_option("--n", ball_n, "dimension")->required();
  add_output_options(consts, out, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*classify || *curvature || *angle || *metric) {
      mink::GraphSurface s = build_surface(surf);
      if (static_cast<int>(point.size()) != s.n)
        throw std::invalid_argument("--point must have exactly n components");

      if (*angle) {
        const double theta = mink::hyperbolic_angle(s, point);
        mink::PointReport r = mink::point_report(s, point, light_tol);
        ordered_json j = point_report_json("angle", s, r);
        j["theta"] = theta;
        emit_json(j, out);
        return 0;
      }
      if (*metric) {
        mink::MetricData mdat = mink::induced_metric(s, point);
        mink::PointReport r = mink::point_report(s, point, light_tol);
        ordered_json j = point_report_json("metric", s, r);
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < mdat.n; ++i) {
          ordered_json row = ordered_json::array();
          for (int jj = 0; jj < mdat.n; ++jj)
            row.push_back(mdat.g[static_cast<std::size_t>(i) * mdat.n + jj]);
          rows.push_back(row);
        }
        j["g"] = rows;
        j["det"] = mdat.det;
        emit_json(j, out);
        return 0;
      }
      const char* name = *classify ? "classify" : "curvature";
      emit_json(point_report_json(name, s, mink::point_report(s, point, light_tol)), out);
      return 0;
    }

    if (*stokes)
      return emit_check(mink::stokes_check(build_surface(surf), R, build_spec(quad)), out);
    if (*heinz)
      return emit_check(mink::heinz_check(build_surface(surf), R, M, k, build_spec(quad)), out);
    if (*sala)
      return emit_check(mink::salavessa_check(build_surface(surf), R, build_spec(quad)), out);

    if (*bern) {
      mink::BernsteinReport rep =
          mink::bernstein_probe(build_surface(surf), eps, radii, build_spec(quad));
      if (out.format == "csv") {
        write_payload(rep.to_csv(), out);
      } else {
        ordered_json j = rep.to_json();
        j["failure"] = rep.passed()                    ? ordered_json(nullptr)
                       : rep.verdict == "inconsistent" ? ordered_json("theorem-violation")
                                                       : ordered_json("hypothesis-failure");
        emit_json(j, out);
      }
      return rep.passed() ? 0 : 1;
    }

    if (*dong) {
      mink::DongReport rep =
          mink::dong_condition_probe(build_surface(surf), radii, build_spec(quad));
      if (out.format == "csv") {
        write_payload(rep.to_csv(), out);
      } else {
        ordered_json j = rep.to_json();
        j["failure"] = rep.passed()                    ? ordered_json(nullptr)
                       : rep.verdict == "inconsistent" ? ordered_json("theorem-violation")
                                                       : ordered_json("hypothesis-failure");
        emit_json(j, out);
      }
      return rep.passed() ? 0 : 1;
    }

    if (*fitb) {
      mink::SampleLattice lat;
      lat.per_axis = quad.resolution;
      mink::BoundFit fit = mink::fit_gradient_bound(build_surface(surf), R, k, lat);
      ordered_json j;
      j["check"] = "fit-bound";
      j["M"] = fit.M;
      j["k"] = fit.k;
      j["valid"] = fit.valid;
      j["lattice_spacing"] = fit.lattice_spacing;
      emit_json(j, out);
      return 0;
    }

    if (*sradial) {
      mink::RadialProfile prof = mink::solve_radial_cmc(ball_n, target_H, r_max, step);
      double worst = 0.0;
      for (std::size_t i = 0; i < prof.r_grid.size(); ++i)
        worst = std::max(worst, std::fabs(prof.first_integral_residual(i)));
      if (out.format == "csv") {
        write_payload(prof.to_csv(), out);
        return 0;
      }
      ordered_json j;
      j["check"] = "solve-radial";
      j["n"] = prof.n;
      j["H"] = prof.H;
      j["r_max"] = prof.r_grid.back();
      j["points"] = prof.r_grid.size();
      j["psi_end"] = prof.psi_values.back();
      j["sup_first_integral_residual"] = worst;
      std::cout << j.dump(2) << "\n";
      if (!out.path.empty()) write_payload(prof.to_csv(), out);
      return 0;
    }

    if (*sdir) {
      std::optional<mink::GraphSurface> ref;
      if (!surf.catalog_name.empty() || !surf.expr_text.empty()) ref = build_surface(surf);
      mink::BoundaryFn boundary;
      if (!boundary_expr.empty()) {
        mink::Expression b = mink::parse(boundary_expr, 2);
        boundary = [b](double x, double y) {
          const double p[2] = {x, y};
          return b.value(p);
        };
      } else if (ref) {
        if (ref->n != 2)
          throw std::invalid_argument("solve-dirichlet needs an n = 2 surface trace");
        const mink::Expression psi = ref->psi;
        boundary = [psi](double x, double y) {
          const double p[2] = {x, y};
          return psi.value(p);
        };
      } else {
        throw std::invalid_argument("solve-dirichlet needs --boundary or a surface");
      }

      mink::GridSolution g = mink::solve_dirichlet_cmc(surf.H, R, boundary, grid_m, solver_cfg);
      if (out.format == "csv") {
        write_payload(g.to_csv(), out);
        return 0;
      }
      ordered_json j = g.header_json();
      j["check"] = "solve-dirichlet";
      mink::ResidualReport rr = mink::residual(g, ref ? &*ref : nullptr);
      j["pde_residual_sup"] = rr.pde_residual_sup;
      j["reference_sup_error"] =
          rr.reference_sup_error ? ordered_json(*rr.reference_sup_error) : ordered_json(nullptr);
      std::cout << j.dump(2) << "\n";
      if (!out.path.empty()) write_payload(g.to_csv(), out);
      return 0;
    }

    if (*cat) {
      mink::GraphSurface s = build_surface(surf);
      ordered_json j;
      j["check"] = "catalog";
      j["name"] = s.name;
      j["n"] = s.n;
      j["psi"] = s.psi.render();
      j["reference_H"] = s.reference_mean_curvature ? ordered_json(*s.reference_mean_curvature)
                                                    : ordered_json(nullptr);
      j["reference_causal"] = s.reference_causal
                                  ? ordered_json(mink::to_string(*s.reference_causal))
                                  : ordered_json(nullptr);
      emit_json(j, out);
      return 0;
    }

    if (*consts) {
      mink::BallConstants c = mink::unit_ball_constants(ball_n);
      ordered_json j;
      j["check"] = "constants";
      j["n"] = ball_n;
      j["V_n"] = c.volume;
      j["A_{n-1}"] = c.sphere_area;
      emit_json(j, out);
      return 0;
    }
  } catch (const mink::PreconditionError& e) {
    ordered_json j;
    j["check"] = app.get_subcommands().front()->get_name();
    j["error"] = e.what();
    j["failure"] = "hypothesis-failure";
    std::cout << j.dump(2) << "\n";
    return 1;
  } catch (const mink::UnboundedFitError& e) {
    ordered_json j;
    j["check"] = app.get_subcommands().front()->get_name();
    j["error"] = e.what();
    j["failure"] = "hypothesis-failure";
    std::cout << j.dump(2) << "\n";
    return 1;
  } catch (const mink::SolverError& e) {
    if (e.kind() == mink::SolverError::Kind::CausalBreakdown) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    ordered_json j;
    j["check"] = app.get_subcommands().front()->get_name();
    j["error"] = e.what();
    j["failure"] = "hypothesis-failure";
    j["residual_history"] = e.residual_history();
    std::cout << j.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
