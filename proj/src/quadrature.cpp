#include "mink/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

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

void validate(const QuadratureSpec& q) {
  if (q.resolution < 8) throw std::invalid_argument("quadrature resolution must be >= 8");
}

// Uniform and gaussian deviates from the standard-specified mt19937_64
// stream, so a fixed seed gives a fixed sample sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1]
    double u2 = uniform01();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * kPi * u2);
  }

  // Uniform direction on S^{n-1}.
  void direction(std::span<double> dir) {
    double norm2;
    do {
      norm2 = 0.0;
      for (double& d : dir) {
        d = gaussian();
        norm2 += d * d;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& d : dir) d *= inv;
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

double eval_field(const ScalarField& f, std::span<const double> p) {
  try {
    return f(p);
  } catch (const EvalDomainError& e) {
    throw EvalDomainError(std::string(e.what()) + " at quadrature node " + node_text(p),
                          e.subterm());
  }
}

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n) {  // area of S^{n-1}
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double tensor_ball_value(const ScalarField& f, int n, double R, int m) {
  std::vector<double> contrib;
  if (n == 1) {
    Rule1D g = gauss_legendre(m);
    contrib.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double x[1] = {R * g.x[static_cast<std::size_t>(i)]};
      contrib.push_back(R * g.w[static_cast<std::size_t>(i)] * eval_field(f, x));
    }
  } else if (n == 2) {
    Rule1D g = gauss_legendre(m);
    contrib.reserve(static_cast<std::size_t>(m) * m);
    const double wphi = 2.0 * kPi / m;
    for (int i = 0; i < m; ++i) {
      const double r = 0.5 * R * (g.x[static_cast<std::size_t>(i)] + 1.0);
      const double wr = 0.5 * R * g.w[static_cast<std::size_t>(i)];
      for (int k = 0; k < m; ++k) {
        const double phi = wphi * k;
        const double x[2] = {r * std::cos(phi), r * std::sin(phi)};
        contrib.push_back(wr * wphi * r * eval_field(f, x));
      }
    }
  } else if (n == 3) {
    Rule1D g = gauss_legendre(m);
    contrib.reserve(static_cast<std::size_t>(m) * m * m);
    const double wphi = 2.0 * kPi / m;
    for (int i = 0; i < m; ++i) {
      const double r = 0.5 * R * (g.x[static_cast<std::size_t>(i)] + 1.0);
      const double wr = 0.5 * R * g.w[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) {
        const double t = g.x[static_cast<std::size_t>(j)];  // cos(theta)
        const double wt = g.w[static_cast<std::size_t>(j)];
        const double rho = r * std::sqrt(1.0 - t * t);
        for (int k = 0; k < m; ++k) {
          const double phi = wphi * k;
          const double x[3] = {rho * std::cos(phi), rho * std::sin(phi), r * t};
          contrib.push_back(wr * wt * wphi * r * r * eval_field(f, x));
        }
      }
    }
  } else {
    throw std::invalid_argument("tensor-polar quadrature supports n <= 3; use monte-carlo");
  }
  return pairwise_sum(contrib);
}

IntegralResult monte_carlo_ball(const ScalarField& f, int n, double R, int samples,
                                std::uint64_t seed) {
  Rng rng(seed);
  const double volume = unit_ball_volume(n) * std::pow(R, n);
  std::vector<double> values(static_cast<std::size_t>(samples));
  std::vector<double> dir(static_cast<std::size_t>(n));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < samples; ++i) {
    rng.direction(dir);
    const double r = R * std::pow(rng.uniform01(), 1.0 / n);
    for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = r * dir[static_cast<std::size_t>(k)];
    values[static_cast<std::size_t>(i)] = eval_field(f, x);
  }
  const double mean = pairwise_sum(values) / samples;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / std::max(1, samples - 1);
  const double sigma = volume * std::sqrt(var / samples);
  return {volume * mean, 3.0 * sigma};
}

// F . n at a sphere point; light-like nodes are hard failures.
double flux_integrand(const GraphSurface& s, std::span<const double> x, double R) {
  const Jet jet = s.psi.jet(x);
  const double g2 = jet.gradient_norm_sq();
  if (std::fabs(1.0 - g2) <= kLightLikeTol)
    throw CausalTypeError("light-like point on the sphere at " + node_text(x));
  double radial = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) radial += jet.gradient[i] * x[i];
  return radial / (R * std::sqrt(std::fabs(1.0 - g2)));
}

double tensor_sphere_value(const GraphSurface& s, double R, int m) {
  const int n = s.n;
  std::vector<double> contrib;
  if (n == 1) {
    // S^0 is two points; the rule is exact.
    const double xp[1] = {R}, xm[1] = {-R};
    return flux_integrand(s, xp, R) + flux_integrand(s, xm, R);
  } else if (n == 2) {
    const double wphi = 2.0 * kPi / m;
    contrib.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const double phi = wphi * k;
      const double x[2] = {R * std::cos(phi), R * std::sin(phi)};
      contrib.push_back(wphi * R * flux_integrand(s, x, R));
    }
  } else if (n == 3) {
    Rule1D g = gauss_legendre(m);
    const double wphi = 2.0 * kPi / m;
    contrib.reserve(static_cast<std::size_t>(m) * m);
    for (int j = 0; j < m; ++j) {
      const double t = g.x[static_cast<std::size_t>(j)];
      const double wt = g.w[static_cast<std::size_t>(j)];
      const double rho = R * std::sqrt(1.0 - t * t);
      for (int k = 0; k < m; ++k) {
        const double phi = wphi * k;
        const double x[3] = {rho * std::cos(phi), rho * std::sin(phi), R * t};
        contrib.push_back(wt * wphi * R * R * flux_integrand(s, x, R));
      }
    }
  } else {
    throw std::invalid_argument("tensor-polar quadrature supports n <= 3; use monte-carlo");
  }
  return pairwise_sum(contrib);
}

IntegralResult monte_carlo_sphere(const GraphSurface& s, double R, int samples,
                                  std::uint64_t seed) {
  const int n = s.n;
  Rng rng(seed);
  const double area = unit_sphere_area(n) * std::pow(R, n - 1);
  std::vector<double> values(static_cast<std::size_t>(samples));
  std::vector<double> dir(static_cast<std::size_t>(n));
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < samples; ++i) {
    rng.direction(dir);
    for (int k = 0; k < n; ++k) x[static_cast<std::size_t>(k)] = R * dir[static_cast<std::size_t>(k)];
    values[static_cast<std::size_t>(i)] = flux_integrand(s, x, R);
  }
  const double mean = pairwise_sum(values) / samples;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / std::max(1, samples - 1);
  const double sigma = area * std::sqrt(var / samples);
  return {area * mean, 3.0 * sigma};
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

Rule1D gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  Rule1D rule;
  rule.x.assign(static_cast<std::size_t>(m), 0.0);
  rule.w.assign(static_cast<std::size_t>(m), 0.0);
  const int half = (m + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton on P_m with the Tricomi initial guess.
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    // Final polish of the weight with the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= m; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = m * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[static_cast<std::size_t>(i)] = -x;
    rule.w[static_cast<std::size_t>(i)] = w;
    rule.x[static_cast<std::size_t>(m - 1 - i)] = x;
    rule.w[static_cast<std::size_t>(m - 1 - i)] = w;
  }
  if (m % 2 == 1) rule.x[static_cast<std::size_t>(m / 2)] = 0.0;
  return rule;
}

IntegralResult integrate_ball(const ScalarField& f, const BallDomain& d, const QuadratureSpec& q) {
  validate(q);
  if (d.n < 1 || !(d.radius > 0.0)) throw std::invalid_argument("invalid ball domain");
  if (q.scheme == Scheme::MonteCarlo) return monte_carlo_ball(f, d.n, d.radius, q.resolution, q.seed);
  const double full = tensor_ball_value(f, d.n, d.radius, q.resolution);
  const double half = tensor_ball_value(f, d.n, d.radius, std::max(8, q.resolution / 2));
  return {full, std::fabs(full - half)};
}

IntegralResult integrate_sphere_flux(const GraphSurface& s, double R, const QuadratureSpec& q) {
  validate(q);
  if (!(R > 0.0)) throw std::invalid_argument("sphere radius must be > 0");
  if (q.scheme == Scheme::MonteCarlo) return monte_carlo_sphere(s, R, q.resolution, q.seed);
  const double full = tensor_sphere_value(s, R, q.resolution);
  const double half = tensor_sphere_value(s, R, std::max(8, q.resolution / 2));
  return {full, std::fabs(full - half)};
}

}  // namespace mink
