#ifndef MINK_QUADRATURE_HPP
#define MINK_QUADRATURE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mink/geometry.hpp"

namespace mink {

// Open n-ball centered at the origin, B^n(R).
struct BallDomain {
  int n;
  double radius;
};

enum class Scheme { TensorPolar, MonteCarlo };

// Tensor-polar: `resolution` is points per axis (radial/angular), n <= 3.
// Monte-carlo: `resolution` is the sample count, any n.
struct QuadratureSpec {
  Scheme scheme = Scheme::TensorPolar;
  int resolution = 128;
  std::uint64_t seed = 0;
};

struct IntegralResult {
  double value = 0.0;
  // Richardson-style half-resolution difference for tensor-polar, 3 sigma
  // for monte-carlo.
  double error = 0.0;
};

using ScalarField = std::function<double(std::span<const double>)>;

// Fixed-order pairwise reduction; bit-reproducible for a given node order.
double pairwise_sum(std::span<const double> xs);

// Gauss-Legendre nodes and weights on [-1, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};
Rule1D gauss_legendre(int m);

// Lebesgue integral of f over the ball. Quadrature nodes stay strictly
// inside the open ball. Field domain errors are rethrown with the node
// location attached.
IntegralResult integrate_ball(const ScalarField& f, const BallDomain& d, const QuadratureSpec& q);

// Flux of F = grad(psi)/sqrt(|1 - |grad psi|^2|) through the sphere of
// radius R. Throws CausalTypeError if a quadrature node is light-like.
IntegralResult integrate_sphere_flux(const GraphSurface& s, double R, const QuadratureSpec& q);

}  // namespace mink

#endif  // MINK_QUADRATURE_HPP
