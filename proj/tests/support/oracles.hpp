#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's solvers; they are deliberately written differently
// (bisection instead of Newton, brute force instead of indexed search).

#include "cablefsi/common.hpp"

#include <array>
#include <vector>

namespace oracle {

using cablefsi::Vec3;

struct Gas1D {
  double rho;
  double u;
  double p;
};

/// Star pressure and velocity of the exact 1D Riemann problem, found by
/// bisection on the pressure function.
std::array<double, 2> riemann_star_bisection(const Gas1D& left, const Gas1D& right, double gamma);

/// Density at x/t = xi for the exact 1D Riemann problem (wave fan sampled
/// from the bisection star state).
double riemann_density(const Gas1D& left, const Gas1D& right, double gamma, double xi);

/// Wall-side pressure of the half problem in the wall-normal frame (normal
/// pointing into the gas): gas normal velocity gas.u, wall normal velocity
/// `wall_velocity`. Bisection on the one-sided wave curve.
double piston_pressure_bisection(const Gas1D& gas, double wall_velocity, double gamma);

/// Euler-Bernoulli pinned-pinned frequency (Hz) of mode k.
double pinned_pinned_frequency(double length, double ei, double mass_per_length, int mode);

/// Frequency (rad/s) observed by the central difference scheme on an
/// undamped oscillator of natural frequency omega.
double central_difference_frequency(double omega, double dt);

/// Moller-Trumbore style crossing count of a segment with a triangle soup,
/// without tie-breaking (used on generic configurations only).
int count_crossings_naive(const Vec3& p0, const Vec3& p1,
                          const std::vector<std::array<Vec3, 3>>& triangles);

}  // namespace oracle
