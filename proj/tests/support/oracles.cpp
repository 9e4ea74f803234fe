#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

// Velocity jump across a wave separating state k from pressure p.
double wave_curve(double p, const Gas1D& k, double gamma) {
  const double c = std::sqrt(gamma * k.p / k.rho);
  if (p > k.p) {
    const double a = 2.0 / ((gamma + 1.0) * k.rho);
    const double b = (gamma - 1.0) / (gamma + 1.0) * k.p;
    return (p - k.p) * std::sqrt(a / (p + b));
  }
  return 2.0 * c / (gamma - 1.0) * (std::pow(p / k.p, (gamma - 1.0) / (2.0 * gamma)) - 1.0);
}

template <typename F>
double bisect_increasing(F f, double lo, double hi) {
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::array<double, 2> riemann_star_bisection(const Gas1D& left, const Gas1D& right, double gamma) {
  const auto f = [&](double p) {
    return wave_curve(p, left, gamma) + wave_curve(p, right, gamma) + (right.u - left.u);
  };
  if (f(0.0) >= 0.0) throw std::runtime_error("oracle: vacuum");
  const double p = bisect_increasing(f, 0.0, std::max(left.p, right.p));
  const double u = 0.5 * (left.u + right.u) + 0.5 * (wave_curve(p, right, gamma) - wave_curve(p, left, gamma));
  return {p, u};
}

double riemann_density(const Gas1D& left, const Gas1D& right, double gamma, double xi) {
  const auto [ps, us] = riemann_star_bisection(left, right, gamma);
  const double g1 = (gamma - 1.0) / (gamma + 1.0);
  // Work in a frame where the sampled side is on the left: mirror right side.
  const bool use_left = xi <= us;
  const Gas1D k = use_left ? left : Gas1D{right.rho, -right.u, right.p};
  const double x = use_left ? xi : -xi;
  const double u_star = use_left ? us : -us;
  const double c = std::sqrt(gamma * k.p / k.rho);
  if (ps > k.p) {
    const double speed = k.u - c * std::sqrt((gamma + 1.0) / (2.0 * gamma) * ps / k.p + (gamma - 1.0) / (2.0 * gamma));
    if (x <= speed) return k.rho;
    return k.rho * (ps / k.p + g1) / (g1 * ps / k.p + 1.0);
  }
  const double rho_star = k.rho * std::pow(ps / k.p, 1.0 / gamma);
  const double c_star = c * std::pow(ps / k.p, (gamma - 1.0) / (2.0 * gamma));
  const double head = k.u - c;
  const double tail = u_star - c_star;
  if (x <= head) return k.rho;
  if (x >= tail) return rho_star;
  return k.rho * std::pow(2.0 / (gamma + 1.0) + g1 / c * (k.u - x), 2.0 / (gamma - 1.0));
}

double piston_pressure_bisection(const Gas1D& gas, double wall_velocity, double gamma) {
  const double target = wall_velocity - gas.u;
  const auto f = [&](double p) { return wave_curve(p, gas, gamma) - target; };
  if (f(0.0) >= 0.0) throw std::runtime_error("oracle: vacuum");
  return bisect_increasing(f, 0.0, gas.p);
}

double pinned_pinned_frequency(double length, double ei, double mass_per_length, int mode) {
  const double k = mode * std::numbers::pi / length;
  return k * k * std::sqrt(ei / mass_per_length) / (2.0 * std::numbers::pi);
}

double central_difference_frequency(double omega, double dt) {
  return 2.0 * std::asin(0.5 * omega * dt) / dt;
}

int count_crossings_naive(const Vec3& p0, const Vec3& p1,
                          const std::vector<std::array<Vec3, 3>>& triangles) {
  int count = 0;
  const Vec3 dir = p1 - p0;
  for (const auto& t : triangles) {
    const Vec3 e1 = t[1] - t[0];
    const Vec3 e2 = t[2] - t[0];
    const Vec3 h = dir.cross(e2);
    const double det = e1.dot(h);
    if (std::abs(det) < 1e-300) continue;
    const Vec3 s = p0 - t[0];
    const double u = s.dot(h) / det;
    if (u < 0.0 || u > 1.0) continue;
    const Vec3 q = s.cross(e1);
    const double v = dir.dot(q) / det;
    if (v < 0.0 || u + v > 1.0) continue;
    const double tt = e2.dot(q) / det;
    if (tt >= 0.0 && tt <= 1.0) ++count;
  }
  return count;
}

}  // namespace oracle
