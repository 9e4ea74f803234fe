#include "cablefsi/riemann/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cablefsi::riemann {

double GasModel::sound_speed(double rho, double p) const { return std::sqrt(gamma * p / rho); }

double GasModel::viscosity(double t) const { return mu0 * t * std::sqrt(t) / (t + sutherland_t0); }

void GasModel::validate() const {
  if (!(gamma > 1.0)) throw ConfigError("gamma must exceed 1");
  if (!(gas_constant > 0.0)) throw ConfigError("gas constant must be positive");
  if (!(mu0 >= 0.0) || !(sutherland_t0 > 0.0)) throw ConfigError("invalid Sutherland constants");
  if (!(prandtl > 0.0)) throw ConfigError("Prandtl number must be positive");
}

Conservative to_conservative(const PrimitiveState& w, const GasModel& gas) {
  Conservative u;
  u[0] = w.rho;
  u.segment<3>(1) = w.rho * w.v;
  u[4] = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * w.v.squaredNorm();
  return u;
}

PrimitiveState to_primitive(const Conservative& u, const GasModel& gas) {
  PrimitiveState w;
  w.rho = u[0];
  if (!(w.rho > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive density " << w.rho;
    throw StateError(msg.str());
  }
  w.v = u.segment<3>(1) / w.rho;
  w.p = (gas.gamma - 1.0) * (u[4] - 0.5 * w.rho * w.v.squaredNorm());
  if (!(w.p > 0.0)) {
    std::ostringstream msg;
    msg << "non-positive pressure " << w.p;
    throw StateError(msg.str());
  }
  return w;
}

bool is_admissible(const Conservative& u, const GasModel& gas) {
  if (!u.allFinite() || !(u[0] > 0.0)) return false;
  const double p = (gas.gamma - 1.0) * (u[4] - 0.5 * u.segment<3>(1).squaredNorm() / u[0]);
  return p > 0.0;
}

Conservative physical_flux(const Conservative& u, const Vec3& nu, const GasModel& gas) {
  const double rho = u[0];
  const Vec3 v = u.segment<3>(1) / rho;
  const double p = (gas.gamma - 1.0) * (u[4] - 0.5 * rho * v.squaredNorm());
  const double vn = v.dot(nu);
  Conservative f;
  f[0] = rho * vn;
  f.segment<3>(1) = rho * vn * v + p * nu;
  f[4] = (u[4] + p) * vn;
  return f;
}

HalfRiemannSolution solve_half_riemann(double rho, double vn, double p, double wall_vn, const GasModel& gas) {
  const double g = gas.gamma;
  const double c = gas.sound_speed(rho, p);
  const double du = wall_vn - vn;
  if (du == 0.0) return {rho, p};
  if (du > 0.0) {
    // Shock: du = (p* - p) sqrt(A / (p* + B)) solved as a quadratic in p* - p.
    const double a = 2.0 / ((g + 1.0) * rho);
    const double b = (g - 1.0) / (g + 1.0) * p;
    const double d2 = du * du;
    const double x = (d2 + std::sqrt(d2 * d2 + 4.0 * a * d2 * (p + b))) / (2.0 * a);
    const double ps = p + x;
    const double r = ps / p;
    const double m = (g - 1.0) / (g + 1.0);
    return {rho * (r + m) / (m * r + 1.0), ps};
  }
  const double limit = -2.0 * c / (g - 1.0);
  if (du <= limit) {
    std::ostringstream msg;
    msg << "vacuum formation: wall recedes at relative speed " << -du << ", limiting velocity is " << -limit;
    throw NumericalError(msg.str());
  }
  const double ratio = 1.0 + 0.5 * (g - 1.0) * du / c;
  const double ps = p * std::pow(ratio, 2.0 * g / (g - 1.0));
  return {rho * std::pow(ps / p, 1.0 / g), ps};
}

namespace {

struct WaveFunction {
  double f = 0.0;
  double df = 0.0;
};

// Velocity jump across the wave connecting state k to pressure p (Toro's f_K).
WaveFunction wave_function(double p, const State1D& k, double c, double g) {
  if (p > k.p) {
    const double a = 2.0 / ((g + 1.0) * k.rho);
    const double b = (g - 1.0) / (g + 1.0) * k.p;
    const double s = std::sqrt(a / (p + b));
    return {(p - k.p) * s, s * (1.0 - 0.5 * (p - k.p) / (p + b))};
  }
  const double r = p / k.p;
  return {2.0 * c / (g - 1.0) * (std::pow(r, (g - 1.0) / (2.0 * g)) - 1.0),
          std::pow(r, -(g + 1.0) / (2.0 * g)) / (k.rho * c)};
}

double star_density(double ps, const State1D& k, double g) {
  const double r = ps / k.p;
  if (ps > k.p) {
    const double m = (g - 1.0) / (g + 1.0);
    return k.rho * (r + m) / (m * r + 1.0);
  }
  return k.rho * std::pow(r, 1.0 / g);
}

}  // namespace

StarRegion solve_riemann(const State1D& l, const State1D& r, const GasModel& gas) {
  const double g = gas.gamma;
  if (!(l.rho > 0.0 && r.rho > 0.0 && l.p > 0.0 && r.p > 0.0)) throw StateError("inadmissible Riemann data");
  const double cl = gas.sound_speed(l.rho, l.p);
  const double cr = gas.sound_speed(r.rho, r.p);
  const double du = r.u - l.u;
  if (2.0 * (cl + cr) / (g - 1.0) <= du) {
    std::ostringstream msg;
    msg << "vacuum generated: velocity jump " << du << " exceeds " << 2.0 * (cl + cr) / (g - 1.0);
    throw NumericalError(msg.str());
  }
  const auto residual = [&](double q) {
    const WaveFunction fl = wave_function(q, l, cl, g);
    const WaveFunction fr = wave_function(q, r, cr, g);
    return std::pair{fl.f + fr.f + du, fl.df + fr.df};
  };
  StarRegion star;
  double p = 0.0;
  const double p_min = std::min(l.p, r.p);
  if (residual(p_min).first >= 0.0) {
    // Two rarefactions: closed form, exact also near vacuum where Newton
    // on the concave wave curves stalls.
    const double z = (g - 1.0) / (2.0 * g);
    p = std::pow((cl + cr - 0.5 * (g - 1.0) * du) / (cl / std::pow(l.p, z) + cr / std::pow(r.p, z)), 1.0 / z);
    star.iterations = 0;
  } else {
    // At least one shock; the root lies above p_min. Newton from the
    // primitive-variable guess, bisecting whenever a step leaves the bracket.
    double lo = p_min, hi = std::max(l.p, r.p);
    while (residual(hi).first < 0.0) hi *= 2.0;
    const double pv = 0.5 * (l.p + r.p) - 0.125 * du * (l.rho + r.rho) * (cl + cr);
    p = std::clamp(pv, lo, hi);
    for (int it = 1;; ++it) {
      const auto [f, df] = residual(p);
      if (f < 0.0) lo = p;
      else hi = p;
      double next = p - f / df;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double change = 2.0 * std::abs(next - p) / (next + p);
      p = next;
      star.iterations = it;
      if (change < 1e-14) break;
      if (it == 200) throw NumericalError("exact Riemann solver did not converge");
    }
  }
  const WaveFunction fl = wave_function(p, l, cl, g);
  const WaveFunction fr = wave_function(p, r, cr, g);
  star.p = p;
  star.u = 0.5 * (l.u + r.u) + 0.5 * (fr.f - fl.f);
  star.rho_left = star_density(p, l, g);
  star.rho_right = star_density(p, r, g);
  return star;
}

State1D sample_riemann(const State1D& l, const State1D& r, const StarRegion& s, double xi, const GasModel& gas) {
  const double g = gas.gamma;
  if (xi <= s.u) {
    const double cl = gas.sound_speed(l.rho, l.p);
    if (s.p > l.p) {
      const double shock = l.u - cl * std::sqrt((g + 1.0) / (2.0 * g) * s.p / l.p + (g - 1.0) / (2.0 * g));
      return xi <= shock ? l : State1D{s.rho_left, s.u, s.p};
    }
    const double head = l.u - cl;
    const double cs = cl * std::pow(s.p / l.p, (g - 1.0) / (2.0 * g));
    const double tail = s.u - cs;
    if (xi <= head) return l;
    if (xi >= tail) return {s.rho_left, s.u, s.p};
    const double c = 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * (l.u - xi));
    const double rho = l.rho * std::pow(c / cl, 2.0 / (g - 1.0));
    return {rho, 2.0 / (g + 1.0) * (cl + 0.5 * (g - 1.0) * l.u + xi), l.p * std::pow(c / cl, 2.0 * g / (g - 1.0))};
  }
  const double cr = gas.sound_speed(r.rho, r.p);
  if (s.p > r.p) {
    const double shock = r.u + cr * std::sqrt((g + 1.0) / (2.0 * g) * s.p / r.p + (g - 1.0) / (2.0 * g));
    return xi >= shock ? r : State1D{s.rho_right, s.u, s.p};
  }
  const double head = r.u + cr;
  const double cs = cr * std::pow(s.p / r.p, (g - 1.0) / (2.0 * g));
  const double tail = s.u + cs;
  if (xi >= head) return r;
  if (xi <= tail) return {s.rho_right, s.u, s.p};
  const double c = 2.0 / (g + 1.0) * (cr - 0.5 * (g - 1.0) * (r.u - xi));
  const double rho = r.rho * std::pow(c / cr, 2.0 / (g - 1.0));
  return {rho, 2.0 / (g + 1.0) * (-cr + 0.5 * (g - 1.0) * r.u + xi), r.p * std::pow(c / cr, 2.0 * g / (g - 1.0))};
}

Conservative roe_flux(const Conservative& ul, const Conservative& ur, const Vec3& nu, const GasModel& gas) {
  const double g = gas.gamma;
  const double rl = ul[0], rr = ur[0];
  const Vec3 vl = ul.segment<3>(1) / rl, vr = ur.segment<3>(1) / rr;
  const double pl = (g - 1.0) * (ul[4] - 0.5 * rl * vl.squaredNorm());
  const double pr = (g - 1.0) * (ur[4] - 0.5 * rr * vr.squaredNorm());
  const double hl = (ul[4] + pl) / rl, hr = (ur[4] + pr) / rr;

  const double sl = std::sqrt(rl), sr = std::sqrt(rr);
  const double rho = sl * sr;
  const Vec3 v = (sl * vl + sr * vr) / (sl + sr);
  const double h = (sl * hl + sr * hr) / (sl + sr);
  const double c2 = (g - 1.0) * (h - 0.5 * v.squaredNorm());
  if (!(c2 > 0.0) || !std::isfinite(c2)) {
    std::ostringstream msg;
    msg << "non-physical Roe average (c^2 = " << c2 << ")";
    throw StateError(msg.str());
  }
  const double c = std::sqrt(c2);
  const double vn = v.dot(nu);

  const double drho = rr - rl;
  const double dp = pr - pl;
  const Vec3 dv = vr - vl;
  const double dvn = dv.dot(nu);

  const double delta = 0.05 * (std::abs(vn) + c);
  const auto harten = [delta](double lambda) {
    const double a = std::abs(lambda);
    return a < delta ? 0.5 * (lambda * lambda + delta * delta) / delta : a;
  };
  const double l1 = harten(vn - c);
  const double l5 = harten(vn + c);
  const double l2 = std::abs(vn);

  const double a1 = (dp - rho * c * dvn) / (2.0 * c2);
  const double a5 = (dp + rho * c * dvn) / (2.0 * c2);
  const double a2 = drho - dp / c2;
  const Vec3 dvt = dv - dvn * nu;

  Conservative diss;
  diss[0] = l1 * a1 + l5 * a5 + l2 * a2;
  diss.segment<3>(1) = l1 * a1 * (v - c * nu) + l5 * a5 * (v + c * nu) + l2 * (a2 * v + rho * dvt);
  diss[4] = l1 * a1 * (h - c * vn) + l5 * a5 * (h + c * vn) +
            l2 * (a2 * 0.5 * v.squaredNorm() + rho * (v.dot(dv) - vn * dvn));

  return 0.5 * (physical_flux(ul, nu, gas) + physical_flux(ur, nu, gas)) - 0.5 * diss;
}

}  // namespace cablefsi::riemann
