#pragma once

// J2-perturbed mean relative orbital element dynamics.
//
// State ordering everywhere is (da, dlambda, dex, dey, dix, diy) with
//   dlambda = dM + eta_c (domega + dOmega cos i_c)
// and impulses are expressed in the chief RTN frame [m/s].

#include "impulse/types.hpp"

#include <cmath>
#include <numbers>

namespace impulse::astro {

struct PhysicalConstants {
  double mu = 3.986e14;     // [m^3/s^2]
  double r_earth = 6.378e6; // [m]
  double j2 = 1.082e-3;
};

/// Mean Keplerian elements. Angles in radians, kept unwrapped.
template <typename Scalar>
struct OrbitElements {
  Scalar a{};             // [m]
  Scalar e{};
  Scalar i{};
  Scalar raan{};
  Scalar argp{};
  Scalar mean_anomaly{};

  Scalar eta() const {
    using std::sqrt;
    return sqrt(Scalar(1) - e * e);
  }

  void validate() const {
    using std::isfinite;
    if (!(a > Scalar(0)) || !isfinite(a)) throw Error(ErrorKind::InvalidArgument, "orbit: semimajor axis must be positive");
    if (!(e >= Scalar(0) && e < Scalar(1))) throw Error(ErrorKind::InvalidArgument, "orbit: eccentricity must lie in [0, 1)");
    if (!(i >= Scalar(0) && i <= Scalar(std::numbers::pi))) throw Error(ErrorKind::InvalidArgument, "orbit: inclination must lie in [0, pi]");
    if (!isfinite(raan) || !isfinite(argp) || !isfinite(mean_anomaly))
      throw Error(ErrorKind::InvalidArgument, "orbit: angles must be finite");
  }

  static OrbitElements from_degrees(Scalar a_m, Scalar ecc, Scalar i_deg, Scalar raan_deg, Scalar argp_deg,
                                    Scalar mean_anomaly_deg) {
    const Scalar d2r = Scalar(std::numbers::pi) / Scalar(180);
    return {a_m, ecc, i_deg * d2r, raan_deg * d2r, argp_deg * d2r, mean_anomaly_deg * d2r};
  }
};

using Elements = OrbitElements<double>;

template <typename Scalar>
using RoeState = Eigen::Matrix<Scalar, 6, 1>;

template <typename Scalar>
struct SecularRates {
  Scalar raan;          // [rad/s]
  Scalar argp;          // [rad/s]
  Scalar mean_anomaly;  // [rad/s]
};

/// kappa = 3 J2 Re^2 sqrt(mu) / (4 a^(7/2) eta^4)
template <typename Scalar>
Scalar j2_kappa(const OrbitElements<Scalar>& oe, const PhysicalConstants& c = {}) {
  using std::pow;
  using std::sqrt;
  const Scalar eta = oe.eta();
  const Scalar eta2 = eta * eta;
  return Scalar(3) * Scalar(c.j2) * Scalar(c.r_earth) * Scalar(c.r_earth) * sqrt(Scalar(c.mu)) /
         (Scalar(4) * pow(oe.a, Scalar(3.5)) * eta2 * eta2);
}

template <typename Scalar>
Scalar mean_motion(const OrbitElements<Scalar>& oe, const PhysicalConstants& c = {}) {
  using std::sqrt;
  return sqrt(Scalar(c.mu) / (oe.a * oe.a * oe.a));
}

template <typename Scalar>
SecularRates<Scalar> secular_rates(const OrbitElements<Scalar>& oe, const PhysicalConstants& c = {}) {
  using std::cos;
  const Scalar kappa = j2_kappa(oe, c);
  const Scalar ci = cos(oe.i);
  const Scalar eta = oe.eta();
  return {Scalar(-2) * kappa * ci,
          kappa * (Scalar(5) * ci * ci - Scalar(1)),
          mean_motion(oe, c) + kappa * eta * (Scalar(3) * ci * ci - Scalar(1))};
}

/// Time between successive perigee passages of the mean orbit [s].
template <typename Scalar>
Scalar anomalistic_period(const OrbitElements<Scalar>& oe, const PhysicalConstants& c = {}) {
  return Scalar(2 * std::numbers::pi) / secular_rates(oe, c).mean_anomaly;
}

/// Solves M = E - e sin E and returns the true anomaly on the same revolution as M.
/// Newton from E0 = M + e sin M, bisection fallback, at most 50 steps each.
template <typename Scalar>
Scalar solve_kepler(Scalar mean_anomaly, Scalar e) {
  using std::abs;
  using std::atan2;
  using std::cos;
  using std::floor;
  using std::isfinite;
  using std::sin;
  using std::sqrt;
  if (!isfinite(mean_anomaly)) throw Error(ErrorKind::InvalidArgument, "solve_kepler: mean anomaly not finite");
  if (!(e >= Scalar(0) && e < Scalar(1))) throw Error(ErrorKind::InvalidArgument, "solve_kepler: eccentricity outside [0, 1)");

  const Scalar pi = Scalar(std::numbers::pi);
  const Scalar two_pi = Scalar(2) * pi;
  const Scalar revs = floor((mean_anomaly + pi) / two_pi);
  const Scalar m = mean_anomaly - revs * two_pi;  // in [-pi, pi)

  const Scalar tol = Scalar(1e-13);
  auto residual = [&](Scalar ecc_anom) { return ecc_anom - e * sin(ecc_anom) - m; };

  Scalar ecc_anom = m + e * sin(m);
  bool converged = false;
  for (int k = 0; k < 50; ++k) {
    const Scalar f = residual(ecc_anom);
    if (abs(f) <= tol) {
      converged = true;
      break;
    }
    const Scalar step = f / (Scalar(1) - e * cos(ecc_anom));
    ecc_anom -= step;
    if (!isfinite(ecc_anom) || abs(ecc_anom) > Scalar(2) * pi) break;
  }
  if (!converged) {
    // f is monotone on [-pi, pi] and changes sign there
    Scalar lo = -pi, hi = pi;
    for (int k = 0; k < 200; ++k) {
      ecc_anom = Scalar(0.5) * (lo + hi);
      const Scalar f = residual(ecc_anom);
      if (abs(f) <= tol) {
        converged = true;
        break;
      }
      (f > Scalar(0) ? hi : lo) = ecc_anom;
    }
    if (!converged && abs(residual(ecc_anom)) > Scalar(1e-12))
      throw Error(ErrorKind::Internal, "solve_kepler: no convergence");
  }
  const Scalar half = ecc_anom / Scalar(2);
  const Scalar nu = Scalar(2) * atan2(sqrt(Scalar(1) + e) * sin(half), sqrt(Scalar(1) - e) * cos(half));
  return nu + revs * two_pi;
}

/// Advances the mean elements by dt under the secular J2 rates.
template <typename Scalar>
OrbitElements<Scalar> propagate_elements(const OrbitElements<Scalar>& oe, Scalar dt, const PhysicalConstants& c = {}) {
  const auto rates = secular_rates(oe, c);
  OrbitElements<Scalar> out = oe;
  out.raan += rates.raan * dt;
  out.argp += rates.argp * dt;
  out.mean_anomaly += rates.mean_anomaly * dt;
  return out;
}

/// Closed-form STM over [t1, t1 + dt] for chief elements oe_t1 at t1.
/// Structurally zero entries are never written.
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 6> compute_stm(const OrbitElements<Scalar>& oe_t1, Scalar dt, const PhysicalConstants& c = {}) {
  using std::cos;
  using std::sin;
  const Scalar kappa = j2_kappa(oe_t1, c);
  const Scalar eta = oe_t1.eta();
  const Scalar n = mean_motion(oe_t1, c);
  const Scalar ci = cos(oe_t1.i);
  const Scalar si = sin(oe_t1.i);
  const Scalar G = Scalar(1) / (eta * eta);
  const Scalar P = Scalar(3) * ci * ci - Scalar(1);
  const Scalar Q = Scalar(5) * ci * ci - Scalar(1);
  const Scalar S = sin(Scalar(2) * oe_t1.i);
  const Scalar T = si * si;
  const Scalar argp_dot = kappa * Q;
  const Scalar argp2 = oe_t1.argp + argp_dot * dt;
  const Scalar ex1 = oe_t1.e * cos(oe_t1.argp);
  const Scalar ey1 = oe_t1.e * sin(oe_t1.argp);
  const Scalar ex2 = oe_t1.e * cos(argp2);
  const Scalar ey2 = oe_t1.e * sin(argp2);
  const Scalar cw = cos(argp_dot * dt);
  const Scalar sw = sin(argp_dot * dt);
  const Scalar kt = kappa * dt;

  Eigen::Matrix<Scalar, 6, 6> phi = Eigen::Matrix<Scalar, 6, 6>::Zero();
  phi(0, 0) = Scalar(1);

  phi(1, 0) = (Scalar(-1.5) * n - Scalar(7) * kappa * eta * P) * dt;
  phi(1, 1) = Scalar(1);
  phi(1, 2) = Scalar(7) * kt * ex1 * P / eta;
  phi(1, 3) = Scalar(7) * kt * ey1 * P / eta;
  phi(1, 4) = Scalar(-7) * kt * eta * S;

  phi(2, 0) = Scalar(3.5) * kt * ey2 * Q;
  phi(2, 2) = cw - Scalar(4) * kt * ex1 * ey2 * G * Q;
  phi(2, 3) = -sw - Scalar(4) * kt * ey1 * ey2 * G * Q;
  phi(2, 4) = Scalar(5) * kt * ey2 * S;

  phi(3, 0) = Scalar(-3.5) * kt * ex2 * Q;
  phi(3, 2) = sw + Scalar(4) * kt * ex1 * ex2 * G * Q;
  phi(3, 3) = cw + Scalar(4) * kt * ey1 * ex2 * G * Q;
  phi(3, 4) = Scalar(-5) * kt * ex2 * S;

  phi(4, 4) = Scalar(1);

  phi(5, 0) = Scalar(3.5) * kt * S;
  phi(5, 2) = Scalar(-4) * kt * ex1 * G * S;
  phi(5, 3) = Scalar(-4) * kt * ey1 * G * S;
  phi(5, 4) = Scalar(2) * kt * T;
  phi(5, 5) = Scalar(1);
  return phi;
}

/// Maps an RTN impulse [m/s] to the instantaneous ROE change, evaluated on the chief mean elements.
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 3> control_input_matrix(const OrbitElements<Scalar>& oe, const PhysicalConstants& c = {}) {
  using std::abs;
  using std::cos;
  using std::sin;
  using std::sqrt;
  using std::tan;
  if (abs(sin(oe.i)) < Scalar(1e-12))
    throw Error(ErrorKind::InvalidArgument, "control_input_matrix: equatorial chief orbit (tan i singular) is unsupported");

  const Scalar e = oe.e;
  const Scalar eta = oe.eta();
  const Scalar nu = solve_kepler(oe.mean_anomaly, e);
  const Scalar theta = oe.argp + nu;
  const Scalar cn = cos(nu), sn = sin(nu);
  const Scalar ct = cos(theta), st = sin(theta);
  const Scalar cw = cos(oe.argp), sw = sin(oe.argp);
  const Scalar d = Scalar(1) + e * cn;
  const Scalar ti = tan(oe.i);

  Eigen::Matrix<Scalar, 6, 3> b = Eigen::Matrix<Scalar, 6, 3>::Zero();
  b(0, 0) = Scalar(2) / eta * e * sn;
  b(0, 1) = Scalar(2) / eta * d;
  b(1, 0) = Scalar(-2) * eta * eta / d;
  b(2, 0) = eta * st;
  b(2, 1) = eta * ((Scalar(2) + e * cn) * ct + e * cw) / d;
  b(2, 2) = eta * e * sw * st / (ti * d);
  b(3, 0) = -eta * ct;
  b(3, 1) = eta * ((Scalar(2) + e * cn) * st + e * sw) / d;
  b(3, 2) = -eta * e * cw * st / (ti * d);
  b(4, 2) = eta * ct / d;
  b(5, 2) = eta * st / d;
  return sqrt(oe.a / Scalar(c.mu)) * b;
}

/// Gamma(t) = a_c Phi(t, t_f) B(t): effect of an RTN impulse at t on the final pseudostate [m per m/s].
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 3> gamma(const OrbitElements<Scalar>& oe_ti, Scalar t_i, Scalar t, Scalar t_f,
                                  const PhysicalConstants& c = {}) {
  if (t < t_i || t > t_f) throw Error(ErrorKind::InvalidArgument, "gamma: t outside [t_i, t_f]");
  const auto oe_t = propagate_elements(oe_ti, t - t_i, c);
  return oe_ti.a * compute_stm(oe_t, t_f - t, c) * control_input_matrix(oe_t, c);
}

/// w = a_c (x_f - Phi(t_i, t_f) x_i) [m].
template <typename Scalar>
Eigen::Matrix<Scalar, 6, 1> target_pseudostate(const RoeState<Scalar>& x_i, const RoeState<Scalar>& x_f,
                                               const OrbitElements<Scalar>& oe_i, Scalar t_i, Scalar t_f,
                                               const PhysicalConstants& c = {}) {
  if (!(t_f > t_i)) throw Error(ErrorKind::InvalidArgument, "target_pseudostate: t_f must exceed t_i");
  return oe_i.a * (x_f - compute_stm(oe_i, t_f - t_i, c) * x_i);
}

/// ROE of a deputy with respect to a chief, both given as mean elements.
template <typename Scalar>
RoeState<Scalar> relative_elements(const OrbitElements<Scalar>& chief, const OrbitElements<Scalar>& deputy) {
  using std::cos;
  using std::sin;
  RoeState<Scalar> x;
  const Scalar d_raan = deputy.raan - chief.raan;
  x(0) = (deputy.a - chief.a) / chief.a;
  x(1) = (deputy.mean_anomaly - chief.mean_anomaly) + chief.eta() * ((deputy.argp - chief.argp) + d_raan * cos(chief.i));
  x(2) = deputy.e * cos(deputy.argp) - chief.e * cos(chief.argp);
  x(3) = deputy.e * sin(deputy.argp) - chief.e * sin(chief.argp);
  x(4) = deputy.i - chief.i;
  x(5) = d_raan * sin(chief.i);
  return x;
}

}  // namespace impulse::astro
