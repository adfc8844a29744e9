#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "impulse/astro.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace impulse;
using namespace impulse::astro;

namespace {

constexpr double kPi = std::numbers::pi;

Elements mdot_orbit(double mean_anomaly_deg = 180.0) {
  return Elements::from_degrees(25000e3, 0.7, 40.0, 358.0, 0.0, mean_anomaly_deg);
}

// forward Kepler relation, independent of the solver
double mean_from_true(double nu, double e) {
  const double ecc = 2.0 * std::atan(std::sqrt((1.0 - e) / (1.0 + e)) * std::tan(nu / 2.0));
  return ecc - e * std::sin(ecc);
}

double wrap_pi(double x) { return std::remainder(x, 2.0 * kPi); }

}  // namespace

TEST_CASE("solve_kepler symmetric points") {
  CHECK(std::abs(solve_kepler(0.0, 0.7)) < 1e-15);
  CHECK(std::abs(solve_kepler(kPi, 0.7) - kPi) < 1e-12);
}

TEST_CASE("solve_kepler round trip") {
  const double nu = solve_kepler(1.0, 0.3);
  CHECK(std::abs(wrap_pi(mean_from_true(nu, 0.3) - 1.0)) <= 1e-12);

  double worst = 0.0;
  for (int ie = 0; ie <= 19; ++ie) {
    const double e = 0.05 * ie;
    for (int im = 0; im < 360; ++im) {
      const double m = 2.0 * kPi * im / 360.0 + 1e-3;
      worst = std::max(worst, std::abs(wrap_pi(mean_from_true(solve_kepler(m, e), e) - m)));
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("solve_kepler keeps the revolution count") {
  const double nu = solve_kepler(4.0 * kPi + 0.5, 0.2);
  CHECK(nu > 4.0 * kPi);
  CHECK(nu < 6.0 * kPi);
  CHECK_THROWS_AS(solve_kepler(1.0, 1.0), Error);
}

TEST_CASE("propagate_elements") {
  const Elements oe = mdot_orbit();
  const Elements same = propagate_elements(oe, 0.0);
  CHECK(same.mean_anomaly == oe.mean_anomaly);
  CHECK(same.argp == oe.argp);
  CHECK(same.raan == oe.raan);

  // textbook form of the secular mean-anomaly rate, written in terms of the semilatus rectum
  const PhysicalConstants c;
  const double n = std::sqrt(c.mu / std::pow(oe.a, 3));
  const double p = oe.a * (1.0 - oe.e * oe.e);
  const double eta = std::sqrt(1.0 - oe.e * oe.e);
  const double ci = std::cos(oe.i);
  const double mdot = n * (1.0 + 0.75 * c.j2 * std::pow(c.r_earth / p, 2) * eta * (3.0 * ci * ci - 1.0));
  const double wdot = 0.75 * n * c.j2 * std::pow(c.r_earth / p, 2) * (5.0 * ci * ci - 1.0);
  const double odot = -1.5 * n * c.j2 * std::pow(c.r_earth / p, 2) * ci;
  const double period = 2.0 * kPi / n;
  const Elements after = propagate_elements(oe, period);
  CHECK(after.a == oe.a);
  CHECK(after.e == oe.e);
  CHECK(after.i == oe.i);
  CHECK(after.mean_anomaly - oe.mean_anomaly == doctest::Approx(mdot * period).epsilon(1e-12));
  CHECK(after.argp - oe.argp == doctest::Approx(wdot * period).epsilon(1e-12));
  CHECK(after.raan - oe.raan == doctest::Approx(odot * period).epsilon(1e-12));
  CHECK(after.mean_anomaly - oe.mean_anomaly > 2.0 * kPi);

  PhysicalConstants kepler;
  kepler.j2 = 0.0;
  const Elements k = propagate_elements(oe, 1234.5, kepler);
  CHECK(k.raan == oe.raan);
  CHECK(k.argp == oe.argp);
  CHECK(k.mean_anomaly - oe.mean_anomaly == doctest::Approx(n * 1234.5).epsilon(1e-13));
}

TEST_CASE("anomalistic period of the validation orbit") {
  CHECK(anomalistic_period(mdot_orbit()) == doctest::Approx(39334.47).epsilon(1e-6));
}

TEST_CASE("STM identity and sparsity") {
  const Elements oe = mdot_orbit();
  CHECK(compute_stm(oe, 0.0) == Matrix6::Identity());

  // block structure: 20 nonzero slots, the remaining 16 are exact zeros
  const bool nonzero[6][6] = {{1, 0, 0, 0, 0, 0}, {1, 1, 1, 1, 1, 0}, {1, 0, 1, 1, 1, 0},
                              {1, 0, 1, 1, 1, 0}, {0, 0, 0, 0, 1, 0}, {1, 0, 1, 1, 1, 1}};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Elements r = Elements::from_degrees(7e6 + 3e7 * u(rng), 0.9 * u(rng), 1.0 + 178.0 * u(rng),
                                              360.0 * u(rng), 360.0 * u(rng), 360.0 * u(rng));
    const Matrix6 phi = compute_stm(r, 1e5 * u(rng));
    int zeros = 0;
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        if (nonzero[i][j]) continue;
        CHECK(phi(i, j) == 0.0);
        ++zeros;
      }
    }
    CHECK(zeros == 16);
  }
}

TEST_CASE("STM composition") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const Elements oe = Elements::from_degrees(7e6 + 3e7 * u(rng), 0.9 * u(rng), 5.0 + 170.0 * u(rng),
                                               360.0 * u(rng), 360.0 * u(rng), 360.0 * u(rng));
    const double d1 = 5e4 * u(rng);
    const double d2 = 5e4 * u(rng);
    const Matrix6 whole = compute_stm(oe, d1 + d2);
    const Matrix6 split = compute_stm(propagate_elements(oe, d1), d2) * compute_stm(oe, d1);
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        const double scale = std::max(std::abs(whole(r, c)), 1e-9 * whole.cwiseAbs().maxCoeff());
        CHECK(std::abs(whole(r, c) - split(r, c)) <= 1e-9 * std::max(scale, 1.0));
      }
    }
  }
}

TEST_CASE("STM Keplerian reduction") {
  PhysicalConstants kepler;
  kepler.j2 = 0.0;
  const Elements oe = mdot_orbit();
  const double dt = 5000.0;
  const Matrix6 phi = compute_stm(oe, dt, kepler);
  Matrix6 expected = Matrix6::Identity();
  expected(1, 0) = -1.5 * std::sqrt(kepler.mu / std::pow(oe.a, 3)) * dt;
  CHECK((phi - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("STM matches nonlinear mean-element propagation") {
  // deputy elements propagated with their own secular rates, differenced through the ROE map
  const Elements chief = mdot_orbit(30.0);
  Elements deputy = chief;
  deputy.a *= 1.0 + 2e-6;
  deputy.e += 3e-6;
  deputy.i += 2e-6;
  deputy.raan += 4e-6;
  deputy.argp -= 3e-6;
  deputy.mean_anomaly += 5e-6;
  const double dt = 30000.0;
  const Vector6 x1 = relative_elements(chief, deputy);
  const Vector6 x2 = relative_elements(propagate_elements(chief, dt), propagate_elements(deputy, dt));
  const Vector6 lin = compute_stm(chief, dt) * x1;
  CHECK((x2 - lin).norm() <= 1e-3 * x2.norm());
}

TEST_CASE("control input matrix closed forms") {
  const PhysicalConstants c;
  Elements circ{7e6, 0.0, 0.5, 0.1, 0.3, 0.0};
  const Matrix63 b = control_input_matrix(circ);
  const double s = std::sqrt(circ.a / c.mu);
  CHECK(b(1, 0) == doctest::Approx(-2.0 * s).epsilon(1e-14));
  CHECK(b(0, 0) == 0.0);
  CHECK(b(0, 1) == doctest::Approx(2.0 * s).epsilon(1e-14));

  const Elements apo = mdot_orbit(180.0);
  const Matrix63 ba = control_input_matrix(apo);
  const double sa = std::sqrt(apo.a / c.mu);
  CHECK(ba(1, 0) == doctest::Approx(-2.0 * (1.0 - 0.49) * sa / (1.0 - 0.7)).epsilon(1e-12));

  const Matrix63 bp = control_input_matrix(mdot_orbit(0.0));
  CHECK(bp(0, 1) / ba(0, 1) == doctest::Approx((1.0 + 0.7) / (1.0 - 0.7)).epsilon(1e-12));

  Elements node{7e6, 0.1, 0.7, 0.0, 0.0, 0.0};
  CHECK(control_input_matrix(node)(5, 2) == 0.0);
  Elements eq{7e6, 0.1, 0.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(control_input_matrix(eq), Error);
}

TEST_CASE("gamma") {
  const Elements oe = mdot_orbit();
  const double tf = 117990.0;
  const Matrix63 g = gamma(oe, 0.0, tf, tf);
  const Matrix63 expected = oe.a * control_input_matrix(propagate_elements(oe, tf));
  CHECK((g - expected).cwiseAbs().maxCoeff() <= 1e-12 * expected.cwiseAbs().maxCoeff());
  CHECK_THROWS_AS(gamma(oe, 0.0, tf + 1.0, tf), Error);

  // continuity: column-norm jumps on 1 s steps measured against the matrix scale, and refining
  // the step to 0.25 s must shrink the largest jump accordingly (a true jump would not shrink)
  auto max_jump = [&](double step) {
    double worst = 0.0;
    Matrix63 prev = gamma(oe, 0.0, 0.0, tf);
    for (double t = step; t <= tf; t += step) {
      const Matrix63 now = gamma(oe, 0.0, t, tf);
      const double jump = (now.colwise().norm() - prev.colwise().norm()).cwiseAbs().maxCoeff();
      worst = std::max(worst, jump / now.norm());
      prev = now;
    }
    return worst;
  };
  const double coarse = max_jump(1.0);
  const double fine = max_jump(0.25);
  CHECK(coarse < 1e-3);
  CHECK(fine < 0.3 * coarse);

  // impulse at the node crossing, no drift left
  Elements node{7e6, 0.1, 0.7, 0.0, 0.0, 0.0};
  CHECK(gamma(node, 0.0, 0.0, 0.0)(5, 2) == 0.0);
}

TEST_CASE("target pseudostate") {
  const Elements oe = mdot_orbit();
  Vector6 xf;
  xf << 50, 5000, 100, 100, 0, 400;
  xf /= oe.a;
  const Vector6 w = target_pseudostate<double>(Vector6::Zero(), xf, oe, 0.0, 117990.0);
  Vector6 expected;
  expected << 50, 5000, 100, 100, 0, 400;
  CHECK((w - expected).norm() <= 1e-9);

  Vector6 xi;
  xi << 1e-5, -2e-5, 3e-6, 4e-6, -1e-6, 2e-6;
  const Vector6 drift = compute_stm(oe, 117990.0) * xi;
  CHECK(target_pseudostate<double>(xi, drift, oe, 0.0, 117990.0).norm() <= 1e-9);
  CHECK_THROWS_AS(target_pseudostate<double>(xi, drift, oe, 10.0, 10.0), Error);
}
