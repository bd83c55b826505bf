#include <doctest.h>

#include <cmath>
#include <vector>

#include "lindyn/alignment.hpp"
#include "lindyn/closed_form.hpp"
#include "lindyn/errors.hpp"
#include "lindyn/pq.hpp"
#include "lindyn/types.hpp"

using namespace lindyn;

namespace {

// d = 1 makes P Q = S^2 identically, so directional tests need d >= 2.
struct Instance {
  Hyperparams hp;
  EffectiveData eff;
  WeightState s0;
};

Instance nonparallel(double y) {
  Instance in;
  in.hp = Hyperparams{0.8, 1.1, 0.9, 1, 2, 2};
  in.eff.rho = 1.2;
  in.eff.x = {0.72, 0.96};
  in.eff.y = y;
  in.s0.u = {0.5, -0.4};
  in.s0.W = {{0.3, -0.7}, {0.9, 0.2}};
  return in;
}

Instance scalar(double u, double w, double y) {
  Instance in;
  in.hp = Hyperparams{1.0, 1.0, 1.0, 1, 1, 1};
  in.eff.rho = 1.0;
  in.eff.x = {1.0};
  in.eff.y = y;
  in.s0.u = {u};
  in.s0.W = {{w}};
  return in;
}

}  // namespace

TEST_SUITE("alignment") {

TEST_CASE("trajectory zeta matches the alpha formula") {
  Instance in = nonparallel(1.4);
  PQState pq = to_pq(in.s0, in.eff, in.hp);
  ClosedFormParams cf = closed_form_params(pq, in.eff, in.hp);

  std::vector<double> times;
  for (int k = 0; k <= 60; ++k) times.push_back(0.3 * k * cf.t_c);
  Trajectory traj = solve_trajectory(in.s0, in.eff, in.hp, times);

  for (std::size_t k = 0; k < times.size(); ++k) {
    const double want = zeta_of_alpha(scale_factor(cf, times[k]), cf);
    CHECK(traj.zeta[k] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("zeta moves monotonically toward the fixed point") {
  for (double y : {2.0, -2.0}) {
    Instance in = nonparallel(y);
    PQState pq = to_pq(in.s0, in.eff, in.hp);
    AlignmentReport rep = alignment_direction(pq, in.eff, in.hp);
    CHECK(!rep.parallel_init);
    const int want_dir = rep.cf.alpha_plus > 1.0 ? 1 : -1;
    CHECK(rep.direction == want_dir);
    CHECK((y > 0.0 ? rep.direction == 1 : rep.direction == -1));

    std::vector<double> times;
    for (int k = 0; k <= 40; ++k) times.push_back(0.5 * k * rep.cf.t_c);
    Trajectory traj = solve_trajectory(in.s0, in.eff, in.hp, times);
    for (std::size_t k = 1; k < traj.zeta.size(); ++k) {
      if (rep.direction == 1) {
        CHECK(traj.zeta[k] >= traj.zeta[k - 1] - 1e-12);
      } else {
        CHECK(traj.zeta[k] <= traj.zeta[k - 1] + 1e-12);
      }
    }
    CHECK(traj.zeta.back() == doctest::Approx(rep.zeta_inf).epsilon(1e-6));
  }
}

TEST_CASE("parallel initialization keeps |zeta| = 1") {
  Instance in;
  in.hp = Hyperparams{1.0, 1.0, 1.0, 1, 3, 1};
  in.eff.rho = 1.0;
  in.eff.x = {1.0};
  in.eff.y = 1.5;
  in.s0.u = {0.5, -1.0, 0.25};
  in.s0.W = {{1.0}, {-2.0}, {0.5}};  // W x = 2 u, exactly proportional

  PQState pq = to_pq(in.s0, in.eff, in.hp);
  AlignmentReport rep = alignment_direction(pq, in.eff, in.hp);
  CHECK(rep.parallel_init);
  CHECK(rep.direction == 0);
  CHECK(std::abs(rep.zeta0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(rep.zeta_inf) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(0.5 * k * rep.cf.t_c);
  Trajectory traj = solve_trajectory(in.s0, in.eff, in.hp, times);
  for (double z : traj.zeta) CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("balanced antisymmetric start saturates the kernel bound") {
  // u = (1, -1), W x = (1, 1): P = Q = 1/2, S = 0, so
  // alpha_plus = K + sqrt(K^2 + 1) with K = y/2 and zeta_inf = K/sqrt(1+K^2).
  for (double K : {0.5, 1.0, 2.0}) {
    Instance in;
    in.hp = Hyperparams{1.0, 1.0, 1.0, 1, 2, 1};
    in.eff.rho = 1.0;
    in.eff.x = {1.0};
    in.eff.y = 2.0 * K;
    in.s0.u = {1.0, -1.0};
    in.s0.W = {{1.0}, {1.0}};

    PQState pq = to_pq(in.s0, in.eff, in.hp);
    AlignmentReport rep = alignment_direction(pq, in.eff, in.hp);
    CHECK(rep.zeta0 == 0.0);
    CHECK(rep.cf.alpha_plus == doctest::Approx(K + std::sqrt(K * K + 1.0)).epsilon(1e-14));
    CHECK(rep.zeta_inf == doctest::Approx(K / std::sqrt(1.0 + K * K)).epsilon(1e-12));
    CHECK(rep.direction == 1);
  }
}

TEST_CASE("norm profiles cover all four shapes") {
  std::vector<double> times;
  for (int k = 0; k <= 80; ++k) times.push_back(0.05 * k);

  SUBCASE("increasing") {
    Instance in = scalar(0.5, 1.5, 2.0);
    PQState pq = to_pq(in.s0, in.eff, in.hp);
    RescalingReport rep = norm_trajectories(pq, in.eff, in.hp, times);
    CHECK(rep.shape == NormShape::increasing);
    CHECK(!rep.boundary_tie);
    for (std::size_t k = 1; k < rep.nu.size(); ++k) CHECK(rep.nu[k] >= rep.nu[k - 1] - 1e-12);
  }

  SUBCASE("decreasing") {
    Instance in = scalar(0.7, 1.3, 0.32);
    PQState pq = to_pq(in.s0, in.eff, in.hp);
    RescalingReport rep = norm_trajectories(pq, in.eff, in.hp, times);
    CHECK(rep.cf.alpha_plus == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rep.shape == NormShape::decreasing);
    for (std::size_t k = 1; k < rep.nu.size(); ++k) CHECK(rep.nu[k] <= rep.nu[k - 1] + 1e-12);
  }

  SUBCASE("dip then rise") {
    Instance in = scalar(0.5, 1.5, -1.0);
    PQState pq = to_pq(in.s0, in.eff, in.hp);
    RescalingReport rep = norm_trajectories(pq, in.eff, in.hp, times);
    CHECK(rep.shape == NormShape::dip_then_rise);
    CHECK(rep.alpha_star == doctest::Approx(0.5).epsilon(1e-12));
    std::size_t imin = 0;
    for (std::size_t k = 0; k < rep.nu.size(); ++k)
      if (rep.nu[k] < rep.nu[imin]) imin = k;
    CHECK(imin > 0);
    CHECK(imin + 1 < rep.nu.size());
    CHECK(rep.nu[imin] < rep.nu.front());
    CHECK(rep.nu[imin] < rep.nu.back());
  }

  SUBCASE("constant") {
    Instance in = scalar(0.5, 1.5, 0.75);  // alpha_plus lands exactly on 1
    PQState pq = to_pq(in.s0, in.eff, in.hp);
    RescalingReport rep = norm_trajectories(pq, in.eff, in.hp, times);
    CHECK(rep.cf.alpha_plus == 1.0);
    CHECK(rep.shape == NormShape::constant);
    for (double a : rep.alphas) CHECK(a == 1.0);
    for (std::size_t k = 1; k < rep.nu.size(); ++k) CHECK(rep.nu[k] == rep.nu[0]);
  }

  SUBCASE("boundary tie") {
    Instance in = scalar(-1.0, 3.0, 0.0);  // sqrt(Q/P) = 2 = alpha_plus
    PQState pq = to_pq(in.s0, in.eff, in.hp);
    RescalingReport rep = norm_trajectories(pq, in.eff, in.hp, times);
    CHECK(rep.cf.alpha_plus == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rep.boundary_tie);
    CHECK(rep.shape == NormShape::decreasing);
  }
}

TEST_CASE("norm profiles reproduce the actual weight norms") {
  Instance in = nonparallel(1.4);
  PQState pq = to_pq(in.s0, in.eff, in.hp);
  ClosedFormParams cf = closed_form_params(pq, in.eff, in.hp);

  std::vector<double> times;
  for (int k = 0; k <= 30; ++k) times.push_back(0.4 * k * cf.t_c);
  RescalingReport rep = norm_trajectories(pq, in.eff, in.hp, times);
  Trajectory traj = solve_trajectory(in.s0, in.eff, in.hp, times);

  for (std::size_t k = 0; k < times.size(); ++k) {
    const double uu = norm2(traj.states[k].u);
    double ww = 0.0;
    for (const auto& row : traj.states[k].W) {
      const double a = dot(row, in.eff.x);
      ww += a * a;
    }
    ww /= in.eff.rho * in.eff.rho;
    CHECK(rep.nu[k] == doctest::Approx(in.hp.eta_w * uu).epsilon(1e-10));
    CHECK(rep.nw[k] == doctest::Approx(in.hp.eta_u * ww).epsilon(1e-10));
  }
}

TEST_CASE("degenerate inputs are handled") {
  Instance in = nonparallel(1.0);
  PQState pq = to_pq(in.s0, in.eff, in.hp);
  ClosedFormParams cf = closed_form_params(pq, in.eff, in.hp);
  CHECK_THROWS_AS(zeta_of_alpha(0.0, cf), config_error);
  CHECK_THROWS_AS(zeta_of_alpha(-1.0, cf), config_error);

  WeightState dead;
  dead.u = {0.0, 0.0};
  dead.W = {{0.1, 0.2}, {0.3, 0.4}};
  CHECK(std::isnan(empirical_zeta(dead, in.eff)));
}

}  // TEST_SUITE
