#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lindyn/closed_form.hpp"
#include "lindyn/conservation.hpp"
#include "lindyn/data.hpp"
#include "lindyn/errors.hpp"
#include "lindyn/ode.hpp"
#include "lindyn/types.hpp"

using namespace lindyn;

namespace {

// x has a zero component so the frozen-column side of the collinearity law
// gets exercised too.
EffectiveData make_data() {
  EffectiveData d;
  d.rho = 1.3;
  d.x = {0.78, 1.04, 0.0};
  d.y = 0.9;
  d.loss_offset = 0.0;
  return d;
}

WeightState make_state() {
  WeightState s;
  s.t = 0.0;
  s.u = {0.4, -0.3, 0.7, 0.1};
  s.W = {{0.5, -0.2, 0.9},
         {0.1, 0.6, -0.4},
         {-0.7, 0.3, 0.2},
         {0.2, 0.2, -0.5}};
  return s;
}

}  // namespace

TEST_SUITE("conservation") {

TEST_CASE("closed-form trajectories obey all three laws") {
  Hyperparams hp{0.8, 1.2, 0.9, 1, 4, 3};
  EffectiveData data = make_data();
  WeightState s0 = make_state();

  std::vector<double> times;
  for (int k = 0; k <= 40; ++k) times.push_back(0.1 * k);
  Trajectory traj = solve_trajectory(s0, data, hp, times);

  std::vector<ConservationReport> rep = conservation_audit(traj, data, hp);
  REQUIRE(rep.size() == 3);
  CHECK(rep[0].law == "pq_product");
  CHECK(rep[1].law == "layer_balance");
  CHECK(rep[2].law == "row_collinearity");
  for (const auto& law : rep) {
    INFO(law.law);
    CHECK(law.max_drift <= 1e-10);
  }
}

TEST_CASE("integrated trajectories obey all three laws") {
  Hyperparams hp{0.8, 1.2, 0.9, 1, 4, 3};
  EffectiveData data = make_data();
  WeightState s0 = make_state();

  std::vector<double> times = {0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-10;
  cfg.abs_tol = 1e-12;
  Trajectory traj = integrate(s0, data, hp, times, cfg);

  std::vector<ConservationReport> rep = conservation_audit(traj, data, hp);
  for (const auto& law : rep) {
    INFO(law.law);
    CHECK(law.max_drift <= 1e-8);
  }
}

TEST_CASE("a corrupted sample is flagged with its time") {
  Hyperparams hp{0.8, 1.2, 0.9, 1, 4, 3};
  EffectiveData data = make_data();
  WeightState s0 = make_state();

  std::vector<double> times = {0.0, 0.5, 1.0, 1.5, 2.0};
  Trajectory traj = solve_trajectory(s0, data, hp, times);
  traj.states[3].W[1][0] += 1e-3;

  std::vector<ConservationReport> rep = conservation_audit(traj, data, hp);
  double worst = 0.0;
  bool flagged_time = false;
  for (const auto& law : rep) {
    worst = std::max(worst, law.max_drift);
    if (law.max_drift > 1e-5 && law.t_at_max == 1.5) flagged_time = true;
  }
  CHECK(worst >= 1e-5);
  CHECK(flagged_time);
}

TEST_CASE("an empty trajectory is rejected") {
  Hyperparams hp{0.8, 1.2, 0.9, 1, 4, 3};
  EffectiveData data = make_data();
  Trajectory traj;
  CHECK_THROWS_AS(conservation_audit(traj, data, hp), config_error);
}

}  // TEST_SUITE
