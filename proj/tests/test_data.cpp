#include <doctest.h>

#include <cmath>
#include <vector>

#include "lindyn/data.hpp"
#include "lindyn/errors.hpp"
#include "lindyn/ode.hpp"
#include "lindyn/rng.hpp"
#include "lindyn/types.hpp"

using namespace lindyn;

namespace {

RawDataset random_raw(Rng& rng, int d0, int samples) {
  RawDataset raw;
  raw.n = rng.normal_vec(d0);
  double nn = std::sqrt(norm2(raw.n));
  for (auto& v : raw.n) v /= nn;
  raw.a.resize(samples);
  raw.y.resize(samples);
  for (int k = 0; k < samples; ++k) {
    raw.a[k] = rng.normal();
    raw.y[k] = rng.normal();
  }
  return raw;
}

WeightState random_state(Rng& rng, int d, int d0) {
  WeightState s;
  s.u = rng.normal_vec(d);
  s.W.resize(d);
  for (int i = 0; i < d; ++i) s.W[i] = rng.normal_vec(d0);
  return s;
}

// Gradient of the raw multi-sample loss, computed without any reduction.
void raw_gradient(const WeightState& s, const RawDataset& raw, const Hyperparams& hp,
                  LossConvention conv, std::vector<double>& du,
                  std::vector<std::vector<double>>& dW) {
  int d = static_cast<int>(s.u.size());
  int d0 = static_cast<int>(raw.n.size());
  int nsamp = static_cast<int>(raw.a.size());
  du.assign(d, 0.0);
  dW.assign(d, std::vector<double>(d0, 0.0));
  double weight = conv == LossConvention::mean ? 1.0 / nsamp : 1.0;
  for (int k = 0; k < nsamp; ++k) {
    std::vector<double> xk(d0);
    for (int j = 0; j < d0; ++j) xk[j] = raw.a[k] * raw.n[j];
    double out = 0.0;
    std::vector<double> pre(d);
    for (int i = 0; i < d; ++i) {
      pre[i] = dot(s.W[i], xk);
      out += s.u[i] * std::pow(pre[i], hp.beta);
    }
    out *= hp.gamma;
    double resid = out - raw.y[k];
    for (int i = 0; i < d; ++i) {
      du[i] += -hp.eta_u * weight * 2.0 * resid * hp.gamma * std::pow(pre[i], hp.beta);
      double coef = -hp.eta_w * weight * 2.0 * resid * hp.gamma * s.u[i] *
                    hp.beta * std::pow(pre[i], hp.beta - 1);
      for (int j = 0; j < d0; ++j) dW[i][j] += coef * xk[j];
    }
  }
}

double raw_loss(const WeightState& s, const RawDataset& raw, const Hyperparams& hp,
                LossConvention conv) {
  int d = static_cast<int>(s.u.size());
  int d0 = static_cast<int>(raw.n.size());
  int nsamp = static_cast<int>(raw.a.size());
  double acc = 0.0;
  for (int k = 0; k < nsamp; ++k) {
    std::vector<double> xk(d0);
    for (int j = 0; j < d0; ++j) xk[j] = raw.a[k] * raw.n[j];
    double out = 0.0;
    for (int i = 0; i < d; ++i) out += s.u[i] * std::pow(dot(s.W[i], xk), hp.beta);
    out *= hp.gamma;
    acc += (out - raw.y[k]) * (out - raw.y[k]);
  }
  return conv == LossConvention::mean ? acc / nsamp : acc;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("a single sample reduces to itself") {
  RawDataset raw;
  raw.n = {1.0};
  raw.a = {2.0};
  raw.y = {3.0};
  Hyperparams hp;
  hp.beta = 1;
  EffectiveData eff = reduce_dataset(raw, hp, LossConvention::mean);
  CHECK(eff.rho == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eff.y == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eff.loss_offset == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(eff.x[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("reduced gradients match the full-batch gradients") {
  for (int beta : {1, 2, 3}) {
    for (auto conv : {LossConvention::mean, LossConvention::sum}) {
      Rng rng(100 + beta + (conv == LossConvention::sum ? 10 : 0));
      Hyperparams hp;
      hp.eta_u = 0.7;
      hp.eta_w = 1.3;
      hp.gamma = 0.9;
      hp.beta = beta;
      hp.d = 4;
      hp.d0 = 3;
      RawDataset raw = random_raw(rng, hp.d0, 7);
      EffectiveData eff = reduce_dataset(raw, hp, conv);
      WeightState s = random_state(rng, hp.d, hp.d0);

      std::vector<double> du_ref;
      std::vector<std::vector<double>> dW_ref;
      raw_gradient(s, raw, hp, conv, du_ref, dW_ref);

      std::vector<double> packed = pack_state(s, hp);
      std::vector<double> dydt(packed.size());
      gradient_flow_rhs(hp, eff, packed, dydt);

      for (int i = 0; i < hp.d; ++i) {
        CHECK(dydt[i] == doctest::Approx(du_ref[i]).epsilon(1e-9));
        for (int j = 0; j < hp.d0; ++j)
          CHECK(dydt[hp.d + i * hp.d0 + j] == doctest::Approx(dW_ref[i][j]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("the loss offset reproduces the full-batch loss") {
  for (auto conv : {LossConvention::mean, LossConvention::sum}) {
    Rng rng(55);
    Hyperparams hp;
    hp.eta_u = 1.0;
    hp.eta_w = 1.0;
    hp.gamma = 1.1;
    hp.beta = 2;
    hp.d = 3;
    hp.d0 = 2;
    RawDataset raw = random_raw(rng, hp.d0, 5);
    EffectiveData eff = reduce_dataset(raw, hp, conv);
    WeightState s = random_state(rng, hp.d, hp.d0);
    double lhs = training_loss(s, eff, hp);
    double rhs = raw_loss(s, raw, hp, conv);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("the effective direction is renormalized") {
  RawDataset raw;
  raw.n = {0.6 * (1.0 + 3e-9), 0.8 * (1.0 + 3e-9)};
  raw.a = {1.0, -2.0};
  raw.y = {0.5, 1.5};
  Hyperparams hp;
  hp.beta = 1;
  hp.d0 = 2;
  EffectiveData eff = reduce_dataset(raw, hp, LossConvention::mean);
  CHECK(std::sqrt(norm2(eff.x)) == doctest::Approx(eff.rho).epsilon(1e-14));
}

TEST_CASE("degenerate and malformed datasets are rejected") {
  Hyperparams hp;
  hp.beta = 1;
  hp.d0 = 1;

  RawDataset zeros;
  zeros.n = {1.0};
  zeros.a = {0.0, 0.0};
  zeros.y = {1.0, 2.0};
  CHECK_THROWS_AS(reduce_dataset(zeros, hp, LossConvention::mean), config_error);

  RawDataset skewed;
  skewed.n = {1.5};
  skewed.a = {1.0};
  skewed.y = {1.0};
  CHECK_THROWS_AS(reduce_dataset(skewed, hp, LossConvention::mean), config_error);

  RawDataset mismatched;
  mismatched.n = {1.0};
  mismatched.a = {1.0, 2.0};
  mismatched.y = {1.0};
  CHECK_THROWS_AS(reduce_dataset(mismatched, hp, LossConvention::mean), config_error);

  RawDataset empty;
  empty.n = {1.0};
  CHECK_THROWS_AS(reduce_dataset(empty, hp, LossConvention::mean), config_error);
}

TEST_CASE("loss offset is nonnegative") {
  Rng rng(77);
  Hyperparams hp;
  hp.beta = 1;
  hp.d0 = 2;
  for (int rep = 0; rep < 20; ++rep) {
    RawDataset raw = random_raw(rng, 2, 1 + rep % 5);
    EffectiveData eff = reduce_dataset(raw, hp, LossConvention::mean);
    CHECK(eff.loss_offset >= 0.0);
  }
}

}
