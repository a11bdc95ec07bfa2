#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ctph/control/cascade.hpp"
#include "ctph/hdob/observer.hpp"
#include "ctph/sim/dynamics.hpp"

using namespace ctph;

namespace {

constexpr double kDt = 0.01;

// Hand-built transition whose backward-differenced vertical acceleration
// equals accel_z, with hover thrust applied at identity attitude.
void feed_vertical(HybridObserver& obs, const QuadrotorParams& p,
                   double accel_z) {
  QuadrotorState prev, now;
  now.velocity.z() = accel_z * kDt;
  Wrench hover;
  hover.thrust = p.mass * p.gravity;
  obs.update(prev, now, hover, kDt);
}

}  // namespace

TEST_CASE("raw_estimate recovers injected constant disturbances") {
  const QuadrotorParams p;
  Wrench hover;
  hover.thrust = p.mass * p.gravity;

  SUBCASE("exact hover leaves all channels at zero") {
    QuadrotorState s;
    const QuadrotorState next = step(s, hover, DisturbanceWrench{}, kDt, p);
    const Eigen::Vector4d est = raw_estimate(s, next, hover, kDt, p);
    CHECK(est.cwiseAbs().maxCoeff() < 1e-9);
  }

  SUBCASE("constant 0.05 N vertical force appears on the f_z channel") {
    DisturbanceWrench d;
    d.force.z() = 0.05;
    QuadrotorState s;
    for (int k = 0; k < 50; ++k) {
      const QuadrotorState next = step(s, hover, d, kDt, p);
      const Eigen::Vector4d est = raw_estimate(s, next, hover, kDt, p);
      CHECK(est(kChanFz) == doctest::Approx(0.05).epsilon(1e-6));
      s = next;
    }
  }

  SUBCASE("constant 0.001 N m roll torque appears on the M_x channel") {
    DisturbanceWrench d;
    d.torque.x() = 0.001;
    QuadrotorState s;
    for (int k = 0; k < 20; ++k) {
      const QuadrotorState next = step(s, hover, d, kDt, p);
      const Eigen::Vector4d est = raw_estimate(s, next, hover, kDt, p);
      CHECK(est(kChanMx) == doctest::Approx(0.001).epsilon(1e-4));
      s = next;
    }
  }
}

TEST_CASE("median_filter returns the middle order statistic") {
  CHECK(median_filter({0.1, 5.0, 0.2}) == doctest::Approx(0.2));
  CHECK(median_filter({3.3, 3.3, 3.3, 3.3, 3.3}) == doctest::Approx(3.3));
  CHECK(median_filter({-1, 0, 1, 2, 100}) == doctest::Approx(1.0));
  CHECK(median_filter({7.0}) == doctest::Approx(7.0));

  // Against a sort oracle on random odd windows.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    std::deque<double> buf;
    for (int k = 0; k < 5; ++k) buf.push_back(u(rng));
    std::vector<double> sorted(buf.begin(), buf.end());
    std::sort(sorted.begin(), sorted.end());
    CHECK(median_filter(buf) == doctest::Approx(sorted[2]));
  }
}

TEST_CASE("gated_lowpass updates only inside the residual gate") {
  // One in-gate update step: 0 + 0.24 (0.1 - 0) = 0.024.
  CHECK(gated_lowpass(0.0, 0.1, 0.1, 0.4, 0.24) == doctest::Approx(0.024));
  // Residual above delta holds the previous state.
  CHECK(gated_lowpass(0.42, 1.0, 0.1, 0.4, 0.24) == doctest::Approx(0.42));
  // Fixed point.
  CHECK(gated_lowpass(0.3, 0.3, 0.3, 0.4, 0.24) == doctest::Approx(0.3));
}

TEST_CASE("ema_filter is the standard exponential average") {
  CHECK(ema_filter(0.0, 0.1, 0.96) == doctest::Approx(0.004));
  CHECK(ema_filter(0.7, 0.1, 0.0) == doctest::Approx(0.1));

  double d = 5.0;
  for (int i = 0; i < 2000; ++i) d = ema_filter(d, 1.5, 0.96);
  CHECK(d == doctest::Approx(1.5).epsilon(1e-9));
}

TEST_CASE("fuse is the convex combination of the two branches") {
  CHECK(fuse(0.024, 0.004, 0.45) == doctest::Approx(0.0130));
  CHECK(fuse(0.8, -0.3, 1.0) == doctest::Approx(0.8));
  CHECK(fuse(0.37, 0.37, 0.2) == doctest::Approx(0.37));
}

TEST_CASE("compensate shifts thrust and angular-acceleration commands") {
  const QuadrotorParams p;

  const CompensatedCommand clean =
      compensate(0.0, Eigen::Vector3d::Zero(), Eigen::Vector4d::Zero(), p);
  CHECK(clean.f_z == doctest::Approx(p.mass * p.gravity));

  Eigen::Vector4d d = Eigen::Vector4d::Zero();
  d(kChanFz) = 0.05;
  const CompensatedCommand shifted =
      compensate(0.0, Eigen::Vector3d::Zero(), d, p);
  CHECK(shifted.f_z == doctest::Approx(0.26487 - 0.05).epsilon(1e-4));

  // Exact torque cancellation zeroes the angular-acceleration command.
  Eigen::Vector4d dm = Eigen::Vector4d::Zero();
  dm(kChanMx) = 2e-4;
  const CompensatedCommand cancel =
      compensate(0.0, {2e-4, 0, 0}, dm, p);
  CHECK(cancel.angular_accel.x() == doctest::Approx(0.0));
}

TEST_CASE("observer tracks a constant 0.05 N step within 10% in 2 s") {
  const QuadrotorParams p;
  CascadeConfig cfg;
  cfg.use_observer = true;
  CascadeController ctl(p, cfg);

  DisturbanceWrench d;
  d.force.z() = 0.05;
  QuadrotorState s;
  HybridObserver probe(HdobConfig{}, p);
  for (int k = 0; k < 200; ++k) {  // 2 s
    const auto out = ctl.control(s, CascadeSetpoint{}, kDt);
    const QuadrotorState next = step(s, out.wrench, d, kDt, p);
    ctl.observe(s, next, out.wrench, kDt);
    probe.update(s, next, out.wrench, kDt);
    s = next;
  }
  CHECK(std::abs(probe.estimate()(kChanFz) - 0.05) < 0.005);
}

TEST_CASE("a 10x single-sample spike leaves the gated branch unchanged") {
  const QuadrotorParams p;
  HybridObserver obs(HdobConfig{}, p);

  // Settle near a 0.05 N signal: raw residual 0.05 each step.
  for (int k = 0; k < 100; ++k) feed_vertical(obs, p, 0.05 / p.mass);
  const double before = obs.lowpass()(kChanFz);
  CHECK(before == doctest::Approx(0.05).epsilon(1e-6));

  // One 10x spike: residual vs median = 0.45 > delta = 0.4 -> hold.
  feed_vertical(obs, p, 0.5 / p.mass);
  CHECK(obs.raw()(kChanFz) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(obs.lowpass()(kChanFz) == before);
  // The EMA branch does move, so the fused estimate shifts by (1-lambda) side
  // only; bound it by the EMA contribution.
  CHECK(std::abs(obs.estimate()(kChanFz) - 0.05) <
        (1.0 - HdobConfig{}.fusion_weight) * (1 - 0.96) * 0.45 + 1e-9);

  // The baseline low-pass comparator has no gate and does move.
  HybridObserver base(HdobConfig{}, p, HybridObserver::Mode::lowpass_only);
  for (int k = 0; k < 100; ++k) feed_vertical(base, p, 0.05 / p.mass);
  const double base_before = base.estimate()(kChanFz);
  feed_vertical(base, p, 0.5 / p.mass);
  CHECK(std::abs(base.estimate()(kChanFz) - base_before) >
        0.05);  // 0.24 * 0.45 ~ 0.108
}

TEST_CASE("all filter states stay within the raw-estimate bound") {
  const QuadrotorParams p;
  HybridObserver obs(HdobConfig{}, p);
  std::mt19937_64 rng(19);
  const double bound = 0.3;
  std::uniform_real_distribution<double> u(-bound, bound);
  for (int k = 0; k < 5000; ++k) {
    feed_vertical(obs, p, u(rng) / p.mass);
    CHECK(std::abs(obs.lowpass()(kChanFz)) <= bound + 1e-12);
    CHECK(std::abs(obs.ema()(kChanFz)) <= bound + 1e-12);
    CHECK(std::abs(obs.estimate()(kChanFz)) <= bound + 1e-12);
  }
}

TEST_CASE("config validation rejects out-of-range filter parameters") {
  HdobConfig even;
  even.median_window = 4;
  CHECK_THROWS_AS(even.validate(), std::invalid_argument);

  HdobConfig alpha;
  alpha.lowpass_alpha(0) = 0.0;
  CHECK_THROWS_AS(alpha.validate(), std::invalid_argument);

  HdobConfig beta;
  beta.ema_beta(2) = 1.0;
  CHECK_THROWS_AS(beta.validate(), std::invalid_argument);

  HdobConfig lam;
  lam.fusion_weight = 1.5;
  CHECK_THROWS_AS(lam.validate(), std::invalid_argument);
}
