#include "doctest.h"
#include "fwsim/error.hpp"
#include "fwsim/guidance.hpp"

using namespace fwsim;
using doctest::Approx;

namespace {

GuidanceTarget target_with(Trigger t) {
  GuidanceTarget g;
  g.trigger = t;
  return g;
}

EstimatedState with_course_deg(double deg) {
  EstimatedState e;
  e.course = deg * kDeg2Rad;
  return e;
}

}  // namespace

TEST_SUITE("guidance") {

TEST_CASE("time triggers") {
  const EstimatedState e;
  CHECK(evaluate_trigger({TriggerKind::AbsoluteTime, 100.0}, e, 99.0, 0.0) < 0.0);
  CHECK(evaluate_trigger({TriggerKind::AbsoluteTime, 100.0}, e, 100.0, 0.0) >= 0.0);
  CHECK(evaluate_trigger({TriggerKind::ElapsedTime, 30.0}, e, 149.0, 120.0) < 0.0);
  CHECK(evaluate_trigger({TriggerKind::ElapsedTime, 30.0}, e, 150.0, 120.0) >= 0.0);
}

TEST_CASE("bearing capture in both turn directions") {
  const Trigger right{TriggerKind::BearingCapture, 90.0 * kDeg2Rad, 1.0};
  CHECK(evaluate_trigger(right, with_course_deg(80.0), 0.0, 0.0) == Approx(-10.0));
  CHECK(evaluate_trigger(right, with_course_deg(91.0), 0.0, 0.0) == Approx(1.0));
  // Far on the far side counts as not yet reached.
  CHECK(evaluate_trigger(right, with_course_deg(-170.0), 0.0, 0.0) < 0.0);
  const Trigger left{TriggerKind::BearingCapture, 175.0 * kDeg2Rad, -1.0};
  CHECK(evaluate_trigger(left, with_course_deg(-170.0), 0.0, 0.0) < 0.0);
  CHECK(evaluate_trigger(left, with_course_deg(174.0), 0.0, 0.0) >= 0.0);
}

TEST_CASE("altitude capture climbing and descending") {
  EstimatedState e;
  e.Hp = 2950.0;
  CHECK(evaluate_trigger({TriggerKind::AltitudeCapture, 3000.0, 1.0}, e, 0.0, 0.0) < 0.0);
  CHECK(evaluate_trigger({TriggerKind::AltitudeCapture, 2900.0, -1.0}, e, 0.0, 0.0) < 0.0);
  e.Hp = 2899.0;
  CHECK(evaluate_trigger({TriggerKind::AltitudeCapture, 2900.0, -1.0}, e, 0.0, 0.0) >= 0.0);
}

TEST_CASE("guidance advances one target per step and stops at the end") {
  MissionPlan plan = {target_with({TriggerKind::AbsoluteTime, 1.0}),
                      target_with({TriggerKind::AbsoluteTime, 1.0}),
                      target_with({TriggerKind::ElapsedTime, 5.0})};
  Guidance g(plan);
  const EstimatedState e;
  CHECK_FALSE(g.step(e, 0.5));
  CHECK(g.step(e, 2.0));
  CHECK(g.index() == 1);
  CHECK(g.step(e, 2.02));  // already satisfied, but only one hop per call
  CHECK(g.index() == 2);
  CHECK(g.activation_time() == 2.02);
  CHECK_FALSE(g.step(e, 6.0));
  CHECK_FALSE(g.step(e, 7.02));
  CHECK(g.exhausted());
  CHECK(g.index() == 2);
  CHECK_THROWS_AS(Guidance(MissionPlan{}), ConfigError);
}

TEST_CASE("targets describe themselves") {
  GuidanceTarget t;
  t.throttle.value = 29.0;
  t.elevator.value = 2700.0;
  t.trigger = {TriggerKind::ElapsedTime, 500.0};
  const auto s = describe(t);
  CHECK(s.find("Hp=2700") != std::string::npos);
  CHECK(s.find("elapsed>=500") != std::string::npos);
}

}
