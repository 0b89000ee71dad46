#include <doctest.h>

#include <stdexcept>

#include "curla/curriculum.hpp"

using namespace curla;
using namespace curla::curriculum;

namespace {

AgentVariant paper_variant(VariantKind kind) {
  AgentVariant v;
  v.kind = kind;
  return v;  // paper defaults: switch 1500, total 3500, max 6, ramp 1000
}

}  // namespace

TEST_CASE("traffic schedule per variant") {
  const AgentVariant curla_v = paper_variant(VariantKind::CuRla);
  CHECK(traffic_count_for_episode(curla_v, 0) == 0);
  CHECK(traffic_count_for_episode(curla_v, 1499) == 0);
  CHECK(traffic_count_for_episode(curla_v, 2500) == 6);
  CHECK(traffic_count_for_episode(curla_v, 3499) == 6);
  // Ramp reaches traffic_max exactly at switch + ramp - 1.
  CHECK(traffic_count_for_episode(curla_v, 2499) == 6);
  CHECK(traffic_count_for_episode(curla_v, 2498) == 5);

  const AgentVariant onefold = paper_variant(VariantKind::OneFoldCl);
  CHECK(traffic_count_for_episode(onefold, 0) == 6);
  const AgentVariant sca = paper_variant(VariantKind::Sca);
  CHECK(traffic_count_for_episode(sca, 0) == 6);
  CHECK(traffic_count_for_episode(sca, 3499) == 6);

  CHECK_THROWS_AS(traffic_count_for_episode(curla_v, -1), std::out_of_range);
  CHECK_THROWS_AS(traffic_count_for_episode(curla_v, 3500), std::out_of_range);
}

TEST_CASE("collision gating per variant") {
  const AgentVariant curla_v = paper_variant(VariantKind::CuRla);
  CHECK_FALSE(collision_penalty_enabled(curla_v, 1499));
  CHECK(collision_penalty_enabled(curla_v, 1500));
  const AgentVariant onefold = paper_variant(VariantKind::OneFoldCl);
  CHECK_FALSE(collision_penalty_enabled(onefold, 0));
  CHECK(collision_penalty_enabled(onefold, 1500));
  const AgentVariant sca = paper_variant(VariantKind::Sca);
  for (int e : {0, 1499, 1500, 3499}) CHECK_FALSE(collision_penalty_enabled(sca, e));
}

TEST_CASE("reward dispatch per variant") {
  const AgentVariant sca = paper_variant(VariantKind::Sca);
  const AgentVariant curla_v = paper_variant(VariantKind::CuRla);
  // SCA ignores collisions entirely.
  CHECK(reward_for_step(sca, 100, 0.0, 0.0, 60.0, 10.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(reward_for_step(curla_v, 2000, 0.0, 0.0, 60.0, 10.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(reward_for_step(curla_v, 100, 0.0, 0.0, 15.0, 0.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("schedule is monotone and rewards stay bounded") {
  for (VariantKind kind :
       {VariantKind::Sca, VariantKind::OneFoldCl, VariantKind::CuRla}) {
    const AgentVariant v = paper_variant(kind);
    int prev = 0;
    for (int e = 0; e < v.total_episodes; ++e) {
      const int count = traffic_count_for_episode(v, e);
      CHECK(count >= prev);
      prev = count;
      const double r = reward_for_step(v, e, 0.1, 1.0, 40.0, 25.0);
      CHECK(r >= -1.0);
      CHECK(r <= 1.0);
    }
    CHECK(prev == v.traffic_max);
  }
}
