#include <gtest/gtest.h>

#include "campus/agents.hpp"
#include "oracles.hpp"

using namespace campus;
using namespace campus::agents;

namespace {

std::shared_ptr<const world::WorldDef> shared_world() {
  return {std::shared_ptr<const world::WorldDef>{}, &world::default_world()};
}

oracle::IdGraph to_oracle(const NavGraph& g) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::vector<std::string> nodes;
  for (NodeIndex n = 0; n < g.size(); ++n) {
    nodes.push_back(g.id(n));
    for (auto m : g.neighbors(n)) {
      if (n < m) edges.emplace_back(g.id(n), g.id(m));
    }
  }
  return oracle::make_graph(edges, nodes);
}

std::vector<std::string> ids(const NavGraph& g, const std::vector<NodeIndex>& path) {
  std::vector<std::string> out;
  for (auto n : path) out.push_back(g.id(n));
  return out;
}

engine::SessionConfig with_rate(double rate) {
  engine::SessionConfig c;
  c.barrier.misdirection_rate = rate;
  return c;
}

}  // namespace

TEST(ShortestPath, EmptyWhenAlreadyThere) {
  const auto& g = world::default_world().campus();
  EXPECT_TRUE(shortest_path(g, 3, 3).empty());
}

TEST(ShortestPath, AdjacentIsSingleEdge) {
  const auto& g = world::default_world().campus();
  const auto a = *g.find("gate");
  const auto b = g.neighbors(a).front();
  EXPECT_EQ(shortest_path(g, a, b), std::vector<NodeIndex>{b});
}

TEST(ShortestPath, MatchesExhaustiveSearchOnSmallGraph) {
  // Two equal-length routes a-b-d and a-c-d; the smaller id sequence wins.
  const NavGraph g({{"a", {0, 0}}, {"b", {1, 1}}, {"c", {1, -1}}, {"d", {2, 0}}, {"e", {3, 0}}},
                   {{"a", "c"}, {"a", "b"}, {"b", "d"}, {"c", "d"}, {"d", "e"}});
  const auto o = to_oracle(g);
  for (NodeIndex from = 0; from < g.size(); ++from) {
    for (NodeIndex to = 0; to < g.size(); ++to) {
      EXPECT_EQ(ids(g, shortest_path(g, from, to)), oracle::smallest_shortest_path(o, g.id(from), g.id(to)));
    }
  }
}

TEST(ShortestPath, MatchesExhaustiveSearchOnCampus) {
  const auto& g = world::default_world().campus();
  const auto o = to_oracle(g);
  // Exhaustive enumeration is exponential; restrict to pairs a few hops apart.
  for (NodeIndex from = 0; from < g.size(); from += 3) {
    const auto d = oracle::bfs(o, g.id(from));
    for (NodeIndex to = 0; to < g.size(); ++to) {
      if (d.at(g.id(to)) > 6) continue;
      const auto got = shortest_path(g, from, to);
      EXPECT_EQ(static_cast<int>(got.size()), d.at(g.id(to)));
      EXPECT_EQ(ids(g, got), oracle::smallest_shortest_path(o, g.id(from), g.id(to)));
    }
  }
}

TEST(ShortestPath, Unreachable) {
  const NavGraph g({{"a", {0, 0}}, {"b", {1, 0}}}, {});
  EXPECT_THROW(shortest_path(g, 0, 1), std::runtime_error);
}

TEST(Policies, NamesRoundTrip) {
  for (auto k : {PolicyKind::Oracle, PolicyKind::ArrowFollower, PolicyKind::RandomWalk}) {
    EXPECT_EQ(policy_from_string(to_string(k)), k);
  }
  EXPECT_FALSE(policy_from_string("teleporter").has_value());
}

TEST(RunHeadless, OracleCompletesWithCanonicalChain) {
  const auto r = run_headless(shared_world(), {}, 7, Policy{}, 200'000);
  EXPECT_EQ(r.report.outcome, engine::Outcome::Completed);
  EXPECT_FALSE(r.report.truncated);
  EXPECT_EQ(r.report.transitions, 6);
  EXPECT_EQ(r.report.expiries, 0);
  EXPECT_EQ(r.report.events, r.log.events().size());
}

TEST(RunHeadless, RandomWalkTruncates) {
  const auto r = run_headless(shared_world(), {}, 3, Policy{PolicyKind::RandomWalk}, 10);
  EXPECT_TRUE(r.report.truncated);
  EXPECT_NE(r.report.outcome, engine::Outcome::Completed);
  EXPECT_LE(r.report.total_ticks, 10 + 50);  // one action may overrun the limit
}

TEST(RunHeadless, StageTicksSumToTotal) {
  for (auto kind : {PolicyKind::Oracle, PolicyKind::ArrowFollower, PolicyKind::RandomWalk}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto r = run_headless(shared_world(), with_rate(0.25), seed, Policy{kind}, 20'000);
      std::int64_t sum = 0;
      for (const auto& [stage, ticks] : r.report.stage_ticks) {
        EXPECT_GE(ticks, 0);
        sum += ticks;
      }
      EXPECT_EQ(sum, r.report.total_ticks) << to_string(kind) << " seed " << seed;
    }
  }
}

TEST(RunHeadless, DigestMatchesReplay) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = run_headless(shared_world(), with_rate(0.25), seed, Policy{PolicyKind::ArrowFollower}, 200'000);
    const auto again = engine::replay(shared_world(), with_rate(0.25), seed, r.trace);
    EXPECT_EQ(again.digest(), r.report.digest);
    EXPECT_EQ(again.to_ndjson(), r.log.to_ndjson());
  }
}

TEST(RunHeadless, ArrowFollowerWrongFraction) {
  int wrong = 0;
  int eligible = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = run_headless(shared_world(), with_rate(0.25), seed, Policy{PolicyKind::ArrowFollower}, 200'000);
    EXPECT_EQ(r.report.outcome, engine::Outcome::Completed);
    wrong += r.report.misdirections;
    eligible += r.report.eligible_help;
  }
  ASSERT_GT(eligible, 0);
  EXPECT_NEAR(static_cast<double>(wrong) / eligible, 0.25, 0.03);
}

TEST(RunHeadless, ArrowFollowerAtRateZeroNeverMisled) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = run_headless(shared_world(), with_rate(0.0), seed, Policy{PolicyKind::ArrowFollower}, 200'000);
    EXPECT_EQ(r.report.misdirections, 0);
    EXPECT_EQ(r.report.outcome, engine::Outcome::Completed);
  }
}

TEST(RunHeadless, ReportJsonFields) {
  const auto r = run_headless(shared_world(), {}, 1, Policy{}, 200'000);
  const auto j = report_to_json(r.report);
  for (const char* key : {"seed", "policy", "misdirection_rate", "outcome", "truncated", "total_ticks", "stage_ticks",
                          "help_uses", "misdirections", "transitions", "digest"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j["policy"], "oracle");
  EXPECT_EQ(j["outcome"], "completed");
}
