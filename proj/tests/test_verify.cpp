#include <doctest.h>

#include <cmath>
#include <set>

#include "ringsim/verify.hpp"
#include "run_helpers.hpp"

using namespace testrun;
using namespace ringsim::verify;

namespace {

ExploreParams params_for(Protocol p, int n, int N = 0) {
  ExploreParams ep;
  ep.cfg.protocol = p;
  ep.cfg.n = n;
  ep.cfg.N = N ? N : n;
  return ep;
}

}  // namespace

TEST_CASE("explore sb n=2: four leaves of probability 1/4, all mixed") {
  auto tree = explore(params_for(Protocol::Sb, 2));
  REQUIRE(tree.leaves.size() == 4);
  for (const auto& l : tree.leaves) {
    CHECK(l.probability == doctest::Approx(0.25));
    CHECK(mixed(l.g));
  }
  CHECK(tree.leaf_mass() + tree.pruned_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("explore sb n=3..5: probability conservation and symmetry breaking") {
  for (int n : {3, 4, 5}) {
    auto tree = explore(params_for(Protocol::Sb, n));
    CHECK(std::abs(tree.leaf_mass() + tree.pruned_mass - 1.0) < 1e-9);
    auto res = check_tree(tree, n, {"symmetry-broken", "probability-conservation"});
    for (const auto& r : res) {
      INFO(r.property, " ", r.counterexample);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("explore le n=2..4: every branch elects exactly one leader") {
  for (int n : {2, 3, 4}) {
    auto tree = explore(params_for(Protocol::Le, n));
    CHECK(std::abs(tree.leaf_mass() + tree.pruned_mass - 1.0) < 1e-9);
    auto res = check_tree(tree, n, {"unique-leader", "deadlock-free"});
    for (const auto& r : res) {
      INFO(r.property, " ", r.counterexample);
      CHECK(r.pass);
    }
    for (const auto& l : tree.leaves)
      if (l.probability > 1e-12) CHECK(l.iterations <= ceil_log2(n));
  }
}

TEST_CASE("explore dp-prime: halving on every branch") {
  ExploreParams ep = params_for(Protocol::DpPrime, 4);
  ep.cfg.eligible = {1, 1, 1, 0};
  auto tree = explore(ep);
  auto res = check_tree(tree, 3, {"halving"});
  REQUIRE(res.size() == 1);
  INFO(res[0].counterexample);
  CHECK(res[0].pass);
}

TEST_CASE("sampled terminal configurations are a subset of the tree's leaves") {
  int n = 3;
  auto tree = explore(params_for(Protocol::Le, n));
  std::set<std::vector<int>> leaf_configs;
  for (const auto& l : tree.leaves) leaf_configs.insert(l.leader);
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    ProtocolConfig cfg;
    cfg.protocol = Protocol::Le;
    cfg.n = n;
    Opts o;
    o.seed = seed;
    o.record_trace = false;
    auto r = run_protocol(cfg, std::move(o));
    REQUIRE(r.outcome == Outcome::Completed);
    CHECK(leaf_configs.count(r.leader) == 1);
  }
}

TEST_CASE("explore le-bounded small cases: one leader on every branch") {
  for (auto [n, N] : std::vector<std::pair<int, int>>{{2, 3}, {3, 4}}) {
    auto tree = explore(params_for(Protocol::LeBounded, n, N));
    CHECK(std::abs(tree.leaf_mass() + tree.pruned_mass - 1.0) < 1e-9);
    auto res = check_tree(tree, n, {"unique-leader"});
    REQUIRE(res.size() == 1);
    INFO(res[0].counterexample);
    CHECK(res[0].pass);
  }
}

TEST_CASE("bounded n=N behaves like known-n branch for branch count") {
  auto known = explore(params_for(Protocol::Le, 2));
  auto bounded = explore(params_for(Protocol::LeBounded, 2, 2));
  // Same physical measurement structure: equal leaf count and mass.
  CHECK(known.leaves.size() == bounded.leaves.size());
}

TEST_CASE("node cap raises TreeTooLarge") {
  auto ep = params_for(Protocol::Le, 4);
  ep.node_cap = 3;
  CHECK_THROWS_AS(explore(ep), SimError);
}

TEST_CASE("trace property checkers pass on a healthy run and fail on corruption") {
  ProtocolConfig cfg;
  cfg.protocol = Protocol::Dp;
  cfg.n = 4;
  Opts o;
  o.hunger = all_hungry(4);
  o.budget = 50000;
  auto r = run_protocol(cfg, std::move(o));
  REQUIRE(r.outcome == Outcome::Completed);
  auto res = check_trace(r.trace, {"mutual-exclusion", "fifo"});
  REQUIRE(res.size() == 2);
  CHECK(res[0].pass);
  CHECK(res[1].pass);

  // Inject a second holder for an already-held chopstick.
  auto bad = r.trace;
  for (std::size_t i = 0; i < bad.size(); ++i) {
    if (bad[i].act == Act::TryLift && bad[i].b == 1) {
      TraceEvent dup = bad[i];
      dup.actor = (dup.actor + 1) % 4;
      bad.insert(bad.begin() + i + 1, dup);
      break;
    }
  }
  auto res2 = check_trace(bad, {"mutual-exclusion"});
  REQUIRE(res2.size() == 1);
  CHECK(!res2[0].pass);
  CHECK(!res2[0].counterexample.empty());

  CHECK_THROWS_AS(check_trace(r.trace, {"no-such-property"}), SimError);
}

TEST_CASE("rotation equivariance for sb and le at n=4, all d") {
  for (int d = 0; d <= 4; ++d) {
    std::string why;
    ProtocolConfig sb;
    sb.protocol = Protocol::Sb;
    sb.n = 4;
    INFO("sb d=", d, " ", why);
    CHECK(rotation_check(sb, d, {}, &why));
    ProtocolConfig le;
    le.protocol = Protocol::Le;
    le.n = 4;
    INFO("le d=", d, " ", why);
    CHECK(rotation_check(le, d, {}, &why));
  }
}

TEST_CASE("audit sb: exact qubit count and quadratic scaling") {
  auto rep = audit(Protocol::Sb, 3, 8, 20);
  for (const auto& c : rep.checks) INFO(c);
  CHECK(rep.pass);
  CHECK(rep.time_fit.slope > 1.6);
  CHECK(rep.time_fit.slope < 2.4);
}

TEST_CASE("audit le: iteration and memory budgets") {
  auto rep = audit(Protocol::Le, 3, 7, 20);
  for (const auto& c : rep.checks) INFO(c);
  CHECK(rep.pass);
}

TEST_CASE("audit rejects insufficient samples") {
  CHECK_THROWS_AS(audit(Protocol::Sb, 3, 5, 20), SimError);
  CHECK_THROWS_AS(audit(Protocol::Sb, 3, 8, 5), SimError);
}

TEST_CASE("audit determinism: identical inputs give identical reports") {
  auto a = audit(Protocol::Sb, 3, 6, 20);
  auto b = audit(Protocol::Sb, 3, 6, 20);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].time == b.rows[i].time);
    CHECK(a.rows[i].cbits == b.rows[i].cbits);
  }
  CHECK(a.time_fit.slope == b.time_fit.slope);
}
