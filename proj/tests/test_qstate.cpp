#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "ringsim/magic.hpp"
#include "ringsim/qstate.hpp"

using namespace ringsim;
using namespace ringsim::qstate;

namespace {

// Outcome source that always forces the given bit (when possible).
struct Forced : OutcomeSource {
  int bit;
  explicit Forced(int b) : bit(b) {}
  int choose(double p0, double p1) override {
    if (bit == 0 && p0 > kBranchEps) return 0;
    if (bit == 1 && p1 > kBranchEps) return 1;
    return p0 >= p1 ? 0 : 1;
  }
};

}  // namespace

TEST_CASE("alloc starts in |0..0> and keeps owners distinct") {
  Engine e;
  auto qs = e.alloc(0, 2);
  CHECK(e.live_qubits() == 2);
  CHECK(e.dense()(0) == Complex{1, 0});
  auto q2 = e.alloc(1, 1);
  CHECK(e.owner(qs[0]) == 0);
  CHECK(e.owner(q2[0]) == 1);
  CHECK(e.live_count(0) == 2);
  CHECK(e.live_count(1) == 1);
  CHECK_THROWS_AS(e.alloc(0, 0), SimError);
}

TEST_CASE("prepare_pair produces (|00>+|11>)/sqrt(2)") {
  Engine e;
  auto qs = e.alloc(0, 2);
  e.prepare_pair(qs[0], qs[1]);
  auto v = e.dense();
  CHECK(std::abs(v(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(v(3) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(e.squared_norm() - 1.0) < 1e-12);
}

TEST_CASE("prepare_pair rejects non-fresh qubits") {
  Engine e;
  auto qs = e.alloc(0, 3);
  e.prepare_pair(qs[0], qs[1]);
  CHECK_THROWS_AS(e.prepare_pair(qs[1], qs[2]), SimError);
}

TEST_CASE("pair then parity gives outcome 0 with probability 1") {
  // Oracle: projector split of (|00>+|11>)/sqrt(2).
  oracle::Vec psi = (oracle::basis(2, 0) + oracle::basis(2, 3)) / std::sqrt(2.0);
  auto split = oracle::parity_split(psi, 0, 1);
  CHECK(split.p_equal == doctest::Approx(1.0));
  CHECK(split.p_diff == doctest::Approx(0.0));

  Engine e;
  auto qs = e.alloc(0, 2);
  e.prepare_pair(qs[0], qs[1]);
  Forced f(1);  // ask for 1; must still get 0
  CHECK(e.measure_parity(qs[0], qs[1], f) == 0);
}

TEST_CASE("cnot basis map and involution") {
  Engine e;
  auto qs = e.alloc(0, 2);
  // |10>: flip the first qubit with X.
  MagicUnitarySpec x;
  x.m = 2; x.arity = 1; x.supported = true;
  x.matrix = Eigen::MatrixXcd(2, 2);
  x.matrix << 0, 1, 1, 0;
  e.apply_magic(x, qs[0], std::nullopt);
  e.apply_cnot(qs[0], qs[1]);
  auto v = e.dense();
  CHECK(std::abs(v(3) - Complex(1, 0)) < 1e-12);  // |11>
  e.apply_cnot(qs[0], qs[1]);
  e.apply_cnot(qs[0], qs[1]);
  v = e.dense();
  CHECK(std::abs(v(3) - Complex(1, 0)) < 1e-12);  // involution restored
  CHECK_THROWS_AS(e.apply_cnot(qs[0], qs[0]), SimError);
}

TEST_CASE("cnot on the pair state gives (|00>+|10>)/sqrt(2)") {
  Engine e;
  auto qs = e.alloc(0, 2);
  e.prepare_pair(qs[0], qs[1]);
  e.apply_cnot(qs[0], qs[1]);
  auto v = e.dense();
  CHECK(std::abs(v(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);
  CHECK(std::abs(v(1) - Complex(1 / std::sqrt(2.0), 0)) < 1e-12);  // qubit0 = 1, qubit1 = 0
}

TEST_CASE("parity of (|00>+|10>)/sqrt(2) splits half/half with collapsed post-states") {
  // Oracle values.
  oracle::Vec psi = (oracle::basis(2, 0) + oracle::basis(2, 1)) / std::sqrt(2.0);
  auto split = oracle::parity_split(psi, 0, 1);
  CHECK(split.p_equal == doctest::Approx(0.5));
  CHECK(split.p_diff == doctest::Approx(0.5));

  for (int want : {0, 1}) {
    Engine e;
    auto qs = e.alloc(0, 2);
    e.prepare_pair(qs[0], qs[1]);
    e.apply_cnot(qs[0], qs[1]);
    Forced f(want);
    int got = e.measure_parity(qs[0], qs[1], f);
    CHECK(got == want);
    auto v = e.dense();
    long idx = want == 0 ? 0 : 1;
    CHECK(std::abs(v(idx) - Complex(1, 0)) < 1e-12);
  }
}

TEST_CASE("measure collapses, releases the qubit and shrinks the register") {
  Engine e;
  auto qs = e.alloc(0, 2);
  e.prepare_pair(qs[0], qs[1]);
  Forced f(1);
  int b = e.measure(qs[0], f);
  CHECK(b == 1);
  CHECK(e.live_qubits() == 1);
  Forced f2(0);
  CHECK(e.measure(qs[1], f2) == 1);  // perfectly correlated
  CHECK(e.live_qubits() == 0);
}

TEST_CASE("|+> measures 0 with probability one half") {
  int zeros = 0;
  for (int seed = 0; seed < 400; ++seed) {
    Engine e;
    auto q = e.alloc(0, 1);
    MagicUnitarySpec h;
    h.m = 2; h.arity = 1; h.supported = true;
    h.matrix = Eigen::MatrixXcd(2, 2);
    h.matrix << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    e.apply_magic(h, q[0], std::nullopt);
    SampledOutcomes src(seed);
    zeros += e.measure(q[0], src) == 0;
  }
  CHECK(zeros > 150);
  CHECK(zeros < 250);
}

TEST_CASE("release accepts separable |0> and rejects entangled halves") {
  Engine e;
  auto qs = e.alloc(0, 2);
  e.prepare_pair(qs[0], qs[1]);
  CHECK_THROWS_AS(e.release(qs[1]), SimError);
  e.apply_cnot(qs[0], qs[1]);
  e.release(qs[1]);  // second qubit is |0> after the cnot
  CHECK(e.live_qubits() == 1);
}

TEST_CASE("after the phase-three cnot at n=3 every second qubit is releasable") {
  // Three parties hold pairs (a_j, b_{j-1}); with every parity equal, the
  // joint state is the 6-qubit cat. After cnot(a_j, b_{j-1}) per party the
  // b qubits are |0> and separable. Checked against the dense oracle too.
  Engine e;
  std::vector<QubitHandle> a, b;
  for (int j = 0; j < 3; ++j) {
    auto qs = e.alloc(j, 2);
    a.push_back(qs[0]);
    b.push_back(qs[1]);
  }
  for (int j = 0; j < 3; ++j) e.prepare_pair(a[j], b[j]);
  // Deliver b_j to party j+1, then parity-project everything to "equal".
  for (int j = 0; j < 3; ++j) {
    e.set_in_transit(b[j], j);
    e.deliver(b[j], (j + 1) % 3);
  }
  Forced f(0);
  for (int j = 0; j < 3; ++j) {
    int x = e.measure_parity(a[j], b[(j + 2) % 3], f);
    CHECK(x == 0);
  }
  // Oracle: state should now be the 6-qubit cat over positions (a0 b0 a1 b1 a2 b2).
  auto v = e.dense();
  CHECK(std::abs(v(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-9);
  CHECK(std::abs(v(63) - Complex(1 / std::sqrt(2.0), 0)) < 1e-9);
  for (int j = 0; j < 3; ++j) e.apply_cnot(a[j], b[(j + 2) % 3]);
  for (int j = 0; j < 3; ++j) e.release(b[j]);
  CHECK(e.live_qubits() == 3);
  v = e.dense();
  CHECK(std::abs(v(0) - Complex(1 / std::sqrt(2.0), 0)) < 1e-9);
  CHECK(std::abs(v(7) - Complex(1 / std::sqrt(2.0), 0)) < 1e-9);
}

TEST_CASE("support_probability on cat and |+>") {
  Engine e;
  auto qs = e.alloc(0, 2);
  e.prepare_pair(qs[0], qs[1]);
  double p = e.support_probability(qs, {{0, 0}, {1, 1}});
  CHECK(p == doctest::Approx(1.0));
  CHECK_THROWS_AS(e.support_probability(qs, {{0}}), SimError);

  Engine e2;
  auto q = e2.alloc(0, 1);
  MagicUnitarySpec h;
  h.m = 2; h.arity = 1; h.supported = true;
  h.matrix = Eigen::MatrixXcd(2, 2);
  h.matrix << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
  e2.apply_magic(h, q[0], std::nullopt);
  CHECK(e2.support_probability({q[0]}, {{0}}) == doctest::Approx(0.5));
}

TEST_CASE("locality: cross-party gates are rejected") {
  Engine e;
  auto qa = e.alloc(0, 1);
  auto qb = e.alloc(1, 1);
  CHECK_THROWS_AS(e.apply_cnot(qa[0], qb[0]), SimError);
  Forced f(0);
  CHECK_THROWS_AS(e.measure_parity(qa[0], qb[0], f), SimError);
}

TEST_CASE("ownership transfer: send/deliver moves the live count") {
  Engine e;
  auto q = e.alloc(0, 1);
  CHECK_THROWS_AS(e.set_in_transit(q[0], 1), SimError);
  e.set_in_transit(q[0], 0);
  CHECK(e.live_count(0) == 0);
  e.deliver(q[0], 1);
  CHECK(e.live_count(1) == 1);
  CHECK(e.high_water(0) == 1);
}

TEST_CASE("determinism: identical seeds give bit-identical amplitudes") {
  auto run = [](std::uint64_t seed) {
    Engine e;
    SampledOutcomes src(seed);
    auto qs = e.alloc(0, 4);
    e.prepare_pair(qs[0], qs[1]);
    e.prepare_pair(qs[2], qs[3]);
    e.apply_cnot(qs[0], qs[2]);
    e.measure_parity(qs[1], qs[3], src);
    e.measure(qs[0], src);
    return e.entries();
  };
  auto a = run(42), b = run(42), c = run(43);
  CHECK(a == b);
  // A different seed is allowed to differ (and here does, with prob 1/2 each
  // of two branch points; seed 43 picked for an observed difference).
  (void)c;
}
