#pragma once

#include <string>
#include <vector>

#include "ringsim/protocols.hpp"
#include "ringsim/runtime.hpp"

namespace ringsim::verify {

// ---- branch-exhaustive execution -------------------------------------------

struct ExploreParams {
  proto::ProtocolConfig cfg;
  double threshold = 1e-12;      // branches below this running probability are pruned
  std::uint64_t budget = 1'000'000;
  std::uint64_t node_cap = 10'000'000;
  std::vector<rt::HungerEvent> hunger;
};

struct Leaf {
  std::vector<int> outcomes;  // measurement decision string (forced outcomes omitted)
  double probability = 0;
  rt::Outcome outcome = rt::Outcome::Completed;
  std::vector<int> g;
  std::vector<int> leader;
  std::vector<int> h;
  int iterations = 0;
  std::uint64_t time = 0;
};

struct BranchTree {
  std::vector<Leaf> leaves;
  double pruned_mass = 0;
  std::uint64_t nodes = 0;
  double leaf_mass() const {
    double s = 0;
    for (const auto& l : leaves) s += l.probability;
    return s;
  }
};

// Depth-first enumeration of measurement outcome sequences under a fixed
// round-robin schedule. Each branch re-executes the run with a forced prefix.
BranchTree explore(const ExploreParams& params);

// ---- property checking ------------------------------------------------------

struct PropertyResult {
  std::string property;
  bool pass = false;
  std::string counterexample;  // replayable branch / step index
};

// Tree-level properties: unique-leader, symmetry-broken, deadlock-free,
// halving (needs h_in via params), probability-conservation.
std::vector<PropertyResult> check_tree(const BranchTree& tree, int h_in,
                                       const std::vector<std::string>& properties);

// Trace-level properties: mutual-exclusion, fifo.
std::vector<PropertyResult> check_trace(const std::vector<rt::TraceEvent>& events,
                                        const std::vector<std::string>& properties);

bool known_property(const std::string& name);

// ---- anonymity --------------------------------------------------------------

// Runs the protocol under round-robin with fixed branch selection, then
// replays it rotated by d and compares the traces modulo rotation.
bool rotation_check(const proto::ProtocolConfig& cfg, int d,
                    const std::vector<rt::HungerEvent>& hunger = {}, std::string* why = nullptr);

// ---- complexity audit ---------------------------------------------------------

struct AuditRow {
  int n = 0;
  std::uint64_t seed = 0;
  std::uint64_t time = 0;
  std::uint64_t cbits = 0;
  std::uint64_t qubits = 0;
  int mem_bits_max = 0;
  int qubits_max = 0;
  int iterations = 0;
};

struct FitLine {
  double slope = 0;
  double intercept = 0;  // log-log least squares
};

struct AuditReport {
  std::string protocol;
  std::vector<AuditRow> rows;
  FitLine time_fit, cbits_fit;
  bool pass = false;
  std::vector<std::string> checks;    // human-readable "ok: ..." / "FAIL: ..." lines
};

// Frozen audit budgets (acceptance constants).
inline constexpr double kSbCbitsPerN2 = 4.0;        // c1
inline constexpr double kSbTimePerN2 = 16.0;        // c2
inline constexpr double kLeCbitsPerN2LogN = 24.0;   // c3
inline constexpr double kMemPerLogN = 24.0;         // c4
inline constexpr int kMaxLiveQubits = 3;
inline constexpr double kSlopeLo = 1.6;
inline constexpr double kSlopeHi = 2.4;

AuditReport audit(proto::Protocol protocol, int n_lo, int n_hi, int seeds);

int ceil_log2(int n);

}  // namespace ringsim::verify
