#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ringsim/errors.hpp"
#include "ringsim/outcome_source.hpp"

namespace ringsim::qstate {

using Complex = std::complex<double>;

inline constexpr double kNormTol = 1e-9;
inline constexpr double kExactTol = 1e-12;

// Party identifier; kInTransit marks a qubit travelling inside a message.
using PartyId = int;
inline constexpr PartyId kInTransit = -1;

struct QubitHandle {
  std::uint32_t id = 0;
  friend bool operator==(QubitHandle a, QubitHandle b) { return a.id == b.id; }
};

struct MagicUnitarySpec;  // magic.hpp

// Sparse statevector over the live qubits of a run. Basis keys are packed
// little-endian: bit i of a key is the value of the qubit at position i of
// the current qubit order. Entries stay sorted by key, which makes every
// operation deterministic bit-for-bit for a fixed operation sequence.
class Engine {
 public:
  Engine();

  std::vector<QubitHandle> alloc(PartyId owner, int count);
  void prepare_pair(QubitHandle q1, QubitHandle q2);
  void apply_cnot(QubitHandle control, QubitHandle target);
  int measure_parity(QubitHandle qa, QubitHandle qb, OutcomeSource& out);
  int measure(QubitHandle q, OutcomeSource& out);
  void apply_magic(const MagicUnitarySpec& spec, QubitHandle q, std::optional<QubitHandle> anc);
  double support_probability(const std::vector<QubitHandle>& qs,
                             const std::vector<std::vector<int>>& patterns) const;
  void release(QubitHandle q);

  // Ownership transfer for qubit messages.
  void set_in_transit(QubitHandle q, PartyId sender);
  void deliver(QubitHandle q, PartyId receiver);

  bool alive(QubitHandle q) const { return info_.count(q.id) > 0; }
  PartyId owner(QubitHandle q) const;
  int live_qubits() const { return static_cast<int>(order_.size()); }
  int live_count(PartyId p) const;
  int high_water(PartyId p) const;
  double squared_norm() const;
  double prob_one(QubitHandle q) const;

  // Dense view of the amplitudes in current qubit order (small registers only).
  Eigen::VectorXcd dense() const;
  const std::vector<std::pair<std::uint64_t, Complex>>& entries() const { return amps_; }
  std::vector<QubitHandle> qubit_order() const;

 private:
  struct Info {
    int position;
    PartyId owner;
  };

  int pos_of(QubitHandle q, const char* ctx) const;
  void apply_1q(const Eigen::Matrix2cd& m, int pos);
  void apply_2q(const Eigen::Matrix4cd& m, int hi, int lo);
  void collapse(int keep_outcome, double prob, std::uint64_t mask, std::uint64_t want);
  void remove_position(int pos);
  void check_norm(const char* ctx) const;
  void bump(PartyId p, int delta);

  std::vector<std::pair<std::uint64_t, Complex>> amps_;  // sorted by key
  std::vector<std::uint32_t> order_;                     // qubit id at each position
  std::unordered_map<std::uint32_t, Info> info_;
  std::unordered_map<PartyId, int> live_;
  std::unordered_map<PartyId, int> hw_;
  std::uint32_t next_id_ = 0;
};

}  // namespace ringsim::qstate
