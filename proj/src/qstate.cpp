#include "ringsim/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ringsim/magic.hpp"

namespace ringsim::qstate {

namespace {

double mass(const std::vector<std::pair<std::uint64_t, Complex>>& amps, std::uint64_t bitmask,
            std::uint64_t want) {
  double p = 0;
  for (const auto& [k, a] : amps)
    if ((k & bitmask) == want) p += std::norm(a);
  return p;
}

}  // namespace

Engine::Engine() { amps_.emplace_back(0, Complex{1, 0}); }

std::vector<QubitHandle> Engine::alloc(PartyId owner, int count) {
  if (count <= 0) throw SimError(Err::EmptyAlloc, "alloc of zero qubits");
  std::vector<QubitHandle> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    std::uint32_t id = next_id_++;
    info_[id] = Info{static_cast<int>(order_.size()), owner};
    order_.push_back(id);
    out.push_back(QubitHandle{id});
    bump(owner, +1);
  }
  // New qubits start in |0>, so the sparse keys are unchanged.
  return out;
}

int Engine::pos_of(QubitHandle q, const char* ctx) const {
  auto it = info_.find(q.id);
  if (it == info_.end()) throw SimError(Err::NotFresh, std::string("dead qubit handle in ") + ctx);
  return it->second.position;
}

PartyId Engine::owner(QubitHandle q) const {
  auto it = info_.find(q.id);
  if (it == info_.end()) throw SimError(Err::NotFresh, "owner of dead handle");
  return it->second.owner;
}

int Engine::live_count(PartyId p) const {
  auto it = live_.find(p);
  return it == live_.end() ? 0 : it->second;
}

int Engine::high_water(PartyId p) const {
  auto it = hw_.find(p);
  return it == hw_.end() ? 0 : it->second;
}

void Engine::bump(PartyId p, int delta) {
  int& c = live_[p];
  c += delta;
  if (c > hw_[p]) hw_[p] = c;
}

double Engine::squared_norm() const {
  double s = 0;
  for (const auto& [k, a] : amps_) s += std::norm(a);
  return s;
}

double Engine::prob_one(QubitHandle q) const {
  std::uint64_t bit = 1ull << pos_of(q, "prob_one");
  return mass(amps_, bit, bit);
}

void Engine::check_norm(const char* ctx) const {
  if (std::abs(squared_norm() - 1.0) > kNormTol)
    throw SimError(Err::NumericalFailure, std::string("norm drift after ") + ctx);
}

void Engine::prepare_pair(QubitHandle q1, QubitHandle q2) {
  if (q1 == q2) throw SimError(Err::SameQubit, "prepare_pair on one qubit");
  if (owner(q1) != owner(q2) || owner(q1) == kInTransit)
    throw SimError(Err::NotOwner, "prepare_pair across parties");
  int p1 = pos_of(q1, "prepare_pair"), p2 = pos_of(q2, "prepare_pair");
  std::uint64_t b1 = 1ull << p1, b2 = 1ull << p2;
  // Fresh |0> qubits are automatically separable from the rest.
  if (mass(amps_, b1 | b2, 0) < 1.0 - kNormTol)
    throw SimError(Err::NotFresh, "prepare_pair needs both qubits in |0>");
  std::vector<std::pair<std::uint64_t, Complex>> out;
  out.reserve(amps_.size() * 2);
  const double r = 1.0 / std::sqrt(2.0);
  for (const auto& [k, a] : amps_) {
    out.emplace_back(k, a * r);
    out.emplace_back(k | b1 | b2, a * r);
  }
  std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
  amps_ = std::move(out);
  check_norm("prepare_pair");
}

void Engine::apply_cnot(QubitHandle control, QubitHandle target) {
  if (control == target) throw SimError(Err::SameQubit, "cnot control equals target");
  if (owner(control) != owner(target) || owner(control) == kInTransit)
    throw SimError(Err::NotOwner, "cnot across parties");
  std::uint64_t bc = 1ull << pos_of(control, "cnot");
  std::uint64_t bt = 1ull << pos_of(target, "cnot");
  for (auto& [k, a] : amps_)
    if (k & bc) k ^= bt;
  std::sort(amps_.begin(), amps_.end(), [](auto& x, auto& y) { return x.first < y.first; });
  check_norm("cnot");
}

void Engine::collapse(int keep_outcome, double prob, std::uint64_t mask, std::uint64_t want) {
  (void)keep_outcome;
  double r = 1.0 / std::sqrt(prob);
  std::vector<std::pair<std::uint64_t, Complex>> out;
  out.reserve(amps_.size());
  for (const auto& [k, a] : amps_)
    if ((k & mask) == want) out.emplace_back(k, a * r);
  amps_ = std::move(out);
}

int Engine::measure_parity(QubitHandle qa, QubitHandle qb, OutcomeSource& src) {
  if (qa == qb) throw SimError(Err::SameQubit, "parity of a qubit with itself");
  if (owner(qa) != owner(qb) || owner(qa) == kInTransit)
    throw SimError(Err::NotOwner, "parity across parties");
  std::uint64_t ba = 1ull << pos_of(qa, "measure_parity");
  std::uint64_t bb = 1ull << pos_of(qb, "measure_parity");
  double p_equal = 0, p_diff = 0;
  for (const auto& [k, a] : amps_) {
    bool va = k & ba, vb = k & bb;
    (va == vb ? p_equal : p_diff) += std::norm(a);
  }
  int outcome = src.choose(p_equal, p_diff);
  double p = outcome == 0 ? p_equal : p_diff;
  if (p < kBranchEps) throw SimError(Err::NumericalFailure, "parity outcome with zero mass");
  double r = 1.0 / std::sqrt(p);
  std::vector<std::pair<std::uint64_t, Complex>> out;
  out.reserve(amps_.size());
  for (const auto& [k, a] : amps_) {
    bool equal = static_cast<bool>(k & ba) == static_cast<bool>(k & bb);
    if (equal == (outcome == 0)) out.emplace_back(k, a * r);
  }
  amps_ = std::move(out);
  check_norm("measure_parity");
  return outcome;
}

void Engine::remove_position(int pos) {
  std::uint64_t low = (1ull << pos) - 1;
  for (auto& [k, a] : amps_) k = (k & low) | ((k >> 1) & ~low);
  std::sort(amps_.begin(), amps_.end(), [](auto& x, auto& y) { return x.first < y.first; });
  // Merge duplicate keys (can only appear through rounding on released zeros).
  std::vector<std::pair<std::uint64_t, Complex>> out;
  for (const auto& [k, a] : amps_) {
    if (!out.empty() && out.back().first == k)
      out.back().second += a;
    else
      out.emplace_back(k, a);
  }
  amps_ = std::move(out);
  std::uint32_t id = order_[pos];
  order_.erase(order_.begin() + pos);
  for (std::size_t i = pos; i < order_.size(); ++i) info_[order_[i]].position = static_cast<int>(i);
  bump(info_[id].owner, -1);
  info_.erase(id);
}

int Engine::measure(QubitHandle q, OutcomeSource& src) {
  int pos = pos_of(q, "measure");
  std::uint64_t bit = 1ull << pos;
  double p1 = mass(amps_, bit, bit);
  double p0 = 1.0 - p1;
  int outcome = src.choose(p0, p1);
  double p = outcome == 0 ? p0 : p1;
  if (p < kBranchEps) throw SimError(Err::NumericalFailure, "measure outcome with zero mass");
  collapse(outcome, p, bit, outcome == 0 ? 0 : bit);
  remove_position(pos);
  check_norm("measure");
  return outcome;
}

void Engine::release(QubitHandle q) {
  int pos = pos_of(q, "release");
  std::uint64_t bit = 1ull << pos;
  double p0 = mass(amps_, bit, 0);
  if (p0 < 1.0 - kNormTol)
    throw SimError(Err::CannotRelease, "qubit not separable-|0>");
  collapse(0, p0, bit, 0);
  remove_position(pos);
  check_norm("release");
}

void Engine::set_in_transit(QubitHandle q, PartyId sender) {
  auto it = info_.find(q.id);
  if (it == info_.end()) throw SimError(Err::NotFresh, "sending dead qubit");
  if (it->second.owner != sender) throw SimError(Err::NotOwner, "sending qubit not owned");
  bump(sender, -1);
  it->second.owner = kInTransit;
}

void Engine::deliver(QubitHandle q, PartyId receiver) {
  auto it = info_.find(q.id);
  if (it == info_.end()) throw SimError(Err::NotFresh, "delivering dead qubit");
  if (it->second.owner != kInTransit) throw SimError(Err::NotOwner, "delivering qubit not in transit");
  it->second.owner = receiver;
  bump(receiver, +1);
}

void Engine::apply_1q(const Eigen::Matrix2cd& m, int pos) {
  std::uint64_t bit = 1ull << pos;
  std::map<std::uint64_t, std::array<Complex, 2>> groups;
  for (const auto& [k, a] : amps_) groups[k & ~bit][(k & bit) ? 1 : 0] += a;
  std::vector<std::pair<std::uint64_t, Complex>> out;
  out.reserve(groups.size() * 2);
  for (const auto& [base, v] : groups) {
    Complex o0 = m(0, 0) * v[0] + m(0, 1) * v[1];
    Complex o1 = m(1, 0) * v[0] + m(1, 1) * v[1];
    if (o0 != Complex{0, 0}) out.emplace_back(base, o0);
    if (o1 != Complex{0, 0}) out.emplace_back(base | bit, o1);
  }
  std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
  amps_ = std::move(out);
}

void Engine::apply_2q(const Eigen::Matrix4cd& m, int hi, int lo) {
  std::uint64_t bh = 1ull << hi, bl = 1ull << lo;
  std::map<std::uint64_t, std::array<Complex, 4>> groups;
  for (const auto& [k, a] : amps_) {
    int idx = ((k & bh) ? 2 : 0) | ((k & bl) ? 1 : 0);
    groups[k & ~(bh | bl)][idx] += a;
  }
  std::vector<std::pair<std::uint64_t, Complex>> out;
  out.reserve(groups.size() * 4);
  for (const auto& [base, v] : groups) {
    for (int r = 0; r < 4; ++r) {
      Complex o = m(r, 0) * v[0] + m(r, 1) * v[1] + m(r, 2) * v[2] + m(r, 3) * v[3];
      if (o == Complex{0, 0}) continue;
      std::uint64_t k = base | ((r & 2) ? bh : 0) | ((r & 1) ? bl : 0);
      out.emplace_back(k, o);
    }
  }
  std::sort(out.begin(), out.end(), [](auto& x, auto& y) { return x.first < y.first; });
  amps_ = std::move(out);
}

void Engine::apply_magic(const MagicUnitarySpec& spec, QubitHandle q, std::optional<QubitHandle> anc) {
  if (!spec.supported)
    throw SimError(Err::UnsupportedMagic,
                   "magic unitary for m=" + std::to_string(spec.m) + " failed validation (" + spec.note + ")");
  if (spec.arity == 1) {
    if (anc) throw SimError(Err::BadArity, "even-m magic takes no ancilla");
    apply_1q(spec.matrix, pos_of(q, "apply_magic"));
  } else {
    if (!anc) throw SimError(Err::BadArity, "odd-m magic needs an ancilla");
    if (*anc == q) throw SimError(Err::SameQubit, "ancilla equals target");
    if (owner(q) != owner(*anc) || owner(q) == kInTransit)
      throw SimError(Err::NotOwner, "magic across parties");
    std::uint64_t ab = 1ull << pos_of(*anc, "apply_magic");
    if (mass(amps_, ab, 0) < 1.0 - kNormTol)
      throw SimError(Err::NotFresh, "ancilla must be a fresh |0> qubit");
    apply_cnot(q, *anc);
    apply_2q(spec.matrix, pos_of(q, "apply_magic"), pos_of(*anc, "apply_magic"));
  }
  check_norm("apply_magic");
}

double Engine::support_probability(const std::vector<QubitHandle>& qs,
                                   const std::vector<std::vector<int>>& patterns) const {
  std::uint64_t bitmask = 0;
  std::vector<std::uint64_t> bits;
  bits.reserve(qs.size());
  for (auto q : qs) {
    std::uint64_t b = 1ull << pos_of(q, "support_probability");
    bits.push_back(b);
    bitmask |= b;
  }
  double total = 0;
  for (const auto& pat : patterns) {
    if (pat.size() != qs.size())
      throw SimError(Err::BadPattern, "pattern length does not match qubit list");
    std::uint64_t want = 0;
    for (std::size_t i = 0; i < pat.size(); ++i)
      if (pat[i]) want |= bits[i];
    total += mass(amps_, bitmask, want);
  }
  return total;
}

Eigen::VectorXcd Engine::dense() const {
  if (order_.size() > 24) throw SimError(Err::NumericalFailure, "dense view over 24 qubits");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1ll << order_.size());
  for (const auto& [k, a] : amps_) v(static_cast<long>(k)) += a;
  return v;
}

std::vector<QubitHandle> Engine::qubit_order() const {
  std::vector<QubitHandle> v;
  v.reserve(order_.size());
  for (auto id : order_) v.push_back(QubitHandle{id});
  return v;
}

}  // namespace ringsim::qstate
