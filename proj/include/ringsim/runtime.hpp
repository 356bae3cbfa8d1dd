#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "ringsim/ledger.hpp"
#include "ringsim/magic.hpp"
#include "ringsim/message.hpp"
#include "ringsim/qstate.hpp"
#include "ringsim/ring.hpp"
#include "ringsim/task.hpp"
#include "ringsim/trace.hpp"

namespace ringsim::rt {

class Runtime;

// What a blocked receive is willing to consume: per-channel kind masks plus
// an expected stage stamp. Older-stamped messages at the head are drained as
// delivery actions; control kinds (wake-up, terminate, leader-announce, doSB)
// match by kind and round rather than exact stage.
struct ReceiveArm {
  Dir from = Dir::ToPrev;
  std::uint32_t kinds = 0;
};

struct ReceiveSpec {
  ReceiveArm arms[2];
  int n_arms = 0;
  Stamp expected{};
  bool any_stamp = false;     // relay mode: accept listed kinds regardless of stamp
  bool hunger_exits = false;  // think-mode: a set hunger flag completes the wait

  ReceiveSpec& arm(Dir from, std::uint32_t kinds_mask) {
    arms[n_arms++] = {from, kinds_mask};
    return *this;
  }
  const ReceiveArm* arm_for(Dir from) const {
    for (int i = 0; i < n_arms; ++i)
      if (arms[i].from == from) return &arms[i];
    return nullptr;
  }
};

struct PendingAction {
  enum class Kind { None, Local, Send, TryLift, PutDown, Eat, Receive };
  Kind kind = Kind::None;
  const char* note = "";
  Dir dir = Dir::ToNext;
  Message msg{};
  Side side = Side::Left;
  ReceiveSpec spec{};
  // results
  bool lift_ok = false;
  Message received{};
  bool woke_by_hunger = false;
};

struct Party {
  int index = 0;
  Task<void> root;
  std::coroutine_handle<> resume_point;
  PendingAction pending;
  bool asleep = false;
  bool done = false;
  RegisterFile regs;
  std::int32_t round = 0;

  // Protocol outputs read by the harness after the run.
  std::optional<int> out_g;
  std::optional<int> out_leader;
  std::optional<int> out_h;
  std::optional<int> out_bound;

  int failed_lifts_window = 0;  // failed lifts before the first eat in the run
  int eats = 0;
};

enum class Outcome { Completed, Deadlock, BudgetExceeded, UnsupportedMagic };
inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Completed: return "Completed";
    case Outcome::Deadlock: return "Deadlock";
    case Outcome::BudgetExceeded: return "BudgetExceeded";
    case Outcome::UnsupportedMagic: return "UnsupportedMagic";
  }
  return "?";
}

// Scheduler candidate: one runnable atomic action. Slot 0 is the party's
// local action (compute step or sleep-enter); slots 1/2 consume the head of
// the channel arriving from the previous/next neighbor.
struct Candidate {
  int party;
  int slot;
  friend bool operator==(Candidate a, Candidate b) { return a.party == b.party && a.slot == b.slot; }
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual Candidate pick(const std::vector<Candidate>& cs, const Runtime& rt) = 0;
  virtual bool respects_fairness() const { return true; }
};

std::unique_ptr<Policy> make_round_robin();
std::unique_ptr<Policy> make_seeded_random(std::uint64_t seed);
std::unique_ptr<Policy> make_starve(int target, std::uint64_t seed);
std::unique_ptr<Policy> make_channel_delay(int channel_id, std::uint64_t seed);
std::unique_ptr<Policy> make_replay(std::vector<Candidate> script);

struct HungerEvent {
  std::uint64_t at_step;
  int party;
};

enum class CompletionRule { AllDone, HungerServed };

struct RunResult {
  Outcome outcome = Outcome::Completed;
  std::string failure_note;  // e.g. the unsupported-magic validation note
};

class Runtime {
 public:
  Runtime(int n, OutcomeSource& outcomes, std::unique_ptr<Policy> policy);

  void add_party(std::function<Task<void>(Runtime&, Party&)> factory);
  void set_hunger_schedule(std::vector<HungerEvent> evs);
  void set_budget(std::uint64_t b) { budget_ = b; }
  void set_completion(CompletionRule r) { completion_ = r; }
  void set_recording(bool on) { trace_.recording = on; }
  void set_record_choices(bool on) { record_choices_ = on; }
  void set_fairness_bound(std::uint64_t b) { fairness_bound_ = b; }
  void set_forced_coin(int bit) { forced_coin_ = bit; }
  void set_coin_seed(std::uint64_t s) { coin_rng_.seed(s); }

  RunResult run();

  // --- accessors used by protocol code and the verifier ---
  int n() const { return n_; }
  SharedRing& ring() { return ring_; }
  const SharedRing& ring() const { return ring_; }
  qstate::Engine& engine() { return engine_; }
  const qstate::Engine& engine() const { return engine_; }
  OutcomeSource& outcomes() { return *outcomes_; }
  const qstate::MagicUnitarySpec& magic(int m);
  const ExecutionTrace& trace() const { return trace_; }
  const CostLedger& ledger() const { return ledger_; }
  CostLedger& ledger() { return ledger_; }
  Party& party(int i) { return *parties_[i]; }
  const Party& party(int i) const { return *parties_[i]; }
  const std::vector<Candidate>& choice_log() const { return choice_log_; }
  std::uint64_t now() const { return ledger_.time; }
  int coin_flip();

  // Called by the perform step for hunger injection (also exposed for tests).
  void inject_hunger(int p);

 private:
  friend struct AwaitBase;

  std::vector<Candidate> enumerate() const;
  void perform(Candidate c);
  void consume(Party& p, Dir from);
  void do_resume(Party& p);
  void enqueue(int sender, Dir d, Message m);
  void finish_ledger();
  bool complete() const;
  std::uint64_t next_pending_hunger() const;

  int n_;
  SharedRing ring_;
  qstate::Engine engine_;
  OutcomeSource* outcomes_;
  std::unique_ptr<Policy> policy_;
  std::vector<std::unique_ptr<Party>> parties_;
  ExecutionTrace trace_;
  CostLedger ledger_;
  std::vector<HungerEvent> hunger_;
  std::size_t next_hunger_ = 0;
  std::uint64_t budget_ = 1'000'000;
  std::uint64_t fairness_bound_ = 0;  // 0 = default 4*(2n+n)
  CompletionRule completion_ = CompletionRule::AllDone;
  std::map<int, qstate::MagicUnitarySpec> magic_cache_;
  std::unordered_map<int, std::uint64_t> ages_;
  bool record_choices_ = false;
  std::vector<Candidate> choice_log_;
  std::mt19937_64 coin_rng_{0x5eedc015ULL};
  std::optional<int> forced_coin_;
};

// ---- awaitables -----------------------------------------------------------

struct AwaitBase {
  Party* p;
  PendingAction req;
  bool await_ready() const noexcept { return false; }
  void await_suspend(std::coroutine_handle<> h) {
    p->pending = std::move(req);
    p->resume_point = h;
  }
};

struct LocalAwait : AwaitBase {
  void await_resume() const noexcept {}
};
struct SendAwait : AwaitBase {
  void await_resume() const noexcept {}
};
struct LiftAwait : AwaitBase {
  bool await_resume() const noexcept { return p->pending.lift_ok; }
};
struct RecvAwait : AwaitBase {
  Message await_resume() const noexcept { return p->pending.received; }
};
struct ThinkAwait : AwaitBase {
  // true if woken by hunger, false if by an accepted message (in .received)
  bool await_resume() const noexcept { return p->pending.woke_by_hunger; }
};

// RAII classical register, charged against the party's memory ledger.
class Reg {
 public:
  Reg(Party& p, int bits) : f_(&p.regs), bits_(bits) { f_->alloc(bits_); }
  ~Reg() {
    if (f_) f_->free(bits_);
  }
  Reg(const Reg&) = delete;
  Reg& operator=(const Reg&) = delete;
  Reg(Reg&& o) noexcept : v(o.v), f_(std::exchange(o.f_, nullptr)), bits_(o.bits_) {}

  std::int64_t v = 0;

 private:
  RegisterFile* f_;
  int bits_;
};

// Per-party view used by protocol coroutines.
class Ctx {
 public:
  Ctx(Runtime& rt, Party& me) : rt_(&rt), me_(&me) {}

  Runtime& rt() { return *rt_; }
  Party& me() { return *me_; }
  int self() const { return me_->index; }

  LocalAwait local(const char* note) {
    return {{me_, make(PendingAction::Kind::Local, note)}};
  }
  SendAwait send(Dir d, Message m, const char* note = "") {
    auto pa = make(PendingAction::Kind::Send, note);
    pa.dir = d;
    pa.msg = std::move(m);
    return {{me_, std::move(pa)}};
  }
  RecvAwait recv(ReceiveSpec spec, const char* note = "") {
    auto pa = make(PendingAction::Kind::Receive, note);
    pa.spec = std::move(spec);
    return {{me_, std::move(pa)}};
  }
  ThinkAwait think_wait(ReceiveSpec spec, const char* note = "think") {
    auto pa = make(PendingAction::Kind::Receive, note);
    pa.spec = std::move(spec);
    pa.spec.hunger_exits = true;
    return {{me_, std::move(pa)}};
  }
  LiftAwait try_lift(Side s, const char* note = "") {
    auto pa = make(PendingAction::Kind::TryLift, note);
    pa.side = s;
    return {{me_, std::move(pa)}};
  }
  LocalAwait put_down(const char* note = "put down") {
    return {{me_, make(PendingAction::Kind::PutDown, note)}};
  }
  LocalAwait eat(const char* note = "eat") {
    return {{me_, make(PendingAction::Kind::Eat, note)}};
  }

  Reg reg(int bits) { return Reg(*me_, bits); }

 private:
  PendingAction make(PendingAction::Kind k, const char* note) {
    PendingAction pa;
    pa.kind = k;
    pa.note = note;
    return pa;
  }
  Runtime* rt_;
  Party* me_;
};

}  // namespace ringsim::rt
