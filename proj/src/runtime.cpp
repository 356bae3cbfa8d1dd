#include "ringsim/runtime.hpp"

#include <algorithm>
#include <limits>

namespace ringsim::rt {

namespace {

class RoundRobinPolicy final : public Policy {
 public:
  Candidate pick(const std::vector<Candidate>& cs, const Runtime& rt) override {
    int n = rt.n();
    for (int off = 0; off < n; ++off) {
      int p = (cursor_ + off) % n;
      for (const auto& c : cs)
        if (c.party == p) {
          cursor_ = (p + 1) % n;
          return c;
        }
    }
    return cs.front();
  }

 private:
  int cursor_ = 0;
};

class SeededRandomPolicy final : public Policy {
 public:
  explicit SeededRandomPolicy(std::uint64_t seed) : rng_(seed) {}
  Candidate pick(const std::vector<Candidate>& cs, const Runtime&) override {
    return cs[rng_() % cs.size()];
  }

 private:
  std::mt19937_64 rng_;
};

// Defers every action of one party until the fairness bound forces it.
class StarvePolicy final : public Policy {
 public:
  StarvePolicy(int target, std::uint64_t seed) : target_(target), rng_(seed) {}
  Candidate pick(const std::vector<Candidate>& cs, const Runtime&) override {
    std::vector<Candidate> rest;
    for (const auto& c : cs)
      if (c.party != target_) rest.push_back(c);
    if (rest.empty()) return cs.front();
    return rest[rng_() % rest.size()];
  }

 private:
  int target_;
  std::mt19937_64 rng_;
};

// Defers deliveries from one directed channel as long as fairness allows.
class ChannelDelayPolicy final : public Policy {
 public:
  ChannelDelayPolicy(int channel, std::uint64_t seed) : channel_(channel), rng_(seed) {}
  Candidate pick(const std::vector<Candidate>& cs, const Runtime& rt) override {
    std::vector<Candidate> rest;
    for (const auto& c : cs) {
      if (c.slot != 0) {
        Dir from = c.slot == 1 ? Dir::ToPrev : Dir::ToNext;
        if (rt.ring().in_channel_id(c.party, from) == channel_) continue;
      }
      rest.push_back(c);
    }
    if (rest.empty()) return cs.front();
    return rest[rng_() % rest.size()];
  }

 private:
  int channel_;
  std::mt19937_64 rng_;
};

class ReplayPolicy final : public Policy {
 public:
  explicit ReplayPolicy(std::vector<Candidate> script) : script_(std::move(script)) {}
  Candidate pick(const std::vector<Candidate>& cs, const Runtime&) override {
    if (idx_ >= script_.size())
      throw SimError(Err::ProtocolViolation, "replay script exhausted");
    Candidate want = script_[idx_++];
    for (const auto& c : cs)
      if (c == want) return c;
    throw SimError(Err::ProtocolViolation, "replayed choice not runnable");
  }
  bool respects_fairness() const override { return false; }

 private:
  std::vector<Candidate> script_;
  std::size_t idx_ = 0;
};

bool is_control(MsgKind k) {
  return k == MsgKind::WakeUp || k == MsgKind::Terminate || k == MsgKind::LeaderAnnounce ||
         k == MsgKind::DoSB;
}

}  // namespace

std::unique_ptr<Policy> make_round_robin() { return std::make_unique<RoundRobinPolicy>(); }
std::unique_ptr<Policy> make_seeded_random(std::uint64_t seed) {
  return std::make_unique<SeededRandomPolicy>(seed);
}
std::unique_ptr<Policy> make_starve(int target, std::uint64_t seed) {
  return std::make_unique<StarvePolicy>(target, seed);
}
std::unique_ptr<Policy> make_channel_delay(int channel, std::uint64_t seed) {
  return std::make_unique<ChannelDelayPolicy>(channel, seed);
}
std::unique_ptr<Policy> make_replay(std::vector<Candidate> script) {
  return std::make_unique<ReplayPolicy>(std::move(script));
}

Runtime::Runtime(int n, OutcomeSource& outcomes, std::unique_ptr<Policy> policy)
    : n_(n), ring_(n), outcomes_(&outcomes), policy_(std::move(policy)) {
  ledger_.mem_bits_max.assign(n, 0);
  ledger_.qubits_max.assign(n, 0);
  ledger_.failed_lifts_before_first_eat.assign(n, 0);
}

void Runtime::add_party(std::function<Task<void>(Runtime&, Party&)> factory) {
  auto p = std::make_unique<Party>();
  p->index = static_cast<int>(parties_.size());
  parties_.push_back(std::move(p));
  Party& ref = *parties_.back();
  ref.root = factory(*this, ref);
}

void Runtime::set_hunger_schedule(std::vector<HungerEvent> evs) {
  std::sort(evs.begin(), evs.end(), [](const HungerEvent& a, const HungerEvent& b) {
    return a.at_step != b.at_step ? a.at_step < b.at_step : a.party < b.party;
  });
  hunger_ = std::move(evs);
}

const qstate::MagicUnitarySpec& Runtime::magic(int m) {
  auto it = magic_cache_.find(m);
  if (it == magic_cache_.end()) it = magic_cache_.emplace(m, qstate::build_magic(m)).first;
  return it->second;
}

int Runtime::coin_flip() {
  if (forced_coin_) return *forced_coin_;
  return static_cast<int>(coin_rng_() & 1);
}

void Runtime::inject_hunger(int p) {
  if (ring_.hungry(p))
    throw SimError(Err::AlreadyHungry, "party " + std::to_string(p) + " already hungry");
  ring_.set_hungry(p, true);
  parties_[p]->asleep = false;
  if (!ledger_.first_hunger_step) ledger_.first_hunger_step = ledger_.time;
  trace_.push({ledger_.time, p, Act::Hunger, 0, 0, -1, -1, "gets hungry"});
}

void Runtime::do_resume(Party& p) {
  auto h = p.resume_point;
  p.resume_point = {};
  p.pending.kind = PendingAction::Kind::None;
  h.resume();
  if (p.root.done()) {
    p.done = true;
    p.root.rethrow_if_failed();
  }
}

std::vector<Candidate> Runtime::enumerate() const {
  std::vector<Candidate> cs;
  for (int i = 0; i < n_; ++i) {
    const Party& p = *parties_[i];
    if (p.done || p.asleep) continue;
    if (p.pending.kind == PendingAction::Kind::Receive) {
      const auto& spec = p.pending.spec;
      bool any_channel = false;
      for (int slot : {1, 2}) {
        Dir from = slot == 1 ? Dir::ToPrev : Dir::ToNext;
        if (!spec.arm_for(from)) continue;
        if (!ring_.in_channel(i, from).q.empty()) {
          cs.push_back({i, slot});
          any_channel = true;
        }
      }
      if (!any_channel) {
        // Hunger completes a think-wait; otherwise the local action is a
        // sleep-enter.
        cs.push_back({i, 0});
      }
    } else if (p.pending.kind != PendingAction::Kind::None) {
      cs.push_back({i, 0});
    }
  }
  return cs;
}

void Runtime::enqueue(int sender, Dir d, Message m) {
  Channel& ch = ring_.out_channel(sender, d);
  m.seq = ch.sent++;
  int receiver = d == Dir::ToNext ? ring_.next(sender) : ring_.prev(sender);
  if (m.qubit) {
    engine_.set_in_transit(*m.qubit, sender);
    ledger_.qubits_sent += 1;
  } else {
    ledger_.classical_bits += m.size_bits;
  }
  ch.q.push_back(std::move(m));
  parties_[receiver]->asleep = false;  // every message carries a wake-up flag
}

void Runtime::consume(Party& p, Dir from) {
  Channel& ch = ring_.in_channel(p.index, from);
  Message msg = ch.q.front();
  const ReceiveSpec& spec = p.pending.spec;
  const ReceiveArm* arm = spec.arm_for(from);
  std::uint32_t mask = arm ? arm->kinds : 0;
  bool masked = (mask & kind_bit(msg.kind)) != 0;
  int chan_id = ring_.in_channel_id(p.index, from);

  auto drain = [&] {
    ch.q.pop_front();
    ch.delivered++;
    trace_.push({ledger_.time, p.index, Act::Drain, static_cast<int>(msg.kind), msg.payload,
                 chan_id, static_cast<std::int64_t>(msg.seq), p.pending.note});
  };
  auto deliver = [&] {
    ch.q.pop_front();
    ch.delivered++;
    if (msg.qubit) engine_.deliver(*msg.qubit, p.index);
    trace_.push({ledger_.time, p.index, Act::Recv, static_cast<int>(msg.kind), msg.payload,
                 chan_id, static_cast<std::int64_t>(msg.seq), p.pending.note});
    p.pending.received = msg;
    p.pending.woke_by_hunger = false;
    do_resume(p);
  };

  if (is_control(msg.kind)) {
    bool round_ok = msg.kind == MsgKind::WakeUp || msg.kind == MsgKind::DoSB ||
                    msg.stamp.round == p.round;
    if (masked && round_ok) {
      deliver();
    } else if (msg.kind == MsgKind::WakeUp || msg.kind == MsgKind::DoSB ||
               msg.stamp < spec.expected) {
      drain();
    } else {
      throw SimError(Err::ProtocolViolation,
                     std::string("unexpected ") + kind_name(msg.kind) + " at party " +
                         std::to_string(p.index));
    }
    return;
  }

  if (masked && (spec.any_stamp || msg.stamp == spec.expected)) {
    deliver();
    return;
  }
  if (msg.stamp < spec.expected && !msg.qubit) {
    drain();
    return;
  }
  throw SimError(Err::ProtocolViolation,
                 std::string("party ") + std::to_string(p.index) + " cannot handle " +
                     kind_name(msg.kind) + " while waiting (" + p.pending.note + ")");
}

void Runtime::perform(Candidate c) {
  Party& p = *parties_[c.party];
  if (c.slot != 0) {
    consume(p, c.slot == 1 ? Dir::ToPrev : Dir::ToNext);
    return;
  }
  switch (p.pending.kind) {
    case PendingAction::Kind::Receive: {
      if (p.pending.spec.hunger_exits && ring_.hungry(p.index)) {
        trace_.push({ledger_.time, p.index, Act::Local, 0, 0, -1, -1, "exit think loop"});
        p.pending.woke_by_hunger = true;
        do_resume(p);
      } else {
        p.asleep = true;
        trace_.push({ledger_.time, p.index, Act::SleepEnter, 0, 0, -1, -1, p.pending.note});
      }
      return;
    }
    case PendingAction::Kind::Local: {
      trace_.push({ledger_.time, p.index, Act::Local, 0, 0, -1, -1, p.pending.note});
      do_resume(p);
      return;
    }
    case PendingAction::Kind::Send: {
      Message m = p.pending.msg;
      Dir d = p.pending.dir;
      Channel& ch = ring_.out_channel(p.index, d);
      trace_.push({ledger_.time, p.index, Act::Send, static_cast<int>(m.kind), m.payload,
                   d == Dir::ToNext ? 2 * p.index : 2 * ring_.prev(p.index) + 1,
                   static_cast<std::int64_t>(ch.sent), p.pending.note});
      enqueue(p.index, d, std::move(m));
      do_resume(p);
      return;
    }
    case PendingAction::Kind::TryLift: {
      bool ok = ring_.try_lift(p.index, p.pending.side);
      if (!ok && !ledger_.first_eat_step) p.failed_lifts_window++;
      trace_.push({ledger_.time, p.index, Act::TryLift, ring_.stick(p.index, p.pending.side),
                   ok ? 1 : 0, -1, -1, p.pending.note});
      p.pending.lift_ok = ok;
      do_resume(p);
      return;
    }
    case PendingAction::Kind::PutDown: {
      if (ring_.held_count(p.index) == 0)
        throw SimError(Err::NoChopstick, "put_down with no chopstick held");
      auto released = ring_.put_down(p.index);
      trace_.push({ledger_.time, p.index, Act::PutDown, released.size() > 0 ? released[0] : -1,
                   released.size() > 1 ? released[1] : -1, -1, -1, p.pending.note});
      // Wake-up calls to both neighbors; spurious ones are drained.
      for (Dir d : {Dir::ToNext, Dir::ToPrev}) {
        Message w{MsgKind::WakeUp, 0, {p.round, 0, 0}, 1, std::nullopt, 0};
        enqueue(p.index, d, std::move(w));
      }
      do_resume(p);
      return;
    }
    case PendingAction::Kind::Eat: {
      ring_.set_hungry(p.index, false);
      ring_.record_eat(p.index);
      p.eats++;
      if (!ledger_.first_eat_step) ledger_.first_eat_step = ledger_.time;
      trace_.push({ledger_.time, p.index, Act::Eat, 0, 0, -1, -1, p.pending.note});
      do_resume(p);
      return;
    }
    case PendingAction::Kind::None:
      throw SimError(Err::ProtocolViolation, "scheduled a party with no pending action");
  }
}

bool Runtime::complete() const {
  if (completion_ == CompletionRule::AllDone) {
    for (const auto& p : parties_)
      if (!p->done) return false;
    return true;
  }
  // HungerServed: all scheduled hunger delivered and nobody left hungry.
  if (next_hunger_ < hunger_.size()) return false;
  for (int i = 0; i < n_; ++i)
    if (ring_.hungry(i)) return false;
  return true;
}

std::uint64_t Runtime::next_pending_hunger() const {
  return next_hunger_ < hunger_.size() ? hunger_[next_hunger_].at_step
                                       : std::numeric_limits<std::uint64_t>::max();
}

void Runtime::finish_ledger() {
  for (int i = 0; i < n_; ++i) {
    ledger_.mem_bits_max[i] = parties_[i]->regs.high_water();
    ledger_.qubits_max[i] = engine_.high_water(i);
    ledger_.failed_lifts_before_first_eat[i] = parties_[i]->failed_lifts_window;
  }
}

RunResult Runtime::run() {
  if (fairness_bound_ == 0) fairness_bound_ = 4ull * (2 * n_ + n_);
  // Bootstrap: run every party to its first action point.
  for (auto& p : parties_) {
    p->resume_point = p->root.handle();
    try {
      do_resume(*p);
    } catch (const SimError& e) {
      finish_ledger();
      if (e.code() == Err::UnsupportedMagic) return {Outcome::UnsupportedMagic, e.what()};
      throw;
    }
  }
  while (true) {
    if (complete()) {
      finish_ledger();
      return {Outcome::Completed, ""};
    }
    if (ledger_.time >= budget_) {
      finish_ledger();
      return {Outcome::BudgetExceeded, ""};
    }
    // Inject hunger events scheduled at or before the current step.
    while (next_hunger_ < hunger_.size() && hunger_[next_hunger_].at_step <= ledger_.time) {
      inject_hunger(hunger_[next_hunger_].party);
      ++next_hunger_;
    }
    auto cs = enumerate();
    if (cs.empty()) {
      if (next_hunger_ < hunger_.size()) {
        // Idle system waiting on the adversary's next hunger trigger.
        ledger_.time = std::max(ledger_.time + 1, next_pending_hunger());
        continue;
      }
      finish_ledger();
      bool anyone_hungry = false;
      for (int i = 0; i < n_; ++i) anyone_hungry |= ring_.hungry(i);
      if (completion_ == CompletionRule::HungerServed && !anyone_hungry)
        return {Outcome::Completed, ""};
      return {Outcome::Deadlock, anyone_hungry ? "quiescent with hungry parties" : "quiescent"};
    }
    // Fairness: force the oldest starved candidate past the bound.
    Candidate chosen{-1, -1};
    bool forced = false;
    if (policy_->respects_fairness()) {
      std::uint64_t worst_age = 0;
      for (const auto& c : cs) {
        int key = c.party * 3 + c.slot;
        std::uint64_t age = ++ages_[key];
        if (age >= fairness_bound_ && age > worst_age) {
          worst_age = age;
          chosen = c;
          forced = true;
        }
      }
      // Ages of absent candidates reset.
      for (auto it = ages_.begin(); it != ages_.end();) {
        int key = it->first;
        bool present = false;
        for (const auto& c : cs)
          if (c.party * 3 + c.slot == key) present = true;
        if (!present)
          it = ages_.erase(it);
        else
          ++it;
      }
    }
    if (!forced) chosen = policy_->pick(cs, *this);
    ages_.erase(chosen.party * 3 + chosen.slot);
    if (record_choices_) choice_log_.push_back(chosen);
    try {
      perform(chosen);
    } catch (const SimError& e) {
      finish_ledger();
      if (e.code() == Err::UnsupportedMagic) return {Outcome::UnsupportedMagic, e.what()};
      throw;
    }
    ledger_.time += 1;
  }
}

}  // namespace ringsim::rt
