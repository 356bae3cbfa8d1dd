#include "ringsim/protocols.hpp"

#include <algorithm>

namespace ringsim::proto {

using namespace ringsim::rt;
using qstate::QubitHandle;

namespace {

constexpr std::uint32_t kB(MsgKind k) { return kind_bit(k); }

Message bit_msg(MsgKind k, int payload, Stamp st, int bits = 1) {
  Message m;
  m.kind = k;
  m.payload = payload;
  m.stamp = st;
  m.size_bits = bits;
  return m;
}

Message qubit_msg(QubitHandle q, Stamp st) {
  Message m;
  m.kind = MsgKind::Qubit;
  m.stamp = st;
  m.qubit = q;
  return m;
}

// ---- counted broadcast waves ----------------------------------------------
//
// Send the party's own value, then repeatedly consume/forward until `target`
// values (own included) have been seen. Every receipt is forwarded before the
// exit checks, matching the pseudocode's line order.

enum class Fold { None, Ones, Max, Min };

struct WaveParams {
  Dir send_dir = Dir::ToPrev;
  MsgKind kind = MsgKind::XBit;
  int own = 0;
  int payload_bits = 1;
  long target = 0;
  Stamp stamp{};
  bool abortable = false;       // terminate aborts (inside a DP' round)
  bool exit_on_one = false;     // x-wave early exit
  bool exit_on_diff = false;    // g-wave early exit
  Fold fold = Fold::None;
  bool forward_fold = false;    // h-compare forwards the running minimum
};

struct WaveOut {
  bool terminated = false;
  bool early = false;
  int early_payload = 0;
  long fold = 0;
};

Task<WaveOut> counted_wave(Ctx ctx, WaveParams p) {
  WaveOut out;
  out.fold = p.own;
  if (p.fold == Fold::Ones) out.fold = p.own ? 1 : 0;
  co_await ctx.send(p.send_dir, bit_msg(p.kind, p.own, p.stamp, p.payload_bits), "wave: send own");
  Reg c = ctx.reg(bits_for_range(p.target + 1));
  co_await ctx.local("wave: init counter");
  c.v = 1;
  while (c.v < p.target) {
    ReceiveSpec spec;
    spec.expected = p.stamp;
    spec.arm(opposite(p.send_dir), kB(p.kind));
    if (p.abortable) spec.arm(Dir::ToPrev, kB(MsgKind::Terminate));
    Message m = co_await ctx.recv(spec, "wave: receive");
    if (m.kind == MsgKind::Terminate) {
      out.terminated = true;
      co_return out;
    }
    co_await ctx.local("wave: count");
    c.v += 1;
    switch (p.fold) {
      case Fold::None: break;
      case Fold::Ones: out.fold += m.payload ? 1 : 0; break;
      case Fold::Max: out.fold = std::max<long>(out.fold, m.payload); break;
      case Fold::Min: out.fold = std::min<long>(out.fold, m.payload); break;
    }
    int fwd = p.forward_fold ? static_cast<int>(out.fold) : m.payload;
    co_await ctx.send(p.send_dir, bit_msg(p.kind, fwd, p.stamp, p.payload_bits), "wave: forward");
    if (p.exit_on_one && m.payload == 1) {
      out.early = true;
      out.early_payload = m.payload;
      co_return out;
    }
    if (p.exit_on_diff && m.payload != p.own) {
      out.early = true;
      out.early_payload = m.payload;
      co_return out;
    }
  }
  co_return out;
}

// ---- symmetry breaking (Algorithms 2 and 3) --------------------------------

struct SbResult {
  int g = 0;
  int bound = 1;
  bool terminated = false;
};

// One SB run for m parties (the party's own view). With `bounded`, phase five
// counts group bits to the bound and reruns with bound-1 while they all agree.
// Inside a DP' round the whole protocol can be aborted by a terminate wave.
Task<SbResult> run_sb(Ctx ctx, int m0, bool bounded, int round, bool abortable) {
  auto& rt = ctx.rt();
  auto& eng = rt.engine();
  int self = ctx.self();
  Reg depth_reg = ctx.reg(bits_for_range(m0 + 1));
  Reg g_reg = ctx.reg(1);
  Reg x_reg = ctx.reg(1);
  int m = m0;
  int depth = 0;
  while (true) {
    if (m == 1) co_return SbResult{1, 1, false};

    // Phase one: create the pair, send one half clockwise, check equality.
    Stamp st1{round, depth, wave::kQubit};
    co_await ctx.local("create |00>+|11>");
    auto pair = eng.alloc(self, 2);
    QubitHandle mine = pair[0], other = pair[1];
    eng.prepare_pair(mine, other);
    co_await ctx.send(Dir::ToNext, qubit_msg(other, st1), "send pair half");
    ReceiveSpec qspec;
    qspec.expected = st1;
    qspec.arm(Dir::ToPrev, kB(MsgKind::Qubit));
    Message qm = co_await ctx.recv(qspec, "receive pair half");
    QubitHandle in = *qm.qubit;
    co_await ctx.local("equality check");
    x_reg.v = eng.measure_parity(mine, in, rt.outcomes());

    // Phase two: broadcast the x bits counter-clockwise, counting to m.
    WaveParams xw;
    xw.send_dir = Dir::ToPrev;
    xw.kind = MsgKind::XBit;
    xw.own = static_cast<int>(x_reg.v);
    xw.target = m;
    xw.stamp = {round, depth, wave::kX};
    xw.abortable = abortable;
    xw.exit_on_one = true;
    WaveOut xo = co_await counted_wave(ctx, xw);
    if (xo.terminated) {
      co_await ctx.local("abort: discard qubits");
      eng.measure(mine, rt.outcomes());
      eng.measure(in, rt.outcomes());
      co_return SbResult{0, m, true};
    }
    bool all_equal = !xo.early;

    int pair_val = 0;
    bool odd_magic = false;
    if (all_equal) {
      // Phase three: fold the received half back to |0>, then the magic
      // unitary on the kept qubit.
      co_await ctx.local("map |11> to |10>");
      eng.apply_cnot(mine, in);
      const auto& spec = rt.magic(m);
      if (spec.arity == 1) {
        co_await ctx.local("apply magic unitary");
        eng.apply_magic(spec, mine, std::nullopt);
        co_await ctx.local("measure group bit");
        g_reg.v = eng.measure(mine, rt.outcomes());
      } else {
        odd_magic = true;
        co_await ctx.local("allocate ancilla");
        QubitHandle anc = eng.alloc(self, 1)[0];
        co_await ctx.local("apply magic unitary");
        eng.apply_magic(spec, mine, anc);
        co_await ctx.local("measure pair");
        int hi = eng.measure(mine, rt.outcomes());
        int lo = eng.measure(anc, rt.outcomes());
        pair_val = 2 * hi + lo;
      }
      co_await ctx.local("release |0> half");
      eng.release(in);
    } else {
      // Phase four directly: measure the kept qubit, discard the other.
      co_await ctx.local("measure group bit");
      g_reg.v = eng.measure(mine, rt.outcomes());
      co_await ctx.local("discard received half");
      eng.measure(in, rt.outcomes());
    }

    if (odd_magic) {
      // The zero-support guarantee for odd m covers the two-bit pair values,
      // not the first bit alone; a counted broadcast of the pair values picks
      // the group deterministically (g = 1 iff own value equals the maximum).
      Reg pv = ctx.reg(2);
      pv.v = pair_val;
      WaveParams pw;
      pw.send_dir = Dir::ToPrev;
      pw.kind = MsgKind::PairVal;
      pw.own = pair_val;
      pw.payload_bits = 2;
      pw.target = m;
      pw.stamp = {round, depth, wave::kPairVal};
      pw.abortable = abortable;
      pw.fold = Fold::Max;
      WaveOut po = co_await counted_wave(ctx, pw);
      if (po.terminated) co_return SbResult{0, m, true};
      co_await ctx.local("group from pair values");
      g_reg.v = (pair_val == po.fold) ? 1 : 0;
    }

    if (!bounded) co_return SbResult{static_cast<int>(g_reg.v), m, false};

    // Phase five (bounded): broadcast group bits; if all m agree the bound
    // was too high, rerun with bound m-1.
    WaveParams gw;
    gw.send_dir = Dir::ToPrev;
    gw.kind = MsgKind::GBit;
    gw.own = static_cast<int>(g_reg.v);
    gw.target = m;
    gw.stamp = {round, depth, wave::kG};
    gw.abortable = abortable;
    gw.exit_on_diff = true;
    WaveOut go = co_await counted_wave(ctx, gw);
    if (go.terminated) co_return SbResult{0, m, true};
    if (go.early) co_return SbResult{static_cast<int>(g_reg.v), m, false};
    co_await ctx.local("bound too high, rerun");
    m -= 1;
    depth += 1;
    depth_reg.v = depth;
  }
}

// ---- DP' (Algorithms 4-6, 8) ------------------------------------------------

enum class Acq { Success, Failure, Terminated };

Stamp lift_stamp(int round) { return {round, wave::kPostSb, wave::kLift}; }

// One lift attempt. The right chopstick is always lifted directly; the left
// one goes through the eliminated-neighbor relay chain when needed.
Task<Acq> acquire(Ctx ctx, Side side, int round) {
  auto& ring = ctx.rt().ring();
  int self = ctx.self();
  if (side == Side::Right || ring.eligible(ring.next(self))) {
    bool ok = co_await ctx.try_lift(side, side == Side::Left ? "lift left" : "lift right");
    co_return ok ? Acq::Success : Acq::Failure;
  }
  co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::LiftLeft, 0, lift_stamp(round)),
                    "delegate left lift");
  ReceiveSpec spec;
  spec.expected = lift_stamp(round);
  spec.arm(Dir::ToNext, kB(MsgKind::LiftResult));
  spec.arm(Dir::ToPrev, kB(MsgKind::Terminate));
  Message m = co_await ctx.recv(spec, "await lift result");
  if (m.kind == MsgKind::Terminate) co_return Acq::Terminated;
  co_return m.payload ? Acq::Success : Acq::Failure;
}

Task<void> pass_terminate(Ctx ctx) {
  co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::Terminate, 0, lift_stamp(ctx.me().round)),
                    "pass terminate");
}

// Relay loop for eliminated parties: forwards SB traffic and termination,
// serves lift-left requests for its master.
struct RelayOut {
  bool announced = false;
};

Task<RelayOut> relay_loop(Ctx ctx, int round) {
  auto& ring = ctx.rt().ring();
  int self = ctx.self();
  while (true) {
    ReceiveSpec spec;
    spec.expected = {round, 0, 0};
    spec.any_stamp = true;
    spec.arm(Dir::ToPrev, kB(MsgKind::Qubit) | kB(MsgKind::LiftLeft) | kB(MsgKind::Terminate) |
                              kB(MsgKind::LeaderAnnounce));
    spec.arm(Dir::ToNext,
             kB(MsgKind::XBit) | kB(MsgKind::PairVal) | kB(MsgKind::GBit) | kB(MsgKind::LiftResult));
    Message m = co_await ctx.recv(spec, "relay");
    switch (m.kind) {
      case MsgKind::Qubit:
        co_await ctx.send(Dir::ToNext, qubit_msg(*m.qubit, m.stamp), "relay qubit");
        break;
      case MsgKind::XBit:
      case MsgKind::PairVal:
      case MsgKind::GBit:
        co_await ctx.send(Dir::ToPrev, bit_msg(m.kind, m.payload, m.stamp, m.size_bits),
                          "relay broadcast bit");
        break;
      case MsgKind::LiftResult:
        co_await ctx.send(Dir::ToPrev, bit_msg(m.kind, m.payload, m.stamp), "relay lift result");
        break;
      case MsgKind::LiftLeft: {
        if (ring.eligible(ring.next(self))) {
          bool ok = co_await ctx.try_lift(Side::Left, "lift for master");
          co_await ctx.send(Dir::ToPrev, bit_msg(MsgKind::LiftResult, ok ? 1 : 0, m.stamp),
                            "report lift");
        } else {
          co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::LiftLeft, 0, m.stamp),
                            "forward lift-left");
        }
        break;
      }
      case MsgKind::Terminate:
        co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::Terminate, 0, m.stamp), "pass terminate");
        co_return RelayOut{false};
      case MsgKind::LeaderAnnounce:
        co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::LeaderAnnounce, 0, m.stamp),
                          "pass leader announce");
        co_return RelayOut{true};
      default:
        throw SimError(Err::ProtocolViolation, "relay got unexpected kind");
    }
  }
}

// Eligible party's contest for n known (Algorithm 5 over Algorithm 1): SB
// among the h eligible parties, then lift both sides with sleep-and-retry;
// two chopsticks mean survival.
Task<int> eligible_known(Ctx ctx, int h, int round) {
  if (h == 1) {
    // Sole survivor: nothing to contest, release the relays.
    co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::Terminate, 0, lift_stamp(round)),
                      "sole survivor terminate");
    co_return 1;
  }
  SbResult sb = co_await run_sb(ctx, h, false, round, true);
  if (sb.terminated) {
    co_await pass_terminate(ctx);
    co_return 0;
  }
  Side first = sb.g == 0 ? Side::Left : Side::Right;
  for (int attempt = 0; attempt < 2; ++attempt) {
    Side side = attempt == 0 ? first : (first == Side::Left ? Side::Right : Side::Left);
    while (true) {
      Acq r = co_await acquire(ctx, side, round);
      if (r == Acq::Success) break;
      if (r == Acq::Terminated) {
        co_await pass_terminate(ctx);
        co_return 0;
      }
      ReceiveSpec spec;
      spec.expected = lift_stamp(round);
      spec.arm(Dir::ToPrev, kB(MsgKind::WakeUp) | kB(MsgKind::Terminate));
      spec.arm(Dir::ToNext, kB(MsgKind::WakeUp));
      Message m = co_await ctx.recv(spec, "failed lift, sleep");
      if (m.kind == MsgKind::Terminate) {
        co_await pass_terminate(ctx);
        co_return 0;
      }
    }
  }
  co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::Terminate, 0, lift_stamp(round)),
                    "got both chopsticks");
  co_return 1;
}

// Bounded variant (Algorithm 8): any failed lift self-eliminates without
// sending terminate; SB reaching bound 1 declares this party the leader.
struct BoundedEligibleOut {
  int l = 0;
  bool declared = false;
  int sb_bound = 0;
};

Task<BoundedEligibleOut> eligible_bounded(Ctx ctx, int bound, int round) {
  SbResult sb = co_await run_sb(ctx, bound, true, round, true);
  if (sb.terminated) {
    co_await pass_terminate(ctx);
    co_return BoundedEligibleOut{0, false, sb.bound};
  }
  if (sb.bound == 1) {
    co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::LeaderAnnounce, 0, lift_stamp(round)),
                      "declare leader");
    co_return BoundedEligibleOut{1, true, 1};
  }
  for (int alpha = 0; alpha <= 1; ++alpha) {
    Side side = sb.g == alpha ? Side::Left : Side::Right;
    Acq r = co_await acquire(ctx, side, round);
    if (r == Acq::Terminated) {
      co_await pass_terminate(ctx);
      co_return BoundedEligibleOut{0, false, sb.bound};
    }
    if (r == Acq::Failure) {
      while (true) {
        ReceiveSpec spec;
        spec.expected = lift_stamp(round);
        spec.arm(Dir::ToPrev, kB(MsgKind::WakeUp) | kB(MsgKind::Terminate));
        spec.arm(Dir::ToNext, kB(MsgKind::WakeUp));
        Message m = co_await ctx.recv(spec, "self-eliminated, await terminate");
        if (m.kind == MsgKind::Terminate) {
          co_await pass_terminate(ctx);
          co_return BoundedEligibleOut{0, false, sb.bound};
        }
      }
    }
  }
  co_await ctx.send(Dir::ToNext, bit_msg(MsgKind::Terminate, 0, lift_stamp(round)),
                    "got both chopsticks");
  co_return BoundedEligibleOut{1, false, sb.bound};
}

// Algorithm 4: run the eliminate/eligible sub-protocol, then count surviving
// eligibility bits around the ring.
struct DpPrimeOut {
  int l = 0;
  long h = 0;
  bool announced = false;
  int sb_bound = 0;
};

Task<DpPrimeOut> dp_prime_round(Ctx ctx, int l_in, long contest, bool bounded, long count_target,
                                int round) {
  auto& ring = ctx.rt().ring();
  ctx.me().round = round;
  DpPrimeOut out;
  co_await ctx.local("round entry");
  ring.set_eligible(ctx.self(), l_in != 0);
  if (l_in == 0) {
    RelayOut r = co_await relay_loop(ctx, round);
    if (r.announced) {
      out.announced = true;
      out.l = 0;
      co_return out;
    }
    out.l = 0;
  } else if (bounded) {
    BoundedEligibleOut r = co_await eligible_bounded(ctx, static_cast<int>(contest), round);
    if (r.declared) {
      out.announced = true;
      out.l = 1;
      co_return out;
    }
    out.l = r.l;
    out.sb_bound = r.sb_bound;
  } else {
    out.l = co_await eligible_known(ctx, static_cast<int>(contest), round);
  }
  Reg h = ctx.reg(bits_for_range(count_target + 1));
  Reg f = ctx.reg(bits_for_range(count_target + 1));
  co_await ctx.local("init eligibility counters");
  h.v = out.l ? 1 : 0;
  f.v = out.l ? 0 : 1;
  WaveParams lw;
  lw.send_dir = Dir::ToNext;
  lw.kind = MsgKind::LBit;
  lw.own = out.l;
  lw.target = count_target;
  lw.stamp = {round, wave::kPostSb, wave::kLCount};
  lw.fold = Fold::Ones;
  WaveOut lo = co_await counted_wave(ctx, lw);
  out.h = lo.fold;
  co_return out;
}

// Put-down phase between DP' rounds: every holder releases, then a counted
// confirmation wave keeps the rounds from overlapping.
Task<void> putdown_wave(Ctx ctx, long target, int round) {
  if (ctx.rt().ring().held_count(ctx.self()) > 0) co_await ctx.put_down("round put-down");
  WaveParams cw;
  cw.send_dir = Dir::ToNext;
  cw.kind = MsgKind::Confirm;
  cw.own = 0;
  cw.target = target;
  cw.stamp = {round, wave::kPostSb, wave::kConfirm};
  co_await counted_wave(ctx, cw);
}

// ---- leader election (Algorithms 7 and 9) ----------------------------------

Task<int> le_protocol(Ctx ctx, int n, bool bounded, int N) {
  auto& rt = ctx.rt();
  Reg l = ctx.reg(1);
  Reg h = ctx.reg(bits_for_range((bounded ? N : n) + 1));
  Reg round_reg = ctx.reg(bits_for_range(4 * (bounded ? N : n) + 4));
  co_await ctx.local("init eligibility");
  l.v = 1;
  h.v = bounded ? N : n;
  while (h.v > 1) {
    round_reg.v += 1;
    int round = static_cast<int>(ctx.me().round) + 1;
    long count_target = bounded ? N : n;
    DpPrimeOut r = co_await dp_prime_round(ctx, static_cast<int>(l.v), h.v, bounded, count_target,
                                           round);
    if (r.announced) {
      rt.ledger().iterations = std::max<int>(rt.ledger().iterations, static_cast<int>(round_reg.v));
      co_return r.l;
    }
    l.v = r.l;
    long hc = r.h;
    if (bounded && r.sb_bound > 0) hc = std::min<long>(hc, r.sb_bound);
    rt.ledger().iterations = std::max<int>(rt.ledger().iterations, static_cast<int>(round_reg.v));
    co_await putdown_wave(ctx, count_target, round);
    if (bounded) {
      WaveParams hw;
      hw.send_dir = Dir::ToNext;
      hw.kind = MsgKind::HValue;
      hw.own = static_cast<int>(hc);
      hw.payload_bits = bits_for_range(N + 1);
      hw.target = N;
      hw.stamp = {round, wave::kPostSb, wave::kHCompare};
      hw.fold = Fold::Min;
      hw.forward_fold = true;
      WaveOut ho = co_await counted_wave(ctx, hw);
      co_await ctx.local("adopt minimal bound");
      h.v = ho.fold;
    } else {
      co_await ctx.local("adopt count");
      h.v = hc;
    }
  }
  co_return static_cast<int>(l.v);
}

// ---- DP (Algorithm 1) -------------------------------------------------------

Task<int> run_provider(Ctx ctx, SbProvider provider, int n, int N) {
  switch (provider) {
    case SbProvider::Sb: {
      SbResult r = co_await run_sb(ctx, n, false, 0, false);
      co_return r.g;
    }
    case SbProvider::SbBounded: {
      SbResult r = co_await run_sb(ctx, N, true, 0, false);
      co_return r.g;
    }
    case SbProvider::Le: {
      // Lemma "LE to DP": the leader forms the 1-group on his own.
      int leader = co_await le_protocol(ctx, n, false, n);
      co_return leader;
    }
  }
  co_return 0;
}

bool courteous_defers(const SharedRing& ring, int self) {
  for (int nb : {ring.next(self), ring.prev(self)})
    if (ring.hungry(nb) && ring.last_eater_is(self, nb)) return true;
  return false;
}

Task<void> dp_main(Ctx ctx, bool courteous, SbProvider provider, int n, int N) {
  auto& ring = ctx.rt().ring();
  int self = ctx.self();
  Reg doneSB = ctx.reg(1);
  Reg g = ctx.reg(1);
  co_await ctx.local("init doneSB");
  doneSB.v = 0;
  while (true) {
    // Think until hungry, or until a doSB wave arrives.
    bool run_sb_now = false;
    while (!ring.hungry(self)) {
      // Only the doSB side is consumed here: the pair half for the coming SB
      // may already be queued on the other side and must stay there.
      ReceiveSpec spec;
      spec.expected = {ctx.me().round, wave::kPostSb, wave::kHCompare + 1};
      spec.arm(Dir::ToNext, kB(MsgKind::DoSB) | kB(MsgKind::WakeUp));
      bool by_hunger = co_await ctx.think_wait(spec);
      if (!by_hunger && ctx.me().pending.received.kind == MsgKind::DoSB && !doneSB.v) {
        run_sb_now = true;
        break;
      }
    }
    if (!doneSB.v || run_sb_now) {
      if (!doneSB.v) {
        co_await ctx.send(Dir::ToPrev, bit_msg(MsgKind::DoSB, 0, {0, 0, wave::kDoSb}),
                          "doSB wave");
        int gv = co_await run_provider(ctx, provider, n, N);
        co_await ctx.local("store group bit");
        g.v = gv;
        doneSB.v = 1;
        ctx.me().round += 1;  // later stages treat SB leftovers as stale
      }
    }
    while (ring.hungry(self)) {
      if (courteous) {
        while (courteous_defers(ring, self)) {
          ReceiveSpec spec;
          spec.expected = lift_stamp(ctx.me().round);
          spec.arm(Dir::ToPrev, kB(MsgKind::WakeUp));
          spec.arm(Dir::ToNext, kB(MsgKind::WakeUp));
          co_await ctx.recv(spec, "courteous defer");
        }
      }
      Side first = g.v == 0 ? Side::Left : Side::Right;
      for (int attempt = 0; attempt < 2; ++attempt) {
        Side side = attempt == 0 ? first : (first == Side::Left ? Side::Right : Side::Left);
        while (true) {
          bool ok = co_await ctx.try_lift(side, attempt == 0 ? "lift first" : "lift second");
          if (ok) break;
          ReceiveSpec spec;
          spec.expected = lift_stamp(ctx.me().round);
          spec.arm(Dir::ToPrev, kB(MsgKind::WakeUp));
          spec.arm(Dir::ToNext, kB(MsgKind::WakeUp));
          co_await ctx.recv(spec, "failed lift, sleep");
        }
      }
      co_await ctx.eat();
      co_await ctx.put_down();
    }
  }
}

// ---- classical randomized baseline ------------------------------------------

Task<void> classical_dp_main(Ctx ctx) {
  auto& ring = ctx.rt().ring();
  int self = ctx.self();
  while (true) {
    while (!ring.hungry(self)) {
      ReceiveSpec spec;
      spec.expected = {0, wave::kPostSb, wave::kHCompare + 1};
      spec.arm(Dir::ToNext, kB(MsgKind::WakeUp));
      spec.arm(Dir::ToPrev, kB(MsgKind::WakeUp));
      co_await ctx.think_wait(spec);
    }
    while (ring.hungry(self)) {
      co_await ctx.local("flip coin");
      int coin = ctx.rt().coin_flip();
      Side first = coin ? Side::Left : Side::Right;
      Side second = coin ? Side::Right : Side::Left;
      while (true) {
        bool ok = co_await ctx.try_lift(first, "lift chosen side");
        if (ok) break;
        ReceiveSpec spec;
        spec.expected = lift_stamp(0);
        spec.arm(Dir::ToPrev, kB(MsgKind::WakeUp));
        spec.arm(Dir::ToNext, kB(MsgKind::WakeUp));
        co_await ctx.recv(spec, "wait for chopstick");
      }
      bool ok2 = co_await ctx.try_lift(second, "lift second side");
      if (!ok2) {
        co_await ctx.put_down("drop and re-flip");
        continue;
      }
      co_await ctx.eat();
      co_await ctx.put_down();
    }
  }
}

// ---- per-protocol roots -----------------------------------------------------

Task<void> sb_root(Ctx ctx, int n) {
  SbResult r = co_await run_sb(ctx, n, false, 0, false);
  ctx.me().out_g = r.g;
  ctx.me().out_bound = r.bound;
}

Task<void> sb_bounded_root(Ctx ctx, int N) {
  SbResult r = co_await run_sb(ctx, N, true, 0, false);
  ctx.me().out_g = r.g;
  ctx.me().out_bound = r.bound;
}

Task<void> dp_prime_root(Ctx ctx, int l_in, int h_in, int n) {
  DpPrimeOut r = co_await dp_prime_round(ctx, l_in, h_in, false, n, 1);
  ctx.me().out_leader = r.l;
  ctx.me().out_h = static_cast<int>(r.h);
}

Task<void> le_root(Ctx ctx, int n, bool bounded, int N) {
  int l = co_await le_protocol(ctx, n, bounded, N);
  ctx.me().out_leader = l;
}

}  // namespace

const char* protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Sb: return "sb";
    case Protocol::SbBounded: return "sb-bounded";
    case Protocol::Dp: return "dp";
    case Protocol::DpPrime: return "dp-prime";
    case Protocol::Le: return "le";
    case Protocol::LeBounded: return "le-bounded";
    case Protocol::ClassicalDp: return "classical-dp";
  }
  return "?";
}

void install(rt::Runtime& rt, const ProtocolConfig& cfg) {
  int n = cfg.n;
  for (int i = 0; i < n; ++i) {
    rt.add_party([&cfg, n](Runtime& r, Party& p) -> Task<void> {
      Ctx ctx(r, p);
      switch (cfg.protocol) {
        case Protocol::Sb:
          return sb_root(ctx, n);
        case Protocol::SbBounded:
          return sb_bounded_root(ctx, cfg.N);
        case Protocol::Dp:
          return dp_main(ctx, cfg.courteous, cfg.provider, n, cfg.N);
        case Protocol::DpPrime: {
          int l_in = cfg.eligible.empty() ? 1 : cfg.eligible[p.index];
          int h_in = 0;
          if (cfg.eligible.empty())
            h_in = n;
          else
            for (int v : cfg.eligible) h_in += v ? 1 : 0;
          return dp_prime_root(ctx, l_in, h_in, n);
        }
        case Protocol::Le:
          return le_root(ctx, n, false, n);
        case Protocol::LeBounded:
          return le_root(ctx, n, true, cfg.N);
        case Protocol::ClassicalDp:
          return classical_dp_main(ctx);
      }
      return sb_root(ctx, n);
    });
  }
  bool dp_like = cfg.protocol == Protocol::Dp || cfg.protocol == Protocol::ClassicalDp;
  rt.set_completion(dp_like ? CompletionRule::HungerServed : CompletionRule::AllDone);
}

}  // namespace ringsim::proto
