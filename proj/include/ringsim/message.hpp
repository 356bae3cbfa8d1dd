#pragma once

#include <compare>
#include <cstdint>
#include <optional>

#include "ringsim/qstate.hpp"

namespace ringsim::rt {

enum class MsgKind : int {
  WakeUp = 0,
  DoSB,
  Qubit,
  XBit,
  PairVal,
  GBit,
  LBit,
  LiftLeft,
  LiftResult,
  Terminate,
  Confirm,
  HValue,
  LeaderAnnounce,
};

inline const char* kind_name(MsgKind k) {
  switch (k) {
    case MsgKind::WakeUp: return "wake-up";
    case MsgKind::DoSB: return "doSB";
    case MsgKind::Qubit: return "qubit";
    case MsgKind::XBit: return "x-bit";
    case MsgKind::PairVal: return "pair-value";
    case MsgKind::GBit: return "g-bit";
    case MsgKind::LBit: return "l-bit";
    case MsgKind::LiftLeft: return "lift-left";
    case MsgKind::LiftResult: return "lift-result";
    case MsgKind::Terminate: return "terminate";
    case MsgKind::Confirm: return "confirm";
    case MsgKind::HValue: return "h-value";
    case MsgKind::LeaderAnnounce: return "leader-announce";
  }
  return "?";
}

constexpr std::uint32_t kind_bit(MsgKind k) { return 1u << static_cast<int>(k); }

// Stage stamp carried by every message. Orders protocol waves within a run:
// round (DP' iteration) major, then SB recursion depth, then wave ordinal.
// Post-SB waves use kPostSb so they sort after any recursion depth.
struct Stamp {
  std::int32_t round = 0;
  std::int32_t depth = 0;
  std::int32_t wave = 0;
  auto operator<=>(const Stamp&) const = default;
};

namespace wave {
inline constexpr std::int32_t kDoSb = -1;
inline constexpr std::int32_t kQubit = 0;
inline constexpr std::int32_t kX = 1;
inline constexpr std::int32_t kPairVal = 2;
inline constexpr std::int32_t kG = 3;
inline constexpr std::int32_t kLift = 100;
inline constexpr std::int32_t kLCount = 101;
inline constexpr std::int32_t kConfirm = 102;
inline constexpr std::int32_t kHCompare = 103;
inline constexpr std::int32_t kPostSb = 999;  // depth value for post-SB waves
}  // namespace wave

struct Message {
  MsgKind kind;
  int payload = 0;
  Stamp stamp;
  int size_bits = 1;  // classical payload bits; qubit messages count on the qubit ledger
  std::optional<qstate::QubitHandle> qubit;
  std::uint64_t seq = 0;  // per-channel send sequence, for FIFO audits
};

}  // namespace ringsim::rt
