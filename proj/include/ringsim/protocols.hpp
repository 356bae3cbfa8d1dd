#pragma once

#include <vector>

#include "ringsim/runtime.hpp"

namespace ringsim::proto {

enum class Protocol { Sb, SbBounded, Dp, DpPrime, Le, LeBounded, ClassicalDp };
enum class SbProvider { Sb, SbBounded, Le };

const char* protocol_name(Protocol p);

struct ProtocolConfig {
  Protocol protocol = Protocol::Sb;
  int n = 0;
  int N = 0;  // upper bound for the bounded variants
  bool courteous = true;
  SbProvider provider = SbProvider::Sb;
  std::vector<int> eligible;  // initial l flags for dp-prime (empty = all ones)
};

// Installs one party process per ring position and picks the completion rule.
void install(rt::Runtime& rt, const ProtocolConfig& cfg);

}  // namespace ringsim::proto
