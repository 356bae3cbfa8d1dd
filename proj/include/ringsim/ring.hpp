#pragma once

#include <deque>
#include <vector>

#include "ringsim/errors.hpp"
#include "ringsim/message.hpp"

namespace ringsim::rt {

// Parties are indexed 0..n-1 around the ring. Following the DP' pseudocode,
// the LEFT neighbor of P_j is P_{j+1} and the RIGHT neighbor is P_{j-1}.
// Chopstick e sits between P_e and P_{e+1}: it is P_e's left chopstick and
// P_{e+1}'s right chopstick.
enum class Dir { ToNext, ToPrev };   // +1 / -1 around the ring
enum class Side { Left, Right };     // left = shared with P_{j+1}

inline Dir opposite(Dir d) { return d == Dir::ToNext ? Dir::ToPrev : Dir::ToNext; }

// One directed FIFO channel.
struct Channel {
  std::deque<Message> q;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
};

// Chopstick registers are 3-valued: on the table, or held by one of the two
// adjacent parties. Register values are classical after every atomic action.
enum class ChopState { Mid, Lower, Upper };  // Lower = P_e holds it, Upper = P_{e+1}

enum class LastEater { Neutral, Lower, Upper };

class SharedRing {
 public:
  explicit SharedRing(int n)
      : n_(n), chopsticks_(n, ChopState::Mid), last_eater_(n, LastEater::Neutral),
        hungry_(n, false), eligible_(n, true), up_(n), down_(n) {}

  int n() const { return n_; }
  int next(int p) const { return (p + 1) % n_; }
  int prev(int p) const { return (p + n_ - 1) % n_; }

  // Chopstick index on a party's side.
  int stick(int p, Side s) const { return s == Side::Left ? p : prev(p); }

  bool holds(int p, int e) const {
    if (e == p) return chopsticks_[e] == ChopState::Lower;
    if (e == prev(p)) return chopsticks_[e] == ChopState::Upper;
    return false;
  }

  // One atomic lift attempt. Fails when the stick is not on the table,
  // including when p itself already holds it.
  bool try_lift(int p, Side s) {
    int e = stick(p, s);
    if (chopsticks_[e] != ChopState::Mid) return false;
    chopsticks_[e] = (e == p) ? ChopState::Lower : ChopState::Upper;
    return true;
  }

  // Returns the sticks p released.
  std::vector<int> put_down(int p) {
    std::vector<int> released;
    for (int e : {p, prev(p)})
      if (holds(p, e)) {
        chopsticks_[e] = ChopState::Mid;
        released.push_back(e);
      }
    return released;
  }

  int held_count(int p) const { return (holds(p, p) ? 1 : 0) + (holds(p, prev(p)) ? 1 : 0); }

  ChopState chopstick(int e) const { return chopsticks_[e]; }

  void record_eat(int p) {
    last_eater_[p] = LastEater::Lower;        // edge shared with next(p)
    last_eater_[prev(p)] = LastEater::Upper;  // edge shared with prev(p)
  }

  // True when the last eater on the edge between p and the given neighbor is p.
  bool last_eater_is(int p, int neighbor) const {
    if (neighbor == next(p)) return last_eater_[p] == LastEater::Lower;
    if (neighbor == prev(p)) return last_eater_[prev(p)] == LastEater::Upper;
    return false;
  }

  bool hungry(int p) const { return hungry_[p]; }
  void set_hungry(int p, bool v) { hungry_[p] = v; }
  bool eligible(int p) const { return eligible_[p]; }
  void set_eligible(int p, bool v) { eligible_[p] = v; }

  // Channel from p in direction d. up_[e] runs P_e -> P_{e+1}.
  Channel& out_channel(int p, Dir d) { return d == Dir::ToNext ? up_[p] : down_[prev(p)]; }
  Channel& in_channel(int p, Dir from) {
    // from = ToPrev means "the channel arriving from my previous neighbor".
    return from == Dir::ToPrev ? up_[prev(p)] : down_[p];
  }
  const Channel& in_channel(int p, Dir from) const {
    return from == Dir::ToPrev ? up_[prev(p)] : down_[p];
  }

  bool channels_empty(int p) const {
    return in_channel(p, Dir::ToPrev).q.empty() && in_channel(p, Dir::ToNext).q.empty();
  }

  // Flat channel id for scheduler policies: 2*e for up, 2*e+1 for down.
  int in_channel_id(int p, Dir from) const {
    return from == Dir::ToPrev ? 2 * prev(p) : 2 * p + 1;
  }

 private:
  int n_;
  std::vector<ChopState> chopsticks_;
  std::vector<LastEater> last_eater_;
  std::vector<bool> hungry_;
  std::vector<bool> eligible_;
  std::vector<Channel> up_, down_;
};

}  // namespace ringsim::rt
