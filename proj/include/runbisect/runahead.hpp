#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "runbisect/bisect.hpp"

namespace runbisect {

enum class SpawnMode {
  PersistentPool,  // workers live across rounds, two rendezvous per round
  SpawnPerRound,   // threads created and joined every round (overhead model)
};

// Speculation depth k for a team of `threads` = 2^k - 1 participants.
// Throws ConfigError naming the nearest valid counts below and above when
// threads + 1 is not a power of two.
int depth_for_threads(int threads);

// ceil(n / depth): rounds needed to cover n halving levels, depth per round.
int rounds_required(int iterations, int depth);

struct RunaheadConfig {
  int threads = 1;
  SpawnMode spawn_mode = SpawnMode::PersistentPool;
  std::size_t pad_stride = 128;  // bytes reserved per sign slot; power of two

  void validate() const;  // throws ConfigError
  int depth() const { return depth_for_threads(threads); }
};

// The speculative grid of one round: the 2^depth - 1 interior subdivision
// points of `interval`, depth halving levels deep, in ascending order.
// Points are produced by iterated midpoints ((lo+hi)/2 down the subdivision
// tree), so every grid point is bit-identical to a midpoint the serial loop
// would compute; the middle point grid[2^(depth-1) - 1] is the true midpoint.
// grid[i] carries board slot i + 1.
struct RoundPlan {
  Interval interval;
  int depth_used = 1;
  std::vector<double> grid;
};

RoundPlan plan_round(const Interval& interval, int depth_used);

// Shared sign board of one round: 2^depth + 1 slots. Slot 0 and the last slot
// hold the carried interval edge signs; slot i holds the sign at grid[i-1].
// Each slot lives in its own pad_stride-sized region so concurrent writers
// never share a cache line, and carries a completion flag plus a write
// counter (each slot must be written exactly once per round).
class SignBoard {
 public:
  SignBoard(int max_depth, std::size_t pad_stride);
  ~SignBoard();

  SignBoard(const SignBoard&) = delete;
  SignBoard& operator=(const SignBoard&) = delete;

  // Smallest legal pad_stride: the footprint of one slot record.
  static std::size_t min_stride();

  // Re-arms the board for a round at `depth_used` levels: activates
  // 2^depth_used + 1 slots, clears signs, flags and counters.
  void reset(int depth_used);

  int depth() const { return depth_; }
  std::size_t slot_count() const { return slots_; }
  std::size_t pad_stride() const { return stride_; }

  void write(std::size_t slot, Sign s);
  Sign sign_at(std::size_t slot) const;
  bool written(std::size_t slot) const;
  unsigned write_count(std::size_t slot) const;
  bool complete() const;  // every active slot's completion flag is set

  const void* slot_address(std::size_t slot) const;
  std::vector<int> digits() const;  // snapshot of the board, edges included

 private:
  struct Slot;
  Slot& at(std::size_t slot) const;

  void* buffer_ = nullptr;
  std::size_t capacity_ = 0;  // allocated slots
  std::size_t slots_ = 0;     // active slots this round
  std::size_t stride_ = 0;
  int depth_ = 0;
};

// Outcome of descending a completed board.
struct RoundSelection {
  Interval cell;
  Sign lo_sign;
  Sign hi_sign;
  // The deepest midpoint inspected during the descent; this is the root the
  // serial loop would report after the same halving levels.
  double last_midpoint;
};

// Binary descent over a completed board: at each level compare the middle
// slot against the left edge slot (one XOR); keep the half whose edges
// disagree. Lands on exactly the unit cell serial bisection reaches after
// depth steps. Throws InvariantViolation if the board is incomplete or its
// edge slots carry the same sign (bracket lost).
RoundSelection select_subinterval(const SignBoard& board, const RoundPlan& plan);

// Executes one speculative round on a caller-provided board: resets it for
// the plan's depth, fills the edge slots from edge_signs, evaluates every
// interior grid point on its own thread (the caller evaluates the true
// midpoint), and returns once every completion flag is set. Throws
// InvariantViolation if edge_signs agree (bracket lost before the round).
void run_round(const RoundPlan& plan, const TargetFunction& fn, SignBoard& board,
               std::pair<Sign, Sign> edge_signs);

// One completed round as seen by the coordinating thread.
struct RoundEvent {
  int index = 0;  // 0-based
  int depth_used = 1;
  Interval before;
  std::vector<int> board;           // digits at completion, edges included
  std::vector<unsigned> slot_writes;  // per-slot write counts (expect all 1)
  Interval after;
};

using RoundObserver = std::function<void(const RoundEvent&)>;

// Runahead bisection: cfg.threads = 2^k - 1 participants evaluate the k-level
// speculative grid each round (the calling thread is the participant at rank
// floor(active/2), i.e. the true midpoint), a barrier rendezvous follows the
// slot writes, one designated writer descends the board and publishes the new
// interval, and a second rendezvous releases the next round. n iterations run
// as floor(n/k) full rounds plus one final round at depth n mod k with only
// 2^(n mod k) - 1 active participants. Results are bit-identical to
// bisect_serial on the same request.
SolveResult bisect_runahead(const SolveRequest& req, const RunaheadConfig& cfg,
                            const RoundObserver& observer = {});

}  // namespace runbisect
