#include "runbisect/runahead.hpp"

#include <atomic>
#include <barrier>
#include <bit>
#include <cassert>
#include <cstdlib>
#include <new>
#include <string>
#include <thread>
#include <type_traits>

#include "runbisect/errors.hpp"

namespace runbisect {

namespace {

// 2^16 - 1 participants is already far past any sane team; the cap keeps the
// board allocation and the thread spawn bounded.
constexpr int kMaxDepth = 16;

void fill_cell(std::vector<double>& grid, double lo, double hi, int depth,
               std::size_t first) {
  if (depth == 0) return;
  const std::size_t half = std::size_t{1} << (depth - 1);
  const double mid = (lo + hi) / 2;
  grid[first + half - 1] = mid;
  fill_cell(grid, lo, mid, depth - 1, first);
  fill_cell(grid, mid, hi, depth - 1, first + half);
}

void fill_plan(RoundPlan& plan, const Interval& interval, int depth) {
  plan.interval = interval;
  plan.depth_used = depth;
  plan.grid.resize((std::size_t{1} << depth) - 1);
  fill_cell(plan.grid, interval.a(), interval.b(), depth, 0);
}

void verify_single_writes(const SignBoard& board) {
  for (std::size_t i = 0; i < board.slot_count(); ++i) {
    if (board.write_count(i) != 1) {
      throw InvariantViolation("board slot " + std::to_string(i) + " written " +
                               std::to_string(board.write_count(i)) +
                               " times in one round");
    }
  }
}

}  // namespace

int depth_for_threads(int threads) {
  if (threads < 1) {
    throw ConfigError("thread count must be >= 1; the nearest valid count is 1");
  }
  const unsigned tp1 = static_cast<unsigned>(threads) + 1u;
  if ((tp1 & (tp1 - 1)) != 0) {
    const int k_low = std::bit_width(tp1) - 1;
    const long below = (1L << k_low) - 1;
    const long above = (1L << (k_low + 1)) - 1;
    throw ConfigError("thread count " + std::to_string(threads) +
                      " is invalid: T + 1 must be a power of two; the nearest "
                      "valid thread counts are " +
                      std::to_string(below) + " and " + std::to_string(above));
  }
  const int k = std::countr_zero(tp1);
  if (k > kMaxDepth) {
    throw ConfigError("thread count " + std::to_string(threads) +
                      " is too large; at most " +
                      std::to_string((1L << kMaxDepth) - 1) + " is supported");
  }
  return k;
}

int rounds_required(int iterations, int depth) {
  if (iterations < 0) {
    throw InputDomainError("iteration count must be >= 0");
  }
  if (depth < 1) {
    throw InputDomainError("speculation depth must be >= 1");
  }
  return (iterations + depth - 1) / depth;
}

void RunaheadConfig::validate() const {
  (void)depth_for_threads(threads);
  if (pad_stride < SignBoard::min_stride() ||
      (pad_stride & (pad_stride - 1)) != 0) {
    throw ConfigError("pad stride must be a power of two no smaller than " +
                      std::to_string(SignBoard::min_stride()) + " bytes, got " +
                      std::to_string(pad_stride));
  }
}

RoundPlan plan_round(const Interval& interval, int depth_used) {
  if (depth_used < 1 || depth_used > kMaxDepth) {
    throw InputDomainError("round depth must be in [1, " +
                           std::to_string(kMaxDepth) + "]");
  }
  RoundPlan plan{interval, depth_used, {}};
  fill_plan(plan, interval, depth_used);
  return plan;
}

// ---------------------------------------------------------------------------
// SignBoard

struct SignBoard::Slot {
  Sign sign;
  unsigned writes;
  std::atomic<bool> done;
};

std::size_t SignBoard::min_stride() { return sizeof(Slot); }

SignBoard::Slot& SignBoard::at(std::size_t slot) const {
  return *std::launder(reinterpret_cast<Slot*>(static_cast<char*>(buffer_) +
                                               slot * stride_));
}

SignBoard::SignBoard(int max_depth, std::size_t pad_stride) : stride_(pad_stride) {
  // The destructor frees the raw buffer without running per-slot destructors.
  static_assert(std::is_trivially_destructible_v<Slot>);
  if (max_depth < 1 || max_depth > kMaxDepth) {
    throw ConfigError("board depth must be in [1, " + std::to_string(kMaxDepth) +
                      "]");
  }
  if (stride_ < sizeof(Slot) || (stride_ & (stride_ - 1)) != 0) {
    throw ConfigError("pad stride must be a power of two no smaller than " +
                      std::to_string(sizeof(Slot)) + " bytes, got " +
                      std::to_string(stride_));
  }
  capacity_ = (std::size_t{1} << max_depth) + 1;
  buffer_ = std::aligned_alloc(stride_, stride_ * capacity_);
  if (buffer_ == nullptr) throw std::bad_alloc();
  for (std::size_t i = 0; i < capacity_; ++i) {
    new (static_cast<char*>(buffer_) + i * stride_)
        Slot{Sign::NonNegative, 0u, {false}};
  }
  reset(max_depth);
}

SignBoard::~SignBoard() { std::free(buffer_); }

void SignBoard::reset(int depth_used) {
  const std::size_t wanted = (std::size_t{1} << depth_used) + 1;
  if (depth_used < 1 || wanted > capacity_) {
    throw ConfigError("board capacity (" + std::to_string(capacity_) +
                      " slots) cannot hold a round of depth " +
                      std::to_string(depth_used));
  }
  depth_ = depth_used;
  slots_ = wanted;
  for (std::size_t i = 0; i < slots_; ++i) {
    Slot& s = at(i);
    s.sign = Sign::NonNegative;
    s.writes = 0;
    s.done.store(false, std::memory_order_relaxed);
  }
}

void SignBoard::write(std::size_t slot, Sign s) {
  if (slot >= slots_) {
    throw InvariantViolation("board write out of range: slot " +
                             std::to_string(slot) + " of " +
                             std::to_string(slots_));
  }
  Slot& sl = at(slot);
  sl.sign = s;
  sl.writes += 1;
  sl.done.store(true, std::memory_order_release);
}

Sign SignBoard::sign_at(std::size_t slot) const {
  if (slot >= slots_) {
    throw InvariantViolation("board read out of range: slot " +
                             std::to_string(slot));
  }
  return at(slot).sign;
}

bool SignBoard::written(std::size_t slot) const {
  if (slot >= slots_) {
    throw InvariantViolation("board read out of range: slot " +
                             std::to_string(slot));
  }
  return at(slot).done.load(std::memory_order_acquire);
}

unsigned SignBoard::write_count(std::size_t slot) const {
  if (slot >= slots_) {
    throw InvariantViolation("board read out of range: slot " +
                             std::to_string(slot));
  }
  return at(slot).writes;
}

bool SignBoard::complete() const {
  for (std::size_t i = 0; i < slots_; ++i) {
    if (!at(i).done.load(std::memory_order_acquire)) return false;
  }
  return true;
}

const void* SignBoard::slot_address(std::size_t slot) const {
  if (slot >= slots_) {
    throw InvariantViolation("board address out of range: slot " +
                             std::to_string(slot));
  }
  return static_cast<const char*>(buffer_) + slot * stride_;
}

std::vector<int> SignBoard::digits() const {
  std::vector<int> out(slots_);
  for (std::size_t i = 0; i < slots_; ++i) out[i] = sign_digit(at(i).sign);
  return out;
}

// ---------------------------------------------------------------------------
// Descent

RoundSelection select_subinterval(const SignBoard& board, const RoundPlan& plan) {
  if (plan.grid.size() + 2 != board.slot_count()) {
    throw InvariantViolation("plan and board disagree on the slot count");
  }
  if (!board.complete()) {
    throw InvariantViolation("sign board incomplete: missing slot writes");
  }
  const std::size_t last = board.slot_count() - 1;
  if (board.sign_at(0) == board.sign_at(last)) {
    throw InvariantViolation("board edge signs agree: bracket lost");
  }

  std::size_t lo = 0;
  std::size_t hi = last;
  double last_mid = 0;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    last_mid = plan.grid[mid - 1];
    // The serial branch test in one XOR: keep the half whose edges disagree.
    if (board.sign_at(mid) != board.sign_at(lo)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }

#ifndef NDEBUG
  // Cross-check against the flat adjacent scan on boards with a single sign
  // change; the descent must land on exactly that pair.
  std::size_t changes = 0;
  std::size_t change_pos = 0;
  for (std::size_t s = 0; s < last; ++s) {
    if (board.sign_at(s) != board.sign_at(s + 1)) {
      ++changes;
      change_pos = s;
    }
  }
  if (changes == 1) {
    assert(lo == change_pos && hi == change_pos + 1);
  }
#endif

  const double cell_a = lo == 0 ? plan.interval.a() : plan.grid[lo - 1];
  const double cell_b = hi == last ? plan.interval.b() : plan.grid[hi - 1];
  return {Interval(cell_a, cell_b), board.sign_at(lo), board.sign_at(hi),
          last_mid};
}

// ---------------------------------------------------------------------------
// Round execution

namespace {

// Fills the interior slots of one round: every active rank on its own thread,
// the caller handling rank mid_rank (the true midpoint). `eval` must be
// callable from any thread.
template <typename Eval>
void fill_interior(const RoundPlan& plan, SignBoard& board, const Eval& eval) {
  const int active = (1 << plan.depth_used) - 1;
  const int mid_rank = active / 2;
  {
    std::vector<std::jthread> team;
    team.reserve(active > 0 ? static_cast<std::size_t>(active) - 1 : 0);
    for (int rank = 0; rank < active; ++rank) {
      if (rank == mid_rank) continue;
      team.emplace_back([&plan, &board, &eval, rank] {
        board.write(static_cast<std::size_t>(rank) + 1,
                    sign_of(eval(plan.grid[static_cast<std::size_t>(rank)])));
      });
    }
    board.write(static_cast<std::size_t>(mid_rank) + 1,
                sign_of(eval(plan.grid[static_cast<std::size_t>(mid_rank)])));
  }  // jthread destructors join: the rendezvous of spawn-per-round mode
}

}  // namespace

void run_round(const RoundPlan& plan, const TargetFunction& fn, SignBoard& board,
               std::pair<Sign, Sign> edge_signs) {
  if (edge_signs.first == edge_signs.second) {
    throw InvariantViolation("carried edge signs agree: bracket lost before the round");
  }
  if (plan.grid.size() != (std::size_t{1} << plan.depth_used) - 1) {
    throw InvariantViolation("plan grid size does not match its depth");
  }
  board.reset(plan.depth_used);
  const std::size_t last = board.slot_count() - 1;
  board.write(0, edge_signs.first);
  board.write(last, edge_signs.second);
  fill_interior(plan, board,
                [&fn](double x) { return evaluate(fn, x); });
  if (!board.complete()) {
    throw InvariantViolation("round ended with unwritten slots");
  }
  verify_single_writes(board);
}

// ---------------------------------------------------------------------------
// Full solver

namespace {

struct RoundOutcome {
  Interval interval;
  Sign lo;
  Sign hi;
  double root;
};

// Selection, bookkeeping and observer callback once a round's board is full.
RoundOutcome finish_round(SignBoard& board, const RoundPlan& plan, int index,
                          const Interval& before, const RoundObserver& observer) {
  verify_single_writes(board);
  const RoundSelection sel = select_subinterval(board, plan);
  if (observer) {
    std::vector<unsigned> writes(board.slot_count());
    for (std::size_t i = 0; i < board.slot_count(); ++i) {
      writes[i] = board.write_count(i);
    }
    observer({index, plan.depth_used, before, board.digits(), std::move(writes),
              sel.cell});
  }
  return {sel.cell, sel.lo_sign, sel.hi_sign, sel.last_midpoint};
}

struct SolveState {
  Interval interval;
  Sign lo;
  Sign hi;
  double root = 0;
};

template <typename Eval>
void run_spawn_per_round(SolveState& st, const std::vector<int>& depths,
                         const Eval& eval, const RunaheadConfig& cfg,
                         const RoundObserver& observer) {
  SignBoard board(depths.front(), cfg.pad_stride);
  RoundPlan plan = plan_round(st.interval, depths.front());
  for (std::size_t t = 0; t < depths.size(); ++t) {
    if (t > 0) fill_plan(plan, st.interval, depths[t]);
    board.reset(depths[t]);
    board.write(0, st.lo);
    board.write(board.slot_count() - 1, st.hi);
    fill_interior(plan, board, eval);  // spawns and joins the round's threads
    const Interval before = st.interval;
    const RoundOutcome out =
        finish_round(board, plan, static_cast<int>(t), before, observer);
    st.interval = out.interval;
    st.lo = out.lo;
    st.hi = out.hi;
    st.root = out.root;
  }
}

template <typename Eval>
void run_persistent_pool(SolveState& st, const std::vector<int>& depths,
                         const Eval& eval, const RunaheadConfig& cfg,
                         const RoundObserver& observer) {
  const int threads = cfg.threads;
  SignBoard board(cfg.depth(), cfg.pad_stride);
  RoundPlan plan = plan_round(st.interval, depths.front());
  board.reset(depths.front());
  std::barrier<> gate(threads);
  std::atomic<bool> abort_rounds{false};

  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(threads) - 1);
  for (int j = 0; j < threads - 1; ++j) {
    pool.emplace_back([&, j] {
      for (std::size_t t = 0; t < depths.size(); ++t) {
        gate.arrive_and_wait();  // plan for round t is published
        if (!abort_rounds.load(std::memory_order_relaxed)) {
          const int active = (1 << depths[t]) - 1;
          const int mid_rank = active / 2;
          const int rank = j < mid_rank ? j : j + 1;
          if (rank < active) {
            board.write(static_cast<std::size_t>(rank) + 1,
                        sign_of(eval(plan.grid[static_cast<std::size_t>(rank)])));
          }
        }
        gate.arrive_and_wait();  // every slot of round t is written
      }
    });
  }

  std::size_t t = 0;
  try {
    for (; t < depths.size(); ++t) {
      gate.arrive_and_wait();
      const int active = (1 << depths[t]) - 1;
      const int mid_rank = active / 2;
      board.write(0, st.lo);
      board.write(static_cast<std::size_t>(active) + 1, st.hi);
      board.write(static_cast<std::size_t>(mid_rank) + 1,
                  sign_of(eval(plan.grid[static_cast<std::size_t>(mid_rank)])));
      gate.arrive_and_wait();
      const Interval before = st.interval;
      const RoundOutcome out =
          finish_round(board, plan, static_cast<int>(t), before, observer);
      st.interval = out.interval;
      st.lo = out.lo;
      st.hi = out.hi;
      st.root = out.root;
      if (t + 1 < depths.size()) {
        fill_plan(plan, st.interval, depths[t + 1]);
        board.reset(depths[t + 1]);
      }
    }
  } catch (...) {
    // Flush the remaining rendezvous so the pool can run out and join;
    // workers see the abort flag and skip their writes.
    abort_rounds.store(true, std::memory_order_relaxed);
    for (std::size_t r = t + 1; r < depths.size(); ++r) {
      gate.arrive_and_wait();
      gate.arrive_and_wait();
    }
    throw;
  }
}

}  // namespace

SolveResult bisect_runahead(const SolveRequest& req, const RunaheadConfig& cfg,
                            const RoundObserver& observer) {
  cfg.validate();
  const int k = cfg.depth();
  const int n = req.budget.resolve(req.interval);

  std::atomic<std::int64_t> evals{0};
  const auto eval = [&](double x) {
    evals.fetch_add(1, std::memory_order_relaxed);
    return evaluate(req.fn, x);
  };

  const Sign sa = sign_of(eval(req.interval.a()));
  const Sign sb = sign_of(eval(req.interval.b()));
  if (sa == sb) {
    throw BracketError("no bracket on [" + std::to_string(req.interval.a()) +
                       ", " + std::to_string(req.interval.b()) +
                       "]: f has the same sign at both ends");
  }
  if (n == 0) {
    return {req.interval.midpoint(), 0, req.interval, evals.load()};
  }

  // floor(n/k) full-depth rounds, then one shallower round for the remainder
  // with only 2^(n mod k) - 1 active participants.
  std::vector<int> depths(static_cast<std::size_t>(n / k), k);
  if (n % k != 0) depths.push_back(n % k);

  SolveState st{req.interval, sa, sb, 0};
  if (cfg.spawn_mode == SpawnMode::PersistentPool) {
    run_persistent_pool(st, depths, eval, cfg, observer);
  } else {
    run_spawn_per_round(st, depths, eval, cfg, observer);
  }
  return {st.root, n, st.interval, evals.load()};
}

}  // namespace runbisect
