// The game on X(Delta, delta): a (Delta-1)-regular base tree B with a small
// delta-regular tree (root degree delta-1) hanging off every base vertex.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tipsy/episode.hpp"
#include "tipsy/grid.hpp"
#include "tipsy/spinner.hpp"

namespace tipsy {

struct TreeParams {
  int Delta = 3;
  int delta = 2;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Throws std::invalid_argument unless Delta >= 3, delta >= 2, Delta >= delta.
void validate(const TreeParams& tree);

using TreeLabel = std::uint16_t;

/// Reduced-word address. `base_path` is a word over base labels 0..Delta-2
/// with no letter repeated twice in a row; stepping along label i pushes i
/// unless the word already ends in i, in which case it pops. `small_path` is
/// empty on B; otherwise it starts with the root marker 0 followed by child
/// labels in 0..delta-2, so its length is the distance to B.
struct TreeVertex {
  std::vector<TreeLabel> base_path;
  std::vector<TreeLabel> small_path;

  bool on_base() const noexcept { return small_path.empty(); }
  std::size_t depth() const noexcept { return small_path.size(); }

  friend bool operator==(const TreeVertex&, const TreeVertex&) = default;
};

struct TreeGameState {
  TreeVertex cop;
  TreeVertex robber;

  bool captured() const noexcept { return cop == robber; }
  friend bool operator==(const TreeGameState&, const TreeGameState&) = default;
};

/// Metric and neighbourhood structure of one X(Delta, delta).
class Tree {
 public:
  explicit Tree(TreeParams params);

  const TreeParams& params() const noexcept { return params_; }

  /// Throws std::invalid_argument when `v` is not an address of this tree.
  void check(const TreeVertex& v) const;
  bool is_valid(const TreeVertex& v) const noexcept;

  int degree(const TreeVertex& v) const noexcept {
    return v.on_base() ? params_.Delta : params_.delta;
  }

  /// Neighbour k of v. On B: k < Delta-1 follows base label k and
  /// k = Delta-1 enters the small root. Off B: k = 0 is the parent and
  /// k >= 1 is child k-1.
  TreeVertex neighbor(const TreeVertex& v, int k) const;
  std::vector<TreeVertex> neighbors(const TreeVertex& v) const;

  std::size_t distance(const TreeVertex& u, const TreeVertex& v) const;
  static TreeVertex project_to_base(const TreeVertex& v);

  /// Base vertex at base-distance `d` from the origin along 0,1,0,1,...
  static TreeVertex base_vertex_at(std::size_t d);

 private:
  TreeParams params_;
};

/// Cop at the origin of B, robber on B at base distance `d0`.
TreeGameState default_tree_start(std::size_t d0 = 20);

enum class TreeStrategy { cs, csb, rsa, rsb };

TreeStrategy parse_tree_strategy(std::string_view name);
std::string to_string(TreeStrategy strategy);
Side side_of(TreeStrategy strategy) noexcept;

/// One sober move of the strategy's owner. `u` picks among equally good
/// moves where the strategy randomises.
TreeGameState sober_move_tree(const Tree& tree, TreeStrategy strategy,
                              const TreeGameState& state, double u);

/// Uniform step of `mover` to one of its neighbours.
TreeGameState tipsy_move_tree(const Tree& tree, const TreeGameState& state,
                              Side mover, double u);

/// One recorded move along B (or a CSB stay). `f` is the sign of the change
/// of d(C', R') (a stay records +1); `f_lower` is the value of the
/// strategy-independent lower bound driven by the same spinner outcome.
struct BaseMoveEvent {
  std::uint64_t time = 0;
  Side mover = Side::robber;
  int f = 0;
  int f_lower = 0;
  bool projections_differ = false;
};

/// Running totals for one player's base moves.
struct BaseMoveTally {
  std::uint64_t moves = 0;
  std::int64_t f_sum = 0;
  std::int64_t f_lower_sum = 0;
  /// Completed gaps T(n) - T(n-1); the first gap counts from time 0 only when
  /// the player starts on B.
  std::uint64_t gaps = 0;
  double gap_sum = 0.0;
  double gap_sum_sq = 0.0;
  /// Moves with f < f_lower, and moves with C' != R' but f != f_lower.
  std::uint64_t domination_violations = 0;
  std::uint64_t equality_violations = 0;

  void merge(const BaseMoveTally& other);
};

struct TreeEpisodeStats {
  BaseMoveTally robber;
  BaseMoveTally cop;
  /// Sum of all recorded f values.
  std::int64_t y = 0;
  std::uint64_t depth_samples = 0;
  double robber_depth_sum = 0.0;
  double cop_depth_sum = 0.0;
  std::uint64_t max_robber_depth = 0;
  std::uint64_t max_cop_depth = 0;
  /// Filled only when requested.
  std::vector<BaseMoveEvent> events;

  void merge(const TreeEpisodeStats& other);
};

struct TreeEpisodeResult {
  EpisodeReport report;
  TreeEpisodeStats stats;
};

/// Plays spin + move until capture or `horizon` spins. Requires tree-mode
/// parameters and side-correct strategies.
TreeEpisodeResult run_tree_episode(const Tree& tree, const GameParams& params,
                                   TreeStrategy cop, TreeStrategy robber,
                                   const TreeGameState& start,
                                   std::uint64_t horizon, RngStream& rng,
                                   bool record_events = false);

}  // namespace tipsy
