#include "tipsy/tree.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace tipsy {
namespace {

std::size_t lcp(const std::vector<TreeLabel>& a,
                const std::vector<TreeLabel>& b) {
  const auto n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

// What a single move did, for the base-move bookkeeping.
struct MoveEffect {
  bool base = false;  // moved along an edge of B
  bool stay = false;  // CSB stay
  TreeLabel label = 0;
};

// In-place game state with the two common-prefix lengths cached, so that
// every move and distance query is O(1).
class Engine {
 public:
  Engine(const Tree& tree, TreeGameState state)
      : Delta_(tree.params().Delta),
        delta_(tree.params().delta),
        s_(std::move(state)),
        base_lcp_(lcp(s_.cop.base_path, s_.robber.base_path)),
        small_lcp_(lcp(s_.cop.small_path, s_.robber.small_path)) {}

  const TreeGameState& state() const noexcept { return s_; }
  TreeGameState take() { return std::move(s_); }

  bool same_copy() const noexcept {
    return s_.cop.base_path.size() == base_lcp_ &&
           s_.robber.base_path.size() == base_lcp_;
  }
  std::size_t base_distance() const noexcept {
    return s_.cop.base_path.size() + s_.robber.base_path.size() -
           2 * base_lcp_;
  }
  std::size_t distance() const noexcept {
    const auto a = s_.cop.small_path.size();
    const auto b = s_.robber.small_path.size();
    if (same_copy()) return a + b - 2 * small_lcp_;
    return a + b + base_distance();
  }
  bool captured() const noexcept { return same_copy() && distance() == 0; }

  const TreeVertex& at(Side side) const noexcept {
    return side == Side::cop ? s_.cop : s_.robber;
  }

  // First base label on the path from the mover's projection to the other
  // projection. Requires different copies.
  TreeLabel toward_label(Side mover) const {
    const auto& p = at(mover).base_path;
    const auto& q = at(other(mover)).base_path;
    return p.size() > base_lcp_ ? p.back() : q[base_lcp_];
  }

  void base_step(Side mover, TreeLabel k) {
    auto& p = mut(mover).base_path;
    const auto& q = at(other(mover)).base_path;
    if (!p.empty() && p.back() == k) {
      p.pop_back();
      base_lcp_ = std::min(base_lcp_, p.size());
    } else {
      if (base_lcp_ == p.size() && q.size() > base_lcp_ && q[base_lcp_] == k)
        ++base_lcp_;
      p.push_back(k);
    }
  }

  void small_push(Side mover, TreeLabel k) {
    auto& p = mut(mover).small_path;
    const auto& q = at(other(mover)).small_path;
    if (small_lcp_ == p.size() && q.size() > small_lcp_ && q[small_lcp_] == k)
      ++small_lcp_;
    p.push_back(k);
  }

  void small_pop(Side mover) {
    auto& p = mut(mover).small_path;
    p.pop_back();
    small_lcp_ = std::min(small_lcp_, p.size());
  }

  MoveEffect step_to_neighbor(Side mover, int k) {
    if (at(mover).on_base()) {
      if (k < Delta_ - 1) {
        base_step(mover, static_cast<TreeLabel>(k));
        return {true, false, static_cast<TreeLabel>(k)};
      }
      small_push(mover, 0);
      return {};
    }
    if (k == 0)
      small_pop(mover);
    else
      small_push(mover, static_cast<TreeLabel>(k - 1));
    return {};
  }

  MoveEffect tipsy(Side mover, double u) {
    const int deg = at(mover).on_base() ? Delta_ : delta_;
    return step_to_neighbor(mover, static_cast<int>(pick_index(u, deg)));
  }

  MoveEffect sober(TreeStrategy strategy, double u) {
    switch (strategy) {
      case TreeStrategy::cs: return cop_pursue();
      case TreeStrategy::csb: return cop_via_base();
      case TreeStrategy::rsa:
        return s_.robber.on_base() ? robber_base_flee(u) : robber_small_flee(u);
      case TreeStrategy::rsb:
        if (s_.robber.on_base()) return robber_base_flee(u);
        small_pop(Side::robber);
        return {};
    }
    return {};
  }

 private:
  static Side other(Side s) noexcept {
    return s == Side::cop ? Side::robber : Side::cop;
  }
  TreeVertex& mut(Side side) noexcept {
    return side == Side::cop ? s_.cop : s_.robber;
  }

  MoveEffect cop_base_toward() {
    const TreeLabel k = toward_label(Side::cop);
    base_step(Side::cop, k);
    return {true, false, k};
  }

  MoveEffect cop_pursue() {
    if (same_copy()) {
      const auto& cs = s_.cop.small_path;
      if (small_lcp_ == cs.size())
        small_push(Side::cop, s_.robber.small_path[cs.size()]);
      else
        small_pop(Side::cop);
      return {};
    }
    if (!s_.cop.on_base()) {
      small_pop(Side::cop);
      return {};
    }
    return cop_base_toward();
  }

  MoveEffect cop_via_base() {
    if (!s_.cop.on_base()) {
      small_pop(Side::cop);
      return {};
    }
    if (same_copy()) return {false, true, 0};
    return cop_base_toward();
  }

  MoveEffect robber_base_flee(double u) {
    TreeLabel k;
    if (same_copy()) {
      k = static_cast<TreeLabel>(pick_index(u, Delta_ - 1));
    } else {
      const TreeLabel toward = toward_label(Side::robber);
      k = static_cast<TreeLabel>(pick_index(u, Delta_ - 2));
      if (k >= toward) ++k;
    }
    base_step(Side::robber, k);
    return {true, false, k};
  }

  MoveEffect robber_small_flee(double u) {
    const auto& rs = s_.robber.small_path;
    int on_path = 0;
    if (same_copy() && small_lcp_ == rs.size())
      on_path = 1 + s_.cop.small_path[rs.size()];
    int k = static_cast<int>(pick_index(u, delta_ - 1));
    if (k >= on_path) ++k;
    return step_to_neighbor(Side::robber, k);
  }

  int Delta_;
  int delta_;
  TreeGameState s_;
  std::size_t base_lcp_;
  std::size_t small_lcp_;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

void check_state(const Tree& tree, const TreeGameState& state) {
  tree.check(state.cop);
  tree.check(state.robber);
  if (state.captured()) throw GameOver();
}

}  // namespace

void validate(const TreeParams& tree) {
  if (tree.Delta < 3) throw std::invalid_argument("Delta must be >= 3");
  if (tree.delta < 2) throw std::invalid_argument("delta must be >= 2");
  if (tree.Delta < tree.delta)
    throw std::invalid_argument("Delta must be >= delta");
  if (tree.Delta > 65536) throw std::invalid_argument("Delta too large");
}

Tree::Tree(TreeParams params) : params_(params) { validate(params_); }

bool Tree::is_valid(const TreeVertex& v) const noexcept {
  const auto& b = v.base_path;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i] > params_.Delta - 2) return false;
    if (i > 0 && b[i] == b[i - 1]) return false;
  }
  const auto& s = v.small_path;
  if (!s.empty() && s[0] != 0) return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > params_.delta - 2) return false;
  return true;
}

void Tree::check(const TreeVertex& v) const {
  if (!is_valid(v))
    throw std::invalid_argument("vertex address is not valid in X(" +
                                std::to_string(params_.Delta) + "," +
                                std::to_string(params_.delta) + ")");
}

TreeVertex Tree::neighbor(const TreeVertex& v, int k) const {
  check(v);
  if (k < 0 || k >= degree(v))
    throw std::out_of_range("neighbor index out of range");
  TreeVertex w = v;
  if (w.on_base()) {
    if (k < params_.Delta - 1) {
      const auto label = static_cast<TreeLabel>(k);
      if (!w.base_path.empty() && w.base_path.back() == label)
        w.base_path.pop_back();
      else
        w.base_path.push_back(label);
    } else {
      w.small_path.push_back(0);
    }
  } else if (k == 0) {
    w.small_path.pop_back();
  } else {
    w.small_path.push_back(static_cast<TreeLabel>(k - 1));
  }
  return w;
}

std::vector<TreeVertex> Tree::neighbors(const TreeVertex& v) const {
  std::vector<TreeVertex> out;
  for (int k = 0; k < degree(v); ++k) out.push_back(neighbor(v, k));
  return out;
}

std::size_t Tree::distance(const TreeVertex& u, const TreeVertex& v) const {
  check(u);
  check(v);
  const auto a = u.small_path.size();
  const auto b = v.small_path.size();
  if (u.base_path == v.base_path)
    return a + b - 2 * lcp(u.small_path, v.small_path);
  return a + b + u.base_path.size() + v.base_path.size() -
         2 * lcp(u.base_path, v.base_path);
}

TreeVertex Tree::project_to_base(const TreeVertex& v) {
  return {v.base_path, {}};
}

TreeVertex Tree::base_vertex_at(std::size_t d) {
  TreeVertex v;
  v.base_path.reserve(d);
  for (std::size_t i = 0; i < d; ++i)
    v.base_path.push_back(static_cast<TreeLabel>(i % 2));
  return v;
}

TreeGameState default_tree_start(std::size_t d0) {
  if (d0 == 0) throw std::invalid_argument("start distance must be >= 1");
  return {TreeVertex{}, Tree::base_vertex_at(d0)};
}

TreeStrategy parse_tree_strategy(std::string_view name) {
  const std::string n = lower(name);
  if (n == "cs") return TreeStrategy::cs;
  if (n == "csb") return TreeStrategy::csb;
  if (n == "rsa") return TreeStrategy::rsa;
  if (n == "rsb") return TreeStrategy::rsb;
  throw std::invalid_argument("unknown tree strategy '" + std::string(name) +
                              "'");
}

std::string to_string(TreeStrategy strategy) {
  switch (strategy) {
    case TreeStrategy::cs: return "CS";
    case TreeStrategy::csb: return "CSB";
    case TreeStrategy::rsa: return "RSA";
    case TreeStrategy::rsb: return "RSB";
  }
  return "?";
}

Side side_of(TreeStrategy strategy) noexcept {
  return strategy == TreeStrategy::cs || strategy == TreeStrategy::csb
             ? Side::cop
             : Side::robber;
}

TreeGameState sober_move_tree(const Tree& tree, TreeStrategy strategy,
                              const TreeGameState& state, double u) {
  check_state(tree, state);
  Engine engine(tree, state);
  engine.sober(strategy, u);
  return engine.take();
}

TreeGameState tipsy_move_tree(const Tree& tree, const TreeGameState& state,
                              Side mover, double u) {
  check_state(tree, state);
  Engine engine(tree, state);
  engine.tipsy(mover, u);
  return engine.take();
}

void BaseMoveTally::merge(const BaseMoveTally& o) {
  moves += o.moves;
  f_sum += o.f_sum;
  f_lower_sum += o.f_lower_sum;
  gaps += o.gaps;
  gap_sum += o.gap_sum;
  gap_sum_sq += o.gap_sum_sq;
  domination_violations += o.domination_violations;
  equality_violations += o.equality_violations;
}

void TreeEpisodeStats::merge(const TreeEpisodeStats& o) {
  robber.merge(o.robber);
  cop.merge(o.cop);
  y += o.y;
  depth_samples += o.depth_samples;
  robber_depth_sum += o.robber_depth_sum;
  cop_depth_sum += o.cop_depth_sum;
  max_robber_depth = std::max(max_robber_depth, o.max_robber_depth);
  max_cop_depth = std::max(max_cop_depth, o.max_cop_depth);
  events.insert(events.end(), o.events.begin(), o.events.end());
}

TreeEpisodeResult run_tree_episode(const Tree& tree, const GameParams& params,
                                   TreeStrategy cop, TreeStrategy robber,
                                   const TreeGameState& start,
                                   std::uint64_t horizon, RngStream& rng,
                                   bool record_events) {
  if (auto err = validate(params)) throw InvalidParams(*err);
  if (params.mode != GameMode::tree)
    throw std::invalid_argument("tree games need tree-mode parameters");
  if (side_of(cop) != Side::cop)
    throw std::invalid_argument(to_string(cop) + " is not a cop strategy");
  if (side_of(robber) != Side::robber)
    throw std::invalid_argument(to_string(robber) +
                                " is not a robber strategy");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  check_state(tree, start);

  const Spinner spinner(params);
  Engine g(tree, start);
  TreeEpisodeResult result;
  auto& stats = result.stats;
  std::optional<std::uint64_t> last_robber_move;
  std::optional<std::uint64_t> last_cop_move;
  if (start.robber.on_base()) last_robber_move = 0;
  if (start.cop.on_base()) last_cop_move = 0;

  for (std::uint64_t step = 1; step <= horizon; ++step) {
    const SpinnerOutcome outcome = spinner(rng.uniform());
    const bool is_sober = outcome == SpinnerOutcome::sober_cop ||
                          outcome == SpinnerOutcome::sober_robber;
    const Side mover = outcome == SpinnerOutcome::sober_cop ||
                               outcome == SpinnerOutcome::tipsy_cop
                           ? Side::cop
                           : Side::robber;
    const bool differ = !g.same_copy();
    const std::size_t before = g.base_distance();
    // Base label whose tipsy use counts against the mover in the lower bound.
    const TreeLabel special =
        differ && g.at(mover).on_base() ? g.toward_label(mover) : 0;

    const MoveEffect effect =
        is_sober ? g.sober(mover == Side::cop ? cop : robber, rng.uniform())
                 : g.tipsy(mover, rng.uniform());

    if (effect.base || effect.stay) {
      const std::size_t after = g.base_distance();
      const int f = after < before ? -1 : 1;
      int f_lower;
      if (is_sober)
        f_lower = mover == Side::robber ? 1 : -1;
      else
        f_lower = effect.label == special ? -1 : 1;

      BaseMoveTally& tally = mover == Side::robber ? stats.robber : stats.cop;
      auto& last = mover == Side::robber ? last_robber_move : last_cop_move;
      ++tally.moves;
      tally.f_sum += f;
      tally.f_lower_sum += f_lower;
      if (f < f_lower) ++tally.domination_violations;
      if (differ && f != f_lower) ++tally.equality_violations;
      if (last) {
        const double gap = static_cast<double>(step - *last);
        ++tally.gaps;
        tally.gap_sum += gap;
        tally.gap_sum_sq += gap * gap;
      }
      last = step;
      stats.y += f;
      if (record_events)
        stats.events.push_back({step, mover, f, f_lower, differ});
    }

    const auto rd = g.state().robber.depth();
    const auto cd = g.state().cop.depth();
    ++stats.depth_samples;
    stats.robber_depth_sum += static_cast<double>(rd);
    stats.cop_depth_sum += static_cast<double>(cd);
    stats.max_robber_depth = std::max<std::uint64_t>(stats.max_robber_depth, rd);
    stats.max_cop_depth = std::max<std::uint64_t>(stats.max_cop_depth, cd);

    if (g.captured()) {
      result.report = {true, step, step, 0};
      return result;
    }
  }
  result.report.steps_run = horizon;
  result.report.final_distance = static_cast<std::int64_t>(g.distance());
  return result;
}

}  // namespace tipsy
