// The game on Z^2 in difference coordinates D = R - C.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tipsy/episode.hpp"
#include "tipsy/spinner.hpp"

namespace tipsy {

struct GridState {
  std::int64_t x = 0;
  std::int64_t y = 0;

  bool captured() const noexcept { return x == 0 && y == 0; }
  friend bool operator==(const GridState&, const GridState&) = default;
};

inline std::int64_t larger_coordinate(GridState s) noexcept {
  return std::max(std::llabs(s.x), std::llabs(s.y));
}

/// Graph distance on Z^2.
inline std::int64_t grid_distance(GridState s) noexcept {
  return std::llabs(s.x) + std::llabs(s.y);
}

/// Canonical representative in the wedge y >= |x| under the reflections
/// across the two diagonals (the identification used by the folded walk).
inline GridState fold(GridState s) noexcept {
  if (s.y >= std::llabs(s.x)) return s;
  if (-s.y >= std::llabs(s.x)) return {-s.x, -s.y};
  if (s.x >= std::llabs(s.y)) return {s.y, s.x};
  return {-s.y, -s.x};
}

enum class Side { cop, robber };

/// Thrown when a move is requested in a captured state.
class GameOver : public std::logic_error {
 public:
  GameOver() : std::logic_error("game already over: D = (0,0)") {}
};

class GridStrategy {
 public:
  enum class Kind {
    rs,        // robber: grow the larger coordinate
    rs_minor,  // robber: grow the smaller coordinate
    cs1,       // cop: shrink the larger coordinate
    cs2,       // cop: CS1 off the diagonal, mixed on it
    foolish,   // cop: shrink the smaller nonzero coordinate
  };

  static GridStrategy rs() { return GridStrategy(Kind::rs, 0.0); }
  static GridStrategy rs_minor() { return GridStrategy(Kind::rs_minor, 0.0); }
  static GridStrategy cs1() { return GridStrategy(Kind::cs1, 1.0); }
  static GridStrategy cs2(double p);
  static GridStrategy foolish() { return GridStrategy(Kind::foolish, 0.0); }

  /// Accepts RS, RS-minor, CS1, CS2, Foolish (case-insensitive). CS2 needs
  /// a mixing probability.
  static GridStrategy parse(std::string_view name,
                            std::optional<double> mixing = std::nullopt);

  Kind kind() const noexcept { return kind_; }
  /// Probability of acting as CS1 on the diagonal (CS2 only).
  double mixing() const noexcept { return p_; }
  Side side() const noexcept {
    return kind_ == Kind::rs || kind_ == Kind::rs_minor ? Side::robber
                                                        : Side::cop;
  }
  std::string name() const;

  friend bool operator==(const GridStrategy&, const GridStrategy&) = default;

 private:
  GridStrategy(Kind kind, double p) : kind_(kind), p_(p) {}
  Kind kind_;
  double p_;
};

/// Result of a sober move before any randomisation. When `mixed`, the
/// strategy takes `primary` with probability mixing() and `alternative`
/// otherwise; else `primary` is taken.
struct SoberChoice {
  GridState primary;
  GridState alternative;
  bool mixed = false;
};

SoberChoice sober_choice(const GridStrategy& strategy, GridState state);

/// True when the sober move consumes a uniform draw (CS2 on |x| = |y|).
inline bool sober_needs_draw(const GridStrategy& strategy,
                             GridState state) noexcept {
  return strategy.kind() == GridStrategy::Kind::cs2 &&
         std::llabs(state.x) == std::llabs(state.y);
}

GridState sober_move(const GridStrategy& strategy, GridState state,
                     double u = 0.0);

/// Uniform step of the mover; applied to D with sign +1 for the robber and
/// -1 for the cop. Neighbor order: +x, -x, +y, -y of the mover's piece.
GridState tipsy_move(GridState state, Side mover, double u);

enum class GridMove { plus_x = 0, minus_x = 1, plus_y = 2, minus_y = 3 };

inline GridState apply(GridState s, GridMove m) noexcept {
  switch (m) {
    case GridMove::plus_x: return {s.x + 1, s.y};
    case GridMove::minus_x: return {s.x - 1, s.y};
    case GridMove::plus_y: return {s.x, s.y + 1};
    case GridMove::minus_y: return {s.x, s.y - 1};
  }
  return s;
}

inline GridMove move_between(GridState from, GridState to) {
  const auto dx = to.x - from.x;
  const auto dy = to.y - from.y;
  if (dx == 1 && dy == 0) return GridMove::plus_x;
  if (dx == -1 && dy == 0) return GridMove::minus_x;
  if (dx == 0 && dy == 1) return GridMove::plus_y;
  if (dx == 0 && dy == -1) return GridMove::minus_y;
  throw std::logic_error("states are not grid neighbours");
}

/// Exact one-step law of D over the four unit moves.
template <class Scalar>
struct BasicGridStepDistribution {
  std::array<Scalar, 4> prob{};

  Scalar& operator[](GridMove m) { return prob[static_cast<int>(m)]; }
  const Scalar& operator[](GridMove m) const {
    return prob[static_cast<int>(m)];
  }
  Scalar total() const { return prob[0] + prob[1] + prob[2] + prob[3]; }
};

using GridStepDistribution = BasicGridStepDistribution<double>;

namespace detail {

template <class Scalar>
void add_sober(BasicGridStepDistribution<Scalar>& dist,
               const GridStrategy& strategy, GridState state,
               const Scalar& mass) {
  const SoberChoice choice = sober_choice(strategy, state);
  if (!choice.mixed) {
    dist[move_between(state, choice.primary)] += mass;
    return;
  }
  const Scalar p(strategy.mixing());
  dist[move_between(state, choice.primary)] += mass * p;
  dist[move_between(state, choice.alternative)] += mass * (Scalar(1) - p);
}

}  // namespace detail

/// Integrates the spinner over both strategies. Tipsy mass of either player
/// spreads t/4 on every unit move of D, so only t = tc + tr enters.
template <class Scalar>
BasicGridStepDistribution<Scalar> step_distribution(
    const BasicGameParams<Scalar>& params, const GridStrategy& cop,
    const GridStrategy& robber, GridState state) {
  if (state.captured()) throw GameOver();
  BasicGridStepDistribution<Scalar> dist;
  detail::add_sober(dist, cop, state, params.c);
  detail::add_sober(dist, robber, state, params.r);
  const Scalar quarter = (params.tc + params.tr) / Scalar(4);
  for (auto& p : dist.prob) p += quarter;
  return dist;
}

/// Law of the folded state after one step, aggregated by folded target and
/// listed in first-seen order of the moves +x, -x, +y, -y. The capture state
/// (0,0) is reported as itself.
template <class Scalar>
std::vector<std::pair<GridState, Scalar>> folded_step_distribution(
    const BasicGameParams<Scalar>& params, const GridStrategy& cop,
    const GridStrategy& robber, GridState state) {
  const auto dist = step_distribution(params, cop, robber, state);
  std::vector<std::pair<GridState, Scalar>> out;
  for (int m = 0; m < 4; ++m) {
    if (dist.prob[m] == Scalar(0)) continue;
    const GridState target = fold(apply(state, static_cast<GridMove>(m)));
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const auto& e) { return e.first == target; });
    if (it == out.end())
      out.emplace_back(target, dist.prob[m]);
    else
      it->second += dist.prob[m];
  }
  return out;
}

/// Expected change of max(|x|,|y|) over two rounds, by exhaustive
/// enumeration of the one-step laws. Capture is absorbing.
template <class Scalar>
Scalar two_round_expectation(const BasicGameParams<Scalar>& params,
                             const GridStrategy& cop,
                             const GridStrategy& robber, GridState state) {
  const auto first = step_distribution(params, cop, robber, state);
  const Scalar start(static_cast<long long>(larger_coordinate(state)));
  Scalar expected(0);
  for (int m = 0; m < 4; ++m) {
    const GridState mid = apply(state, static_cast<GridMove>(m));
    if (mid.captured()) {
      expected += first.prob[m] * (Scalar(0) - start);
      continue;
    }
    const auto second = step_distribution(params, cop, robber, mid);
    for (int k = 0; k < 4; ++k) {
      const GridState end = apply(mid, static_cast<GridMove>(k));
      const Scalar change =
          Scalar(static_cast<long long>(larger_coordinate(end))) - start;
      expected += first.prob[m] * second.prob[k] * change;
    }
  }
  return expected;
}

/// Diagonal mixing probability t(c-r) / (2c(2r+t)) that makes the folded
/// walk against RS reversible.
template <class Scalar>
Scalar cs2_reversible_mixing(const BasicGameParams<Scalar>& params) {
  const Scalar t = params.t();
  return t * (params.c - params.r) /
         (Scalar(2) * params.c * (Scalar(2) * params.r + t));
}

/// Plays spin + move until D = (0,0) or `horizon` spins have been made.
EpisodeReport run_grid_episode(const GameParams& params,
                               const GridStrategy& cop,
                               const GridStrategy& robber, GridState start,
                               std::uint64_t horizon, RngStream& rng);

}  // namespace tipsy
