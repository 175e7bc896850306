#include "tipsy/grid.hpp"

#include <algorithm>
#include <cctype>

namespace tipsy {
namespace {

std::int64_t sgn(std::int64_t v) { return v < 0 ? -1 : 1; }

// Unit step that moves the larger |coordinate| by `dir` (+1 outward, -1
// inward). Ties on |x| = |y| act on y.
GridState step_larger(GridState s, int dir) {
  if (std::llabs(s.x) > std::llabs(s.y)) return {s.x + dir * sgn(s.x), s.y};
  return {s.x, s.y + dir * sgn(s.y)};
}

// Grows the smaller |coordinate| away from zero; ties act on x. A zero
// coordinate grows in the positive direction.
GridState grow_smaller(GridState s) {
  if (std::llabs(s.y) < std::llabs(s.x)) return {s.x, s.y + sgn(s.y)};
  return {s.x + sgn(s.x), s.y};
}

// Shrinks the smaller nonzero |coordinate|; ties act on x, a zero smaller
// coordinate hands the move to the larger one.
GridState shrink_smaller_nonzero(GridState s) {
  const auto ax = std::llabs(s.x);
  const auto ay = std::llabs(s.y);
  if (ax == ay) return {s.x - sgn(s.x), s.y};
  if (ax < ay) {
    if (s.x != 0) return {s.x - sgn(s.x), s.y};
    return {s.x, s.y - sgn(s.y)};
  }
  if (s.y != 0) return {s.x, s.y - sgn(s.y)};
  return {s.x - sgn(s.x), s.y};
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

}  // namespace

GridStrategy GridStrategy::cs2(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("CS2 mixing probability must lie in [0, 1]");
  return GridStrategy(Kind::cs2, p);
}

GridStrategy GridStrategy::parse(std::string_view name,
                                 std::optional<double> mixing) {
  const std::string n = lower(name);
  if (n == "rs") return rs();
  if (n == "rs-minor" || n == "rs_minor") return rs_minor();
  if (n == "cs1") return cs1();
  if (n == "foolish" || n == "foolishcop") return foolish();
  if (n == "cs2") {
    if (!mixing) throw std::invalid_argument("CS2 requires a mixing probability");
    return cs2(*mixing);
  }
  throw std::invalid_argument("unknown grid strategy '" + std::string(name) +
                              "'");
}

std::string GridStrategy::name() const {
  switch (kind_) {
    case Kind::rs: return "RS";
    case Kind::rs_minor: return "RS-minor";
    case Kind::cs1: return "CS1";
    case Kind::cs2: return "CS2";
    case Kind::foolish: return "Foolish";
  }
  return "?";
}

SoberChoice sober_choice(const GridStrategy& strategy, GridState s) {
  if (s.captured()) throw GameOver();
  switch (strategy.kind()) {
    case GridStrategy::Kind::rs: return {step_larger(s, +1), {}, false};
    case GridStrategy::Kind::rs_minor: return {grow_smaller(s), {}, false};
    case GridStrategy::Kind::cs1: return {step_larger(s, -1), {}, false};
    case GridStrategy::Kind::foolish:
      return {shrink_smaller_nonzero(s), {}, false};
    case GridStrategy::Kind::cs2:
      if (std::llabs(s.x) == std::llabs(s.y))
        return {step_larger(s, -1), step_larger(s, +1), true};
      return {step_larger(s, -1), {}, false};
  }
  return {s, {}, false};
}

GridState sober_move(const GridStrategy& strategy, GridState state, double u) {
  const SoberChoice choice = sober_choice(strategy, state);
  if (!choice.mixed) return choice.primary;
  return u < strategy.mixing() ? choice.primary : choice.alternative;
}

GridState tipsy_move(GridState state, Side mover, double u) {
  if (state.captured()) throw GameOver();
  const std::int64_t sign = mover == Side::robber ? 1 : -1;
  switch (pick_index(u, 4)) {
    case 0: return {state.x + sign, state.y};
    case 1: return {state.x - sign, state.y};
    case 2: return {state.x, state.y + sign};
    default: return {state.x, state.y - sign};
  }
}

EpisodeReport run_grid_episode(const GameParams& params,
                               const GridStrategy& cop,
                               const GridStrategy& robber, GridState start,
                               std::uint64_t horizon, RngStream& rng) {
  if (cop.side() != Side::cop)
    throw std::invalid_argument(cop.name() + " is not a cop strategy");
  if (robber.side() != Side::robber)
    throw std::invalid_argument(robber.name() + " is not a robber strategy");
  if (start.captured())
    throw std::invalid_argument("start state must differ from (0,0)");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");

  const Spinner spinner(params);
  GridState d = start;
  EpisodeReport report;
  for (std::uint64_t step = 1; step <= horizon; ++step) {
    switch (spinner(rng.uniform())) {
      case SpinnerOutcome::sober_cop: {
        const double u = sober_needs_draw(cop, d) ? rng.uniform() : 0.0;
        d = sober_move(cop, d, u);
        break;
      }
      case SpinnerOutcome::sober_robber:
        d = sober_move(robber, d, 0.0);
        break;
      case SpinnerOutcome::tipsy_cop:
        d = tipsy_move(d, Side::cop, rng.uniform());
        break;
      case SpinnerOutcome::tipsy_robber:
        d = tipsy_move(d, Side::robber, rng.uniform());
        break;
    }
    if (d.captured()) {
      report.captured = true;
      report.capture_time = step;
      report.steps_run = step;
      report.final_distance = 0;
      return report;
    }
  }
  report.steps_run = horizon;
  report.final_distance = grid_distance(d);
  return report;
}

}  // namespace tipsy
