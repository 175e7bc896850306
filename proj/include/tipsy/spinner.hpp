// Game parameters, the four-outcome spinner and per-episode random streams.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace tipsy {

enum class GameMode { grid, tree };

/// Spinner probabilities: sober cop `c`, sober robber `r`, tipsy cop `tc`,
/// tipsy robber `tr`. Templated on the scalar so closed-form identities can be
/// checked in exact arithmetic.
template <class Scalar>
struct BasicGameParams {
  Scalar c{};
  Scalar r{};
  Scalar tc{};
  Scalar tr{};
  GameMode mode = GameMode::grid;

  /// Combined tipsiness; on the grid only this sum matters.
  Scalar t() const { return tc + tr; }

  template <class Other>
  BasicGameParams<Other> cast() const {
    return {Other(c), Other(r), Other(tc), Other(tr), mode};
  }
};

using GameParams = BasicGameParams<double>;

inline constexpr double kProbabilityTolerance = 1e-12;

struct ParamError {
  enum class Kind { range, sum, tree_split };
  Kind kind;
  std::string message;
};

class InvalidParams : public std::invalid_argument {
 public:
  InvalidParams(ParamError error)
      : std::invalid_argument(error.message), error_(std::move(error)) {}
  const ParamError& error() const noexcept { return error_; }

 private:
  ParamError error_;
};

/// Returns the first violated constraint, or nullopt when the parameters are
/// usable in their declared mode.
std::optional<ParamError> validate(const GameParams& params);

/// Validating constructor; throws InvalidParams.
GameParams make_params(double c, double r, double tc, double tr,
                       GameMode mode = GameMode::grid);

/// Grid parameters from the combined tipsiness, split evenly between players.
GameParams grid_params(double c, double r, double t);

/// Tree parameters from the two tipsiness values, using c = 1/2 - tc and
/// r = 1/2 - tr.
GameParams tree_params(double tc, double tr);

enum class SpinnerOutcome { sober_cop, sober_robber, tipsy_cop, tipsy_robber };

const char* to_string(SpinnerOutcome outcome);

/// Maps u in [0,1) onto the outcome intervals, always in the order
/// (sober cop, sober robber, tipsy cop, tipsy robber).
inline SpinnerOutcome spin(const GameParams& params, double u) noexcept {
  if (u < params.c) return SpinnerOutcome::sober_cop;
  if (u < params.c + params.r) return SpinnerOutcome::sober_robber;
  if (u < params.c + params.r + params.tc) return SpinnerOutcome::tipsy_cop;
  return SpinnerOutcome::tipsy_robber;
}

/// Cumulative spinner thresholds, hoisted out of simulation loops. Produces
/// the same outcome as spin() for every u.
class Spinner {
 public:
  explicit Spinner(const GameParams& params)
      : cop_(params.c),
        robber_(params.c + params.r),
        tipsy_cop_(params.c + params.r + params.tc) {}

  SpinnerOutcome operator()(double u) const noexcept {
    if (u < cop_) return SpinnerOutcome::sober_cop;
    if (u < robber_) return SpinnerOutcome::sober_robber;
    if (u < tipsy_cop_) return SpinnerOutcome::tipsy_cop;
    return SpinnerOutcome::tipsy_robber;
  }

 private:
  double cop_;
  double robber_;
  double tipsy_cop_;
};

/// Deterministic random stream for one episode. Equal (master_seed,
/// stream_index) pairs yield identical sequences; the engine is
/// std::mt19937_64, whose output is fixed by the standard, seeded through
/// std::seed_seq with both words of both indices.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const noexcept { return master_seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_index_;
  std::mt19937_64 engine_;
};

/// Uniform index in [0, n) from u in [0,1).
inline std::size_t pick_index(double u, std::size_t n) noexcept {
  auto k = static_cast<std::size_t>(u * static_cast<double>(n));
  return k < n ? k : n - 1;
}

/// SplitMix64 finaliser; used to derive independent seeds for sub-batches.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace tipsy
