#include "tipsy/spinner.hpp"

#include <cmath>
#include <sstream>

namespace tipsy {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::optional<ParamError> validate(const GameParams& p) {
  const struct {
    const char* name;
    double value;
  } fields[] = {{"c", p.c}, {"r", p.r}, {"t_c", p.tc}, {"t_r", p.tr}};
  for (const auto& f : fields) {
    if (!(f.value >= 0.0 && f.value <= 1.0)) {
      return ParamError{ParamError::Kind::range,
                        std::string("probability ") + f.name + " = " +
                            fmt(f.value) + " outside [0, 1]"};
    }
  }
  const double sum = p.c + p.r + p.tc + p.tr;
  if (std::abs(sum - 1.0) > kProbabilityTolerance) {
    return ParamError{ParamError::Kind::sum,
                      "probabilities sum to " + fmt(sum) + " ≠ 1"};
  }
  if (p.mode == GameMode::tree) {
    if (std::abs(p.c + p.tc - 0.5) > kProbabilityTolerance) {
      return ParamError{ParamError::Kind::tree_split,
                        "tree mode requires c + t_c = 1/2, got " +
                            fmt(p.c + p.tc)};
    }
    if (std::abs(p.r + p.tr - 0.5) > kProbabilityTolerance) {
      return ParamError{ParamError::Kind::tree_split,
                        "tree mode requires r + t_r = 1/2, got " +
                            fmt(p.r + p.tr)};
    }
  }
  return std::nullopt;
}

GameParams make_params(double c, double r, double tc, double tr,
                       GameMode mode) {
  GameParams p{c, r, tc, tr, mode};
  if (auto err = validate(p)) throw InvalidParams(std::move(*err));
  return p;
}

GameParams grid_params(double c, double r, double t) {
  return make_params(c, r, t / 2, t / 2, GameMode::grid);
}

GameParams tree_params(double tc, double tr) {
  return make_params(0.5 - tc, 0.5 - tr, tc, tr, GameMode::tree);
}

const char* to_string(SpinnerOutcome outcome) {
  switch (outcome) {
    case SpinnerOutcome::sober_cop: return "sober_cop";
    case SpinnerOutcome::sober_robber: return "sober_robber";
    case SpinnerOutcome::tipsy_cop: return "tipsy_cop";
    case SpinnerOutcome::tipsy_robber: return "tipsy_robber";
  }
  return "?";
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_seed_(master_seed), stream_index_(stream_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_index),
                    static_cast<std::uint32_t>(stream_index >> 32)};
  engine_.seed(seq);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace tipsy
