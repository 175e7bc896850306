// Exact absorbing-chain solves on finite truncations of the folded grid walk
// and of one-dimensional distance chains.
#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "tipsy/grid.hpp"

namespace tipsy {

/// What happens to mass that would leave the truncation.
enum class BoundaryPolicy {
  killing,     // absorbed in a separate escape state
  reflecting,  // stays put (self-loop)
};

std::string to_string(BoundaryPolicy b);

enum class LinearSolver { gauss_seidel, sparse_lu };

/// Substochastic transient block Q plus the one-step absorption vectors;
/// every row satisfies sum(Q) + capture + escape = 1.
struct TruncatedChain {
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  BoundaryPolicy boundary = BoundaryPolicy::killing;
  std::vector<GridState> states;  // for 1-D chains, x = 0 and y = position
  Matrix transient;
  Eigen::VectorXd to_capture;
  Eigen::VectorXd to_escape;

  std::size_t size() const noexcept { return states.size(); }
  std::optional<std::size_t> index_of(GridState s) const;
  /// Refreshes the state lookup after `states` changes.
  void rebuild_index();

 private:
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

/// Folded grid chain on {y >= |x|, 1 <= y <= radius}.
TruncatedChain build_grid_chain(const GameParams& params,
                                const GridStrategy& cop,
                                const GridStrategy& robber,
                                std::int64_t radius, BoundaryPolicy boundary);

/// Walk on 1..radius stepping up with probability p and down otherwise;
/// reaching 0 is capture.
TruncatedChain build_ruin_chain(double p, std::int64_t radius,
                                BoundaryPolicy boundary);

struct OracleSolution {
  BoundaryPolicy boundary = BoundaryPolicy::killing;
  std::vector<GridState> states;
  /// Probability of reaching capture before escape.
  Eigen::VectorXd absorption;
  /// Expected time to capture given capture.
  Eigen::VectorXd conditional_time;
  std::uint64_t iterations = 0;
  double residual = 0.0;

  std::optional<std::size_t> index_of(GridState s) const;
  double absorption_at(GridState s) const;
  double time_at(GridState s) const;
};

struct SolverOptions {
  LinearSolver method = LinearSolver::gauss_seidel;
  double tolerance = 1e-12;
  std::uint64_t max_sweeps = 2'000'000;
};

/// Solves h = Q h + capture and g = Q g + h; the conditional time is g / h.
/// Throws std::runtime_error if the iteration does not reach the tolerance.
OracleSolution solve(const TruncatedChain& chain, SolverOptions options = {});

/// Stationary law of the reflecting chain in which capture restarts the walk
/// at (0,1). Entry 0 is the capture state, entry i+1 is chain.states[i].
Eigen::VectorXd stationary_distribution(const TruncatedChain& chain);

}  // namespace tipsy
