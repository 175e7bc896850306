#include "tipsy/chain_oracle.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace tipsy {
namespace {

std::uint64_t key(GridState s) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
         static_cast<std::uint32_t>(s.y);
}

std::optional<std::size_t> find(
    const std::unordered_map<std::uint64_t, std::size_t>& lookup,
    GridState s) {
  const auto it = lookup.find(key(s));
  if (it == lookup.end()) return std::nullopt;
  return it->second;
}

// Accumulates rows, then freezes them into the sparse block.
class ChainBuilder {
 public:
  ChainBuilder(BoundaryPolicy boundary, std::vector<GridState> states) {
    chain_.boundary = boundary;
    chain_.states = std::move(states);
    chain_.rebuild_index();
    const auto n = static_cast<Eigen::Index>(chain_.size());
    chain_.to_capture = Eigen::VectorXd::Zero(n);
    chain_.to_escape = Eigen::VectorXd::Zero(n);
  }

  const TruncatedChain& chain() const { return chain_; }

  void add(std::size_t row, GridState target, double prob) {
    if (prob == 0.0) return;
    if (target.captured()) {
      chain_.to_capture[static_cast<Eigen::Index>(row)] += prob;
    } else if (auto col = chain_.index_of(target)) {
      triplets_.emplace_back(static_cast<int>(row), static_cast<int>(*col),
                             prob);
    } else if (chain_.boundary == BoundaryPolicy::killing) {
      chain_.to_escape[static_cast<Eigen::Index>(row)] += prob;
    } else {
      triplets_.emplace_back(static_cast<int>(row), static_cast<int>(row),
                             prob);
    }
  }

  TruncatedChain finish() {
    const auto n = static_cast<Eigen::Index>(chain_.size());
    chain_.transient.resize(n, n);
    chain_.transient.setFromTriplets(triplets_.begin(), triplets_.end());
    chain_.transient.makeCompressed();
    return std::move(chain_);
  }

 private:
  TruncatedChain chain_;
  std::vector<Eigen::Triplet<double>> triplets_;
};

double sup_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

double residual(const TruncatedChain::Matrix& q, const Eigen::VectorXd& x,
                const Eigen::VectorXd& b) {
  return sup_norm(x - q * x - b);
}

// x = Q x + b by symmetric Gauss-Seidel sweeps.
Eigen::VectorXd gauss_seidel(const TruncatedChain::Matrix& q,
                             const Eigen::VectorXd& b, Eigen::VectorXd x,
                             const SolverOptions& opt,
                             std::uint64_t& sweeps) {
  const Eigen::Index n = q.rows();
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (TruncatedChain::Matrix::InnerIterator it(q, i); it; ++it)
      if (it.col() == i) diag[i] += it.value();

  const auto relax = [&](Eigen::Index i) {
    double acc = b[i];
    for (TruncatedChain::Matrix::InnerIterator it(q, i); it; ++it)
      if (it.col() != i) acc += it.value() * x[it.col()];
    x[i] = acc / (1.0 - diag[i]);
  };

  for (sweeps = 1; sweeps <= opt.max_sweeps; ++sweeps) {
    for (Eigen::Index i = 0; i < n; ++i) relax(i);
    for (Eigen::Index i = n; i-- > 0;) relax(i);
    if (sweeps % 8 == 0 || sweeps < 8) {
      if (residual(q, x, b) <= opt.tolerance * std::max(1.0, sup_norm(x)))
        return x;
    }
  }
  throw std::runtime_error("Gauss-Seidel did not converge");
}

Eigen::VectorXd direct(const TruncatedChain::Matrix& q,
                       const Eigen::VectorXd& b) {
  Eigen::SparseMatrix<double> a(q.rows(), q.cols());
  a.setIdentity();
  a -= Eigen::SparseMatrix<double>(q);
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("singular absorbing-chain system");
  Eigen::VectorXd x = lu.solve(b);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("sparse solve failed");
  return x;
}

}  // namespace

std::string to_string(BoundaryPolicy b) {
  return b == BoundaryPolicy::killing ? "killing" : "reflecting";
}

void TruncatedChain::rebuild_index() {
  lookup_.clear();
  for (std::size_t i = 0; i < states.size(); ++i) lookup_[key(states[i])] = i;
}

std::optional<std::size_t> TruncatedChain::index_of(GridState s) const {
  return find(lookup_, s);
}

TruncatedChain build_grid_chain(const GameParams& params,
                                const GridStrategy& cop,
                                const GridStrategy& robber,
                                std::int64_t radius, BoundaryPolicy boundary) {
  if (auto err = validate(params)) throw InvalidParams(*err);
  if (radius < 1) throw std::invalid_argument("radius must be >= 1");
  if (cop.side() != Side::cop || robber.side() != Side::robber)
    throw std::invalid_argument("strategies are not side-correct");

  std::vector<GridState> states;
  for (std::int64_t y = 1; y <= radius; ++y)
    for (std::int64_t x = -y; x <= y; ++x) states.push_back({x, y});
  ChainBuilder builder(boundary, std::move(states));
  const auto& list = builder.chain().states;
  for (std::size_t i = 0; i < list.size(); ++i)
    for (const auto& [target, prob] :
         folded_step_distribution(params, cop, robber, list[i]))
      builder.add(i, target, prob);
  return builder.finish();
}

TruncatedChain build_ruin_chain(double p, std::int64_t radius,
                                BoundaryPolicy boundary) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("up-probability must lie in [0, 1]");
  if (radius < 1) throw std::invalid_argument("radius must be >= 1");
  std::vector<GridState> states;
  for (std::int64_t y = 1; y <= radius; ++y) states.push_back({0, y});
  ChainBuilder builder(boundary, std::move(states));
  for (std::int64_t y = 1; y <= radius; ++y) {
    const auto row = static_cast<std::size_t>(y - 1);
    builder.add(row, {0, y + 1}, p);
    builder.add(row, {0, y - 1}, 1.0 - p);
  }
  return builder.finish();
}

std::optional<std::size_t> OracleSolution::index_of(GridState s) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == s) return i;
  return std::nullopt;
}

double OracleSolution::absorption_at(GridState s) const {
  if (s.captured()) return 1.0;
  const auto i = index_of(s);
  if (!i) throw std::out_of_range("state outside the truncation");
  return absorption[static_cast<Eigen::Index>(*i)];
}

double OracleSolution::time_at(GridState s) const {
  if (s.captured()) return 0.0;
  const auto i = index_of(s);
  if (!i) throw std::out_of_range("state outside the truncation");
  return conditional_time[static_cast<Eigen::Index>(*i)];
}

OracleSolution solve(const TruncatedChain& chain, SolverOptions options) {
  OracleSolution out;
  out.boundary = chain.boundary;
  out.states = chain.states;
  const auto& q = chain.transient;

  Eigen::VectorXd h, g;
  if (options.method == LinearSolver::gauss_seidel) {
    std::uint64_t first = 0, second = 0;
    h = gauss_seidel(q, chain.to_capture,
                     Eigen::VectorXd::Zero(chain.to_capture.size()), options,
                     first);
    g = gauss_seidel(q, h, h, options, second);
    out.iterations = first + second;
  } else {
    h = direct(q, chain.to_capture);
    g = direct(q, h);
  }
  out.residual = std::max(residual(q, h, chain.to_capture), residual(q, g, h));
  out.absorption = h;
  out.conditional_time = g.cwiseQuotient(h);
  for (Eigen::Index i = 0; i < h.size(); ++i)
    if (h[i] == 0.0) out.conditional_time[i] = std::nan("");
  return out;
}

Eigen::VectorXd stationary_distribution(const TruncatedChain& chain) {
  if (chain.to_escape.size() > 0 && chain.to_escape.maxCoeff() > 0.0)
    throw std::invalid_argument("stationary law needs a closed chain");
  const auto restart = chain.index_of({0, 1});
  if (!restart) throw std::invalid_argument("chain lacks the state (0,1)");

  const auto n = static_cast<Eigen::Index>(chain.size()) + 1;
  // Rows of A = P^T - I, with the last row replaced by the normalisation.
  std::vector<Eigen::Triplet<double>> t;
  const auto add = [&](Eigen::Index from, Eigen::Index to, double p) {
    if (to != n - 1) t.emplace_back(to, from, p);
  };
  add(0, static_cast<Eigen::Index>(*restart) + 1, 1.0);
  for (Eigen::Index i = 0; i < chain.transient.rows(); ++i) {
    for (TruncatedChain::Matrix::InnerIterator it(chain.transient, i); it; ++it)
      add(i + 1, it.col() + 1, it.value());
    add(i + 1, 0, chain.to_capture[i]);
  }
  for (Eigen::Index i = 0; i < n - 1; ++i) t.emplace_back(i, i, -1.0);
  for (Eigen::Index j = 0; j < n; ++j) t.emplace_back(n - 1, j, 1.0);

  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("stationary system is singular");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  return lu.solve(rhs);
}

}  // namespace tipsy
