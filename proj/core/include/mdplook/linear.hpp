#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

#include "mdplook/graph_algo.hpp"
#include "mdplook/numeric.hpp"

namespace mdplook {

struct SingularError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MultichainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense exact elimination with first-nonzero pivoting (deterministic).
inline std::vector<Rational> solve_dense(std::vector<std::vector<Rational>> a,
                                         std::vector<Rational> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (sgn(a[r][col]) != 0) { pivot = r; break; }
    if (pivot < 0) throw SingularError("exact elimination: singular system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    const Rational inv = 1 / a[col][col];
    for (int r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational f = a[r][col] * inv;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Rational> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

inline std::vector<double> solve_dense(const std::vector<std::vector<double>>& a,
                                       const std::vector<double>& b) {
  const int n = static_cast<int>(b.size());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = b[i];
    for (int j = 0; j < n; ++j) m(i, j) = a[i][j];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::VectorXd x = lu.solve(v);
  if (!x.allFinite()) throw SingularError("LU solve produced non-finite entries");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = x(i);
  return out;
}

template <class T>
using SparseRows = std::vector<std::vector<std::pair<int, T>>>;

// Solves x = rhs + M x for substochastic M given by sparse rows, block by
// block over the condensation of M's support graph (successor blocks first).
// Requires I - M nonsingular, which holds whenever every cycle of M has
// total weight < 1 (e.g. M = gamma * P with gamma < 1).
template <class T>
std::vector<T> solve_markov_system(const SparseRows<T>& rows, const std::vector<T>& rhs) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::vector<int>> adj(n);
  for (int v = 0; v < n; ++v)
    for (const auto& [w, p] : rows[v])
      if (!numeric_traits<T>::is_zero(p)) adj[v].push_back(w);
  auto scc = strongly_connected_components(adj);

  std::vector<T> x(n, T(0));
  std::vector<int> local(n, -1);
  // Component ids are in reverse topological order: successors have lower ids.
  for (int c = 0; c < scc.count; ++c) {
    const auto& nodes = scc.members[c];
    const int k = static_cast<int>(nodes.size());
    for (int i = 0; i < k; ++i) local[nodes[i]] = i;
    std::vector<std::vector<T>> a(k, std::vector<T>(k, T(0)));
    std::vector<T> b(k, T(0));
    for (int i = 0; i < k; ++i) {
      a[i][i] = T(1);
      b[i] = rhs[nodes[i]];
      for (const auto& [w, p] : rows[nodes[i]]) {
        if (scc.component[w] == c)
          a[i][local[w]] -= p;
        else
          b[i] += p * x[w];  // already solved
      }
    }
    std::vector<T> xs = solve_dense(std::move(a), std::move(b));
    for (int i = 0; i < k; ++i) x[nodes[i]] = xs[i];
  }
  return x;
}

// Stationary distribution of a chain with sparse rows P. Requires a unique
// closed communicating class; transient states get mass zero. The class
// system replaces one balance equation by the normalization sum = 1.
template <class T>
std::vector<T> stationary_distribution(const SparseRows<T>& rows) {
  const int n = static_cast<int>(rows.size());
  std::vector<std::vector<int>> adj(n);
  for (int v = 0; v < n; ++v)
    for (const auto& [w, p] : rows[v])
      if (!numeric_traits<T>::is_zero(p)) adj[v].push_back(w);
  auto scc = strongly_connected_components(adj);
  auto closed = closed_components(adj, scc);
  if (closed.size() != 1)
    throw MultichainError("chain has " + std::to_string(closed.size()) +
                          " closed classes; stationary distribution not unique");

  const auto& nodes = scc.members[closed[0]];
  const int k = static_cast<int>(nodes.size());
  std::vector<int> local(n, -1);
  for (int i = 0; i < k; ++i) local[nodes[i]] = i;

  // a[t][s] = (I - P^T) over the class; first row replaced by ones.
  std::vector<std::vector<T>> a(k, std::vector<T>(k, T(0)));
  std::vector<T> b(k, T(0));
  for (int i = 0; i < k; ++i) a[i][i] = T(1);
  for (int i = 0; i < k; ++i)
    for (const auto& [w, p] : rows[nodes[i]])
      if (local[w] >= 0) a[local[w]][i] -= p;
  for (int j = 0; j < k; ++j) a[0][j] = T(1);
  b[0] = T(1);

  std::vector<T> mu = solve_dense(std::move(a), std::move(b));
  std::vector<T> full(n, T(0));
  for (int i = 0; i < k; ++i) full[nodes[i]] = mu[i];
  return full;
}

}  // namespace mdplook
