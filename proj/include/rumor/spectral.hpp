#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "rumor/errors.hpp"
#include "rumor/graph.hpp"
#include "rumor/rng.hpp"

namespace rumor {

struct SpectralEstimate {
  double lambda = 0.0;
  std::size_t iterations_used = 0;
  double residual = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct SpectralOptions {
  double tol = 1e-8;
  std::size_t max_iter = 100000;
};

// ±1 two-coloring (one BFS per component, lowest id gets +1), or nullopt when
// the graph has an odd cycle.
inline std::optional<std::vector<double>> bipartition_signs(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<double> sign(n, 0.0);
  std::vector<NodeId> queue;
  for (NodeId root = 0; root < n; ++root) {
    if (sign[root] != 0.0) continue;
    sign[root] = 1.0;
    queue.assign(1, root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      for (NodeId w : g.neighbors(v)) {
        if (sign[w] == 0.0) {
          sign[w] = -sign[v];
          queue.push_back(w);
        } else if (sign[w] == sign[v]) {
          return std::nullopt;
        }
      }
    }
  }
  return sign;
}

namespace detail {

inline void adjacency_multiply(const Graph& g, const std::vector<double>& x, std::vector<double>& y) {
  const auto adj = g.adjacency();
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    double s = 0.0;
    const std::size_t end = g.offset(v) + g.degree(v);
    for (std::size_t k = g.offset(v); k < end; ++k) s += x[adj[k]];
    y[v] = s;
  }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Removes the components along the given mutually orthogonal directions.
inline void project_out(std::vector<double>& x, const std::vector<std::vector<double>>& dirs) {
  for (const auto& d : dirs) {
    const double c = dot(x, d) / dot(d, d);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= c * d[i];
  }
}

}  // namespace detail

// Largest |eigenvalue| of the adjacency matrix of a D-regular graph once the
// trivial eigenvectors are removed: the all-ones vector (eigenvalue D) and,
// for bipartite graphs, the ±1 side vector (eigenvalue -D).
//
// Power iteration runs on A^2 restricted to that complement, so eigenvalues of
// equal magnitude and opposite sign do not make the iterate oscillate. The
// estimate is sqrt of the Rayleigh quotient of A^2; the residual reported is
// ||A^2 x - mu x|| for the unit iterate x.
inline SpectralEstimate estimate_lambda(const Graph& g, const SpectralOptions& opts, RngSeed seed) {
  std::size_t degree = 0;
  if (!g.is_regular(&degree)) throw UsageError("estimate_lambda requires a regular graph");
  if (!(opts.tol > 0.0)) throw UsageError("estimate_lambda: tol must be positive");
  const std::size_t n = g.num_nodes();

  std::vector<std::vector<double>> trivial;
  trivial.emplace_back(n, 1.0);
  if (degree > 0) {
    if (auto signs = bipartition_signs(g)) trivial.push_back(std::move(*signs));
  }

  SpectralEstimate est;
  if (n <= trivial.size()) {
    est.converged = true;
    est.residual = 0.0;
    return est;
  }

  Rng rng(seed);
  std::vector<double> x(n), y(n), z(n);
  for (auto& xi : x) xi = 2.0 * rng.uniform() - 1.0;
  detail::project_out(x, trivial);
  double norm = std::sqrt(detail::dot(x, x));
  if (norm == 0.0) {
    est.converged = true;
    est.residual = 0.0;
    return est;
  }
  for (auto& xi : x) xi /= norm;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    detail::adjacency_multiply(g, x, y);
    detail::adjacency_multiply(g, y, z);
    detail::project_out(z, trivial);
    const double mu = detail::dot(y, y);
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = z[i] - mu * x[i];
      res2 += r * r;
    }
    est.lambda = std::sqrt(std::max(mu, 0.0));
    est.iterations_used = it;
    est.residual = std::sqrt(res2);
    if (est.residual <= opts.tol) {
      est.converged = true;
      return est;
    }
    norm = std::sqrt(detail::dot(z, z));
    if (norm == 0.0) {
      // Complement is annihilated by A^2: every nontrivial eigenvalue is 0.
      est.lambda = 0.0;
      est.residual = 0.0;
      est.converged = true;
      return est;
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / norm;
  }
  return est;
}

inline SpectralEstimate estimate_lambda(const Graph& g, double tol, std::size_t max_iter, RngSeed seed) {
  return estimate_lambda(g, SpectralOptions{tol, max_iter}, seed);
}

struct BoundarySample {
  std::size_t set_size = 0;
  std::size_t boundary_size = 0;
  double ratio = 0.0;  // |boundary| / min(2N/5, |A| D)
};

struct BoundaryReport {
  std::size_t nodes = 0;
  std::size_t degree = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double mean_ratio = 0.0;
  std::vector<BoundarySample> samples;
};

inline BoundarySample boundary_ratio(const Graph& g, const NodeSet& a, std::size_t degree) {
  const auto boundary = node_boundary(g, a);
  const double cap = std::min(2.0 * static_cast<double>(g.num_nodes()) / 5.0,
                              static_cast<double>(a.size() * degree));
  return {a.size(), boundary.size(), static_cast<double>(boundary.size()) / cap};
}

// Samples random node sets A with 1 <= |A| <= max_set_frac * N and reports how
// |boundary(A)| compares with min(2N/5, |A| D). Descriptive only: the constant
// the caller compares against is chosen outside.
inline BoundaryReport check_boundary_bound(const Graph& g, std::size_t trials, double max_set_frac,
                                           RngSeed seed) {
  std::size_t degree = 0;
  if (!g.is_regular(&degree)) throw UsageError("check_boundary_bound requires a regular graph");
  if (!(max_set_frac > 0.0 && max_set_frac <= 0.1))
    throw UsageError("check_boundary_bound: max_set_frac must lie in (0, 1/10]");
  const std::size_t n = g.num_nodes();
  const auto max_size = std::max<std::size_t>(1, static_cast<std::size_t>(max_set_frac * static_cast<double>(n)));

  Rng rng(seed);
  std::vector<NodeId> pool(n);
  BoundaryReport report;
  report.nodes = n;
  report.degree = degree;
  double total = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t size = 1 + static_cast<std::size_t>(rng.below(max_size));
    for (NodeId v = 0; v < n; ++v) pool[v] = v;
    NodeSet a(n);
    for (std::size_t i = 0; i < size; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(pool[i], pool[j]);
      a.insert(pool[i]);
    }
    const auto sample = boundary_ratio(g, a, degree);
    report.min_ratio = std::min(report.min_ratio, sample.ratio);
    total += sample.ratio;
    report.samples.push_back(sample);
  }
  if (trials > 0) report.mean_ratio = total / static_cast<double>(trials);
  return report;
}

}  // namespace rumor
