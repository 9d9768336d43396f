#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Eigenvalues of the dim x dim Jacobi matrix with diagonal c_0..c_{dim-1}
// and off-diagonal sqrt(lam_1..lam_{dim-1}); lam[k] is lambda_k.
inline std::vector<double> jacobi_eigenvalues(const std::vector<double>& c,
                                              const std::vector<double>& lam, std::size_t dim) {
  Eigen::VectorXd diag(dim);
  Eigen::VectorXd sub(dim > 0 ? dim - 1 : 0);
  for (std::size_t i = 0; i < dim; ++i) diag(i) = c[i];
  for (std::size_t i = 0; i + 1 < dim; ++i) sub(i) = std::sqrt(lam[i + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + dim);
  return out;
}

// P_n(x) by the plain recurrence in long double; fine for small n.
inline long double monic_value(const std::vector<double>& c, const std::vector<double>& lam,
                               long double x, std::size_t n) {
  long double prev = 0.0L, cur = 1.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const long double next = (x - c[j]) * cur - (j == 0 ? 0.0L : lam[j] * prev);
    prev = cur;
    cur = next;
  }
  return cur;
}

// Gauss quadrature nodes and weights (Golub-Welsch): eigenvalues of the
// Jacobi matrix and squared first components of its unit eigenvectors.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature golub_welsch(const std::vector<double>& c, const std::vector<double>& lam,
                               std::size_t dim) {
  Eigen::VectorXd diag(dim);
  Eigen::VectorXd sub(dim > 0 ? dim - 1 : 0);
  for (std::size_t i = 0; i < dim; ++i) diag(i) = c[i];
  for (std::size_t i = 0; i + 1 < dim; ++i) sub(i) = std::sqrt(lam[i + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  Quadrature q;
  for (std::size_t k = 0; k < dim; ++k) {
    q.nodes.push_back(es.eigenvalues()(k));
    const double v = es.eigenvectors()(0, k);
    q.weights.push_back(v * v);
  }
  return q;
}

// log2 |P_n(x)| through the ratios r_j = P_j / P_{j-1}, for c_n = 0, lam_n = 1.
inline long double log2_chebyshev_like(long double x, std::size_t n) {
  long double r = x, total = std::log2(std::fabs(r));
  for (std::size_t j = 2; j <= n; ++j) {
    r = x - 1.0L / r;
    total += std::log2(std::fabs(r));
  }
  return total;
}

struct RandomRecurrence {
  std::vector<double> c;
  std::vector<double> lam;  // lam[0] = 1
};

// c_n uniform in [-1, 1] plus n * slope, lambda_n uniform in (0, 2].
inline RandomRecurrence random_recurrence(std::mt19937_64& rng, std::size_t degree) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> slope_dist(0.0, 1.5);
  std::uniform_real_distribution<double> lam_dist(0.0, 2.0);
  const double slope = slope_dist(rng);
  RandomRecurrence r;
  r.c.resize(degree);
  r.lam.resize(degree);
  for (std::size_t n = 0; n < degree; ++n) {
    r.c[n] = unit(rng) + slope * static_cast<double>(n);
    double l = 0.0;
    while (l <= 1e-3) l = 2.0 - lam_dist(rng);
    r.lam[n] = n == 0 ? 1.0 : l;
  }
  return r;
}

}  // namespace oracle
