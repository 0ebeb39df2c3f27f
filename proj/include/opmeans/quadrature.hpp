#pragma once

#include <opmeans/errors.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace opmeans {

struct Quad1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// ---------------------------------------------------------------------------
// Gauss-Jacobi rule for weight (1-x)^a (1+x)^b on [-1,1], via Golub-Welsch:
// eigenvalues of the symmetrized Jacobi-polynomial recurrence give the nodes,
// squared first eigenvector components (times the zeroth moment) the weights.
// a = b = 0 is Gauss-Legendre.
// ---------------------------------------------------------------------------
inline Quad1D gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("gauss_jacobi: need at least one node");
  if (!(a > -1.0) || !(b > -1.0))
    throw InvalidArgument("gauss_jacobi: weight exponents must exceed -1");

  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    // Diagonal (recurrence alpha_k).
    double diag;
    if (k == 0)
      diag = (b - a) / (ab + 2.0);
    else
      diag = (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0));
    J(k, k) = diag;
    // Off-diagonal (sqrt of recurrence beta_k), valid for ab > -1.
    if (k >= 1) {
      const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
      const double den =
          (2.0 * k + ab) * (2.0 * k + ab) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0);
      const double e = std::sqrt(num / den);
      J(k, k - 1) = e;
      J(k - 1, k) = e;
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw Error("gauss_jacobi: eigensolver failed");

  // mu0 = int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^(a+b+1) B(a+1, b+1)
  const double mu0 = std::pow(2.0, ab + 1.0) * std::beta(a + 1.0, b + 1.0);

  Quad1D q;
  q.nodes.resize(static_cast<size_t>(n));
  q.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    q.nodes[static_cast<size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    q.weights[static_cast<size_t>(i)] = mu0 * v0 * v0;
  }
  return q;
}

inline Quad1D gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

// Same rule mapped to [0,1] with weight (1-u)^a u^b.
inline Quad1D gauss_jacobi_01(int n, double a, double b) {
  Quad1D q = gauss_jacobi(n, a, b);
  const double scale = std::pow(2.0, -(a + b + 1.0));
  for (size_t i = 0; i < q.nodes.size(); ++i) {
    q.nodes[i] = 0.5 * (q.nodes[i] + 1.0);
    q.weights[i] *= scale;
  }
  return q;
}

// Gauss-Legendre on [0,1] (unit weight).
inline Quad1D gauss_legendre_01(int n) { return gauss_jacobi_01(n, 0.0, 0.0); }

}  // namespace opmeans
