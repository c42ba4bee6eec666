#include "meanfield/matrix.hpp"

#include <cmath>
#include <string>

#include "meanfield/error.hpp"
#include "meanfield/parallel.hpp"
#include "meanfield/rng.hpp"

#ifdef MEANFIELD_HAVE_OPENMP
#include <omp.h>
#endif

namespace mf {

void set_num_threads(int threads) {
#ifdef MEANFIELD_HAVE_OPENMP
  if (threads >= 1) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int num_threads() {
#ifdef MEANFIELD_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  require(data_.rows() == data_.cols(), ErrorKind::invalid_dimension, "symmetric matrix must be square");
  for (Eigen::Index j = 0; j < data_.cols(); ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      require(std::isfinite(data_(i, j)), ErrorKind::invalid_input, "matrix entries must be finite");
      require(data_(i, j) == data_(j, i), ErrorKind::invalid_input,
              "matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }
}

SymmetricMatrix SymmetricMatrix::zeros(int n) {
  require(n >= 0, ErrorKind::invalid_dimension, "negative dimension");
  SymmetricMatrix m;
  m.data_ = Eigen::MatrixXd::Zero(n, n);
  return m;
}

void SymmetricMatrix::set(int i, int j, double value) {
  data_(i, j) = value;
  data_(j, i) = value;
}

Eigen::VectorXd SymmetricMatrix::operator*(const Eigen::VectorXd& v) const {
  require(v.size() == data_.cols(), ErrorKind::invalid_dimension, "matrix-vector size mismatch");
  const Eigen::Index n = data_.rows();
  Eigen::VectorXd out(n);
  // Row i of A equals column i; each output is one serial dot product, so the
  // result is identical for any thread count.
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i) out(i) = data_.col(i).dot(v);
  return out;
}

double SymmetricMatrix::quadratic_form(const Eigen::VectorXd& v) const { return v.dot((*this) * v); }

}  // namespace mf

namespace mf {

PowerIterationResult top_eigenvector(const SymmetricMatrix& a, int max_steps, double tol) {
  const int n = a.n();
  require(n >= 1, ErrorKind::invalid_dimension, "empty matrix");
  require(max_steps >= 1, ErrorKind::invalid_input, "power iteration needs at least one step");
  const CounterRng rng(Seed{0x5EED, "power/start"});
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal(static_cast<std::uint64_t>(i));
  v.normalize();

  // Estimate of the spectral radius: plain power iteration on A.
  Eigen::VectorXd w = v;
  double radius = 0.0;
  for (int it = 0; it < 30; ++it) {
    Eigen::VectorXd aw = a * w;
    const double norm = aw.norm();
    if (norm == 0.0) break;
    radius = norm;
    w = aw / norm;
  }
  const double shift = 1.05 * radius;

  PowerIterationResult out;
  Eigen::VectorXd av = a * v;
  for (int it = 1; it <= max_steps; ++it) {
    Eigen::VectorXd next = av + shift * v;
    const double norm = next.norm();
    if (norm == 0.0) break;
    v = next / norm;
    av = a * v;
    out.iterations = it;
    out.eigenvalue = v.dot(av);
    out.residual = (av - out.eigenvalue * v).norm();
    if (out.residual < tol) {
      out.converged = true;
      break;
    }
  }
  out.vector = v;
  return out;
}

}  // namespace mf
