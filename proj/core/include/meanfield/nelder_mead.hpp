#pragma once

#include <functional>

#include <Eigen/Dense>

namespace mf {

struct NelderMeadOptions {
  int max_evaluations = 2000;
  double x_tol = 1e-8;  // stop when the simplex size (mean vertex distance to its center) is below this
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization (GSL nmsimplex2). Non-finite objective values count as +max.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options = {});

}  // namespace mf
