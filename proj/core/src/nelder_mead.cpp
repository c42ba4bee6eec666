#include "meanfield/nelder_mead.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "meanfield/error.hpp"

namespace mf {

namespace {

struct Context {
  const std::function<double(const Eigen::VectorXd&)>* f;
  Eigen::VectorXd x;
  int evaluations = 0;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* c = static_cast<Context*>(params);
  for (Eigen::Index i = 0; i < c->x.size(); ++i) c->x(i) = gsl_vector_get(v, static_cast<std::size_t>(i));
  ++c->evaluations;
  const double y = (*c->f)(c->x);
  // Non-finite values repel the simplex instead of aborting the search.
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

using VectorPtr = std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)>;
using MinimizerPtr = std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)>;

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                             const NelderMeadOptions& options) {
  const auto dim = static_cast<std::size_t>(x0.size());
  require(dim >= 1, ErrorKind::invalid_input, "Nelder-Mead needs at least one parameter");
  require(options.max_evaluations >= static_cast<int>(dim) + 1, ErrorKind::invalid_input,
          "Nelder-Mead budget is smaller than the initial simplex");
  gsl_set_error_handler_off();

  Context ctx{&f, Eigen::VectorXd(x0.size()), 0};
  gsl_multimin_function fn{&trampoline, dim, &ctx};
  VectorPtr x(gsl_vector_alloc(dim), &gsl_vector_free);
  VectorPtr step(gsl_vector_alloc(dim), &gsl_vector_free);
  for (std::size_t i = 0; i < dim; ++i) gsl_vector_set(x.get(), i, x0(static_cast<Eigen::Index>(i)));
  gsl_vector_set_all(step.get(), options.initial_step);
  MinimizerPtr s(gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim), &gsl_multimin_fminimizer_free);
  require(gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get()) == GSL_SUCCESS, ErrorKind::numeric,
          "Nelder-Mead initialization failed");

  NelderMeadResult result;
  while (ctx.evaluations < options.max_evaluations) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), options.x_tol) == GSL_SUCCESS) {
      result.converged = true;
      break;
    }
  }
  result.x.resize(x0.size());
  for (std::size_t i = 0; i < dim; ++i) result.x(static_cast<Eigen::Index>(i)) = gsl_vector_get(s->x, i);
  result.value = s->fval;
  result.evaluations = ctx.evaluations;
  return result;
}

}  // namespace mf
