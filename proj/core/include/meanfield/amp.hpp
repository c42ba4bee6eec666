#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meanfield/matrix.hpp"
#include "meanfield/rng.hpp"

namespace mf {

/// Separable nonlinearities f_k(x^0, …, x^k; z) acting row by row.
class Schedule {
 public:
  virtual ~Schedule() = default;

  /// Number of available functions f_0 … f_{length-1}.
  virtual int length() const = 0;
  /// x points at the k+1 values x^0 … x^k of one row.
  virtual double f(int k, const double* x, double z) const = 0;
  /// Analytic ∂f_k/∂x^j; NaN when unavailable.
  virtual double df(int k, int j, const double* x, double z) const;
  virtual double lipschitz(int k) const = 0;
  /// True when f_k depends on x^k only (enables quadrature state evolution).
  virtual bool latest_only() const { return false; }
  virtual std::string name() const = 0;
};

/// Central difference of f_k in x^j with step 1e-6.
double finite_difference(const Schedule& schedule, int k, int j, const double* x, double z);

/// f_k = tanh(gain · x^k).
class TanhSchedule final : public Schedule {
 public:
  explicit TanhSchedule(int length, double gain = 1.0) : length_(length), gain_(gain) {}
  int length() const override { return length_; }
  double f(int k, const double* x, double z) const override;
  double df(int k, int j, const double* x, double z) const override;
  double lipschitz(int) const override { return gain_; }
  bool latest_only() const override { return true; }
  std::string name() const override { return "tanh"; }

 private:
  int length_;
  double gain_;
};

/// f_k = Σ_j c_{kj} x^j, from a lower-triangular coefficient table (identity by default).
class LinearSchedule final : public Schedule {
 public:
  explicit LinearSchedule(Eigen::MatrixXd table) : table_(std::move(table)) {}
  static LinearSchedule identity(int length);
  int length() const override { return static_cast<int>(table_.rows()); }
  double f(int k, const double* x, double z) const override;
  double df(int k, int j, const double* x, double z) const override;
  double lipschitz(int k) const override;
  bool latest_only() const override;
  std::string name() const override { return "linear"; }

 private:
  Eigen::MatrixXd table_;
};

/// Schedule backed by callables; derivatives default to finite differences.
class FunctionSchedule final : public Schedule {
 public:
  using Fn = std::function<double(int k, const double* x, double z)>;
  using DFn = std::function<double(int k, int j, const double* x, double z)>;
  FunctionSchedule(int length, Fn f, DFn df, double lipschitz, bool latest_only, std::string name);
  int length() const override { return length_; }
  double f(int k, const double* x, double z) const override { return f_(k, x, z); }
  double df(int k, int j, const double* x, double z) const override;
  double lipschitz(int) const override { return lipschitz_; }
  bool latest_only() const override { return latest_only_; }
  std::string name() const override { return name_; }

 private:
  int length_;
  Fn f_;
  DFn df_;
  double lipschitz_;
  bool latest_only_;
  std::string name_;
};

struct AmpOptions {
  bool onsager = true;
  /// Memory term for an initialization that depends on A (e.g. spectral):
  /// step 0 then subtracts b̂_{0,0} f_{-1} with b̂_{0,0} = mean ∂f_0/∂x^0.
  std::optional<Eigen::VectorXd> f_minus_one;
};

struct AmpTrajectory {
  Eigen::MatrixXd x;        // n × (K+1), column k is x^k
  Eigen::VectorXd z;
  Eigen::MatrixXd onsager;  // K × (K+1); row k holds b̂_{k,1..k} (column 0 only for f_{-1})
  std::vector<bool> finite_difference_used;  // per step

  int steps() const { return static_cast<int>(x.cols()) - 1; }
  /// ⟨x^j, x^k⟩/n for j, k = 1..K.
  Eigen::MatrixXd gram() const;
};

struct OnsagerCoefficients {
  std::vector<double> b;  // b̂_{k,1..k}
  bool finite_difference = false;
};

/// b̂_{k,j} = (1/n) Σ_i ∂_j f_k at row i, j = 1..k.
OnsagerCoefficients onsager(const Schedule& schedule, const Eigen::MatrixXd& x, const Eigen::VectorXd& z, int k);

/// x^{k+1} = A f_k(x^{≤k}; z) − Σ_{j=1}^k b̂_{k,j} f_{j−1}(x^{≤j−1}; z).
AmpTrajectory amp_run(const SymmetricMatrix& a, const Schedule& schedule, const Eigen::VectorXd& x0,
                      const Eigen::VectorXd& z, int steps, const AmpOptions& options = {});

/// Law of the initial pair (X_0, Z) in state evolution.
struct InitLaw {
  enum class Kind { gaussian, rademacher, constant };
  Kind x0 = Kind::gaussian;
  double x0_scale = 1.0;
  Kind z = Kind::constant;
  double z_scale = 0.0;

  /// Draw i of (X_0, Z).
  std::pair<double, double> sample(const CounterRng& rng, std::uint64_t i) const;
};

struct SEState {
  Eigen::MatrixXd q;         // K × K covariance of (X_1 … X_K)
  Eigen::MatrixXd q_stderr;  // Monte Carlo standard errors (zero for quadrature)
  InitLaw init;
  int mc_samples = 0;        // 0 when computed by quadrature
  std::uint64_t seed = 0;

  /// Joint sample paths (X_0, X_1 … X_K, Z): N × (K+2), Z in the last column.
  Eigen::MatrixXd sample_paths(int count, const Seed& seed) const;
};

struct SEOptions {
  int mc_samples = 100000;
  bool allow_quadrature = true;
  int quadrature_nodes = 64;
};

/// Q_{k+1,j+1} = E f_k(X^{≤k}; Z) f_j(X^{≤j}; Z), built step by step.
SEState state_evolution(const Schedule& schedule, const InitLaw& init, int steps, const Seed& seed,
                        const SEOptions& options = {});

struct TestFunction {
  std::string name;
  int step = 1;  // uses x^0 … x^step
  std::function<double(const double* x, double z)> psi;
};

struct CompareRow {
  std::string name;
  int step = 0;
  double empirical = 0.0;
  double predicted = 0.0;
  double stderr_ = 0.0;
  double deviation() const { return empirical - predicted; }
};

/// Empirical (1/n) Σ ψ(x_i^{≤k}, z_i) versus E ψ(X^{≤k}, Z) from state-evolution paths.
std::vector<CompareRow> se_compare(const AmpTrajectory& trajectory, const SEState& se,
                                   const std::vector<TestFunction>& tests, int mc_samples, const Seed& seed);

/// Standard test set: second moments and cross moments of the iterates, plus a constant.
std::vector<TestFunction> gram_tests(int steps);

}  // namespace mf
