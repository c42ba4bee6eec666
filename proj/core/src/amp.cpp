#include "meanfield/amp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "meanfield/error.hpp"
#include "meanfield/quadrature.hpp"

namespace mf {

double Schedule::df(int, int, const double*, double) const { return std::numeric_limits<double>::quiet_NaN(); }

double finite_difference(const Schedule& schedule, int k, int j, const double* x, double z) {
  constexpr double h = 1e-6;
  std::vector<double> buf(x, x + k + 1);
  buf[j] = x[j] + h;
  const double up = schedule.f(k, buf.data(), z);
  buf[j] = x[j] - h;
  const double down = schedule.f(k, buf.data(), z);
  return (up - down) / (2.0 * h);
}

double TanhSchedule::f(int k, const double* x, double) const { return std::tanh(gain_ * x[k]); }

double TanhSchedule::df(int k, int j, const double* x, double) const {
  if (j != k) return 0.0;
  const double t = std::tanh(gain_ * x[k]);
  return gain_ * (1.0 - t * t);
}

LinearSchedule LinearSchedule::identity(int length) {
  return LinearSchedule(Eigen::MatrixXd::Identity(length, length));
}

double LinearSchedule::f(int k, const double* x, double) const {
  double s = 0.0;
  for (int j = 0; j <= k && j < table_.cols(); ++j) s += table_(k, j) * x[j];
  return s;
}

double LinearSchedule::df(int k, int j, const double*, double) const {
  return j < table_.cols() ? table_(k, j) : 0.0;
}

double LinearSchedule::lipschitz(int k) const { return table_.row(k).cwiseAbs().sum(); }

bool LinearSchedule::latest_only() const {
  for (Eigen::Index k = 0; k < table_.rows(); ++k)
    for (Eigen::Index j = 0; j < std::min(k, table_.cols()); ++j)
      if (table_(k, j) != 0.0) return false;
  return true;
}

FunctionSchedule::FunctionSchedule(int length, Fn f, DFn df, double lipschitz, bool latest_only, std::string name)
    : length_(length), f_(std::move(f)), df_(std::move(df)), lipschitz_(lipschitz), latest_only_(latest_only),
      name_(std::move(name)) {
  require(static_cast<bool>(f_), ErrorKind::invalid_input, "schedule function is empty");
  require(std::isfinite(lipschitz_), ErrorKind::invalid_input, "declared Lipschitz constant must be finite");
}

double FunctionSchedule::df(int k, int j, const double* x, double z) const {
  return df_ ? df_(k, j, x, z) : std::numeric_limits<double>::quiet_NaN();
}

Eigen::MatrixXd AmpTrajectory::gram() const {
  const int k = steps();
  const Eigen::MatrixXd xs = x.rightCols(k);
  return (xs.transpose() * xs) / static_cast<double>(x.rows());
}

namespace {

// Row i of x restricted to columns 0..k.
void gather(const Eigen::MatrixXd& x, Eigen::Index i, int k, std::vector<double>& buf) {
  buf.resize(k + 1);
  for (int j = 0; j <= k; ++j) buf[j] = x(i, j);
}

double mean_derivative(const Schedule& schedule, const Eigen::MatrixXd& x, const Eigen::VectorXd& z, int k, int j,
                       bool& used_fd) {
  const Eigen::Index n = x.rows();
  std::vector<double> buf;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    gather(x, i, k, buf);
    double d = schedule.df(k, j, buf.data(), z(i));
    if (!std::isfinite(d)) {
      d = finite_difference(schedule, k, j, buf.data(), z(i));
      used_fd = true;
    }
    total += d;
  }
  return total / static_cast<double>(n);
}

}  // namespace

OnsagerCoefficients onsager(const Schedule& schedule, const Eigen::MatrixXd& x, const Eigen::VectorXd& z, int k) {
  require(k >= 0 && k < x.cols(), ErrorKind::invalid_input, "trajectory has fewer than k iterates");
  OnsagerCoefficients out;
  for (int j = 1; j <= k; ++j) out.b.push_back(mean_derivative(schedule, x, z, k, j, out.finite_difference));
  return out;
}

AmpTrajectory amp_run(const SymmetricMatrix& a, const Schedule& schedule, const Eigen::VectorXd& x0,
                      const Eigen::VectorXd& z, int steps, const AmpOptions& options) {
  const int n = a.n();
  require(x0.size() == n && z.size() == n, ErrorKind::invalid_dimension, "x0 and z must have length n");
  require(steps >= 0 && steps <= schedule.length(), ErrorKind::invalid_input, "schedule is shorter than the step count");
  if (options.f_minus_one)
    require(options.f_minus_one->size() == n, ErrorKind::invalid_dimension, "f_{-1} must have length n");

  AmpTrajectory traj;
  traj.x = Eigen::MatrixXd::Zero(n, steps + 1);
  traj.x.col(0) = x0;
  traj.z = z;
  traj.onsager = Eigen::MatrixXd::Zero(steps, steps + 1);
  traj.finite_difference_used.assign(steps, false);
  Eigen::MatrixXd f(n, std::max(steps, 1));

  std::vector<double> buf;
  for (int k = 0; k < steps; ++k) {
    for (int i = 0; i < n; ++i) {
      gather(traj.x, i, k, buf);
      f(i, k) = schedule.f(k, buf.data(), z(i));
    }
    Eigen::VectorXd next = a * Eigen::VectorXd(f.col(k));
    if (options.onsager) {
      bool fd = false;
      for (int j = 1; j <= k; ++j) {
        const double b = mean_derivative(schedule, traj.x, z, k, j, fd);
        traj.onsager(k, j) = b;
        next -= b * f.col(j - 1);
      }
      if (k == 0 && options.f_minus_one) {
        const double b = mean_derivative(schedule, traj.x, z, 0, 0, fd);
        traj.onsager(0, 0) = b;
        next -= b * *options.f_minus_one;
      }
      traj.finite_difference_used[k] = fd;
    }
    require(next.allFinite(), ErrorKind::diverged, "AMP iterate became non-finite at step " + std::to_string(k + 1));
    traj.x.col(k + 1) = next;
  }
  return traj;
}

std::pair<double, double> InitLaw::sample(const CounterRng& rng, std::uint64_t i) const {
  auto draw = [&](Kind kind, double scale, std::uint64_t stream) {
    switch (kind) {
      case Kind::gaussian: return scale * rng.normal(2 * i + stream);
      case Kind::rademacher: return rng.uniform(2 * (2 * i + stream)) < 0.5 ? -scale : scale;
      case Kind::constant: return scale;
    }
    return 0.0;
  };
  return {draw(x0, x0_scale, 0), draw(z, z_scale, 1)};
}

namespace {

// Lower-triangular L with L Lᵀ = Q for a positive semidefinite Q; zero pivots give zero columns.
Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& q) {
  const Eigen::Index k = q.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(k, k);
  const double scale = std::max(1.0, q.diagonal().cwiseAbs().maxCoeff());
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < r; ++c) {
      const double s = q(r, c) - l.row(r).head(c).dot(l.row(c).head(c));
      l(r, c) = l(c, c) > 1e-12 * scale ? s / l(c, c) : 0.0;
    }
    const double d = q(r, r) - l.row(r).head(r).squaredNorm();
    require(d >= -1e-10 * scale, ErrorKind::numeric,
            "covariance lost positive semidefiniteness at leading minor " + std::to_string(r + 1));
    l(r, r) = std::sqrt(std::max(0.0, d));
  }
  return l;
}

void check_psd(const Eigen::MatrixXd& q) {
  if (q.rows() == 0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  require(lo >= -1e-10, ErrorKind::numeric, "state-evolution covariance has eigenvalue " + std::to_string(lo));
}

// E g(X_0) over the initial law, exactly or by quadrature.
template <class G>
double init_expectation(const InitLaw& law, G&& g, const GaussHermite& gh) {
  switch (law.x0) {
    case InitLaw::Kind::constant: return g(law.x0_scale);
    case InitLaw::Kind::rademacher: return 0.5 * (g(law.x0_scale) + g(-law.x0_scale));
    case InitLaw::Kind::gaussian: {
      double s = 0.0;
      for (std::size_t j = 0; j < gh.nodes.size(); ++j) s += gh.weights[j] * g(law.x0_scale * gh.nodes[j]);
      return s;
    }
  }
  return 0.0;
}

SEState quadrature_se(const Schedule& schedule, const InitLaw& init, int steps, int nodes) {
  const GaussHermite& gh = gauss_hermite(nodes);
  const double zc = init.z_scale;
  auto fk = [&](int k, double v) {
    std::vector<double> buf(k + 1, 0.0);
    buf[k] = v;
    return schedule.f(k, buf.data(), zc);
  };
  SEState se;
  se.init = init;
  se.q = Eigen::MatrixXd::Zero(steps, steps);
  se.q_stderr = Eigen::MatrixXd::Zero(steps, steps);
  const int m = static_cast<int>(gh.nodes.size());
  for (int k = 0; k < steps; ++k) {
    // Row k of Q pairs f_k(X_k) with f_j(X_j), j ≤ k.
    for (int j = 0; j <= k; ++j) {
      double v = 0.0;
      if (k == 0) {
        v = init_expectation(init, [&](double x) { return fk(0, x) * fk(0, x); }, gh);
      } else if (j == 0) {
        const double sk = std::sqrt(se.q(k - 1, k - 1));
        double ek = 0.0;
        for (int a = 0; a < m; ++a) ek += gh.weights[a] * fk(k, sk * gh.nodes[a]);
        v = ek * init_expectation(init, [&](double x) { return fk(0, x); }, gh);
      } else if (j == k) {
        const double sk = std::sqrt(se.q(k - 1, k - 1));
        for (int a = 0; a < m; ++a) {
          const double f = fk(k, sk * gh.nodes[a]);
          v += gh.weights[a] * f * f;
        }
      } else {
        const double sj = std::sqrt(se.q(j - 1, j - 1));
        const double sk = std::sqrt(se.q(k - 1, k - 1));
        const double rho = (sj > 0.0 && sk > 0.0) ? std::clamp(se.q(k - 1, j - 1) / (sj * sk), -1.0, 1.0) : 0.0;
        const double perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        for (int a = 0; a < m; ++a) {
          const double fj = fk(j, sj * gh.nodes[a]);
          double inner = 0.0;
          for (int b = 0; b < m; ++b) inner += gh.weights[b] * fk(k, sk * (rho * gh.nodes[a] + perp * gh.nodes[b]));
          v += gh.weights[a] * fj * inner;
        }
      }
      se.q(k, j) = se.q(j, k) = v;
    }
  }
  check_psd(se.q);
  return se;
}

}  // namespace

SEState state_evolution(const Schedule& schedule, const InitLaw& init, int steps, const Seed& seed,
                        const SEOptions& options) {
  require(steps >= 0 && steps <= schedule.length(), ErrorKind::invalid_input, "schedule is shorter than the step count");
  if (options.allow_quadrature && schedule.latest_only() && init.z == InitLaw::Kind::constant)
    return quadrature_se(schedule, init, steps, options.quadrature_nodes);

  const int n = options.mc_samples;
  require(n >= 100000, ErrorKind::invalid_input, "Monte Carlo state evolution needs >= 1e5 samples");
  SEState se;
  se.init = init;
  se.mc_samples = n;
  se.seed = seed.master;
  se.q = Eigen::MatrixXd::Zero(steps, steps);
  se.q_stderr = Eigen::MatrixXd::Zero(steps, steps);

  // Common random numbers: the same standard normals W drive every step.
  const CounterRng init_rng(seed.child("init"));
  const CounterRng w_rng(seed.child("gauss"));
  Eigen::MatrixXd x(n, steps + 1);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) {
    const auto [x0, z0] = init.sample(init_rng, static_cast<std::uint64_t>(i));
    x(i, 0) = x0;
    z(i) = z0;
  }
  Eigen::MatrixXd f(n, std::max(steps, 1));
  std::vector<double> buf;
  for (int k = 0; k < steps; ++k) {
    for (int i = 0; i < n; ++i) {
      gather(x, i, k, buf);
      f(i, k) = schedule.f(k, buf.data(), z(i));
    }
    for (int j = 0; j <= k; ++j) {
      const Eigen::ArrayXd prod = f.col(k).array() * f.col(j).array();
      const double mean = prod.mean();
      const double var = (prod - mean).square().sum() / (n - 1.0);
      se.q(k, j) = se.q(j, k) = mean;
      se.q_stderr(k, j) = se.q_stderr(j, k) = std::sqrt(var / n);
    }
    const Eigen::MatrixXd l = psd_cholesky(se.q.topLeftCorner(k + 1, k + 1));
    Eigen::VectorXd col = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= k; ++j) {
      if (l(k, j) == 0.0) continue;
      for (int i = 0; i < n; ++i)
        col(i) += l(k, j) * w_rng.normal(static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(steps) + j);
    }
    x.col(k + 1) = col;
  }
  check_psd(se.q);
  return se;
}

Eigen::MatrixXd SEState::sample_paths(int count, const Seed& seed) const {
  const int steps = static_cast<int>(q.rows());
  const CounterRng init_rng(seed.child("init"));
  const CounterRng w_rng(seed.child("gauss"));
  const Eigen::MatrixXd l = psd_cholesky(q);
  Eigen::MatrixXd out(count, steps + 2);
  Eigen::VectorXd w(steps);
  for (int i = 0; i < count; ++i) {
    const auto [x0, z0] = init.sample(init_rng, static_cast<std::uint64_t>(i));
    for (int j = 0; j < steps; ++j) w(j) = w_rng.normal(static_cast<std::uint64_t>(i) * steps + j);
    out(i, 0) = x0;
    out.row(i).segment(1, steps) = (l * w).transpose();
    out(i, steps + 1) = z0;
  }
  return out;
}

std::vector<CompareRow> se_compare(const AmpTrajectory& trajectory, const SEState& se,
                                   const std::vector<TestFunction>& tests, int mc_samples, const Seed& seed) {
  const int steps = trajectory.steps();
  require(se.q.rows() >= steps, ErrorKind::invalid_input, "state evolution has fewer steps than the trajectory");
  const Eigen::MatrixXd paths = se.sample_paths(mc_samples, seed);
  const int zc = static_cast<int>(paths.cols()) - 1;
  const Eigen::Index n = trajectory.x.rows();
  std::vector<CompareRow> rows;
  std::vector<double> buf;
  for (const auto& t : tests) {
    require(t.step >= 0 && t.step <= steps, ErrorKind::invalid_input, "test function step out of range");
    CompareRow row;
    row.name = t.name;
    row.step = t.step;
    double emp = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      gather(trajectory.x, i, t.step, buf);
      emp += t.psi(buf.data(), trajectory.z(i));
    }
    row.empirical = emp / static_cast<double>(n);
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < mc_samples; ++i) {
      gather(paths, i, t.step, buf);
      const double v = t.psi(buf.data(), paths(i, zc));
      s += v;
      s2 += v * v;
    }
    row.predicted = s / mc_samples;
    row.stderr_ = std::sqrt(std::max(0.0, s2 / mc_samples - row.predicted * row.predicted) / mc_samples);
    rows.push_back(row);
  }
  return rows;
}

std::vector<TestFunction> gram_tests(int steps) {
  std::vector<TestFunction> out;
  out.push_back({"const", 0, [](const double*, double) { return 1.0; }});
  for (int k = 1; k <= steps; ++k)
    for (int j = 1; j <= k; ++j)
      out.push_back({"x" + std::to_string(j) + "*x" + std::to_string(k), k,
                     [j, k](const double* x, double) { return x[j] * x[k]; }});
  return out;
}

}  // namespace mf
