#include "meanfield/iamp.hpp"

#include <algorithm>
#include <cmath>

#include "meanfield/error.hpp"

namespace mf {

ControlField spherical_control(const MixingPolynomial& mixing, double delta) {
  return ControlField::spherical(mixing, delta);
}

ControlField ising_control(const ParisiSolution& solution, double delta) { return export_control(solution, delta); }

namespace {

int step_count(double delta) {
  const double t = 1.0 / delta;
  const int steps = static_cast<int>(std::lround(t));
  require(std::abs(t - steps) < 1e-9, ErrorKind::invalid_input, "1/delta must be an integer");
  require(steps >= 10 && steps <= 200, ErrorKind::invalid_input, "1/delta must lie in [10, 200]");
  return steps;
}

// Increment of ξ′ between consecutive grid times, with t_{-1} = 0.
double dxi(const MixingPolynomial& mix, double t, double delta) {
  return mix.xi_prime(std::min(t, 1.0)) - mix.xi_prime(std::max(t - delta, 0.0));
}

}  // namespace

IampTrajectory run_iamp(const PSpinInstance& instance, const ControlField& control, const IampOptions& options) {
  const int n = instance.n();
  require(n >= 500, ErrorKind::invalid_dimension, "IAMP needs n >= 500");
  const double delta = control.delta();
  const int big_t = step_count(delta);
  const MixingPolynomial& mix = instance.mixing();
  const bool ising = control.flavor() == ControlField::Flavor::ising;
  const double nd = static_cast<double>(n);

  IampTrajectory out;
  out.delta = delta;
  const CounterRng rng(options.seed.child("init"));
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) g(i) = rng.normal(static_cast<std::uint64_t>(i));

  Eigen::VectorXd x, m0(n);
  if (ising) {
    x = std::sqrt(mix.xi_prime(delta)) * g;
    for (int i = 0; i < n; ++i) m0(i) = control.phi_x(delta, x(i));
  } else {
    m0 = std::sqrt(delta) * g;
  }
  out.z.push_back(Eigen::VectorXd::Zero(n));
  out.m.push_back(m0);
  out.times.push_back(delta);

  // jac[j-1] = ∂m^ℓ/∂z^j and kx[j-1] = ∂x^ℓ/∂z^j, entrywise, for j = 1 … ℓ.
  std::vector<Eigen::VectorXd> jac, kx;
  Eigen::VectorXd grad;
  double energy = instance.energy_and_gradient(m0, grad) / nd;
  out.energies.push_back(energy);
  out.second_moments.push_back(m0.squaredNorm() / nd);

  for (int l = 0; l + 1 < big_t; ++l) {
    const double t = out.times[l];
    const Eigen::VectorXd& m = out.m[l];
    Eigen::VectorXd z_next = grad;
    for (int j = 1; j <= l; ++j) {
      const double q = m.dot(out.m[j - 1]) / nd;
      const double b = mix.eval(q, 2) * jac[j - 1].mean();
      z_next.noalias() -= b * out.m[j - 1];
    }
    // The increment driving m and x is c_ℓ (z^{ℓ+1} − z^ℓ), with c_ℓ a scalar that restores the
    // state-evolution variance ξ′(t_ℓ) − ξ′(t_ℓ − δ). The chain rule below carries c_ℓ.
    Eigen::VectorXd dz = z_next - out.z[l];
    double c = 1.0;
    if (options.normalize_increments) {
      const double got = dz.squaredNorm() / nd;
      if (got > 0.0) c = std::sqrt(dxi(mix, t, delta) / got);
      dz *= c;
    }
    const double d_xi = dxi(mix, t + delta, delta);

    Eigen::VectorXd gain(n), gain_x(n);
    if (ising) {
      for (int i = 0; i < n; ++i) {
        gain(i) = control.u(t, x(i));
        gain_x(i) = gain(i) > 0.0 ? control.u_x(t, x(i)) : 0.0;
      }
    } else {
      gain.setConstant(std::sqrt(delta / dxi(mix, t, delta)));
      gain_x.setZero();
    }

    // Jacobians of m^{ℓ+1} and x^{ℓ+1} with respect to z^1 … z^{ℓ+1}.
    for (int j = 1; j <= l; ++j) {
      Eigen::VectorXd& jj = jac[j - 1];
      jj.array() += gain_x.array() * kx[j - 1].array() * dz.array();
      if (j == l) jj.array() -= c * gain.array();
    }
    jac.push_back(c * gain);
    if (ising) {
      const double gm = control.gamma(t);
      Eigen::VectorXd drift_x(n);
      for (int i = 0; i < n; ++i) drift_x(i) = 1.0 + gm * control.u(t, x(i)) * d_xi;
      for (int j = 1; j <= l; ++j) {
        kx[j - 1].array() *= drift_x.array();
        if (j == l) kx[j - 1].array() -= c;
      }
      kx.push_back(Eigen::VectorXd::Constant(n, c));
      for (int i = 0; i < n; ++i) x(i) += gm * control.phi_x(t, x(i)) * d_xi + dz(i);
    } else {
      kx.push_back(Eigen::VectorXd::Zero(n));
    }

    Eigen::VectorXd m_next = m + gain.cwiseProduct(dz);
    if (ising && options.magnetization_map) {
      Eigen::VectorXd curv(n);
      for (int i = 0; i < n; ++i) {
        m_next(i) = control.phi_x(t + delta, x(i));
        curv(i) = control.u(t + delta, x(i));
      }
      for (int j = 1; j <= l + 1; ++j) jac[j - 1] = curv.cwiseProduct(kx[j - 1]);
    }
    const Eigen::VectorXd inc = m_next - m;
    const double ortho = std::abs(inc.dot(m)) / nd;
    const double inc_err = std::abs(inc.squaredNorm() / nd - delta) / delta;
    out.diagnostics.max_orthogonality = std::max(out.diagnostics.max_orthogonality, ortho);
    out.diagnostics.max_increment_error = std::max(out.diagnostics.max_increment_error, inc_err);

    out.z.push_back(std::move(z_next));
    out.m.push_back(std::move(m_next));
    out.times.push_back(std::min(1.0, t + delta));
    energy = instance.energy_and_gradient(out.m.back(), grad) / nd;
    out.energies.push_back(energy);
    out.second_moments.push_back(out.m.back().squaredNorm() / nd);
    if (!std::isfinite(energy)) fail(ErrorKind::diverged, "IAMP iterate is not finite at step " + std::to_string(l + 1));
  }

  if (ising) {
    Eigen::VectorXd& last = out.m.back();
    const double lim = 1.0 - options.clip;
    last = last.cwiseMax(-lim).cwiseMin(lim);
    out.energies.back() = instance.normalized_energy(last);
    out.second_moments.back() = last.squaredNorm() / nd;
    out.x = x;
  }
  IampDiagnostics& d = out.diagnostics;
  d.final_norm = out.second_moments.back();
  const bool bad_ortho = d.max_orthogonality > 5.0 * options.orthogonality_tol;
  const bool bad_inc = d.max_increment_error > 5.0 * options.increment_tol;
  d.flagged = bad_ortho || bad_inc;
  if (bad_ortho) d.warning += "increment orthogonality exceeds 5x tolerance; ";
  if (bad_inc) d.warning += "increment norm deviates from delta by more than 5x tolerance; ";
  return out;
}

SEShadow se_shadow(const ControlField& control, int mc_samples, const Seed& seed, const IampOptions& options) {
  require(mc_samples >= 100, ErrorKind::invalid_input, "se_shadow needs at least 100 samples");
  const double delta = control.delta();
  const int big_t = step_count(delta);
  const MixingPolynomial& mix = control.mixing();
  const bool ising = control.flavor() == ControlField::Flavor::ising;
  const int s = mc_samples;
  const CounterRng rng(seed);
  auto normal = [&](int step, int i) {
    return rng.normal(static_cast<std::uint64_t>(step) * static_cast<std::uint64_t>(s) + static_cast<std::uint64_t>(i));
  };

  SEShadow out;
  std::vector<Eigen::VectorXd> zs{Eigen::VectorXd::Zero(s)}, ms, xi_noise;
  Eigen::VectorXd x(s), m0(s);
  for (int i = 0; i < s; ++i) {
    const double g = normal(0, i);
    if (ising) {
      x(i) = std::sqrt(mix.xi_prime(delta)) * g;
      m0(i) = control.phi_x(delta, x(i));
    } else {
      m0(i) = std::sqrt(delta) * g;
    }
  }
  ms.push_back(m0);
  out.times.push_back(delta);
  out.second_moments.push_back(m0.squaredNorm() / s);

  // Lower-triangular factor of Cov(Z^1 … Z^r), grown one row per step.
  std::vector<std::vector<double>> chol;
  for (int l = 0; l + 1 < big_t; ++l) {
    const double t = out.times[l];
    const int r = l + 1;
    std::vector<double> row(r);
    for (int j = 1; j <= r; ++j) {
      const double c = mix.eval(ms[l].dot(ms[j - 1]) / s, 1);
      if (j < r) {
        double acc = c;
        for (int k = 0; k < j - 1; ++k) acc -= row[k] * chol[j - 1][k];
        row[j - 1] = chol[j - 1][j - 1] > 0.0 ? acc / chol[j - 1][j - 1] : 0.0;
      } else {
        double acc = c;
        for (int k = 0; k < r - 1; ++k) acc -= row[k] * row[k];
        if (acc < -1e-8 * std::max(1.0, c)) fail(ErrorKind::numeric, "IAMP state-evolution covariance lost PSD");
        row[r - 1] = std::sqrt(std::max(acc, 0.0));
      }
    }
    chol.push_back(row);
    Eigen::VectorXd noise(s);
    for (int i = 0; i < s; ++i) noise(i) = normal(r, i);
    // Whiten against earlier draws so the sample covariance of Z equals the target exactly.
    for (const auto& prev : xi_noise) noise -= (noise.dot(prev) / s) * prev;
    noise *= std::sqrt(s / noise.squaredNorm());
    xi_noise.push_back(noise);
    Eigen::VectorXd z_next = Eigen::VectorXd::Zero(s);
    for (int k = 0; k < r; ++k) z_next += row[k] * xi_noise[k];
    Eigen::VectorXd dz = z_next - zs[l];
    if (options.normalize_increments) dz *= std::sqrt(dxi(mix, t, delta) * s / dz.squaredNorm());

    Eigen::VectorXd gain(s);
    if (ising) {
      for (int i = 0; i < s; ++i) gain(i) = control.u(t, x(i));
      const double gm = control.gamma(t);
      const double d_xi = dxi(mix, t + delta, delta);
      for (int i = 0; i < s; ++i) x(i) += gm * control.phi_x(t, x(i)) * d_xi + dz(i);
    } else {
      gain.setConstant(std::sqrt(delta * s / dz.squaredNorm()));
    }
    for (std::size_t k = 0; k < zs.size(); ++k)
      out.martingale_defect = std::max(out.martingale_defect, std::abs(dz.dot(zs[k]) / s));
    Eigen::VectorXd m_next = ms[l] + gain.cwiseProduct(dz);
    if (ising && options.magnetization_map)
      for (int i = 0; i < s; ++i) m_next(i) = control.phi_x(t + delta, x(i));
    out.value += (m_next - ms[l]).dot(dz) / s;
    zs.push_back(std::move(z_next));
    ms.push_back(std::move(m_next));
    out.times.push_back(std::min(1.0, t + delta));
    out.second_moments.push_back(ms.back().squaredNorm() / s);
  }
  const Eigen::VectorXd& last = ms.back();
  out.inside_fraction = (last.array().abs() <= 1.0).cast<double>().mean();
  return out;
}

Rounding round_to_cube(const PSpinInstance& instance, const Eigen::VectorXd& m) {
  require(m.size() == instance.n(), ErrorKind::invalid_dimension, "rounding input has the wrong length");
  require(m.allFinite(), ErrorKind::invalid_input, "rounding input must be finite");
  Rounding r;
  r.energy_before = instance.normalized_energy(m);
  r.sigma = m.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
  r.energy_after = instance.normalized_energy(r.sigma);
  return r;
}

Rounding round_to_sphere(const PSpinInstance& instance, const Eigen::VectorXd& m) {
  require(m.size() == instance.n(), ErrorKind::invalid_dimension, "rounding input has the wrong length");
  require(m.allFinite(), ErrorKind::invalid_input, "rounding input must be finite");
  Rounding r;
  r.energy_before = instance.normalized_energy(m);
  const double norm = m.norm();
  r.sigma = norm > 0.0 ? Eigen::VectorXd(std::sqrt(static_cast<double>(m.size())) * m / norm)
                       : Eigen::VectorXd::Ones(m.size());
  r.energy_after = instance.normalized_energy(r.sigma);
  return r;
}

SpectralBaseline spectral_baseline(const SymmetricMatrix& a, int max_steps, double tol) {
  const PowerIterationResult top = top_eigenvector(a, max_steps, tol);
  SpectralBaseline out;
  out.sigma = top.vector.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
  out.energy = a.quadratic_form(out.sigma) / (2.0 * a.n());
  out.eigenvalue = top.eigenvalue;
  out.iterations = top.iterations;
  out.converged = top.converged;
  return out;
}

}  // namespace mf
