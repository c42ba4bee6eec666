#include "meanfield/parisi.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "meanfield/error.hpp"
#include "meanfield/nelder_mead.hpp"
#include "meanfield/quadrature.hpp"
#include "meanfield/rng.hpp"

namespace mf {

RSBProfile RSBProfile::constant(double gamma) {
  RSBProfile p;
  p.values = {gamma};
  return p;
}

double RSBProfile::gamma_at(double t) const {
  const auto it = std::upper_bound(breakpoints.begin() + 1, breakpoints.end() - 1, t);
  return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

bool RSBProfile::nondecreasing() const { return std::is_sorted(values.begin(), values.end()); }

void RSBProfile::validate() const {
  require(!values.empty(), ErrorKind::invalid_input, "profile needs at least one level");
  require(breakpoints.size() == values.size() + 1, ErrorKind::invalid_input,
          "profile needs K+1 breakpoints for K values");
  require(breakpoints.front() == 0.0 && breakpoints.back() == 1.0, ErrorKind::invalid_input,
          "profile breakpoints must start at 0 and end at 1");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    require(breakpoints[i] > breakpoints[i - 1], ErrorKind::invalid_input, "breakpoints must increase strictly");
  for (double v : values)
    require(std::isfinite(v) && v >= 0.0, ErrorKind::invalid_input, "profile values must be finite and >= 0");
  require(std::isfinite(terminal_scale) && terminal_scale > 0.0, ErrorKind::invalid_input,
          "terminal scale must be positive");
}

int ParisiSolution::slice_index(double t) const {
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] == t) return static_cast<int>(i);
  fail(ErrorKind::invalid_input, "no stored slice at t = " + std::to_string(t));
}

double ParisiSolution::boundary_value(double xv) const {
  if (boundary == Boundary::ising) return std::abs(xv);
  const double l = profile.terminal_scale;
  return xv * xv / (2.0 * l) + 0.5 * l;
}

void ParisiSolution::write_csv(std::ostream& out, int stride) const {
  stride = std::max(1, stride);
  out << "t,x,phi,phi_x,phi_xx\n";
  out.precision(17);
  for (std::size_t s = 0; s < times.size(); ++s)
    for (int i = 0; i <= space_points; i += stride)
      out << times[s] << ',' << x(i) << ',' << phi[s][i] << ',' << phi_x[s][i] << ',' << phi_xx[s][i] << '\n';
}

double resolved_half_width(const MixingPolynomial& mixing, const ParisiGrid& grid) {
  if (grid.half_width > 0.0) return grid.half_width;
  return std::max(8.0, 6.0 * std::sqrt(mixing.xi_prime(1.0)));
}

namespace {

struct Slice {
  std::vector<double> phi, phi_x, phi_xx;
};

// Below this γ the Cole–Hopf transform is replaced by its first-order expansion.
constexpr double kTinyGamma = 1e-8;

// Cubic Lagrange interpolation of a slice with the boundary-appropriate extension
// outside [-L, L]: linear for Ising, quadratic Taylor for spherical.
struct SliceView {
  const Slice* s;
  double x0;
  double dx;
  int m;
  Boundary boundary;

  void eval(double y, double& f, double& fx, double& fxx) const {
    const double u = (y - x0) / dx;
    if (u < 0.0 || u > m) {
      const int e = u < 0.0 ? 0 : m;
      const double d = y - (x0 + e * dx);
      if (boundary == Boundary::ising) {
        f = s->phi[e] + s->phi_x[e] * d;
        fx = s->phi_x[e];
        fxx = 0.0;
      } else {
        f = s->phi[e] + s->phi_x[e] * d + 0.5 * s->phi_xx[e] * d * d;
        fx = s->phi_x[e] + s->phi_xx[e] * d;
        fxx = s->phi_xx[e];
      }
      return;
    }
    int i = static_cast<int>(u);
    i = std::clamp(i, 1, m - 2);
    const double t = u - i;
    const double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    auto mix = [&](const std::vector<double>& v) {
      return wm * v[i - 1] + w0 * v[i] + w1 * v[i + 1] + w2 * v[i + 2];
    };
    f = mix(s->phi);
    fx = mix(s->phi_x);
    fxx = mix(s->phi_xx);
  }
};

Slice terminal_slice(Boundary boundary, double terminal_scale, double x0, double dx, int m) {
  Slice s;
  s.phi.resize(m + 1);
  s.phi_x.resize(m + 1);
  s.phi_xx.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double x = (i == m / 2) ? 0.0 : x0 + i * dx;
    if (boundary == Boundary::ising) {
      s.phi[i] = std::abs(x);
      s.phi_x[i] = (x > 0.0) - (x < 0.0);
      s.phi_xx[i] = 0.0;
    } else {
      s.phi[i] = x * x / (2.0 * terminal_scale) + 0.5 * terminal_scale;
      s.phi_x[i] = x / terminal_scale;
      s.phi_xx[i] = 1.0 / terminal_scale;
    }
  }
  return s;
}

// Φ(s,x) = (1/a) log E exp(a|x + σZ|) and its derivatives, σ² = ξ′(1) − ξ′(s).
Slice ising_closed_form(double a, double sigma2, double x0, double dx, int m) {
  Slice s;
  s.phi.resize(m + 1);
  s.phi_x.resize(m + 1);
  s.phi_xx.resize(m + 1);
  const double sigma = std::sqrt(sigma2);
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);
#pragma omp parallel for schedule(static)
  for (int i = 0; i <= m; ++i) {
    const double x = (i == m / 2) ? 0.0 : x0 + i * dx;
    const double r = x / sigma;
    const double log_kink = std::log(2.0) - 0.5 * r * r - log_norm - std::log(sigma);
    if (a < kTinyGamma) {
      // E|x+σZ| plus (a/2) Var|x+σZ|.
      const double mean = x * std::erf(r / std::numbers::sqrt2) + 2.0 * sigma * normal_pdf(r);
      const double mag = std::erf(r / std::numbers::sqrt2);
      s.phi[i] = mean + 0.5 * a * std::max(0.0, x * x + sigma2 - mean * mean);
      s.phi_x[i] = mag;
      s.phi_xx[i] = std::exp(log_kink) + a * (1.0 - mag * mag);
      continue;
    }
    const double as2 = a * sigma2;
    const double A = a * x + log_normal_cdf((x + as2) / sigma);
    const double B = -a * x + log_normal_cdf((-x + as2) / sigma);
    const double lse = log_add_exp(A, B);
    s.phi[i] = 0.5 * as2 + lse / a;
    const double mag = std::tanh(0.5 * (A - B));
    s.phi_x[i] = mag;
    s.phi_xx[i] = std::exp(log_kink - 0.5 * a * as2 - lse) + a * (1.0 - mag * mag);
  }
  return s;
}

// One exact Cole–Hopf step over an interval with constant γ = a and variance d.
// Gauss–Hermite nodes are recentered at the Laplace point of the integrand. The
// spherical integrand is Gaussian, so rescaling by its curvature makes the rule
// exact; the Ising curvature is concentrated near the kink and is not used.
Slice cole_hopf_step(const SliceView& prev, double a, double d, const GaussHermite& gh) {
  const int m = prev.m;
  Slice s;
  s.phi.resize(m + 1);
  s.phi_x.resize(m + 1);
  s.phi_xx.resize(m + 1);
  const double sd = std::sqrt(d);
  const int q = static_cast<int>(gh.nodes.size());
  bool bad = false;
#pragma omp parallel for schedule(static) reduction(|| : bad)
  for (int i = 0; i <= m; ++i) {
    const double x = (i == m / 2) ? 0.0 : prev.x0 + i * prev.dx;
    if (a < kTinyGamma) {
      // Heat kernel plus the first-order term (a/2) Var Φ; dividing a log-sum-exp
      // by a tiny a would lose all precision.
      double f = 0, f2 = 0, fx = 0, fx2 = 0, fxx = 0;
      for (int j = 0; j < q; ++j) {
        double v, vx, vxx;
        prev.eval(x + sd * gh.nodes[j], v, vx, vxx);
        f += gh.weights[j] * v;
        f2 += gh.weights[j] * v * v;
        fx += gh.weights[j] * vx;
        fx2 += gh.weights[j] * vx * vx;
        fxx += gh.weights[j] * vxx;
      }
      s.phi[i] = f + 0.5 * a * std::max(0.0, f2 - f * f);
      s.phi_x[i] = fx;
      s.phi_xx[i] = fxx + a * std::max(0.0, fx2 - fx * fx);
      bad = bad || !std::isfinite(f);
      continue;
    }
    double c = 0.0;
    if (prev.boundary == Boundary::spherical) {
      c = a * d * prev.s->phi_xx[i];
      if (!(c < 1.0)) {
        bad = true;
        continue;
      }
    }
    const double z0 = a * sd * prev.s->phi_x[i] / (1.0 - c);
    const double r = 1.0 / std::sqrt(1.0 - c);
    double emax = -INFINITY;
    double e[512], vx_j[512], vxx_j[512];
    for (int j = 0; j < q; ++j) {
      const double w = gh.nodes[j];
      const double z = z0 + r * w;
      double v;
      prev.eval(x + sd * z, v, vx_j[j], vxx_j[j]);
      e[j] = gh.log_weights[j] + a * v - 0.5 * z * z + 0.5 * w * w;
      emax = std::max(emax, e[j]);
    }
    double total = 0.0;
    for (int j = 0; j < q; ++j) {
      e[j] = std::exp(e[j] - emax);
      total += e[j];
    }
    double m1 = 0.0, m2 = 0.0, mxx = 0.0;
    for (int j = 0; j < q; ++j) {
      const double p = e[j] / total;
      m1 += p * vx_j[j];
      m2 += p * vx_j[j] * vx_j[j];
      mxx += p * vxx_j[j];
    }
    const double f = (std::log(r) + emax + std::log(total)) / a;
    s.phi[i] = f;
    s.phi_x[i] = m1;
    s.phi_xx[i] = mxx + a * std::max(0.0, m2 - m1 * m1);
    bad = bad || !std::isfinite(f) || !std::isfinite(s.phi_xx[i]);
  }
  require(!bad, ErrorKind::numeric, "Cole-Hopf step produced a non-finite value (gamma=" + std::to_string(a) + ")");
  return s;
}

}  // namespace

ParisiSolution solve_pde(const RSBProfile& profile, const MixingPolynomial& mixing, Boundary boundary,
                         const ParisiGrid& grid) {
  profile.validate();
  require(grid.space_points >= 8 && grid.space_points % 2 == 0, ErrorKind::invalid_input,
          "space_points must be even and >= 8");
  require(grid.quadrature_nodes >= 2 && grid.quadrature_nodes <= 512, ErrorKind::invalid_input,
          "quadrature_nodes must lie in [2, 512]");
  require(grid.time_step > 0.0, ErrorKind::invalid_input, "time_step must be positive");
  const double half = resolved_half_width(mixing, grid);
  require(half >= 4.0 * std::sqrt(mixing.xi_prime(1.0)), ErrorKind::invalid_input,
          "half width must be at least 4 sqrt(xi'(1))");

  ParisiSolution sol;
  sol.boundary = boundary;
  sol.profile = profile;
  sol.mixing = mixing;
  sol.half_width = half;
  sol.space_points = grid.space_points;
  const int m = grid.space_points;
  const double dx = sol.dx();
  const double x0 = -half;
  const GaussHermite& gh = gauss_hermite(grid.quadrature_nodes);

  std::vector<double> times{1.0};
  std::vector<Slice> slices{terminal_slice(boundary, profile.terminal_scale, x0, dx, m)};
  const int k = profile.levels();
  for (int iv = k - 1; iv >= 0; --iv) {
    const double lo = profile.breakpoints[iv];
    const double hi = profile.breakpoints[iv + 1];
    const double a = profile.values[iv];
    const std::size_t right = slices.size() - 1;
    const int sub = std::max(1, static_cast<int>(std::ceil((hi - lo) / grid.time_step - 1e-9)));
    for (int j = 1; j <= sub; ++j) {
      const double s = (j == sub) ? lo : hi - (hi - lo) * j / sub;
      const double d = mixing.xi_prime(hi) - mixing.xi_prime(s);
      Slice next;
      if (d <= 0.0) {
        next = slices[right];
      } else if (iv == k - 1 && boundary == Boundary::ising) {
        next = ising_closed_form(a, d, x0, dx, m);
      } else {
        const SliceView view{&slices[right], x0, dx, m, boundary};
        next = cole_hopf_step(view, a, d, gh);
      }
      times.push_back(s);
      slices.push_back(std::move(next));
    }
  }
  std::reverse(times.begin(), times.end());
  std::reverse(slices.begin(), slices.end());
  sol.times = std::move(times);
  for (auto& s : slices) {
    sol.phi.push_back(std::move(s.phi));
    sol.phi_x.push_back(std::move(s.phi_x));
    sol.phi_xx.push_back(std::move(s.phi_xx));
  }
  return sol;
}

double correction_term(const RSBProfile& profile, const MixingPolynomial& mixing) {
  // d/dt [t ξ′(t) − ξ(t)] = t ξ″(t).
  auto antiderivative = [&](double t) { return t * mixing.xi_prime(t) - mixing.xi(t); };
  double total = 0.0;
  for (int i = 0; i < profile.levels(); ++i)
    total += profile.values[i] * (antiderivative(profile.breakpoints[i + 1]) - antiderivative(profile.breakpoints[i]));
  return 0.5 * total;
}

ParisiValue evaluate(const ParisiSolution& solution) {
  ParisiValue v;
  v.phi00 = solution.phi00();
  v.correction = correction_term(solution.profile, solution.mixing);
  v.value = v.phi00 - v.correction;
  return v;
}

ParisiValue functional(const RSBProfile& profile, const MixingPolynomial& mixing, Boundary boundary,
                       const ParisiGrid& grid) {
  ParisiGrid coarse = grid;
  coarse.time_step = 1.0;
  return evaluate(solve_pde(profile, mixing, boundary, coarse));
}

QuadraticSlice spherical_riccati(const RSBProfile& profile, const MixingPolynomial& mixing, double t) {
  profile.validate();
  require(t >= 0.0 && t <= 1.0, ErrorKind::domain, "t must lie in [0, 1]");
  QuadraticSlice q{1.0 / profile.terminal_scale, 0.5 * profile.terminal_scale};
  for (int iv = profile.levels() - 1; iv >= 0; --iv) {
    const double hi = profile.breakpoints[iv + 1];
    if (t >= hi) break;
    const double lo = std::max(profile.breakpoints[iv], t);
    const double d = mixing.xi_prime(hi) - mixing.xi_prime(lo);
    const double a = profile.values[iv];
    if (a == 0.0) {
      q.constant += 0.5 * q.curvature * d;
    } else {
      const double shrink = 1.0 - a * q.curvature * d;
      require(shrink > 0.0, ErrorKind::numeric, "spherical profile leaves the admissible region");
      q.constant -= std::log1p(-a * q.curvature * d) / (2.0 * a);
      q.curvature /= shrink;
    }
  }
  return q;
}

ParisiValue spherical_functional(const RSBProfile& profile, const MixingPolynomial& mixing) {
  ParisiValue v;
  v.phi00 = spherical_riccati(profile, mixing, 0.0).constant;
  v.correction = correction_term(profile, mixing);
  v.value = v.phi00 - v.correction;
  return v;
}

namespace {

constexpr double kParamClamp = 30.0;

// Unconstrained coordinates for K-level profiles.
//   Ising:     p = (log Δγ_1..log Δγ_K, log w_2..log w_K), γ = cumsum(exp), w_1 = 1
//   spherical: p = (log g0, log γ_1..log γ_K, log w_2..log w_K), L = g0 + Σ γ_i Δξ′_i
struct Codec {
  Boundary boundary;
  int k;
  const MixingPolynomial* mixing;

  int dim() const { return boundary == Boundary::ising ? 2 * k - 1 : 2 * k; }

  RSBProfile decode(const Eigen::VectorXd& p) const {
    auto ex = [](double v) { return std::exp(std::clamp(v, -kParamClamp, kParamClamp)); };
    RSBProfile prof;
    prof.values.resize(k);
    const int off = boundary == Boundary::ising ? 0 : 1;
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
      if (boundary == Boundary::ising) {
        acc += ex(p(i));
        prof.values[i] = acc;
      } else {
        prof.values[i] = ex(p(off + i));
      }
    }
    std::vector<double> w(k, 1.0);
    for (int i = 1; i < k; ++i) w[i] = std::exp(std::clamp(p(off + k + i - 1), -20.0, 20.0));
    double total = 0.0;
    for (double v : w) total += v;
    prof.breakpoints.assign(k + 1, 0.0);
    double run = 0.0;
    for (int i = 0; i < k; ++i) {
      run += w[i];
      prof.breakpoints[i + 1] = (i == k - 1) ? 1.0 : run / total;
    }
    if (boundary == Boundary::spherical) {
      double l = ex(p(0));
      for (int i = 0; i < k; ++i)
        l += prof.values[i] *
             (mixing->xi_prime(prof.breakpoints[i + 1]) - mixing->xi_prime(prof.breakpoints[i]));
      prof.terminal_scale = l;
    }
    return prof;
  }

  Eigen::VectorXd encode(const RSBProfile& prof) const {
    Eigen::VectorXd p(dim());
    const int off = boundary == Boundary::ising ? 0 : 1;
    double prev = 0.0;
    double g0 = prof.terminal_scale;
    for (int i = 0; i < k; ++i) {
      const double v = prof.values[i];
      if (boundary == Boundary::ising) {
        p(i) = std::log(std::max(v - prev, std::exp(-kParamClamp)));
        prev = v;
      } else {
        p(off + i) = std::log(std::max(v, std::exp(-kParamClamp)));
        g0 -= v * (mixing->xi_prime(prof.breakpoints[i + 1]) - mixing->xi_prime(prof.breakpoints[i]));
      }
    }
    const double w1 = prof.breakpoints[1] - prof.breakpoints[0];
    for (int i = 1; i < k; ++i) p(off + k + i - 1) = std::log((prof.breakpoints[i + 1] - prof.breakpoints[i]) / w1);
    if (boundary == Boundary::spherical) p(0) = std::log(std::max(g0, 1e-12));
    return p;
  }
};

// Splits the last interval at its midpoint; the new level is γ_K (1 + step).
RSBProfile split_last(const RSBProfile& prof, Boundary boundary, const MixingPolynomial& mixing, double step) {
  RSBProfile out = prof;
  const int k = prof.levels();
  const double mid = 0.5 * (prof.breakpoints[k - 1] + prof.breakpoints[k]);
  out.breakpoints.insert(out.breakpoints.end() - 1, mid);
  const double last = prof.values.back();
  double next = last * (1.0 + step);
  if (boundary == Boundary::ising) next = std::max(next, last + std::exp(-kParamClamp));
  out.values.push_back(next);
  if (boundary == Boundary::spherical) {
    // Keep g(0) fixed so the split profile stays admissible.
    out.terminal_scale += (next - last) * (mixing.xi_prime(1.0) - mixing.xi_prime(mid));
  }
  return out;
}

// Spherical start: geometric breakpoints with g(t_i) = √ξ″(t_i), the continuous optimum.
RSBProfile spherical_heuristic(const MixingPolynomial& mixing, int k) {
  RSBProfile prof;
  prof.breakpoints.assign(k + 1, 0.0);
  for (int i = 1; i <= k; ++i) prof.breakpoints[i] = std::pow(0.5, k - i);
  std::vector<double> g(k + 1);
  for (int i = 1; i <= k; ++i) g[i] = std::sqrt(mixing.xi_second(prof.breakpoints[i]));
  g[0] = std::max(std::sqrt(mixing.xi_second(0.0)), 0.5 * g[1]);
  prof.values.resize(k);
  double l = g[0];
  for (int i = 0; i < k; ++i) {
    const double dxi = mixing.xi_prime(prof.breakpoints[i + 1]) - mixing.xi_prime(prof.breakpoints[i]);
    prof.values[i] = std::max(1e-8, (g[i + 1] - g[i]) / dxi);
    l += prof.values[i] * dxi;
  }
  prof.terminal_scale = l;
  return prof;
}

}  // namespace

MinimizeResult minimize(const MixingPolynomial& mixing, Boundary boundary, const MinimizeOptions& options) {
  require(options.levels >= 1 && options.levels <= 8, ErrorKind::invalid_input, "RSB levels must lie in [1, 8]");
  require(options.restarts >= 1 && options.max_evaluations >= 1, ErrorKind::invalid_input,
          "optimizer budget must be positive");
  MinimizeResult result;
  RngStream rng(Seed{options.seed, "parisi/minimize"});
  ParisiGrid grid = options.grid;
  grid.time_step = 1.0;

  NelderMeadOptions nm;
  nm.max_evaluations = options.max_evaluations;
  nm.x_tol = 1e-5;
  nm.initial_step = 0.3;

  RSBProfile best_profile;
  for (int k = 1; k <= options.levels; ++k) {
    const Codec codec{boundary, k, &mixing};
    auto objective = [&](const Eigen::VectorXd& p) {
      const RSBProfile prof = codec.decode(p);
      try {
        return boundary == Boundary::ising ? functional(prof, mixing, boundary, grid).value
                                           : spherical_functional(prof, mixing).value;
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };

    // The exact split keeps the previous level's value (so values never increase
    // with K) but sits on a flat direction; the search itself starts from a split
    // with a visible step.
    std::vector<RSBProfile> candidates;
    RSBProfile explore;
    if (k == 1) {
      explore = RSBProfile::constant(1.0);
    } else {
      candidates.push_back(split_last(best_profile, boundary, mixing, 0.0));
      explore = split_last(best_profile, boundary, mixing, 0.5);
    }
    candidates.push_back(explore);
    if (boundary == Boundary::spherical) candidates.push_back(spherical_heuristic(mixing, k));

    Eigen::VectorXd best_x;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
      const Eigen::VectorXd x = codec.encode(c);
      const double v = objective(x);
      ++result.evaluations;
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    bool converged = false;
    for (int r = 0; r < options.restarts; ++r) {
      Eigen::VectorXd x0 = r == 0 ? codec.encode(boundary == Boundary::spherical && k > 1 ? candidates.back() : explore)
                                  : best_x;
      if (r > 0)
        for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) += 0.3 * rng.normal();
      const NelderMeadResult res = nelder_mead(objective, x0, nm);
      result.evaluations += res.evaluations;
      converged = converged || res.converged;
      if (res.value < best) {
        best = res.value;
        best_x = res.x;
      }
    }
    best_profile = codec.decode(best_x);
    result.value_by_level.push_back(best);
    if (k == options.levels) result.budget_exhausted = !converged;
  }
  result.profile = best_profile;
  result.value = functional(best_profile, mixing, boundary, grid);
  return result;
}

double spherical_value(const MixingPolynomial& mixing) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [&](double t) { return std::sqrt(std::max(0.0, mixing.eval(t, 2))); };
  double error = 0.0;
  const double v = integrator.integrate(f, 0.0, 1.0, 1e-12, &error);
  require(error <= 1e-9, ErrorKind::numeric, "spherical value quadrature did not reach 1e-9");
  return v;
}

RSBProfile spherical_stationary_profile(const MixingPolynomial& mixing, int levels) {
  require(levels >= 2, ErrorKind::invalid_input, "stationary profile needs at least 2 levels");
  const bool singular = mixing.xi_second(0.0) == 0.0;
  RSBProfile p;
  p.breakpoints = {0.0};
  p.values.clear();
  if (singular) {
    // γ* blows up like t^{-3/2} when ξ″(0) = 0: half the levels go on a geometric grid
    // from 1e-6 to 0.1, and γ = 0 on [0, 1e-6].
    constexpr double t1 = 1e-6, knee = 0.1;
    const int g = levels / 2;
    for (int i = 0; i < g; ++i) p.breakpoints.push_back(t1 * std::pow(knee / t1, static_cast<double>(i) / g));
    const int rest = levels - g - 1;
    for (int i = 0; i < rest; ++i) p.breakpoints.push_back(knee + (1.0 - knee) * i / rest);
  } else {
    for (int i = 1; i < levels; ++i) p.breakpoints.push_back(static_cast<double>(i) / levels);
  }
  p.breakpoints.push_back(1.0);
  // Per step, γ makes 1/A(t) = √ξ″(t) exact at both ends of the interval.
  for (std::size_t k = 0; k + 1 < p.breakpoints.size(); ++k) {
    const double a = p.breakpoints[k], b = p.breakpoints[k + 1];
    double g = (std::sqrt(mixing.xi_second(b)) - std::sqrt(mixing.xi_second(a))) /
               (mixing.xi_prime(b) - mixing.xi_prime(a));
    if (singular && k == 0) g = 0.0;
    p.values.push_back(std::max(0.0, g));
  }
  p.terminal_scale = std::sqrt(mixing.xi_second(1.0));
  return p;
}

}  // namespace mf
