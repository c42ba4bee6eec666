#include "meanfield/spiked.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "meanfield/amp.hpp"
#include "meanfield/error.hpp"
#include "meanfield/quadrature.hpp"

namespace mf {

namespace {
constexpr int kNodes = 128;

// Trapezoid rule for E f(G) on [-12, 12]. The scalar-channel integrands in the
// noise G are analytic in a strip of half-width ~ π/(2√γ), so the step shrinks
// with √γ and the error stays near machine precision; Gauss–Hermite with a fixed
// node count loses ~1e-6 once γ is of order 10.
struct NormalRule {
  std::vector<double> nodes, weights;
};

NormalRule normal_rule(double gamma) {
  const double h = 0.1 / (1.0 + std::sqrt(gamma));
  const int half = static_cast<int>(std::ceil(12.0 / h));
  NormalRule r;
  r.nodes.reserve(2 * half + 1);
  r.weights.reserve(2 * half + 1);
  const double c = h / std::sqrt(2.0 * std::numbers::pi);
  for (int k = -half; k <= half; ++k) {
    const double g = k * h;
    r.nodes.push_back(g);
    r.weights.push_back(c * std::exp(-0.5 * g * g));
  }
  return r;
}

}  // namespace

BayesDenoiser::BayesDenoiser(PriorSpec prior, double mu, double tau)
    : prior_(std::move(prior)), atoms_(prior_.atoms()), mu_(mu), tau_(tau) {
  prior_.validate();
  require(std::isfinite(mu) && std::isfinite(tau), ErrorKind::invalid_input, "denoiser parameters must be finite");
  require(tau > 0.0, ErrorKind::invalid_input, "denoiser needs tau > 0");
  for (const auto& [v, p] : atoms_) log_p_.push_back(std::log(p));
}

std::pair<double, double> BayesDenoiser::posterior(double y) const {
  if (prior_.kind == PriorSpec::Kind::gaussian) {
    const double s = mu_ * mu_ + tau_ * tau_;
    return {mu_ * y / s, tau_ * tau_ / s};
  }
  const double t2 = tau_ * tau_;
  double lmax = -std::numeric_limits<double>::infinity();
  std::vector<double> l(atoms_.size());
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    const double v = atoms_[a].first;
    l[a] = log_p_[a] + (mu_ * v * y - 0.5 * mu_ * mu_ * v * v) / t2;
    lmax = std::max(lmax, l[a]);
  }
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t a = 0; a < atoms_.size(); ++a) {
    const double w = std::exp(l[a] - lmax);
    const double v = atoms_[a].first;
    z += w;
    m1 += w * v;
    m2 += w * v * v;
  }
  m1 /= z;
  m2 /= z;
  return {m1, std::max(0.0, m2 - m1 * m1)};
}

double BayesDenoiser::operator()(double y) const { return posterior(y).first; }

double BayesDenoiser::derivative(double y) const {
  // dE[Θ|y]/dy = (μ/τ²) Var(Θ|y).
  return mu_ / (tau_ * tau_) * posterior(y).second;
}

BayesDenoiser bayes_denoiser(const PriorSpec& prior, double mu, double tau) { return BayesDenoiser(prior, mu, tau); }

double F_of_gamma(const PriorSpec& prior, double gamma) {
  require(gamma >= 0.0 && std::isfinite(gamma), ErrorKind::invalid_input, "gamma must be finite and >= 0");
  prior.validate();
  if (prior.kind == PriorSpec::Kind::gaussian) return gamma / (1.0 + gamma);
  if (gamma == 0.0) return prior.mean() * prior.mean();
  const double s = std::sqrt(gamma);
  const BayesDenoiser h(prior, s, 1.0);
  const NormalRule gh = normal_rule(gamma);
  double total = 0.0;
  for (const auto& [v, p] : prior.atoms()) {
    double inner = 0.0;
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
      const double e = h(s * v + gh.nodes[j]);
      inner += gh.weights[j] * e * e;
    }
    total += p * inner;
  }
  return total;
}

double mutual_information(const PriorSpec& prior, double gamma) {
  require(gamma >= 0.0 && std::isfinite(gamma), ErrorKind::invalid_input, "gamma must be finite and >= 0");
  prior.validate();
  if (prior.kind == PriorSpec::Kind::gaussian) return 0.5 * std::log1p(gamma);
  if (gamma == 0.0) return 0.0;
  const double s = std::sqrt(gamma);
  const auto atoms = prior.atoms();
  const NormalRule gh = normal_rule(gamma);
  double total = 0.0;
  std::vector<double> l(atoms.size());
  for (const auto& [theta, p] : atoms) {
    double inner = 0.0;
    for (std::size_t j = 0; j < gh.nodes.size(); ++j) {
      const double g = gh.nodes[j];
      double lmax = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        const double d = theta - atoms[a].first;
        l[a] = std::log(atoms[a].second) - s * d * g - 0.5 * gamma * d * d;
        lmax = std::max(lmax, l[a]);
      }
      double z = 0.0;
      for (double v : l) z += std::exp(v - lmax);
      inner += gh.weights[j] * (lmax + std::log(z));
    }
    total -= p * inner;
  }
  return total;
}

ScalarRecursion se_scalar_recursion(const PriorSpec& prior, double lambda, int steps, double gamma_init) {
  require(lambda > 0.0 && std::isfinite(lambda), ErrorKind::invalid_input, "lambda must be positive");
  require(gamma_init >= 0.0, ErrorKind::invalid_input, "gamma_init must be >= 0");
  require(steps >= 0, ErrorKind::invalid_input, "negative step count");
  ScalarRecursion out;
  double g = gamma_init;
  for (int k = 0; k <= steps; ++k) {
    out.states.push_back({g / lambda, std::sqrt(g) / lambda, g});
    if (k == steps) break;
    const double next = lambda * lambda * F_of_gamma(prior, g);
    if (out.fixed_point_step < 0 && std::abs(next - g) < 1e-10) out.fixed_point_step = k;
    g = next;
  }
  return out;
}

namespace {

double gamma_max(double lambda) { return std::max(10.0, 4.0 * lambda * lambda); }

double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

constexpr int kScanPoints = 2000;

}  // namespace

Threshold gamma_alg(const PriorSpec& prior, double lambda) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::invalid_input, "lambda must be finite and >= 0");
  Threshold t;
  if (lambda == 0.0) return t;
  const double l2 = lambda * lambda;
  auto g = [&](double x) { return l2 * F_of_gamma(prior, x) - x; };
  const double lo = 1e-8;
  const double hi = gamma_max(lambda);
  if (g(lo) < 0.0) return t;
  double prev = lo;
  for (int i = 1; i <= kScanPoints; ++i) {
    const double x = lo + (hi - lo) * i / kScanPoints;
    if (g(x) < 0.0) {
      t.gamma = bisect(g, prev, x);
      t.rho = overlap_from_gamma(t.gamma);
      return t;
    }
    prev = x;
  }
  t.indeterminate = true;
  return t;
}

double psi(const PriorSpec& prior, double lambda, double gamma, double b) {
  require(lambda > 0.0, ErrorKind::invalid_input, "psi needs lambda > 0");
  return gamma * gamma / (4.0 * lambda * lambda) - 0.5 * gamma - 0.5 * b * gamma + mutual_information(prior, gamma);
}

std::vector<double> fixed_points(const PriorSpec& prior, double lambda) {
  std::vector<double> out;
  if (lambda == 0.0) return {0.0};
  const double l2 = lambda * lambda;
  auto g = [&](double x) { return l2 * F_of_gamma(prior, x) - x; };
  if (std::abs(g(0.0)) < 1e-14) out.push_back(0.0);
  const double hi = gamma_max(lambda);
  double prev = 1e-8;
  double gprev = g(prev);
  for (int i = 1; i <= kScanPoints; ++i) {
    const double x = prev + (hi - 1e-8) / kScanPoints;
    const double gx = g(x);
    if ((gx > 0.0) != (gprev > 0.0)) out.push_back(bisect(g, prev, x));
    prev = x;
    gprev = gx;
  }
  return out;
}

Threshold gamma_bayes(const PriorSpec& prior, double lambda) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::invalid_input, "lambda must be finite and >= 0");
  Threshold t;
  if (lambda == 0.0) return t;
  auto f = [&](double x) { return psi(prior, lambda, x); };
  // Candidates: every stationary point plus the left end of the domain.
  std::vector<double> candidates = fixed_points(prior, lambda);
  candidates.push_back(0.0);
  double best = candidates.front();
  double best_v = f(best);
  for (double c : candidates) {
    const double v = f(c);
    if (v < best_v) {
      best = c;
      best_v = v;
    }
  }
  // Golden-section confirmation on a bracket around the winner.
  const double hi = 4.0 * lambda * lambda + 10.0;
  double a = std::max(0.0, best - 0.05 * hi), b = std::min(hi, best + 0.05 * hi);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double golden = 0.5 * (a + b);
  // Prefer the exact stationary point unless the search found a strictly lower value.
  if (f(golden) < best_v - 1e-12) best = golden;
  t.gamma = best;
  t.rho = overlap_from_gamma(best);
  return t;
}

std::vector<double> se_general_overlaps(const PriorSpec& prior, double lambda, int steps, double mu0, double tau0,
                                        const DenoiserFamily& f) {
  prior.validate();
  const GaussHermite& gh = gauss_hermite(kNodes);
  std::vector<std::pair<double, double>> atoms = prior.atoms();
  std::vector<double> out;
  double mu = mu0, tau = tau0;
  for (int k = 0; k < steps; ++k) {
    double e_theta_f = 0.0, e_f2 = 0.0;
    if (prior.kind == PriorSpec::Kind::gaussian) {
      // Θ and G independent standard normals: 2-D quadrature.
      for (std::size_t a = 0; a < gh.nodes.size(); ++a)
        for (std::size_t b = 0; b < gh.nodes.size(); ++b) {
          const double th = gh.nodes[a];
          const double v = f(k, mu * th + tau * gh.nodes[b], mu, tau);
          const double w = gh.weights[a] * gh.weights[b];
          e_theta_f += w * th * v;
          e_f2 += w * v * v;
        }
    } else {
      for (const auto& [th, p] : atoms)
        for (std::size_t b = 0; b < gh.nodes.size(); ++b) {
          const double v = f(k, mu * th + tau * gh.nodes[b], mu, tau);
          e_theta_f += p * gh.weights[b] * th * v;
          e_f2 += p * gh.weights[b] * v * v;
        }
    }
    mu = lambda * e_theta_f;
    tau = std::sqrt(e_f2);
    out.push_back(mu == 0.0 ? 0.0 : std::abs(mu) / std::sqrt(mu * mu + tau * tau));
  }
  return out;
}

double overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

namespace {

// f_k(x^{≤k}) = h_k(x^k) with precomputed Bayes denoisers; f_0 may be the identity.
class DenoiserSchedule final : public Schedule {
 public:
  DenoiserSchedule(std::vector<BayesDenoiser> h, bool identity_first)
      : h_(std::move(h)), identity_first_(identity_first) {}
  int length() const override { return static_cast<int>(h_.size()); }
  double f(int k, const double* x, double) const override {
    return (k == 0 && identity_first_) ? x[0] : h_[k](x[k]);
  }
  double df(int k, int j, const double* x, double) const override {
    if (j != k) return 0.0;
    return (k == 0 && identity_first_) ? 1.0 : h_[k].derivative(x[k]);
  }
  double lipschitz(int) const override { return std::numeric_limits<double>::infinity(); }
  bool latest_only() const override { return true; }
  std::string name() const override { return "bayes"; }

 private:
  std::vector<BayesDenoiser> h_;
  bool identity_first_;
};

}  // namespace

BayesAmpResult run_bayes_amp(const SpikedInstance& instance, int steps, const BayesAmpOptions& options) {
  require(steps >= 1, ErrorKind::invalid_input, "Bayes AMP needs K >= 1");
  const PriorSpec& prior = instance.prior;
  prior.validate();
  const int n = instance.y.n();
  const double lambda = instance.lambda;
  BayesAmpResult out;

  Eigen::VectorXd x0;
  AmpOptions amp_opts;
  std::vector<BayesDenoiser> h;
  // With λ = 0 there is nothing to track; use the noise-level SNR floor.
  const double lam = std::max(lambda, 1e-12);
  double g;
  bool identity_first = false;
  if (!prior.centered()) {
    // θ^0 = E{Θ}𝟙 and f_0 = identity, so γ_1 = λ²E{Θ}².
    x0 = Eigen::VectorXd::Constant(n, prior.mean());
    identity_first = true;
    h.emplace_back(prior, 1.0, 1.0);  // placeholder, never evaluated
    out.predicted.push_back({0.0, 0.0, 0.0});
    g = lam * lam * prior.mean() * prior.mean();
  } else {
    const PowerIterationResult top = top_eigenvector(instance.y, options.power_steps, 1e-10);
    out.spectral_init = true;
    out.top_eigenvalue = top.eigenvalue;
    const double l1 = top.eigenvalue;
    out.lambda_hat = l1 > 2.0 ? 0.5 * (l1 + std::sqrt(l1 * l1 - 4.0)) : 1.0;
    const double g0 = std::max(out.lambda_hat * out.lambda_hat - 1.0, options.gamma_floor);
    const double rho = overlap_from_gamma(g0);
    x0 = std::sqrt(static_cast<double>(n)) * top.vector;
    h.emplace_back(prior, rho, std::sqrt(1.0 - rho * rho));
    out.predicted.push_back({rho, std::sqrt(1.0 - rho * rho), g0});
    // x^0 = Y (x^0 / λ₁) exactly, so the memory term uses f_{-1} = x^0 / λ̂.
    amp_opts.f_minus_one = x0 / out.lambda_hat;
    g = lam * lam * F_of_gamma(prior, g0);
  }
  for (int k = 1; k < steps + 1; ++k) {
    const double mu = g / lam;
    const double tau = std::sqrt(std::max(g, 1e-300)) / lam;
    out.predicted.push_back({mu, tau, g});
    h.emplace_back(prior, mu, std::max(tau, 1e-150));
    g = lam * lam * F_of_gamma(prior, g);
  }
  const DenoiserSchedule schedule(std::move(h), identity_first);
  const AmpTrajectory traj = amp_run(instance.y, schedule, x0, Eigen::VectorXd::Zero(n), steps, amp_opts);
  for (int k = 0; k <= steps; ++k) out.overlaps.push_back(overlap(instance.theta, traj.x.col(k)));
  const BayesDenoiser& last = BayesDenoiser(prior, out.predicted[steps].mu, std::max(out.predicted[steps].tau, 1e-150));
  out.theta_hat = traj.x.col(steps).unaryExpr([&](double y) { return last(y); });
  return out;
}

}  // namespace mf
