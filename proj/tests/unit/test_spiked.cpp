#include <doctest.h>

#include <cmath>

#include "meanfield/ensembles.hpp"
#include "meanfield/error.hpp"
#include "meanfield/spiked.hpp"

using namespace mf;

TEST_CASE("posterior mean denoisers in closed form") {
  const double mu = 0.8, tau = 0.6;
  const BayesDenoiser rad = bayes_denoiser(PriorSpec::rademacher(), mu, tau);
  const BayesDenoiser gau = bayes_denoiser(PriorSpec::gaussian(), mu, tau);
  for (double y : {-3.0, -0.4, 0.0, 0.25, 2.0}) {
    CHECK(rad(y) == doctest::Approx(std::tanh(mu * y / (tau * tau))).epsilon(1e-12));
    CHECK(gau(y) == doctest::Approx(mu * y / (mu * mu + tau * tau)).epsilon(1e-12));
    const double h = 1e-6;
    CHECK(rad.derivative(y) == doctest::Approx((rad(y + h) - rad(y - h)) / (2 * h)).epsilon(1e-6));
  }
  // Sparse prior posterior mean against direct Bayes.
  const PriorSpec sp = PriorSpec::sparse_rademacher(0.2);
  const BayesDenoiser sd = bayes_denoiser(sp, mu, tau);
  const double a = 1.0 / std::sqrt(0.2), y = 1.3;
  auto lik = [&](double th) { return std::exp(-0.5 * std::pow((y - mu * th) / tau, 2)); };
  const double num = 0.1 * a * lik(a) - 0.1 * a * lik(-a);
  const double den = 0.1 * lik(a) + 0.1 * lik(-a) + 0.8 * lik(0.0);
  CHECK(sd(y) == doctest::Approx(num / den).epsilon(1e-12));

  const BayesDenoiser blind = bayes_denoiser(PriorSpec::rademacher(), 0.0, 1.0);
  CHECK(blind(1.7) == 0.0);
}

TEST_CASE("F(gamma) and mutual information") {
  for (double g : {0.0, 0.3, 1.0, 5.0}) {
    CHECK(F_of_gamma(PriorSpec::gaussian(), g) == doctest::Approx(g / (1 + g)).epsilon(1e-8));
    CHECK(mutual_information(PriorSpec::gaussian(), g) == doctest::Approx(0.5 * std::log1p(g)).epsilon(1e-8));
  }
  for (const PriorSpec& p : shipped_priors()) {
    CAPTURE(p.to_string());
    CHECK(F_of_gamma(p, 0.0) == doctest::Approx(p.mean() * p.mean()).epsilon(1e-12));
    // I-MMSE: dI/dγ = mmse/2.
    const double g = 0.7, h = 1e-5;
    const double di = (mutual_information(p, g + h) - mutual_information(p, g - h)) / (2 * h);
    CHECK(di == doctest::Approx(0.5 * mmse(p, g)).epsilon(1e-6));
  }
  CHECK(F_of_gamma(PriorSpec::rademacher(), 0.0) == 0.0);
}

TEST_CASE("Rademacher F(1) against Monte Carlo") {
  const int n = 10'000'000;
  const CounterRng rng(Seed{1, "mc"});
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = std::pow(std::tanh(1.0 + rng.normal(i)), 2);
    s += v;
    s2 += v * v;
  }
  const double mean = s / n, se = std::sqrt((s2 / n - mean * mean) / n);
  const double f = F_of_gamma(PriorSpec::rademacher(), 1.0);
  CHECK(f > 0.0);
  CHECK(f < 1.0);
  CHECK(std::abs(f - mean) <= 3 * se);
}

TEST_CASE("scalar recursion") {
  const ScalarRecursion g = se_scalar_recursion(PriorSpec::gaussian(), 2.0, 200, 0.1);
  CHECK(g.states.back().gamma == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(g.fixed_point_step >= 0);
  const ScalarChannelState& st = g.states.back();
  CHECK(st.mu == doctest::Approx(st.gamma / 2.0));
  CHECK(st.tau * st.tau == doctest::Approx(st.gamma / 4.0));

  const ScalarRecursion r = se_scalar_recursion(PriorSpec::rademacher(), 0.5, 200, 0.1);
  CHECK(r.states.back().gamma < 1e-8);

  const ScalarRecursion fixed = se_scalar_recursion(PriorSpec::gaussian(), 2.0, 5, 3.0);
  for (const auto& s : fixed.states) CHECK(s.gamma == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fixed.fixed_point_step == 0);
}

TEST_CASE("algorithmic threshold") {
  const Threshold g = gamma_alg(PriorSpec::gaussian(), 2.0);
  CHECK(std::abs(g.gamma - 3.0) <= 1e-8);
  CHECK(g.rho == doctest::Approx(std::sqrt(0.75)).epsilon(1e-9));
  for (const PriorSpec& p : {PriorSpec::rademacher(), PriorSpec::gaussian()}) {
    CHECK(gamma_alg(p, 0.9).gamma == 0.0);
    CHECK(gamma_alg(p, 0.0).gamma == 0.0);
  }
  // Above threshold the fixed point is positive and stable.
  const Threshold r = gamma_alg(PriorSpec::rademacher(), 1.5);
  CHECK(r.gamma > 0.0);
  CHECK(2.25 * F_of_gamma(PriorSpec::rademacher(), r.gamma) == doctest::Approx(r.gamma).epsilon(1e-9));
}

TEST_CASE("potential: stationarity and the Bayes threshold") {
  for (const PriorSpec& p : shipped_priors()) {
    if (p.centered()) CHECK(psi(p, 1.5, 0.0) == 0.0);
  }
  const PriorSpec rad = PriorSpec::rademacher();
  for (double g : fixed_points(rad, 1.5)) {
    const double h = 1e-5;
    auto f = [&](double x) { return psi(rad, 1.5, x); };
    // Second-order one-sided stencil at the boundary γ = 0.
    const double d = g < h ? (-3 * f(g) + 4 * f(g + h) - f(g + 2 * h)) / (2 * h) : (f(g + h) - f(g - h)) / (2 * h);
    CAPTURE(g);
    CHECK(std::abs(d) < 1e-6);
  }
  for (double lambda : {1.2, 1.5, 2.0}) {
    CAPTURE(lambda);
    CHECK(std::abs(gamma_bayes(rad, lambda).gamma - gamma_alg(rad, lambda).gamma) <= 1e-3);
  }
}

TEST_CASE("general state evolution with the Bayes denoiser tracks the scalar recursion") {
  const PriorSpec rad = PriorSpec::rademacher();
  const double lambda = 1.5, g0 = 0.2;
  const ScalarRecursion rec = se_scalar_recursion(rad, lambda, 6, g0);
  const auto ov = se_general_overlaps(rad, lambda, 6, g0 / lambda, std::sqrt(g0) / lambda,
                                      [&](int, double y, double mu, double tau) {
                                        return bayes_denoiser(rad, mu, tau)(y);
                                      });
  REQUIRE(ov.size() == 6);
  for (int k = 1; k <= 6; ++k)
    CHECK(ov[k - 1] == doctest::Approx(overlap_from_gamma(rec.states[k].gamma)).epsilon(1e-6));
}

TEST_CASE("Bayes AMP on finite instances") {
  const SpikedInstance g = sample_spiked(3000, 2.0, PriorSpec::gaussian(), Seed{1, "sp"});
  const BayesAmpResult r = run_bayes_amp(g, 30);
  CHECK(r.spectral_init);
  CHECK(std::abs(r.overlaps.back() - std::sqrt(0.75)) <= 0.04);

  const SpikedInstance weak = sample_spiked(3000, 0.5, PriorSpec::rademacher(), Seed{2, "sp"});
  CHECK(run_bayes_amp(weak, 30).overlaps.back() <= 0.1);

  const SpikedInstance sparse = sample_spiked(2000, 2.0, PriorSpec::two_point(1.0, -1.0, 0.8), Seed{3, "sp"});
  const BayesAmpResult nc = run_bayes_amp(sparse, 20);
  CHECK(!nc.spectral_init);
  CHECK(nc.overlaps.back() > 0.5);

  CHECK(overlap(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)) == 0.0);
  CHECK_THROWS_AS(run_bayes_amp(g, 0), Error);
}
