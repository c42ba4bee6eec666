#include <doctest.h>

#include <cmath>

#include "meanfield/ensembles.hpp"
#include "meanfield/error.hpp"
#include "meanfield/hamiltonian.hpp"

using namespace mf;

namespace {

Eigen::VectorXd random_sign(int n, const Seed& seed) {
  const CounterRng rng(seed);
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s(i) = rng.uniform(i) < 0.5 ? -1.0 : 1.0;
  return s;
}

Eigen::VectorXd random_normal(int n, const Seed& seed) {
  const CounterRng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal(i);
  return v;
}

}  // namespace

TEST_CASE("mixing polynomial derivatives") {
  const MixingPolynomial sk = MixingPolynomial::sk();
  for (double t : {0.0, 0.3, 1.0}) CHECK(sk.xi_second(t) == doctest::Approx(1.0));
  CHECK(MixingPolynomial({0, 0, 0, 1}).xi_second(0.5) == doctest::Approx(3.0));
  const MixingPolynomial m = MixingPolynomial::parse("0.5:2,1:4");
  CHECK(m.xi_prime(1.0) == doctest::Approx(5.0));
  CHECK(m.xi(1.0) == doctest::Approx(1.5));
  CHECK(m.xi_third(0.5) == doctest::Approx(12.0));
  CHECK(MixingPolynomial::parse(m.to_string()).coefficients() == m.coefficients());
  CHECK_THROWS_AS(m.xi(1.5), Error);
  CHECK(m.eval(1.5) == doctest::Approx(0.5 * 2.25 + std::pow(1.5, 4)));
  CHECK_THROWS_AS(MixingPolynomial::parse("0.5-2"), Error);
}

TEST_CASE("energy of the zero configuration and homogeneity") {
  const PSpinInstance cubic = sample_pspin(MixingPolynomial({0, 0, 0, 1}), 20, Seed{1, "h"});
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(20);
  CHECK(cubic.energy(zero) == 0.0);
  CHECK(cubic.gradient(zero).norm() == 0.0);
  const Eigen::VectorXd s = random_sign(20, Seed{2, "s"});
  for (double c : {0.5, -2.0, 3.0})
    CHECK(cubic.energy(c * s) == doctest::Approx(c * c * c * cubic.energy(s)).epsilon(1e-12));
  CHECK(satisfies_flavor(s, Flavor::ising));
  CHECK(satisfies_flavor(0.5 * s, Flavor::relaxed));
  CHECK(!satisfies_flavor(0.5 * s, Flavor::ising));
  CHECK(satisfies_flavor(random_normal(20, Seed{3, "g"}).normalized() * std::sqrt(20.0), Flavor::spherical));
  CHECK_THROWS_AS(cubic.energy(Eigen::VectorXd::Zero(19)), Error);
}

TEST_CASE("gradient agrees with central differences") {
  const int n = 30;
  const PSpinInstance inst = sample_pspin(MixingPolynomial::parse("0.5:2,1:3"), n, Seed{4, "h"});
  const Eigen::VectorXd m = random_normal(n, Seed{5, "m"});
  const Eigen::VectorXd g = inst.gradient(m);
  const double h = 1e-5;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p = m, q = m;
    p(i) += h;
    q(i) -= h;
    const double fd = (inst.energy(p) - inst.energy(q)) / (2 * h);
    worst = std::max(worst, std::abs(fd - g(i)) / std::max(1.0, std::abs(g(i))));
  }
  CHECK(worst <= 1e-5);
  Eigen::VectorXd g2;
  CHECK(inst.energy_and_gradient(m, g2) == doctest::Approx(inst.energy(m)).epsilon(1e-12));
  CHECK((g2 - g).norm() <= 1e-12 * g.norm());
}

TEST_CASE("SK form: energy is half the quadratic form and Euler's identity holds") {
  const int n = 40;
  const SymmetricMatrix a = sample_goe(n, Seed{6, "goe"});
  const PSpinInstance inst = PSpinInstance::from_matrix(a);
  const Eigen::VectorXd m = random_normal(n, Seed{7, "m"});
  CHECK(inst.energy(m) == doctest::Approx(0.5 * a.quadratic_form(m)).epsilon(1e-12));
  CHECK((inst.gradient(m) - a * m).norm() <= 1e-10);
  CHECK(m.dot(inst.gradient(m)) == doctest::Approx(2.0 * inst.energy(m)).epsilon(1e-12));
}

TEST_CASE("covariance probe: diagonal variance and overlap one half") {
  const int n = 50;
  const Eigen::VectorXd s1 = random_sign(n, Seed{8, "s"});
  auto cells = covariance_probe(MixingPolynomial::sk(), n, {{s1, s1}}, 10000, Seed{9, "probe"});
  CHECK(cells[0].predicted == doctest::Approx(n * 0.5));
  CHECK(cells[0].within_3se);

  // Overlap exactly 1/2 needs n divisible by 4.
  const int n48 = 48;
  const Eigen::VectorXd t1 = random_sign(n48, Seed{10, "s"});
  Eigen::VectorXd t2 = t1;
  for (int i = 0; i < 12; ++i) t2(i) = -t2(i);
  auto half = covariance_probe(MixingPolynomial::sk(), n48, {{t1, t2}}, 10000, Seed{11, "probe"});
  CHECK(half[0].overlap == doctest::Approx(0.5));
  CHECK(half[0].predicted == doctest::Approx(n48 * 0.125));
  CHECK(half[0].within_3se);

  // Orthogonal pair under a pure cubic: prediction zero.
  Eigen::VectorXd u1 = Eigen::VectorXd::Ones(8), u2 = Eigen::VectorXd::Ones(8);
  u2.tail(4) *= -1.0;
  auto orth = covariance_probe(MixingPolynomial({0, 0, 0, 1}), 8, {{u1, u2}}, 2000, Seed{12, "probe"});
  CHECK(orth[0].predicted == 0.0);
  CHECK(orth[0].within_3se);
}

TEST_CASE("brute force on hand-enumerable instances") {
  // n = 2, A = [[0,1],[1,0]]: H(σ) = σ1σ2, maximized at (1,1) and (-1,-1).
  Eigen::MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  const OptResult r = brute_force_opt(PSpinInstance::from_matrix(SymmetricMatrix(m)));
  CHECK(r.value == doctest::Approx(0.5));
  // Ties resolve to the lexicographically smallest configuration under -1 < +1.
  CHECK(r.sigma(0) == -1.0);
  CHECK(r.sigma(1) == -1.0);

  const OptResult one = brute_force_opt(PSpinInstance::from_matrix(SymmetricMatrix::zeros(1)));
  CHECK(one.value == 0.0);
  CHECK(one.sigma(0) == -1.0);
}

TEST_CASE("brute force matches a naive scan and is sign symmetric for even degrees") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const int n = 10;
    const PSpinInstance inst = sample_pspin(MixingPolynomial::parse("0.5:2,0.3:4"), n, Seed{s, "bf"});
    double best = -1e300;
    for (int code = 0; code < (1 << n); ++code) {
      Eigen::VectorXd sigma(n);
      for (int j = 0; j < n; ++j) sigma(j) = (code >> j) & 1 ? 1.0 : -1.0;
      best = std::max(best, inst.normalized_energy(sigma));
    }
    const OptResult r = brute_force_opt(inst);
    CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
    CHECK(inst.normalized_energy(-r.sigma) == doctest::Approx(r.value).epsilon(1e-12));
  }
  const PSpinInstance sk = PSpinInstance::from_matrix(sample_goe(16, Seed{3, "bf"}));
  const OptResult r = brute_force_opt(sk);
  CHECK(sk.normalized_energy(r.sigma) == doctest::Approx(r.value).epsilon(1e-12));
  CHECK_THROWS_AS(brute_force_opt(PSpinInstance::from_matrix(SymmetricMatrix::zeros(23))), Error);
}

TEST_CASE("free energy: small beta limit, sandwich and monotonicity") {
  const int n = 12;
  const PSpinInstance inst = PSpinInstance::from_matrix(sample_goe(n, Seed{21, "fe"}));
  CHECK(free_energy(inst, 1e-9) == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  const double opt = brute_force_opt(inst).value;
  double previous = 1e300;
  for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double ratio = free_energy(inst, beta) / beta;
    CHECK(ratio >= opt - 1e-12);
    CHECK(ratio - opt <= std::log(2.0) / beta + 1e-12);
    CHECK(ratio <= previous + 1e-12);
    previous = ratio;
  }
}
