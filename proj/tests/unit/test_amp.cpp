#include <doctest.h>

#include <cmath>

#include "meanfield/amp.hpp"
#include "meanfield/ensembles.hpp"
#include "meanfield/error.hpp"
#include "meanfield/quadrature.hpp"

using namespace mf;

namespace {

Eigen::VectorXd gaussian(int n, const Seed& seed) {
  const CounterRng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal(i);
  return v;
}

bool psd(const Eigen::MatrixXd& q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  return es.eigenvalues().minCoeff() >= -1e-10 && (q - q.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

TEST_CASE("Onsager coefficients of simple schedules") {
  const int n = 2000;
  Eigen::MatrixXd x(n, 3);
  x.col(0) = gaussian(n, Seed{1, "x0"});
  x.col(1) = gaussian(n, Seed{1, "x1"});
  x.col(2) = 2.0 * gaussian(n, Seed{1, "x2"});
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(n);

  const TanhSchedule tanh_s(4);
  const OnsagerCoefficients t = onsager(tanh_s, x, z, 2);
  REQUIRE(t.b.size() == 2);
  CHECK(t.b[0] == 0.0);  // f_2 does not depend on x^1
  CHECK(t.b[1] > 0.0);
  CHECK(t.b[1] <= 1.0);
  double expect = 0.0;
  for (int i = 0; i < n; ++i) expect += 1.0 - std::pow(std::tanh(x(i, 2)), 2);
  CHECK(t.b[1] == doctest::Approx(expect / n).epsilon(1e-12));

  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(3, 3);
  table(2, 1) = 0.7;
  table(2, 2) = -1.3;
  const LinearSchedule lin(table);
  const OnsagerCoefficients l = onsager(lin, x, z, 2);
  CHECK(l.b[0] == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(l.b[1] == doctest::Approx(-1.3).epsilon(1e-13));
  CHECK(!l.finite_difference);
}

TEST_CASE("finite-difference fallback for schedules without derivatives") {
  const FunctionSchedule fs(
      3, [](int, const double* x, double) { return std::sin(x[0]) * x[1]; }, nullptr, 1.0, false, "sinprod");
  double x[2] = {0.3, -1.1};
  CHECK(std::isnan(fs.df(1, 1, x, 0.0)));
  CHECK(finite_difference(fs, 1, 1, x, 0.0) == doctest::Approx(std::sin(0.3)).epsilon(1e-8));
  CHECK(finite_difference(fs, 1, 0, x, 0.0) == doctest::Approx(std::cos(0.3) * -1.1).epsilon(1e-8));

  Eigen::MatrixXd xs(2, 2);
  xs << 0.3, -1.1, 0.5, 2.0;
  const OnsagerCoefficients b = onsager(fs, xs, Eigen::VectorXd::Zero(2), 1);
  CHECK(b.finite_difference);
  CHECK(b.b[0] == doctest::Approx(0.5 * (std::sin(0.3) + std::sin(0.5))).epsilon(1e-8));
}

TEST_CASE("zero nonlinearity gives zero iterates") {
  const int n = 300;
  const SymmetricMatrix a = sample_goe(n, Seed{2, "goe"});
  const FunctionSchedule zero(
      4, [](int, const double*, double) { return 0.0; }, [](int, int, const double*, double) { return 0.0; }, 0.0,
      true, "zero");
  const AmpTrajectory t = amp_run(a, zero, gaussian(n, Seed{2, "x0"}), Eigen::VectorXd::Zero(n), 4);
  for (int k = 1; k <= 4; ++k) CHECK(t.x.col(k).norm() == 0.0);
}

TEST_CASE("state evolution: identity and quadrature versus Monte Carlo") {
  InitLaw init;
  const SEState id = state_evolution(LinearSchedule::identity(3), init, 3, Seed{3, "se"});
  CHECK(id.q(0, 0) == doctest::Approx(1.0));
  CHECK(psd(id.q));

  const TanhSchedule tanh_s(6);
  const SEState quad = state_evolution(tanh_s, init, 6, Seed{3, "se"});
  CHECK(quad.mc_samples == 0);
  SEOptions mc_opt;
  mc_opt.allow_quadrature = false;
  mc_opt.mc_samples = 400000;
  const SEState mc = state_evolution(tanh_s, init, 6, Seed{3, "se"}, mc_opt);
  CHECK(psd(quad.q));
  CHECK(psd(mc.q));
  // Q_22 = E tanh²(√Q_11 G), computed independently here.
  const GaussHermite& gh = gauss_hermite(64);
  double q22 = 0.0;
  for (std::size_t i = 0; i < gh.nodes.size(); ++i)
    q22 += gh.weights[i] * std::pow(std::tanh(std::sqrt(quad.q(0, 0)) * gh.nodes[i]), 2);
  CHECK(quad.q(1, 1) == doctest::Approx(q22).epsilon(1e-10));
  for (int k = 0; k < 6; ++k)
    for (int j = 0; j <= k; ++j) {
      CAPTURE(k);
      CAPTURE(j);
      CHECK(std::abs(mc.q(k, j) - quad.q(k, j)) <= 3.0 * mc.q_stderr(k, j) + 1e-12);
    }
}

TEST_CASE("AMP iterates follow state evolution at moderate n") {
  const int n = 4000, steps = 5;
  const SymmetricMatrix a = sample_goe(n, Seed{4, "goe"});
  const TanhSchedule tanh_s(steps);
  InitLaw init;
  const SEState se = state_evolution(tanh_s, init, steps, Seed{4, "se"});
  const AmpTrajectory t = amp_run(a, tanh_s, gaussian(n, Seed{4, "x0"}), Eigen::VectorXd::Zero(n), steps);
  CHECK((t.gram() - se.q).cwiseAbs().maxCoeff() <= 0.05);

  const auto rows = se_compare(t, se, gram_tests(steps), 20000, Seed{4, "cmp"});
  REQUIRE(rows.front().name == "const");
  CHECK(rows.front().deviation() == 0.0);
  for (const auto& r : rows) CHECK(std::abs(r.deviation()) <= 0.05);

  AmpOptions plain;
  plain.onsager = false;
  const AmpTrajectory raw = amp_run(a, tanh_s, gaussian(n, Seed{4, "x0"}), Eigen::VectorXd::Zero(n), steps, plain);
  CHECK((raw.gram() - se.q).cwiseAbs().maxCoeff() > 0.2);
}

TEST_CASE("identity schedule keeps unit variance") {
  const int n = 4000;
  const SymmetricMatrix a = sample_goe(n, Seed{5, "goe"});
  Eigen::VectorXd x0 = gaussian(n, Seed{5, "x0"});
  x0 *= std::sqrt(n) / x0.norm();
  const AmpTrajectory t = amp_run(a, LinearSchedule::identity(1), x0, Eigen::VectorXd::Zero(n), 1);
  CHECK(std::abs(t.x.col(1).squaredNorm() / n - 1.0) <= 0.05);
}

TEST_CASE("input validation") {
  const SymmetricMatrix a = sample_goe(10, Seed{6, "goe"});
  const TanhSchedule tanh_s(2);
  CHECK_THROWS_AS(amp_run(a, tanh_s, Eigen::VectorXd::Zero(9), Eigen::VectorXd::Zero(10), 2), Error);
  CHECK_THROWS_AS(amp_run(a, tanh_s, Eigen::VectorXd::Zero(10), Eigen::VectorXd::Zero(10), 3), Error);
}
