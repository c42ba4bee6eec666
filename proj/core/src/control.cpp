#include "meanfield/control.hpp"

#include <algorithm>
#include <cmath>

#include "meanfield/error.hpp"

namespace mf {

ControlField ControlField::spherical(const MixingPolynomial& mixing, double delta) {
  require(delta > 0.0 && delta <= 1.0, ErrorKind::invalid_input, "delta must lie in (0, 1]");
  ControlField c;
  c.flavor_ = Flavor::spherical;
  c.delta_ = delta;
  c.mixing_ = mixing;
  // With nonnegative coefficients ξ″ > 0 on (0, 1]; it vanishes at 0 only
  // without a quadratic term, and then the first usable time is δ.
  c.start_time_ = mixing.xi_second(0.0) > 0.0 ? 0.0 : delta;
  return c;
}

ControlField ControlField::ising(const ParisiSolution& solution, double delta) {
  require(solution.boundary == Boundary::ising, ErrorKind::unsupported,
          "spherical solutions have the closed-form control ControlField::spherical");
  require(delta > 0.0 && delta <= 1.0, ErrorKind::invalid_input, "delta must lie in (0, 1]");
  ControlField c;
  c.flavor_ = Flavor::ising;
  c.delta_ = delta;
  c.mixing_ = solution.mixing;
  c.profile_ = solution.profile;
  c.half_width_ = solution.half_width;
  c.space_points_ = solution.space_points;
  c.times_ = solution.times;
  c.phi_x_ = solution.phi_x;
  c.phi_xx_ = solution.phi_xx;
  const int m = solution.space_points;
  const double h = solution.dx();
  for (const auto& s : solution.phi_xx) {
    std::vector<double> d(m + 1);
    for (int i = 1; i < m; ++i) d[i] = (s[i + 1] - s[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
    d[m] = (3.0 * s[m] - 4.0 * s[m - 1] + s[m - 2]) / (2.0 * h);
    c.phi_xxx_.push_back(std::move(d));
  }
  return c;
}

ControlField export_control(const ParisiSolution& solution, double delta) {
  return ControlField::ising(solution, delta);
}

double ControlField::sample(const std::vector<std::vector<double>>& field, double t, double x) const {
  t = std::clamp(t, 0.0, 1.0);
  auto hi = std::lower_bound(times_.begin(), times_.end(), t);
  std::size_t j1 = static_cast<std::size_t>(hi - times_.begin());
  if (j1 >= times_.size()) j1 = times_.size() - 1;
  const std::size_t j0 = j1 == 0 ? 0 : j1 - 1;
  const double wt = (j1 == j0 || times_[j1] == times_[j0]) ? 1.0 : (t - times_[j0]) / (times_[j1] - times_[j0]);

  const double h = 2.0 * half_width_ / space_points_;
  double u = (x + half_width_) / h;
  u = std::clamp(u, 0.0, static_cast<double>(space_points_));
  int i = std::min(static_cast<int>(u), space_points_ - 1);
  const double wx = u - i;
  auto at = [&](std::size_t j) { return (1.0 - wx) * field[j][i] + wx * field[j][i + 1]; };
  return (1.0 - wt) * at(j0) + wt * at(j1);
}

double ControlField::u(double t, double x) const {
  if (flavor_ == Flavor::spherical) return 1.0 / std::sqrt(mixing_.xi_second(std::clamp(t, 0.0, 1.0)));
  return std::max(0.0, sample(phi_xx_, t, x));
}

double ControlField::u_x(double t, double x) const {
  if (flavor_ == Flavor::spherical) return 0.0;
  return sample(phi_xxx_, t, x);
}

double ControlField::phi_x(double t, double x) const {
  require(flavor_ == Flavor::ising, ErrorKind::unsupported, "magnetization map exists only for the Ising control");
  return sample(phi_x_, t, x);
}

double ControlField::gamma(double t) const {
  return flavor_ == Flavor::ising ? profile_.gamma_at(std::clamp(t, 0.0, 1.0)) : 0.0;
}

double ControlField::v(double t, double x) const {
  if (flavor_ == Flavor::spherical) return 0.0;
  return mixing_.xi_second(std::clamp(t, 0.0, 1.0)) * gamma(t) * sample(phi_x_, t, x);
}

double ControlField::v_x(double t, double x) const {
  if (flavor_ == Flavor::spherical) return 0.0;
  return mixing_.xi_second(std::clamp(t, 0.0, 1.0)) * gamma(t) * sample(phi_xx_, t, x);
}

}  // namespace mf
