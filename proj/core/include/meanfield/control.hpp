#pragma once

#include <vector>

#include "meanfield/mixing.hpp"
#include "meanfield/parisi.hpp"

namespace mf {

/// Control u(t,x) and drift v(t,x) driving the IAMP increments.
///
/// Spherical flavor is closed form, u(t) = 1/√ξ″(t) and v ≡ 0. Ising flavor
/// is read from a Parisi solution: u = ∂_xxΦ, v = ξ″γ∂_xΦ, with the
/// magnetization map ∂_xΦ; values are linear in t between stored slices and
/// linear in x between grid nodes.
class ControlField {
 public:
  enum class Flavor { spherical, ising };

  ControlField() = default;

  static ControlField spherical(const MixingPolynomial& mixing, double delta);
  static ControlField ising(const ParisiSolution& solution, double delta);

  Flavor flavor() const { return flavor_; }
  double delta() const { return delta_; }
  const MixingPolynomial& mixing() const { return mixing_; }
  /// First time with ξ″ > 0 (spherical); 0 for Ising.
  double start_time() const { return start_time_; }
  /// The profile the Ising field was built from (empty for spherical).
  const RSBProfile& profile() const { return profile_; }

  double u(double t, double x) const;
  /// ∂u/∂x (zero for spherical).
  double u_x(double t, double x) const;
  /// ∂_xΦ(t,x) (Ising only).
  double phi_x(double t, double x) const;
  double v(double t, double x) const;
  double v_x(double t, double x) const;
  double gamma(double t) const;

 private:
  double sample(const std::vector<std::vector<double>>& field, double t, double x) const;

  Flavor flavor_ = Flavor::spherical;
  double delta_ = 0.0;
  MixingPolynomial mixing_;
  double start_time_ = 0.0;
  RSBProfile profile_;
  double half_width_ = 0.0;
  int space_points_ = 0;
  std::vector<double> times_;
  std::vector<std::vector<double>> phi_x_, phi_xx_, phi_xxx_;
};

/// Ising control field from an Ising Parisi solution; spherical solutions are unsupported.
ControlField export_control(const ParisiSolution& solution, double delta = 0.025);

}  // namespace mf
