#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "meanfield/mixing.hpp"

namespace mf {

enum class Boundary { ising, spherical };

/// Step-function order parameter: γ(t) = values[i] on [breakpoints[i], breakpoints[i+1]).
struct RSBProfile {
  std::vector<double> breakpoints{0.0, 1.0};  // 0 = t_0 < t_1 < ... < t_K = 1
  std::vector<double> values{0.0};            // γ_1..γ_K ≥ 0
  /// Spherical boundary only: terminal data Φ(1,x) = x²/(2L) + L/2 with L = terminal_scale.
  double terminal_scale = 1.0;

  static RSBProfile constant(double gamma);

  int levels() const { return static_cast<int>(values.size()); }
  double gamma_at(double t) const;
  /// Membership in the monotone class (γ nondecreasing).
  bool nondecreasing() const;
  /// Structural checks; the solver accepts non-monotone γ ≥ 0.
  void validate() const;
};

struct ParisiGrid {
  int space_points = 2048;  // M; the grid has M+1 nodes on [-L, L], M even
  double half_width = 0.0;  // L; 0 selects max(8, 6√ξ′(1))
  int quadrature_nodes = 64;
  /// Maximum spacing of stored time slices; the default stores only the breakpoints.
  double time_step = 1.0;
};

/// Φ and its first two x-derivatives on a grid of time slices.
struct ParisiSolution {
  Boundary boundary = Boundary::ising;
  RSBProfile profile;
  MixingPolynomial mixing;
  double half_width = 0.0;
  int space_points = 0;
  std::vector<double> times;  // ascending, from 0 to 1
  std::vector<std::vector<double>> phi, phi_x, phi_xx;

  double dx() const { return 2.0 * half_width / space_points; }
  double x(int i) const { return -half_width + i * dx(); }
  int slice_index(double t) const;  // exact match required
  double phi00() const { return phi.front()[static_cast<std::size_t>(space_points / 2)]; }
  /// The terminal data |x| or x²/(2L) + L/2.
  double boundary_value(double x) const;

  /// CSV dump with columns t,x,phi,phi_x,phi_xx; every `stride`-th space node.
  void write_csv(std::ostream& out, int stride = 1) const;
};

struct ParisiValue {
  double value = 0.0;       // Φ(0,0) − correction
  double correction = 0.0;  // ½∫ t ξ″(t) γ(t) dt
  double phi00 = 0.0;
};

double resolved_half_width(const MixingPolynomial& mixing, const ParisiGrid& grid);

/// Backward solve of ∂_tΦ + ½ξ″(∂_xxΦ + γ(∂_xΦ)²) = 0 with exact Cole–Hopf steps per constant-γ interval.
ParisiSolution solve_pde(const RSBProfile& profile, const MixingPolynomial& mixing, Boundary boundary,
                         const ParisiGrid& grid = {});

/// ½∫₀¹ t ξ″(t) γ(t) dt in closed form.
double correction_term(const RSBProfile& profile, const MixingPolynomial& mixing);

ParisiValue evaluate(const ParisiSolution& solution);
ParisiValue functional(const RSBProfile& profile, const MixingPolynomial& mixing, Boundary boundary,
                       const ParisiGrid& grid = {});

/// Spherical boundary in closed form: Φ(t,x) = A(t)x²/2 + C(t) with 1/A(t) = L − ∫_t^1 ξ″γ.
struct QuadraticSlice {
  double curvature = 0.0;  // A
  double constant = 0.0;   // C
};
QuadraticSlice spherical_riccati(const RSBProfile& profile, const MixingPolynomial& mixing, double t);
ParisiValue spherical_functional(const RSBProfile& profile, const MixingPolynomial& mixing);

struct MinimizeOptions {
  int levels = 3;             // K ∈ [1, 8]
  int restarts = 5;
  int max_evaluations = 2000;  // per restart
  std::uint64_t seed = 0;
  ParisiGrid grid;
};

struct MinimizeResult {
  RSBProfile profile;
  ParisiValue value;
  /// Best value found at each level 1..K of the nested search.
  std::vector<double> value_by_level;
  int evaluations = 0;
  /// Set when the last restart ran out of budget before meeting its tolerance.
  bool budget_exhausted = false;
};

/// Nested Nelder–Mead search over K-level profiles. Ising searches the monotone
/// class; spherical searches γ ≥ 0 together with the terminal scale L.
MinimizeResult minimize(const MixingPolynomial& mixing, Boundary boundary, const MinimizeOptions& options = {});

/// ∫₀¹ √ξ″(t) dt by tanh-sinh quadrature.
double spherical_value(const MixingPolynomial& mixing);

/// Step discretization of the spherical stationary point γ*(t) = (√ξ″)′/ξ″, L = √ξ″(1),
/// at which the functional equals ∫√ξ″. Needs far more levels than minimize() searches.
RSBProfile spherical_stationary_profile(const MixingPolynomial& mixing, int levels = 200);

}  // namespace mf
