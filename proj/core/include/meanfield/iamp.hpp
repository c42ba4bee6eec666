#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "meanfield/control.hpp"
#include "meanfield/hamiltonian.hpp"
#include "meanfield/matrix.hpp"
#include "meanfield/rng.hpp"

namespace mf {

/// u(t) = 1/√ξ″(t), v ≡ 0.
ControlField spherical_control(const MixingPolynomial& mixing, double delta);
/// u = ∂_xxΦ, v = ξ″γ∂_xΦ from an Ising Parisi solution.
ControlField ising_control(const ParisiSolution& solution, double delta);

struct IampOptions {
  Seed seed{0, "iamp"};
  double clip = 1e-6;  // Ising magnetizations are clipped to [−1+clip, 1−clip]
  double orthogonality_tol = 0.05;
  double increment_tol = 0.1;  // relative to δ
  // Ising: m^{ℓ+1} = ∂_xΦ(t_{ℓ+1}, x^{ℓ+1}) instead of m^ℓ + u ∘ Δz. The two agree to first
  // order in δ; the map keeps m inside the cube.
  bool magnetization_map = true;
  // Rescale each z increment to its state-evolution variance.
  bool normalize_increments = true;
};

struct IampDiagnostics {
  double max_orthogonality = 0.0;  // max_ℓ |⟨m^{ℓ+1} − m^ℓ, m^ℓ⟩|/n
  double max_increment_error = 0.0;  // max_ℓ |‖m^{ℓ+1} − m^ℓ‖²/n − δ| / δ
  double final_norm = 0.0;  // ‖m^T‖²/n
  bool flagged = false;  // a diagnostic exceeded 5× its tolerance
  std::string warning;
};

struct IampTrajectory {
  double delta = 0.0;
  std::vector<double> times;  // t_ℓ of each m^ℓ
  std::vector<Eigen::VectorXd> z;  // z^0 = 0, z^1, …
  std::vector<Eigen::VectorXd> m;
  Eigen::VectorXd x;  // final field x^T (Ising); empty for spherical
  std::vector<double> energies;  // H(m^ℓ)/n
  std::vector<double> second_moments;  // ‖m^ℓ‖²/n
  IampDiagnostics diagnostics;

  const Eigen::VectorXd& final_m() const { return m.back(); }
};

/// Runs the incremental AMP for the control's time grid: m^0 sits at t = δ
/// and each step adds δ, ending at t = 1.
IampTrajectory run_iamp(const PSpinInstance& instance, const ControlField& control, const IampOptions& options = {});

struct SEShadow {
  std::vector<double> times;
  std::vector<double> second_moments;  // E M_t²
  double value = 0.0;  // Σ E{ΔM ΔZ}, the discrete V(U)
  double inside_fraction = 0.0;  // fraction of paths with |M_1| ≤ 1
  double martingale_defect = 0.0;  // max |E{(Z_{t+δ} − Z_t) Z_s}|, s ≤ t
};

/// Monte Carlo state evolution of the IAMP pair (Z, M) with E{Z_{t+δ}Z_{s+δ}} = ξ′(E{M_t M_s}).
/// Follows the same discretization choices as run_iamp under `options`.
SEShadow se_shadow(const ControlField& control, int mc_samples = 20000, const Seed& seed = {0, "iamp/se"},
                   const IampOptions& options = {});

struct Rounding {
  Eigen::VectorXd sigma;
  double energy_before = 0.0;  // H(m)/n
  double energy_after = 0.0;  // H(σ)/n
  double change() const { return energy_after - energy_before; }
};

/// σ_i = sign(m_i) with sign(0) = +1.
Rounding round_to_cube(const PSpinInstance& instance, const Eigen::VectorXd& m);
/// σ = √n m/‖m‖ (all-ones when m = 0).
Rounding round_to_sphere(const PSpinInstance& instance, const Eigen::VectorXd& m);

struct SpectralBaseline {
  Eigen::VectorXd sigma;
  double energy = 0.0;  // ⟨σ, Aσ⟩/2n
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

SpectralBaseline spectral_baseline(const SymmetricMatrix& a, int max_steps = 300, double tol = 1e-8);

}  // namespace mf
