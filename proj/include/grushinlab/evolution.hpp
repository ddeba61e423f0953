#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "grushinlab/sturm1d.hpp"

namespace grushinlab {

// ---------------------------------------------------------------------------
// Boundary conditions at the x_min truncation of (0, X). The far wall at
// x = X is always Dirichlet; the kinds differ in how the near-0 end couples:
//   FriedrichsLike  u follows the decaying asymptotic psi_plus
//   ExtensionMix    u follows psi_plus + theta * psi_minus
//   FarWall         Dirichlet at the truncation too (plain box)
// For k >= 3/4 psi_minus is not square-integrable at 0 (limit point: the
// extension is unique), so ExtensionMix falls back to the decaying branch.
// ---------------------------------------------------------------------------

enum class BcKind { FriedrichsLike, ExtensionMix, FarWall };

struct BoundaryCondition {
    BcKind kind = BcKind::FriedrichsLike;
    double theta = 0.0; // psi_minus weight per unit psi_plus (ExtensionMix)

    static BoundaryCondition friedrichs() { return {BcKind::FriedrichsLike, 0.0}; }
    static BoundaryCondition mix(double theta) { return {BcKind::ExtensionMix, theta}; }
    static BoundaryCondition far_wall() { return {BcKind::FarWall, 0.0}; }
};

// Log-spaced node set [x_min, x_max] used by all evolution runs.
std::vector<double> evolution_grid(double x_max = 6.0, int points_per_decade = 128,
                                   double x_min = 1e-4);

// ---------------------------------------------------------------------------
// P1 finite-element discretization of -u'' + V u with lumped mass. The
// asymptotic-matching boundary conditions enter as a Robin term: the
// logarithmic derivative kappa = psi_bc'(x_min) / psi_bc(x_min) added to the
// boundary stiffness entry, which forces u to follow psi_bc locally while
// keeping the matrix symmetric.
// ---------------------------------------------------------------------------

struct ModeOperator1D {
    std::vector<double> x;          // full node set (truncation node and far wall included)
    std::size_t first_unknown = 0;  // 0 (Robin at x_min) or 1 (Dirichlet at x_min)
    double robin_kappa = 0.0;       // 0 under FarWall
    std::vector<double> mass;       // lumped masses of the unknowns
    std::vector<double> k_lower;    // symmetric tridiagonal stiffness + potential
    std::vector<double> k_diag;
    std::vector<double> k_upper;
    BoundaryCondition bc;

    std::size_t unknowns() const { return k_diag.size(); }
};

// Throws DomainError for k < -1/4 with an asymptotic-matching bc (the
// indicial exponents are complex there); FarWall accepts any potential.
ModeOperator1D discretize_mode_operator(const Potential1D& potential,
                                        const BoundaryCondition& bc, double x_max = 6.0,
                                        int points_per_decade = 128, double x_min = 1e-4);

// (c_plus, c_minus) such that c_plus psi_plus + c_minus psi_minus
// interpolates the two samples (x0, u0), (x1, u1): the coefficient
// extraction identifying which asymptotic a discrete solution follows.
std::pair<double, double> boundary_coefficients(const FrobeniusPair& pair, double x0, double x1,
                                                double u0, double u1);

// ---------------------------------------------------------------------------
// Evolution runs
// ---------------------------------------------------------------------------

struct EvolutionRun {
    bool heat = true;                       // scheme: heat (backward Euler) or
                                            // Schroedinger (Crank-Nicolson)
    std::vector<double> x;                  // full node set
    std::vector<double> times;              // snapshot times, strictly increasing
    std::vector<std::vector<std::complex<double>>> fields; // snapshots on full nodes
    std::vector<double> mass;               // per snapshot: int |u| (heat), int |u|^2 (Schroedinger)
    std::vector<double> flux_at_zero;       // per snapshot: -Re(conj(u) u') at the first interior node
    double norm_drift = 0.0;                // max drift of the discrete M-norm over all steps
    double u0_l2_sq = 0.0;                  // int |u0|^2 on the full grid
};

// Backward-Euler integration of  du/dt = -(-u'' + V u).  u0 is sampled on
// op.x (entries at Dirichlet nodes are ignored).
EvolutionRun heat_evolve(const ModeOperator1D& op, std::span<const double> u0, double dt,
                         double t_final, int snapshot_stride = 50);

// Crank-Nicolson integration of  i du/dt = (-u'' + V u); exactly norm-
// conserving in the discrete M-inner product.
EvolutionRun schrodinger_evolve(const ModeOperator1D& op,
                                std::span<const std::complex<double>> u0, double dt,
                                double t_final, int snapshot_stride = 50);

// Smallest-eigenvalue eigenvector of the discretized operator (inverse power
// iteration), returned on the full node set and M-normalized.
std::vector<double> ground_state(const ModeOperator1D& op, int iterations = 200);

// C^1 bump (1 - w^2)^2 supported on [a, b].
std::vector<double> bump_profile(std::span<const double> x, double a, double b);

// ---------------------------------------------------------------------------
// Confinement diagnostics
// ---------------------------------------------------------------------------

struct ConfinementReport {
    double max_abs_flux = 0.0;
    double u0_l2_sq = 0.0;
    bool confined = false; // max |flux| <= 1e-6 * ||u0||^2
    bool leaking = false;  // max |flux| >  1e-3 * ||u0||^2
    std::vector<double> near_zero_exponent; // per snapshot; 0 for a zero field, NaN if unfit
    std::vector<double> fit_residual;
};

ConfinementReport confinement_report(const EvolutionRun& run);

} // namespace grushinlab
