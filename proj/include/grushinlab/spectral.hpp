#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grushinlab/frames.hpp"
#include "grushinlab/sturm1d.hpp"

namespace grushinlab {

// ---------------------------------------------------------------------------
// alpha-Grushin classification: the mode-0 operator of -Delta + cK on the
// power-profile cylinder reduces to an inverse-square potential of strength
// k(alpha, c), and essential self-adjointness is exactly k >= 3/4.
// ---------------------------------------------------------------------------

// k(alpha, c) = ((1-4c) alpha^2 + (2-4c) alpha) / 4.
double k_strength(double alpha, double c);

// Roots of (1-4c) alpha^2 + (2-4c) alpha - 3 = 0, i.e. the alpha values where
// k(alpha, c) crosses 3/4.
struct BoundaryRoots {
    double upper; // +infinity sentinel in the degenerate linear case
    double lower;
    bool linear_degenerate; // c = 1/4: single boundary alpha = 3
};

// none when the discriminant 16((c-2)^2 - 3) is negative (no real crossing);
// tiny negative discriminants from rounding at the double root are clamped.
std::optional<BoundaryRoots> alpha_boundaries(double c);

// The five classification branches in c.
enum class Rule { BelowQuarter, QuarterExactly, QuarterToLeft, ComplexBand, AboveRight };

std::string to_string(Rule r);

struct RegionVerdict {
    double alpha;
    double c;
    double k_strength;
    bool essentially_self_adjoint;
    Rule rule;
};

RegionVerdict classify_alpha_grushin(double alpha, double c);

// Same verdict expressed through interval membership against the boundary
// roots; must agree with the k >= 3/4 threshold everywhere.
bool esa_by_boundaries(double alpha, double c);

struct RegionGrid {
    std::vector<double> alpha; // cell-center abscissae (columns)
    std::vector<double> c;     // cell-center ordinates (rows)
    std::vector<RegionVerdict> cells; // row-major: cells[row * alpha.size() + col]
};

// Classifies every cell center of an n_alpha x n_c partition. Deterministic
// row-major output; cells are classified in parallel (GRUSHINLAB_THREADS
// caps the worker count).
RegionGrid region_map(double alpha_lo, double alpha_hi, std::size_t n_alpha, double c_lo,
                      double c_hi, std::size_t n_c);

// ---------------------------------------------------------------------------
// Gauge transform of -Delta + cK on a Grushin-kind profile f = x e^phi.
// ---------------------------------------------------------------------------

struct CurvatureLaplacianSpec {
    CurvatureLaplacianSpec(FrameProfile profile, double c);

    FrameProfile profile;
    double c; // curvature coupling, >= 0
};

// The conjugated operator on L^2(dx dy):
//   H = -d_xx - x^2 e^{2phi} d_yy - 2 x^2 e^{2phi} phi_y d_y
//       + g2/x^2 + ((1-4c)/2) phi_x / x + eta_c
// with g2 = 3/4 - 2c and the bounded field
//   eta_c = (1/4-c) phi_x^2 + (c-1/2) phi_xx
//           - x^2 e^{2phi} (3/4 phi_y^2 + 1/2 phi_yy).
class TransformedOperator {
public:
    double g2() const { return g2_; }
    double c() const { return c_; }
    const FrameProfile& profile() const { return profile_; }

    double g1_of_y(double y) const;
    double eta_c(double x, double y) const;

    // Exact Fourier-mode reduction to a half-line potential; only available
    // when phi does not depend on y (modes decouple), otherwise throws
    // UnsupportedError.
    Potential1D mode_potential(int m) const;

private:
    friend TransformedOperator transform_operator(const CurvatureLaplacianSpec& spec);
    TransformedOperator(FrameProfile profile, double c);

    FrameProfile profile_;
    double c_;
    double g2_;
};

// Requires a Grushin-kind profile and c in (0, 1/2).
TransformedOperator transform_operator(const CurvatureLaplacianSpec& spec);

// Second-order finite-difference application of the transformed operator at
// node (i, j) of a sampled field (i interior in x; y periodic).
double transformed_apply_fd(const TransformedOperator& op, const Field2D<double>& v,
                            std::size_t i, std::size_t j);

// Reference path for the conjugation identity: psi must hold sqrt(|f|) * v;
// returns |f|^{-1/2} (-Delta + cK) psi at node (i, j).
double conjugated_apply_fd(const FrameProfile& profile, double c, const Field2D<double>& psi,
                           std::size_t i, std::size_t j);

// ---------------------------------------------------------------------------
// Witness functions h~ = psi_pm(x; y) * P_eps(x): compactly supported near
// the singular set, members of D(A*) but not of the closure domain.
// ---------------------------------------------------------------------------

enum class WitnessSign { Plus, Minus };
enum class WitnessSide { Plus, Minus }; // which side of the singular set; Minus reflects x -> -x

std::string to_string(WitnessSign s);

struct WitnessFunction {
    WitnessSign sign = WitnessSign::Plus;
    WitnessSide side = WitnessSide::Plus;
    double epsilon = 0.1;
    double c = 0.0;
    double alpha_exponent = 0.0; // indicial exponent of the radial factor
    bool log_case = false;       // g2 = 0 (c = 3/8): log-branch expansions used
    Field2D<double> samples;     // x: log grid on [1e-6, eps]; y: 64-point circle

    // Radial expansion per y node, for analytic operator application; empty
    // for injected power-law probes.
    std::vector<FrobeniusPair> radial;
    std::optional<double> probe_exponent;
};

WitnessFunction build_witness(const CurvatureLaplacianSpec& spec, WitnessSign sign,
                              double epsilon, WitnessSide side = WitnessSide::Plus);

// Deliberately unjustified witness x^p * P_eps for exercising the membership
// tests (the radial factor solves nothing).
WitnessFunction power_probe(const CurvatureLaplacianSpec& spec, double exponent, double epsilon);

// True iff ||H w||^2 over the cutoff plateau converges as the inner quadrature
// limit is pushed toward 0 (successive values within 10%); a value at least
// doubling per refinement is divergence and returns false immediately.
bool adjoint_membership_test(const WitnessFunction& w, const CurvatureLaplacianSpec& spec);

// Necessary-condition closure test: fits the decay exponent p of the mode-0
// component over [1e-5, 1e-4]; true ("not excluded") only if p > 3/2 + 0.01.
bool closure_membership_test(const WitnessFunction& w);

// Fitted decay exponent of the mode-0 component (the alpha_fit diagnostic).
double witness_alpha_fit(const WitnessFunction& w);

// ---------------------------------------------------------------------------
// Zero-extension onto a full chart straddling the singular set.
// ---------------------------------------------------------------------------

struct GluedField {
    Field2D<double> field; // x spans [x_lo, x_hi]; zero outside the witness zone
};

GluedField glue_to_manifold(const WitnessFunction& w, double x_lo, double x_hi);

// Smallest eigenvalue of the Gram matrix of {e^{i k y} g}_{k=0..n_modes-1};
// positive iff the glued mode family is linearly independent.
double glued_gram_smallest_eigenvalue(const GluedField& g, int n_modes);

} // namespace grushinlab
