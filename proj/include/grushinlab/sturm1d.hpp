#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "grushinlab/errors.hpp"

namespace grushinlab {

// ---------------------------------------------------------------------------
// Half-line potentials V(x) = k/x^2 + g1/x + V_reg(x) on (0, infinity).
// V_reg must be bounded near 0; its behavior at infinity has to be declared
// so the endpoint classification knows which regime applies.
// ---------------------------------------------------------------------------

enum class FarField {
    None,             // no regular part: V -> 0 at infinity
    BoundedAbove,     // V_reg bounded above by a declared constant on [1, inf)
    PolynomialGrowth, // V_reg grows at most polynomially (confining wells)
    Undeclared,       // custom V_reg without declared far-field: unsupported
};

class Potential1D {
public:
    explicit Potential1D(double k, double g1 = 0.0);

    // The transformed radial family: k = 3/4 - 2c, no 1/x term.
    static Potential1D bessel_family(double c);

    Potential1D& set_regular_part(std::function<double(double)> v_reg, FarField far_field);

    double k() const { return k_; }
    double g1() const { return g1_; }
    bool has_regular_part() const { return static_cast<bool>(v_reg_); }
    FarField far_field() const { return far_field_; }

    double operator()(double x) const;

private:
    double k_;
    double g1_;
    std::function<double(double)> v_reg_;
    FarField far_field_ = FarField::None;
};

// ---------------------------------------------------------------------------
// Weyl endpoint classification
// ---------------------------------------------------------------------------

enum class Endpoint { LimitPoint, LimitCircle, BoundaryUndecidable };

std::string to_string(Endpoint e);

// Sharp closed rule at 0: LimitPoint iff k >= 3/4 (the inverse-square strength
// dominates the classification; g1 and the bounded part are subordinate).
Endpoint classify_zero_analytic(const Potential1D& potential);

// Independent shooting oracle: integrates two solutions of -u'' + V u = 0
// from x = 1 toward 0 on a log mesh and decides square-integrability by
// power-law fit of |u| over [1e-5, 1e-4] (peak-envelope fit in the
// oscillatory regime). Refuses to decide within the band |k - 3/4| <= 0.02.
// Throws InconclusiveError when the fit residual exceeds 0.1.
Endpoint classify_zero_numeric(const Potential1D& potential);

// All catalog potentials are LimitPoint at infinity; potentials with an
// undeclared far field raise UnsupportedError.
Endpoint classify_infinity_analytic(const Potential1D& potential);

// Deficiency indices from the endpoint table:
//   (LP, LP) -> (0, 0);  one LC -> (1, 1);  (LC, LC) -> (2, 2).
std::pair<int, int> deficiency_indices(const Potential1D& potential);

// Cross-check solver (test harness): integrates -u'' + V u = z u for
// non-real z from the far end inward, keeping the solution that decays at
// infinity, and reports whether it is square-integrable at 0 (1) or not (0).
int count_l2_solutions_at_zero(const Potential1D& potential, std::complex<double> z);

// ---------------------------------------------------------------------------
// Frobenius asymptotics near 0 for -u'' + (g2/x^2 + g1/x) u
// ---------------------------------------------------------------------------

// Roots of the indicial polynomial P(a) = a(a-1) - g2, sorted (plus, minus).
// DomainError when 4 g2 + 1 < 0 (complex indicial exponents).
std::pair<double, double> indicial_roots(double g2);

struct FrobeniusPair {
    double g1 = 0.0;
    double g2 = 0.0;
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
    bool log_case = false;
    std::optional<double> a_plus;  // psi+ = x^{a+} + a_plus x^{a+ + 1} (power case)
    std::optional<double> a_minus;

    double psi_plus(double x) const;
    double psi_minus(double x) const;
    double psi_plus_d1(double x) const;
    double psi_minus_d1(double x) const;
    double psi_plus_d2(double x) const;
    double psi_minus_d2(double x) const;

    // Closed-form residual (-d^2/dx^2 + g2/x^2 + g1/x) psi±: the two leading
    // singular orders cancel by construction.
    double residual_plus(double x) const;
    double residual_minus(double x) const;
};

// Two-term truncations of the Frobenius series solutions:
//   generic g2:  psi± = x^{a±} + (g1 / (2 a±)) x^{a± + 1}
//   g2 = 0:      psi+ = x,  psi- = 1 + g1 x log x
//   g2 = -1/4:   psi+ = x^{1/2} + g1 x^{3/2},
//                psi- = x^{1/2} log x + g1 x^{3/2} log x + 2 x^{1/2}
// DomainError outside g2 in [-1/4, 3/4), the limit-circle window where both
// branches matter.
FrobeniusPair frobenius_solutions(double g1, double g2);

// Same two-term construction without the range gate; valid whenever the
// indicial roots are real. Used for boundary-condition asymptotics.
FrobeniusPair asymptotic_pair(double g1, double g2);

// ---------------------------------------------------------------------------
// Hardy inequality check: lhs = int |u|^2 / x^2, rhs = int |u'|^2, for a
// sampled function supported away from 0. Contract: lhs <= 4 * rhs * 1.05.
// ---------------------------------------------------------------------------

struct HardyResult {
    double lhs;
    double rhs;
};

HardyResult hardy_check(std::span<const double> x, std::span<const double> u);

} // namespace grushinlab
