#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace grushinlab {

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

// n >= 2 nodes, uniform in log x, exact endpoints. Requires 0 < x_min < x_max.
std::vector<double> log_grid(double x_min, double x_max, int points_per_decade);

// n >= 2 nodes, uniform, exact endpoints.
std::vector<double> uniform_grid(double a, double b, int n);

// n nodes on the circle [0, 2*pi), spacing 2*pi/n; the right endpoint is omitted.
std::vector<double> circle_grid(int n);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

double trapezoid(std::span<const double> x, std::span<const double> f);

// Mean over one period for samples on circle_grid(n): plain average (exact
// trapezoid weight on a uniform periodic grid).
double periodic_mean(std::span<const double> f);

// ---------------------------------------------------------------------------
// Power-law fitting:  |u| ~ C * x^p  by least squares on (log x, log |u|).
// residual is the RMS of log-residuals.  Points with |u| = 0 are skipped;
// fewer than 3 usable points throws InconclusiveError.
// ---------------------------------------------------------------------------

struct PowerFit {
    double exponent = 0.0;
    double log_amplitude = 0.0;
    double residual = 0.0;
    int points = 0;
};

PowerFit fit_power_law(std::span<const double> x, std::span<const double> absu);

// Restrict the fit to samples with x in [x_lo, x_hi].
PowerFit fit_power_law_window(std::span<const double> x, std::span<const double> absu,
                              double x_lo, double x_hi);

// ---------------------------------------------------------------------------
// Quintic smoothstep cutoff plateau P_eps:
//   P = 1 on (0, eps/2],  P = 0 on [eps, infinity),
//   P(x) = s(2(eps-x)/eps) in between with s(t) = 6t^5 - 15t^4 + 10t^3.
// C^2 across both joints.
// ---------------------------------------------------------------------------

double smoothstep01(double t);
double smoothstep01_d1(double t);
double smoothstep01_d2(double t);

double cutoff_plateau(double x, double eps);
double cutoff_plateau_d1(double x, double eps);
double cutoff_plateau_d2(double x, double eps);

// ---------------------------------------------------------------------------
// Linear algebra helpers
// ---------------------------------------------------------------------------

// Solves a tridiagonal system in place; rhs becomes the solution.
// lower[i] multiplies x[i-1] in row i (lower[0] unused); upper[i] multiplies
// x[i+1] in row i (upper[n-1] unused). No pivoting: intended for the
// diagonally dominant / Cayley matrices produced in this project.
template <class T>
void solve_tridiagonal(std::span<const T> lower, std::span<T> diag,
                       std::span<const T> upper, std::span<T> rhs);

extern template void solve_tridiagonal<double>(std::span<const double>, std::span<double>,
                                               std::span<const double>, std::span<double>);
extern template void solve_tridiagonal<std::complex<double>>(std::span<const std::complex<double>>,
                                                             std::span<std::complex<double>>,
                                                             std::span<const std::complex<double>>,
                                                             std::span<std::complex<double>>);

// Eigenvalues of a dense symmetric matrix (row-major n*n) by cyclic Jacobi.
// Returns them sorted ascending. Intended for small matrices (Gram tests).
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

// Eigenvalues of a Hermitian matrix via the real 2n x 2n embedding
// [[Re, -Im], [Im, Re]]; each eigenvalue of the input appears once in the
// returned (ascending) list.
std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>>& a, int n);

// ---------------------------------------------------------------------------
// Deterministic RNG for property tests (splitmix64).
// ---------------------------------------------------------------------------

struct SplitMix64 {
    std::uint64_t state;
    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double uniform(double a, double b); // in [a, b)
};

} // namespace grushinlab
