#include "grushinlab/sturm1d.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "grushinlab/numerics.hpp"

namespace grushinlab {

namespace {

constexpr double kLimitPointThreshold = 0.75;
constexpr double kBoundaryBand = 0.02;
// Square-integrability of x^p near 0 needs p > -1/2; the oracle demands a
// 0.02 safety margin on the fitted exponent.
constexpr double kIntegrableExponent = -0.5 + 0.02;
constexpr double kFitResidualLimit = 0.1;
constexpr double kLogStep = 1e-3;
constexpr double kXMin = 1e-6;

} // namespace

// ---------------------------------------------------------------------------
// Potential1D
// ---------------------------------------------------------------------------

Potential1D::Potential1D(double k, double g1) : k_(k), g1_(g1) {
    if (!std::isfinite(k) || !std::isfinite(g1)) {
        throw ParameterError("potential coefficients must be finite");
    }
}

Potential1D Potential1D::bessel_family(double c) {
    return Potential1D(0.75 - 2.0 * c, 0.0);
}

Potential1D& Potential1D::set_regular_part(std::function<double(double)> v_reg,
                                           FarField far_field) {
    if (!v_reg) throw ParameterError("regular part must be callable");
    // Boundedness near 0 is part of the contract; probe a log ladder of
    // sample points and reject anything that blows up.
    for (int j = 0; j <= 32; ++j) {
        const double x = std::pow(2.0, -0.5 * j);
        const double v = v_reg(x);
        if (!std::isfinite(v) || std::abs(v) > 1e12) {
            throw ParameterError("regular part must stay bounded near 0");
        }
    }
    v_reg_ = std::move(v_reg);
    far_field_ = far_field;
    return *this;
}

double Potential1D::operator()(double x) const {
    if (!(x > 0.0)) throw DomainError("potential is defined on (0, infinity)");
    double v = k_ / (x * x) + g1_ / x;
    if (v_reg_) v += v_reg_(x);
    return v;
}

// ---------------------------------------------------------------------------
// Shooting integrator in t = log x:  u_tt - u_t = e^{2t} (V(e^t) - z) u
// ---------------------------------------------------------------------------

namespace {

template <typename Scalar>
struct LogSample {
    double x;
    Scalar u;
    Scalar w; // x u'(x), the natural derivative state in t = log x
};

// Fixed-step RK4 from t_start down to t_end (t_start > t_end). The linear
// ODE is rescaled whenever |u| overflows a guard while x > 1, which leaves
// all exponent fits over x <= 0.1 untouched.
template <typename Scalar>
std::vector<LogSample<Scalar>> integrate_inward(const Potential1D& potential, Scalar z,
                                                double t_start, double t_end, Scalar u0,
                                                Scalar w0) {
    const auto n_steps = static_cast<long long>(std::ceil((t_start - t_end) / kLogStep - 1e-9));
    const double h = -(t_start - t_end) / static_cast<double>(n_steps);

    const auto deriv = [&potential, z](double t, Scalar u, Scalar w, Scalar& du, Scalar& dw) {
        const double x = std::exp(t);
        du = w;
        dw = w + std::exp(2.0 * t) * (Scalar(potential(x)) - z) * u;
    };

    std::vector<LogSample<Scalar>> out;
    out.reserve(static_cast<std::size_t>(n_steps) + 1);

    Scalar u = u0;
    Scalar w = w0;
    double t = t_start;
    out.push_back({std::exp(t), u, w});

    Scalar k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
    for (long long i = 0; i < n_steps; ++i) {
        deriv(t, u, w, k1u, k1w);
        deriv(t + 0.5 * h, u + 0.5 * h * k1u, w + 0.5 * h * k1w, k2u, k2w);
        deriv(t + 0.5 * h, u + 0.5 * h * k2u, w + 0.5 * h * k2w, k3u, k3w);
        deriv(t + h, u + h * k3u, w + h * k3w, k4u, k4w);
        u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += (h / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        t = t_start + static_cast<double>(i + 1) * h;
        if (t > 0.0 && std::abs(u) > 1e150) {
            const double scale = 1.0 / std::abs(u);
            u *= scale;
            w *= scale;
        }
        out.push_back({std::exp(t), u, w});
    }
    return out;
}

template <typename Scalar>
void split_samples(const std::vector<LogSample<Scalar>>& samples, std::vector<double>& xs,
                   std::vector<double>& mags) {
    xs.resize(samples.size());
    mags.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        xs[i] = samples[i].x;
        mags[i] = std::abs(samples[i].u);
    }
}

// Envelope fit for the oscillatory regime: one (argmax, max|u|) point per
// decade of [1e-6, 1e-1]; the peaks trace the x^{1/2} envelope.
PowerFit envelope_fit(const std::vector<double>& xs, const std::vector<double>& mags) {
    std::vector<double> px, py;
    for (int dec = -6; dec < -1; ++dec) {
        const double lo = std::pow(10.0, dec);
        const double hi = std::pow(10.0, dec + 1);
        double best = 0.0;
        double best_x = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] < lo || xs[i] >= hi) continue;
            if (mags[i] > best) {
                best = mags[i];
                best_x = xs[i];
            }
        }
        if (best > 0.0) {
            px.push_back(best_x);
            py.push_back(best);
        }
    }
    return fit_power_law(px, py);
}

// Decides square-integrability of one solution near 0 from its fitted decay
// exponent.  Both indicial roots are complex -- the oscillatory regime --
// exactly when the sampled inverse-square weight x^2 V(x) sits below -1/4
// near the origin; the phase can then advance by less than a radian per
// decade, so raw |u| data cannot be fitted.  Instead the solution is
// demodulated: with u = x^{1/2} A cos(omega log x + phi) and w = x u', the
// quadrature modulus sqrt(u^2 + ((w - u/2)/omega)^2) equals x^{1/2} A
// exactly, whatever the phase velocity.
bool integrable_from_fit(const std::vector<LogSample<double>>& samples,
                         const Potential1D& potential) {
    std::vector<double> xs, mags;
    split_samples(samples, xs, mags);

    const double k_est = 1e-10 * potential(1e-5); // x^2 V(x) at x = 1e-5
    const double radicand = -(k_est + 0.25);

    PowerFit fit;
    if (radicand > 0.0) {
        const double omega = std::sqrt(radicand);
        std::vector<double> env(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            env[i] = std::hypot(samples[i].u, (samples[i].w - 0.5 * samples[i].u) / omega);
        }
        fit = fit_power_law_window(xs, env, 1e-5, 1e-4);
    } else {
        fit = fit_power_law_window(xs, mags, 1e-5, 1e-4);
    }
    if (fit.residual > kFitResidualLimit) {
        throw InconclusiveError("exponent fit residual exceeds 0.1; classification withheld");
    }
    return fit.exponent > kIntegrableExponent;
}

} // namespace

// ---------------------------------------------------------------------------
// Endpoint classification
// ---------------------------------------------------------------------------

std::string to_string(Endpoint e) {
    switch (e) {
        case Endpoint::LimitPoint: return "LimitPoint";
        case Endpoint::LimitCircle: return "LimitCircle";
        case Endpoint::BoundaryUndecidable: return "BoundaryUndecidable";
    }
    throw ParameterError("unknown endpoint classification");
}

Endpoint classify_zero_analytic(const Potential1D& potential) {
    // The inverse-square threshold is sharp and inclusive: k >= 3/4 is
    // limit-point, anything below is limit-circle.
    return potential.k() >= kLimitPointThreshold ? Endpoint::LimitPoint : Endpoint::LimitCircle;
}

Endpoint classify_zero_numeric(const Potential1D& potential) {
    if (std::abs(potential.k() - kLimitPointThreshold) <= kBoundaryBand) {
        return Endpoint::BoundaryUndecidable;
    }

    const double t_end = std::log(kXMin);
    int integrable = 0;
    // Two independent solutions: u(1)=1, u'(1)=0 and u(1)=0, u'(1)=1.
    // In t = log x the derivative state is w = x u'(x), so w(0) = u'(1).
    const double init[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
    for (const auto& ic : init) {
        const auto samples = integrate_inward<double>(potential, 0.0, 0.0, t_end, ic[0], ic[1]);
        if (integrable_from_fit(samples, potential)) ++integrable;
    }
    return integrable == 2 ? Endpoint::LimitCircle : Endpoint::LimitPoint;
}

Endpoint classify_infinity_analytic(const Potential1D& potential) {
    if (potential.has_regular_part() && potential.far_field() == FarField::Undeclared) {
        throw UnsupportedError("potential outside the supported catalog at infinity");
    }
    // Every catalog far field (decaying, bounded above, polynomially
    // confining) is limit-point at infinity.
    return Endpoint::LimitPoint;
}

std::pair<int, int> deficiency_indices(const Potential1D& potential) {
    const Endpoint at_zero = classify_zero_analytic(potential);
    const Endpoint at_inf = classify_infinity_analytic(potential);
    if (at_zero == Endpoint::BoundaryUndecidable) {
        throw InconclusiveError("endpoint classification undecidable; no deficiency indices");
    }
    const int n = (at_zero == Endpoint::LimitCircle ? 1 : 0) +
                  (at_inf == Endpoint::LimitCircle ? 1 : 0);
    return {n, n};
}

int count_l2_solutions_at_zero(const Potential1D& potential, std::complex<double> z) {
    if (z.imag() == 0.0) {
        throw ParameterError("cross-check solver needs non-real spectral parameter");
    }
    const double x_start = 20.0;
    // WKB-decaying initial data at the far end; integrating inward keeps the
    // decaying-at-infinity solution dominant.
    const std::complex<double> mu = std::sqrt(std::complex<double>(potential(x_start)) - z);
    const std::complex<double> u0 = 1.0;
    const std::complex<double> w0 = -x_start * mu;

    const auto samples = integrate_inward<std::complex<double>>(
        potential, z, std::log(x_start), std::log(kXMin), u0, w0);
    std::vector<double> xs, mags;
    split_samples(samples, xs, mags);

    PowerFit fit = fit_power_law_window(xs, mags, 1e-5, 1e-4);
    if (fit.residual > kFitResidualLimit) fit = envelope_fit(xs, mags);
    if (fit.residual > kFitResidualLimit) {
        throw InconclusiveError("exponent fit residual exceeds 0.1; count withheld");
    }
    return fit.exponent > kIntegrableExponent ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Frobenius asymptotics
// ---------------------------------------------------------------------------

std::pair<double, double> indicial_roots(double g2) {
    const double disc = 4.0 * g2 + 1.0;
    if (disc < 0.0) {
        throw DomainError("indicial roots are complex for 4*g2 + 1 < 0");
    }
    const double s = std::sqrt(disc);
    return {0.5 + 0.5 * s, 0.5 - 0.5 * s};
}

namespace {

FrobeniusPair make_pair_unchecked(double g1, double g2) {
    FrobeniusPair fp;
    fp.g1 = g1;
    fp.g2 = g2;
    const auto [ap, am] = indicial_roots(g2);
    fp.alpha_plus = ap;
    fp.alpha_minus = am;
    if (g2 == 0.0) {
        fp.log_case = true; // psi+ = x, psi- = 1 + g1 x log x
    } else if (g2 == -0.25) {
        fp.log_case = true; // double root 1/2; psi- carries the log
        fp.a_plus = g1;     // psi+ = x^{1/2} + g1 x^{3/2}
    } else {
        fp.a_plus = g1 / (2.0 * ap);
        fp.a_minus = g1 / (2.0 * am);
    }
    return fp;
}

} // namespace

FrobeniusPair frobenius_solutions(double g1, double g2) {
    if (g2 < -0.25 || g2 >= 0.75) {
        throw DomainError("frobenius_solutions requires g2 in [-1/4, 3/4)");
    }
    return make_pair_unchecked(g1, g2);
}

FrobeniusPair asymptotic_pair(double g1, double g2) {
    if (4.0 * g2 + 1.0 < 0.0) {
        throw DomainError("asymptotic pair needs real indicial roots");
    }
    return make_pair_unchecked(g1, g2);
}

double FrobeniusPair::psi_plus(double x) const {
    if (!log_case) return std::pow(x, alpha_plus) * (1.0 + *a_plus * x);
    if (g2 == 0.0) return x;
    return std::sqrt(x) * (1.0 + g1 * x);
}

double FrobeniusPair::psi_plus_d1(double x) const {
    if (!log_case) {
        return alpha_plus * std::pow(x, alpha_plus - 1.0) +
               *a_plus * (alpha_plus + 1.0) * std::pow(x, alpha_plus);
    }
    if (g2 == 0.0) return 1.0;
    return 0.5 / std::sqrt(x) + 1.5 * g1 * std::sqrt(x);
}

double FrobeniusPair::psi_plus_d2(double x) const {
    if (!log_case) {
        return alpha_plus * (alpha_plus - 1.0) * std::pow(x, alpha_plus - 2.0) +
               *a_plus * (alpha_plus + 1.0) * alpha_plus * std::pow(x, alpha_plus - 1.0);
    }
    if (g2 == 0.0) return 0.0;
    return -0.25 * std::pow(x, -1.5) + 0.75 * g1 / std::sqrt(x);
}

double FrobeniusPair::psi_minus(double x) const {
    if (!log_case) return std::pow(x, alpha_minus) * (1.0 + *a_minus * x);
    if (g2 == 0.0) return 1.0 + g1 * x * std::log(x);
    const double r = std::sqrt(x);
    return (r + g1 * x * r) * std::log(x) + 2.0 * r;
}

double FrobeniusPair::psi_minus_d1(double x) const {
    if (!log_case) {
        return alpha_minus * std::pow(x, alpha_minus - 1.0) +
               *a_minus * (alpha_minus + 1.0) * std::pow(x, alpha_minus);
    }
    if (g2 == 0.0) return g1 * (std::log(x) + 1.0);
    const double r = std::sqrt(x);
    return (0.5 / r + 1.5 * g1 * r) * std::log(x) + 2.0 / r + g1 * r;
}

double FrobeniusPair::psi_minus_d2(double x) const {
    if (!log_case) {
        return alpha_minus * (alpha_minus - 1.0) * std::pow(x, alpha_minus - 2.0) +
               *a_minus * (alpha_minus + 1.0) * alpha_minus * std::pow(x, alpha_minus - 1.0);
    }
    if (g2 == 0.0) return g1 / x;
    const double r = std::sqrt(x);
    return (-0.25 / (x * r) + 0.75 * g1 / r) * std::log(x) - 0.5 / (x * r) + 2.0 * g1 / r;
}

double FrobeniusPair::residual_plus(double x) const {
    if (!log_case) return *a_plus * g1 * std::pow(x, alpha_plus);
    if (g2 == 0.0) return g1;
    return g1 * g1 * std::sqrt(x);
}

double FrobeniusPair::residual_minus(double x) const {
    if (!log_case) return *a_minus * g1 * std::pow(x, alpha_minus);
    if (g2 == 0.0) return g1 * g1 * std::log(x);
    return g1 * g1 * std::sqrt(x) * std::log(x);
}

// ---------------------------------------------------------------------------
// Hardy inequality check
// ---------------------------------------------------------------------------

namespace {

// Centered differences in the interior, one-sided at the ends; exact for
// linear data on non-uniform grids.
std::vector<double> difference_quotient(std::span<const double> x, std::span<const double> u) {
    const std::size_t n = x.size();
    std::vector<double> du(n);
    du[0] = (u[1] - u[0]) / (x[1] - x[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        du[i] = (u[i + 1] - u[i - 1]) / (x[i + 1] - x[i - 1]);
    }
    du[n - 1] = (u[n - 1] - u[n - 2]) / (x[n - 1] - x[n - 2]);
    return du;
}

HardyResult hardy_integrals(std::span<const double> x, std::span<const double> u) {
    const std::size_t n = x.size();
    std::vector<double> weighted(n), grad_sq(n);
    const std::vector<double> du = difference_quotient(x, u);
    for (std::size_t i = 0; i < n; ++i) {
        weighted[i] = u[i] * u[i] / (x[i] * x[i]);
        grad_sq[i] = du[i] * du[i];
    }
    return {trapezoid(x, weighted), trapezoid(x, grad_sq)};
}

} // namespace

HardyResult hardy_check(std::span<const double> x, std::span<const double> u) {
    const std::size_t n = x.size();
    if (n != u.size()) throw ParameterError("x and u must have equal length");
    if (n < 5) throw ParameterError("hardy_check needs at least 5 samples");
    if (!(x[0] > 0.0)) throw DomainError("samples must lie in (0, infinity)");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) throw ParameterError("sample abscissae must increase strictly");
    }

    const bool all_zero = std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; });
    if (all_zero) return {0.0, 0.0};

    // The inequality needs compact support away from 0; a nonzero boundary
    // sample means the support cannot be verified to stay inside the window.
    if (u.front() != 0.0 || u.back() != 0.0) {
        throw DomainError("support must vanish at the sample boundary (and stay away from 0)");
    }

    const HardyResult fine = hardy_integrals(x, u);

    // Refinement check: coarsen by dropping every other interior sample and
    // demand both integrals move by < 1%.
    std::vector<double> xc, uc;
    for (std::size_t i = 0; i < n; i += 2) {
        xc.push_back(x[i]);
        uc.push_back(u[i]);
    }
    if (n % 2 == 0) {
        xc.push_back(x[n - 1]);
        uc.push_back(u[n - 1]);
    }
    const HardyResult coarse = hardy_integrals(xc, uc);
    const auto moved = [](double f, double c) {
        return std::abs(f - c) > 0.01 * std::max(std::abs(f), 1e-300);
    };
    if (moved(fine.lhs, coarse.lhs) || moved(fine.rhs, coarse.rhs)) {
        throw InconclusiveError("grid too coarse: trapezoid refinement error exceeds 1%");
    }
    return fine;
}

} // namespace grushinlab
