#include "grushinlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <thread>

#include "grushinlab/numerics.hpp"

namespace grushinlab {

namespace {

constexpr double kEsaThreshold = 0.75;

// Discriminant of (1-4c) a^2 + (2-4c) a - 3, equal to 16((c-2)^2 - 3).
// Rounding at the double root c = 2 - sqrt(3) can push it a few ulp below
// zero; clamp that sliver so the root stays real.
double discriminant_clamped(double c) {
    const double d = 16.0 * ((c - 2.0) * (c - 2.0) - 3.0);
    if (d < 0.0 && d > -1e-9) return 0.0;
    return d;
}

Rule rule_for(double c) {
    if (std::abs(1.0 - 4.0 * c) <= 1e-14) return Rule::QuarterExactly;
    if (c < 0.25) return Rule::BelowQuarter;
    if (discriminant_clamped(c) >= 0.0) {
        return c < 2.0 ? Rule::QuarterToLeft : Rule::AboveRight;
    }
    return Rule::ComplexBand;
}

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("GRUSHINLAB_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && parsed > 0) {
            n = std::min<std::size_t>(n, static_cast<std::size_t>(parsed));
        }
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

} // namespace

// ---------------------------------------------------------------------------
// alpha-Grushin classification
// ---------------------------------------------------------------------------

double k_strength(double alpha, double c) {
    return ((1.0 - 4.0 * c) * alpha * alpha + (2.0 - 4.0 * c) * alpha) / 4.0;
}

std::string to_string(Rule r) {
    switch (r) {
        case Rule::BelowQuarter: return "BelowQuarter";
        case Rule::QuarterExactly: return "QuarterExactly";
        case Rule::QuarterToLeft: return "QuarterToLeft";
        case Rule::ComplexBand: return "ComplexBand";
        case Rule::AboveRight: return "AboveRight";
    }
    throw ParameterError("unknown classification rule");
}

std::optional<BoundaryRoots> alpha_boundaries(double c) {
    if (!(c >= 0.0)) throw ParameterError("alpha_boundaries requires c >= 0");
    if (std::abs(1.0 - 4.0 * c) <= 1e-14) {
        // k(alpha, 1/4) = alpha/4 is linear: single crossing at alpha = 3.
        return BoundaryRoots{std::numeric_limits<double>::infinity(), 3.0, true};
    }
    const double a = 1.0 - 4.0 * c;
    const double b = 2.0 - 4.0 * c;
    const double d = discriminant_clamped(c);
    if (d < 0.0) return std::nullopt;
    // Stable quadratic: avoid cancellation between -b and the radical.
    const double q = -0.5 * (b + std::copysign(std::sqrt(d), b));
    double r1, r2;
    if (q != 0.0) {
        r1 = q / a;
        r2 = -3.0 / q;
    } else {
        r1 = r2 = -b / (2.0 * a);
    }
    return BoundaryRoots{std::max(r1, r2), std::min(r1, r2), false};
}

RegionVerdict classify_alpha_grushin(double alpha, double c) {
    if (!(c >= 0.0)) throw ParameterError("classification requires c >= 0");
    RegionVerdict v;
    v.alpha = alpha;
    v.c = c;
    v.k_strength = k_strength(alpha, c);
    v.essentially_self_adjoint = v.k_strength >= kEsaThreshold;
    v.rule = rule_for(c);
    return v;
}

bool esa_by_boundaries(double alpha, double c) {
    switch (rule_for(c)) {
        case Rule::BelowQuarter: {
            // Parabola opens upward: self-adjoint outside the root interval.
            const BoundaryRoots b = *alpha_boundaries(c);
            return alpha >= b.upper || alpha <= b.lower;
        }
        case Rule::QuarterExactly:
            return alpha >= 3.0;
        case Rule::QuarterToLeft:
        case Rule::AboveRight: {
            // Parabola opens downward: self-adjoint between the roots.
            const BoundaryRoots b = *alpha_boundaries(c);
            return alpha >= b.lower && alpha <= b.upper;
        }
        case Rule::ComplexBand:
            return false;
    }
    throw ParameterError("unknown classification rule");
}

RegionGrid region_map(double alpha_lo, double alpha_hi, std::size_t n_alpha, double c_lo,
                      double c_hi, std::size_t n_c) {
    if (n_alpha < 2 || n_c < 2) throw ParameterError("region_map resolution must be at least 2x2");
    if (!(alpha_lo <= alpha_hi) || !(c_lo <= c_hi)) {
        throw ParameterError("region_map ranges must be ordered");
    }
    if (!(c_lo >= 0.0)) throw ParameterError("region_map requires c >= 0");

    RegionGrid grid;
    grid.alpha.resize(n_alpha);
    grid.c.resize(n_c);
    for (std::size_t i = 0; i < n_alpha; ++i) {
        grid.alpha[i] = alpha_lo + (static_cast<double>(i) + 0.5) * (alpha_hi - alpha_lo) /
                                       static_cast<double>(n_alpha);
    }
    for (std::size_t r = 0; r < n_c; ++r) {
        grid.c[r] =
            c_lo + (static_cast<double>(r) + 0.5) * (c_hi - c_lo) / static_cast<double>(n_c);
    }

    grid.cells.resize(n_alpha * n_c);
    const auto fill_rows = [&grid, n_alpha](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            for (std::size_t i = 0; i < n_alpha; ++i) {
                grid.cells[r * n_alpha + i] = classify_alpha_grushin(grid.alpha[i], grid.c[r]);
            }
        }
    };

    const std::size_t workers = worker_count(n_c);
    if (workers == 1) {
        fill_rows(0, n_c);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (n_c + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t r0 = std::min(n_c, w * chunk);
            const std::size_t r1 = std::min(n_c, r0 + chunk);
            if (r0 < r1) pool.emplace_back(fill_rows, r0, r1);
        }
        for (auto& t : pool) t.join();
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Transformed operator
// ---------------------------------------------------------------------------

CurvatureLaplacianSpec::CurvatureLaplacianSpec(FrameProfile profile_in, double c_in)
    : profile(std::move(profile_in)), c(c_in) {
    if (!std::isfinite(c) || c < 0.0) {
        throw ParameterError("curvature coupling c must be finite and >= 0");
    }
}

TransformedOperator::TransformedOperator(FrameProfile profile, double c)
    : profile_(std::move(profile)), c_(c), g2_(0.75 - 2.0 * c) {}

TransformedOperator transform_operator(const CurvatureLaplacianSpec& spec) {
    if (spec.profile.kind() != FrameKind::Grushin) {
        throw UnsupportedError("gauge transform requires a Grushin-kind profile");
    }
    if (!(spec.c > 0.0 && spec.c < 0.5)) {
        throw ParameterError("gauge transform requires c in (0, 1/2)");
    }
    return TransformedOperator(spec.profile, spec.c);
}

double TransformedOperator::g1_of_y(double y) const {
    return 0.5 * (1.0 - 4.0 * c_) * profile_.phi().dx(0.0, y);
}

double TransformedOperator::eta_c(double x, double y) const {
    const PhiField& phi = profile_.phi();
    const double px = phi.dx(x, y);
    const double pxx = phi.dxx(x, y);
    const double py = phi.dy(x, y);
    const double pyy = phi.dyy(x, y);
    const double e2 = std::exp(2.0 * phi.value(x, y));
    return (0.25 - c_) * px * px + (c_ - 0.5) * pxx -
           x * x * e2 * (0.75 * py * py + 0.5 * pyy);
}

Potential1D TransformedOperator::mode_potential(int m) const {
    if (profile_.phi().depends_on_y()) {
        throw UnsupportedError("Fourier modes do not decouple for y-dependent profiles");
    }
    Potential1D p(g2_, g1_of_y(0.0));
    const PhiField phi = profile_.phi();
    const double c = c_;
    const double mm = static_cast<double>(m);
    auto v_reg = [phi, c, mm](double x) {
        const double px = phi.dx(x, 0.0);
        const double px0 = phi.dx(0.0, 0.0);
        const double pxx = phi.dxx(x, 0.0);
        const double e2 = std::exp(2.0 * phi.value(x, 0.0));
        // The 1/x coefficient is split at its x = 0 value; the leftover ramp
        // is bounded (it tends to ((1-4c)/2) phi_xx(0)).
        const double ramp = 0.5 * (1.0 - 4.0 * c) * (px - px0) / x;
        const double eta = (0.25 - c) * px * px + (c - 0.5) * pxx;
        return ramp + eta + mm * mm * x * x * e2;
    };
    p.set_regular_part(std::move(v_reg),
                       m != 0 ? FarField::PolynomialGrowth : FarField::BoundedAbove);
    return p;
}

double transformed_apply_fd(const TransformedOperator& op, const Field2D<double>& v,
                            std::size_t i, std::size_t j) {
    const std::size_t nx = v.nx();
    const std::size_t ny = v.ny();
    if (i == 0 || i + 1 >= nx) throw ParameterError("x-interior node required");
    if (j >= ny || ny < 3) throw ParameterError("need at least 3 periodic y nodes");
    const double x = v.x[i];
    const double y = v.y[j];
    if (std::abs(x) < 1e-12) throw SingularityError("transformed operator is singular at x = 0");

    const double hm = x - v.x[i - 1];
    const double hp = v.x[i + 1] - x;
    const double uxx = 2.0 *
                       (v.at(i - 1, j) * hp - v.at(i, j) * (hp + hm) + v.at(i + 1, j) * hm) /
                       (hm * hp * (hm + hp));
    const std::size_t jm = (j + ny - 1) % ny;
    const std::size_t jp = (j + 1) % ny;
    const double hy = v.y[1] - v.y[0];
    const double uy = (v.at(i, jp) - v.at(i, jm)) / (2.0 * hy);
    const double uyy = (v.at(i, jp) - 2.0 * v.at(i, j) + v.at(i, jm)) / (hy * hy);

    const PhiField& phi = op.profile().phi();
    const double px = phi.dx(x, y);
    const double py = phi.dy(x, y);
    const double e2 = std::exp(2.0 * phi.value(x, y));
    const double pot =
        op.g2() / (x * x) + 0.5 * (1.0 - 4.0 * op.c()) * px / x + op.eta_c(x, y);
    return -uxx - x * x * e2 * uyy - 2.0 * x * x * e2 * py * uy + pot * v.at(i, j);
}

double conjugated_apply_fd(const FrameProfile& profile, double c, const Field2D<double>& psi,
                           std::size_t i, std::size_t j) {
    const double x = psi.x[i];
    const double y = psi.y[j];
    const double lap = laplacian_apply_at(profile, psi, i, j);
    const double curv = profile.gauss_curvature(x, y);
    const double f = profile.value(x, y);
    return (-lap + c * curv * psi.at(i, j)) / std::sqrt(std::abs(f));
}

// ---------------------------------------------------------------------------
// Witness functions
// ---------------------------------------------------------------------------

std::string to_string(WitnessSign s) {
    return s == WitnessSign::Plus ? "plus" : "minus";
}

namespace {

constexpr double kWitnessXMin = 1e-6;
constexpr int kPointsPerDecade = 64;
constexpr int kCircleNodes = 64;

void validate_epsilon(const CurvatureLaplacianSpec& spec, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < spec.profile.x_max())) {
        throw ParameterError("epsilon must lie in (0, x_max)");
    }
    if (epsilon <= 2.0 * kWitnessXMin) {
        throw ParameterError("epsilon too small for the sampling grid");
    }
}

} // namespace

WitnessFunction build_witness(const CurvatureLaplacianSpec& spec, WitnessSign sign,
                              double epsilon, WitnessSide side) {
    const TransformedOperator op = transform_operator(spec);
    validate_epsilon(spec, epsilon);

    WitnessFunction w;
    w.sign = sign;
    w.side = side;
    w.epsilon = epsilon;
    w.c = spec.c;
    w.samples.x = log_grid(kWitnessXMin, epsilon, kPointsPerDecade);
    w.samples.y = circle_grid(kCircleNodes);
    w.radial.reserve(w.samples.y.size());
    for (const double yv : w.samples.y) {
        w.radial.push_back(frobenius_solutions(op.g1_of_y(yv), op.g2()));
    }
    w.log_case = w.radial.front().log_case;
    w.alpha_exponent =
        sign == WitnessSign::Plus ? w.radial.front().alpha_plus : w.radial.front().alpha_minus;

    const std::size_t nx = w.samples.nx();
    const std::size_t ny = w.samples.ny();
    w.samples.v.resize(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = w.samples.x[i];
        const double cut = cutoff_plateau(x, epsilon);
        for (std::size_t j = 0; j < ny; ++j) {
            const FrobeniusPair& pair = w.radial[j];
            const double psi = sign == WitnessSign::Plus ? pair.psi_plus(x) : pair.psi_minus(x);
            w.samples.at(i, j) = psi * cut;
        }
    }
    return w;
}

WitnessFunction power_probe(const CurvatureLaplacianSpec& spec, double exponent,
                            double epsilon) {
    transform_operator(spec); // same validity gate as the real pipeline
    validate_epsilon(spec, epsilon);

    WitnessFunction w;
    w.sign = WitnessSign::Plus;
    w.epsilon = epsilon;
    w.c = spec.c;
    w.alpha_exponent = exponent;
    w.probe_exponent = exponent;
    w.samples.x = log_grid(kWitnessXMin, epsilon, kPointsPerDecade);
    w.samples.y = circle_grid(kCircleNodes);
    const std::size_t nx = w.samples.nx();
    const std::size_t ny = w.samples.ny();
    w.samples.v.resize(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        const double x = w.samples.x[i];
        const double val = std::pow(x, exponent) * cutoff_plateau(x, epsilon);
        for (std::size_t j = 0; j < ny; ++j) w.samples.at(i, j) = val;
    }
    return w;
}

namespace {

// |H w|^2 integrated over (x_min, eps/2) x S^1. On the plateau the cutoff is
// identically 1, so H w reduces to the closed-form radial residual plus the
// bounded fields times w; everything is evaluated analytically, which keeps
// truncation noise out of the exponent range the test probes.
double plateau_norm_sq(const WitnessFunction& w, const TransformedOperator& op, double x_min,
                       int points_per_decade) {
    const std::vector<double> xs = log_grid(x_min, 0.5 * w.epsilon, points_per_decade);
    const std::vector<double>& ys = w.samples.y;
    const double g2 = op.g2();

    std::vector<double> integrand(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double y = ys[j];
            double psi, apsi;
            if (w.probe_exponent) {
                const double p = *w.probe_exponent;
                psi = std::pow(x, p);
                apsi = (g2 - p * (p - 1.0)) * std::pow(x, p - 2.0) +
                       op.g1_of_y(y) * std::pow(x, p - 1.0);
            } else {
                const FrobeniusPair& pair = w.radial[j];
                psi = w.sign == WitnessSign::Plus ? pair.psi_plus(x) : pair.psi_minus(x);
                apsi = w.sign == WitnessSign::Plus ? pair.residual_plus(x)
                                                   : pair.residual_minus(x);
            }
            const PhiField& phi = op.profile().phi();
            const double ramp =
                0.5 * (1.0 - 4.0 * op.c()) * (phi.dx(x, y) - phi.dx(0.0, y)) / x;
            const double hw = apsi + (ramp + op.eta_c(x, y)) * psi;
            acc += hw * hw;
        }
        integrand[i] = 2.0 * M_PI * acc / static_cast<double>(ys.size());
    }
    return trapezoid(xs, integrand);
}

} // namespace

bool adjoint_membership_test(const WitnessFunction& w, const CurvatureLaplacianSpec& spec) {
    if (std::abs(w.c - spec.c) > 1e-12) {
        throw ParameterError("witness was built for a different coupling");
    }
    const TransformedOperator op = transform_operator(spec);

    constexpr double kFloor = 1e-250;
    const double x_mins[4] = {1e-4, 1e-5, 1e-6, 1e-7};
    double values[4];
    for (int n = 0; n < 4; ++n) {
        values[n] = plateau_norm_sq(w, op, x_mins[n], kPointsPerDecade);
        if (n > 0 && values[n] >= 2.0 * values[n - 1] && values[n] > kFloor) {
            return false; // divergence under refinement
        }
    }
    if (values[3] <= kFloor) return true; // nothing singular at all

    // Density guard: the quadrature itself must be resolved before the
    // refinement ratio means anything.
    const double dense = plateau_norm_sq(w, op, x_mins[3], 2 * kPointsPerDecade);
    if (std::abs(dense / values[3] - 1.0) > 0.1) {
        throw InconclusiveError("plateau quadrature unresolved under density refinement");
    }
    return std::abs(values[3] / values[2] - 1.0) <= 0.1;
}

namespace {

PowerFit mode0_fit(const WitnessFunction& w) {
    const Field2D<double>& s = w.samples;
    const std::size_t ny = s.ny();
    std::vector<double> m0(s.nx());
    for (std::size_t i = 0; i < s.nx(); ++i) {
        const std::span<const double> row(s.v.data() + i * ny, ny);
        m0[i] = std::abs(periodic_mean(row));
    }
    return fit_power_law_window(s.x, m0, 1e-5, 1e-4);
}

} // namespace

bool closure_membership_test(const WitnessFunction& w) {
    const PowerFit fit = mode0_fit(w);
    if (fit.residual > 0.1) {
        throw InconclusiveError("mode-0 exponent fit residual exceeds 0.1");
    }
    return fit.exponent > 1.5 + 0.01;
}

double witness_alpha_fit(const WitnessFunction& w) {
    const PowerFit fit = mode0_fit(w);
    if (fit.residual > 0.1) {
        throw InconclusiveError("mode-0 exponent fit residual exceeds 0.1");
    }
    return fit.exponent;
}

// ---------------------------------------------------------------------------
// Gluing
// ---------------------------------------------------------------------------

GluedField glue_to_manifold(const WitnessFunction& w, double x_lo, double x_hi) {
    if (!(x_lo < 0.0 && x_hi > 0.0)) {
        throw ParameterError("chart must straddle the singular set");
    }
    if (!(w.epsilon < std::min(-x_lo, x_hi))) {
        throw ParameterError("cutoff must fit strictly inside the chart");
    }

    const std::vector<double>& zx = w.samples.x;
    const std::size_t zn = zx.size();
    const std::size_t ny = w.samples.ny();
    constexpr int kPad = 33;

    std::vector<double> xs;
    std::vector<std::size_t> zone_rows; // glued row index of zone row k (or reflected)
    std::vector<bool> reflected_order;

    GluedField out;
    if (w.side == WitnessSide::Plus) {
        const std::vector<double> left = uniform_grid(x_lo, 0.0, kPad);
        const std::vector<double> right = uniform_grid(w.epsilon, x_hi, kPad);
        xs = left;
        for (const double x : zx) xs.push_back(x);
        for (std::size_t i = 1; i < right.size(); ++i) xs.push_back(right[i]);
        out.field.x = xs;
        out.field.y = w.samples.y;
        out.field.v.assign(xs.size() * ny, 0.0);
        for (std::size_t k = 0; k < zn; ++k) {
            const std::size_t row = left.size() + k;
            for (std::size_t j = 0; j < ny; ++j) out.field.at(row, j) = w.samples.at(k, j);
        }
    } else {
        const std::vector<double> left = uniform_grid(x_lo, -w.epsilon, kPad);
        const std::vector<double> right = uniform_grid(0.0, x_hi, 2 * kPad);
        xs = left;
        for (std::size_t k = zn - 1; k-- > 0;) xs.push_back(-zx[k]); // skip -epsilon duplicate
        for (const double x : right) xs.push_back(x);
        out.field.x = xs;
        out.field.y = w.samples.y;
        out.field.v.assign(xs.size() * ny, 0.0);
        for (std::size_t k = 0; k + 1 < zn; ++k) {
            const std::size_t row = left.size() + (zn - 2 - k);
            for (std::size_t j = 0; j < ny; ++j) out.field.at(row, j) = w.samples.at(k, j);
        }
    }
    return out;
}

double glued_gram_smallest_eigenvalue(const GluedField& g, int n_modes) {
    if (n_modes < 1) throw ParameterError("need at least one mode");
    const Field2D<double>& f = g.field;
    const std::size_t nx = f.nx();
    const std::size_t ny = f.ny();
    if (nx < 2 || ny < 2) throw ParameterError("glued field too small");

    // Radial weights per y node: S_j = int f(., y_j)^2 dx.
    std::vector<double> s(ny, 0.0);
    std::vector<double> col(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) col[i] = f.at(i, j) * f.at(i, j);
        s[j] = trapezoid(f.x, col);
    }

    const double dy = 2.0 * M_PI / static_cast<double>(ny);
    const int n = n_modes;
    std::vector<std::complex<double>> gram(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            std::complex<double> acc = 0.0;
            for (std::size_t j = 0; j < ny; ++j) {
                const double phase = static_cast<double>(k - l) * f.y[j];
                acc += s[j] * std::complex<double>(std::cos(phase), std::sin(phase));
            }
            gram[static_cast<std::size_t>(k) * n + l] = acc * dy;
        }
    }
    return hermitian_eigenvalues(gram, n).front();
}

} // namespace grushinlab
