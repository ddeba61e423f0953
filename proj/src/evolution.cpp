#include "grushinlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <utility>

#include "grushinlab/errors.hpp"
#include "grushinlab/numerics.hpp"

namespace grushinlab {

std::vector<double> evolution_grid(double x_max, int points_per_decade, double x_min) {
    if (!(x_min > 0.0) || !(x_max > x_min))
        throw ParameterError("evolution grid needs 0 < x_min < x_max");
    return log_grid(x_min, x_max, points_per_decade);
}

std::pair<double, double> boundary_coefficients(const FrobeniusPair& pair, double x0, double x1,
                                                double u0, double u1) {
    const double a = pair.psi_plus(x0), b = pair.psi_minus(x0);
    const double c = pair.psi_plus(x1), d = pair.psi_minus(x1);
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-300)
        throw DomainError("asymptotic branches are degenerate at the sample nodes");
    return {(u0 * d - b * u1) / det, (a * u1 - u0 * c) / det};
}

ModeOperator1D discretize_mode_operator(const Potential1D& potential, const BoundaryCondition& bc,
                                        double x_max, int points_per_decade, double x_min) {
    ModeOperator1D op;
    op.bc = bc;
    op.x = evolution_grid(x_max, points_per_decade, x_min);
    const std::size_t n = op.x.size();
    if (n < 4) throw ParameterError("evolution grid has too few nodes");

    if (bc.kind == BcKind::FarWall) {
        op.first_unknown = 1;
        op.robin_kappa = 0.0;
    } else {
        if (potential.k() < -0.25)
            throw DomainError(
                "asymptotic-matching boundary conditions need real indicial exponents (k >= -1/4)");
        const FrobeniusPair pair = asymptotic_pair(potential.g1(), potential.k());
        // psi_minus is not square-integrable at 0 once k >= 3/4 (limit point),
        // so the admissible boundary profile is the decaying branch alone.
        const double theta =
            bc.kind == BcKind::ExtensionMix && potential.k() < 0.75 ? bc.theta : 0.0;
        const double x0 = op.x.front();
        const double value = pair.psi_plus(x0) + theta * pair.psi_minus(x0);
        const double slope = pair.psi_plus_d1(x0) + theta * pair.psi_minus_d1(x0);
        if (!std::isfinite(value) || std::abs(value) < 1e-300)
            throw ParameterError("boundary profile vanishes at the truncation; adjust theta");
        op.first_unknown = 0;
        op.robin_kappa = slope / value;
    }

    std::vector<double> lumped(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double hl = i > 0 ? op.x[i] - op.x[i - 1] : 0.0;
        const double hr = i + 1 < n ? op.x[i + 1] - op.x[i] : 0.0;
        lumped[i] = 0.5 * (hl + hr);
        v[i] = potential(op.x[i]);
        if (!std::isfinite(v[i])) throw DomainError("potential is not finite on the evolution grid");
    }

    // Unknowns: nodes first_unknown .. n-2 (far wall is always Dirichlet).
    const std::size_t m = n - 1 - op.first_unknown;
    op.mass.assign(m, 0.0);
    op.k_lower.assign(m, 0.0);
    op.k_diag.assign(m, 0.0);
    op.k_upper.assign(m, 0.0);

    auto h = [&](std::size_t i) { return op.x[i + 1] - op.x[i]; };
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + op.first_unknown;
        op.mass[r] = lumped[i];
        op.k_diag[r] = (i > 0 ? 1.0 / h(i - 1) : 0.0) + 1.0 / h(i) + v[i] * lumped[i];
        if (r > 0) {
            op.k_lower[r] = -1.0 / h(i - 1);
            op.k_upper[r - 1] = -1.0 / h(i - 1);
        }
    }
    if (op.first_unknown == 0) op.k_diag[0] += op.robin_kappa;
    return op;
}

namespace {

// Shared driver for both schemes. Scalar is double (heat, backward Euler) or
// complex (Schroedinger, Crank-Nicolson).
template <typename Scalar>
EvolutionRun run_evolution(const ModeOperator1D& op, std::span<const Scalar> u0, double dt,
                           double t_final, int snapshot_stride, bool heat) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
    if (!std::isfinite(t_final)) throw ParameterError("final time must be finite");
    if (dt > t_final) throw ParameterError("dt exceeds the final time");
    if (snapshot_stride < 1) throw ParameterError("snapshot stride must be >= 1");
    if (u0.size() != op.x.size())
        throw ParameterError("initial data must be sampled on the operator's node set");

    const std::size_t m = op.unknowns();
    std::vector<Scalar> u(m);
    for (std::size_t r = 0; r < m; ++r) u[r] = u0[r + op.first_unknown];

    EvolutionRun run;
    run.heat = heat;
    run.x = op.x;

    auto m_norm = [&](const std::vector<Scalar>& w) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += op.mass[r] * std::norm(std::complex<double>(w[r]));
        return std::sqrt(s);
    };
    const double norm0 = m_norm(u);

    auto record = [&](double t) {
        std::vector<std::complex<double>> full(op.x.size(), 0.0);
        for (std::size_t r = 0; r < m; ++r) full[r + op.first_unknown] = u[r];

        std::vector<double> absu(full.size()), abs2(full.size());
        for (std::size_t i = 0; i < full.size(); ++i) {
            absu[i] = std::abs(full[i]);
            abs2[i] = absu[i] * absu[i];
        }
        const std::complex<double> du = (full[2] - full[0]) / (op.x[2] - op.x[0]);
        run.flux_at_zero.push_back(-std::real(std::conj(full[1]) * du));
        run.mass.push_back(heat ? trapezoid(run.x, absu) : trapezoid(run.x, abs2));
        if (run.times.empty()) run.u0_l2_sq = trapezoid(run.x, abs2);
        run.times.push_back(t);
        run.fields.push_back(std::move(full));
    };
    record(0.0);

    // Time stepping: full steps of dt, one trailing short step to land on T.
    const auto n_full = static_cast<long long>(std::floor(t_final / dt + 1e-12));
    const double tail = t_final - static_cast<double>(n_full) * dt;
    const long long n_steps = n_full + (tail > 1e-12 * t_final ? 1 : 0);

    std::vector<Scalar> lo(m), di(m), up(m);
    for (long long step = 0; step < n_steps; ++step) {
        const double h = step < n_full ? dt : tail;
        if constexpr (std::is_same_v<Scalar, double>) {
            // (M + h K) u_new = M u_old
            for (std::size_t r = 0; r < m; ++r) {
                lo[r] = h * op.k_lower[r];
                di[r] = op.mass[r] + h * op.k_diag[r];
                up[r] = h * op.k_upper[r];
                u[r] = op.mass[r] * u[r];
            }
        } else {
            // (M + i h/2 K) u_new = (M - i h/2 K) u_old
            const Scalar ih(0.0, 0.5 * h);
            std::vector<Scalar> rhs(m);
            for (std::size_t r = 0; r < m; ++r) {
                const Scalar a = ih * op.k_lower[r];
                const Scalar b = ih * op.k_diag[r];
                const Scalar c = ih * op.k_upper[r];
                rhs[r] = op.mass[r] * u[r] - b * u[r];
                if (r > 0) rhs[r] -= a * u[r - 1];
                if (r + 1 < m) rhs[r] -= c * u[r + 1];
                lo[r] = a;
                di[r] = op.mass[r] + b;
                up[r] = c;
            }
            u = std::move(rhs);
        }
        solve_tridiagonal<Scalar>(lo, di, up, u);
        run.norm_drift = std::max(run.norm_drift, std::abs(m_norm(u) - norm0));
        if ((step + 1) % snapshot_stride == 0 || step + 1 == n_steps)
            record(step < n_full ? static_cast<double>(step + 1) * dt : t_final);
    }
    return run;
}

} // namespace

EvolutionRun heat_evolve(const ModeOperator1D& op, std::span<const double> u0, double dt,
                         double t_final, int snapshot_stride) {
    return run_evolution<double>(op, u0, dt, t_final, snapshot_stride, true);
}

EvolutionRun schrodinger_evolve(const ModeOperator1D& op, std::span<const std::complex<double>> u0,
                                double dt, double t_final, int snapshot_stride) {
    return run_evolution<std::complex<double>>(op, u0, dt, t_final, snapshot_stride, false);
}

std::vector<double> ground_state(const ModeOperator1D& op, int iterations) {
    if (iterations < 1) throw ParameterError("ground state needs at least one iteration");
    const std::size_t m = op.unknowns();
    std::vector<double> z(m, 1.0);
    std::vector<double> lo(m), di(m), up(m);
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t r = 0; r < m; ++r) {
            lo[r] = op.k_lower[r];
            di[r] = op.k_diag[r];
            up[r] = op.k_upper[r];
            z[r] *= op.mass[r];
        }
        solve_tridiagonal<double>(lo, di, up, z);
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += op.mass[r] * z[r] * z[r];
        s = std::sqrt(s);
        if (!(s > 0.0) || !std::isfinite(s)) throw InconclusiveError("inverse iteration collapsed");
        for (auto& w : z) w /= s;
    }
    if (z[m / 2] < 0.0)
        for (auto& w : z) w = -w;
    std::vector<double> full(op.x.size(), 0.0);
    for (std::size_t r = 0; r < m; ++r) full[r + op.first_unknown] = z[r];
    return full;
}

std::vector<double> bump_profile(std::span<const double> x, double a, double b) {
    if (!(a < b)) throw ParameterError("bump support needs a < b");
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = (2.0 * x[i] - (a + b)) / (b - a);
        if (std::abs(w) < 1.0) out[i] = (1.0 - w * w) * (1.0 - w * w);
    }
    return out;
}

ConfinementReport confinement_report(const EvolutionRun& run) {
    if (run.times.empty()) throw ParameterError("empty evolution run");
    ConfinementReport report;
    report.u0_l2_sq = run.u0_l2_sq;
    for (double f : run.flux_at_zero) report.max_abs_flux = std::max(report.max_abs_flux, std::abs(f));
    report.confined = report.max_abs_flux <= 1e-6 * report.u0_l2_sq;
    report.leaking = report.max_abs_flux > 1e-3 * report.u0_l2_sq;

    const double x_lo = run.x.front();
    const double x_hi = std::min(10.0 * x_lo, run.x.back());
    for (const auto& field : run.fields) {
        std::vector<double> absu(field.size());
        double peak = 0.0;
        for (std::size_t i = 0; i < field.size(); ++i) {
            absu[i] = std::abs(field[i]);
            peak = std::max(peak, absu[i]);
        }
        if (peak < 1e-300) {
            report.near_zero_exponent.push_back(0.0);
            report.fit_residual.push_back(0.0);
            continue;
        }
        try {
            const PowerFit fit = fit_power_law_window(run.x, absu, x_lo, x_hi);
            report.near_zero_exponent.push_back(fit.exponent);
            report.fit_residual.push_back(fit.residual);
        } catch (const InconclusiveError&) {
            report.near_zero_exponent.push_back(std::numeric_limits<double>::quiet_NaN());
            report.fit_residual.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return report;
}

} // namespace grushinlab
