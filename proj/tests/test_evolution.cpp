#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "grushinlab/errors.hpp"
#include "grushinlab/evolution.hpp"
#include "grushinlab/numerics.hpp"
#include "grushinlab/sturm1d.hpp"

using namespace grushinlab;

namespace {

using C = std::complex<double>;

// Fraction of |u|^2 sitting below x_cut.
double near_fraction(const std::vector<double>& x, const std::vector<C>& u, double x_cut) {
    std::vector<double> all(x.size()), low(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        all[i] = std::norm(u[i]);
        low[i] = x[i] < x_cut ? all[i] : 0.0;
    }
    const double total = trapezoid(x, all);
    return total > 0.0 ? trapezoid(x, low) / total : 0.0;
}

double position_expectation(const std::vector<double>& x, const std::vector<C>& u) {
    std::vector<double> den(x.size()), num(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        den[i] = std::norm(u[i]);
        num[i] = x[i] * den[i];
    }
    return trapezoid(x, num) / trapezoid(x, den);
}

} // namespace

TEST_SUITE("evolution") {

TEST_CASE("evolution grid spans the truncated interval") {
    const auto x = evolution_grid();
    CHECK(x.front() == 1e-4);
    CHECK(x.back() == 6.0);
    CHECK(std::is_sorted(x.begin(), x.end()));
}

TEST_CASE("discretized operator is symmetric under every boundary condition") {
    for (const BoundaryCondition& bc :
         {BoundaryCondition::friedrichs(), BoundaryCondition::mix(1.0),
          BoundaryCondition::far_wall()}) {
        const auto op = discretize_mode_operator(Potential1D(0.35), bc);
        REQUIRE(op.unknowns() > 2);
        for (std::size_t r = 1; r < op.unknowns(); ++r) {
            CHECK(op.k_lower[r] == op.k_upper[r - 1]); // exact: assembled once
        }
        CHECK(op.k_lower[0] == 0.0);
        CHECK(op.k_upper[op.unknowns() - 1] == 0.0);
    }
}

TEST_CASE("boundary handling: Robin coefficient follows the asymptotic profile") {
    const double x0 = 1e-4;

    const auto fried = discretize_mode_operator(Potential1D(0.0), BoundaryCondition::friedrichs());
    CHECK(fried.first_unknown == 0);
    CHECK(fried.robin_kappa == doctest::Approx(1.0 / x0).epsilon(1e-12)); // psi+ = x

    const auto mix = discretize_mode_operator(Potential1D(0.0), BoundaryCondition::mix(1.0));
    CHECK(mix.robin_kappa == doctest::Approx(1.0 / (1.0 + x0)).epsilon(1e-12)); // psi = x + 1

    const auto wall = discretize_mode_operator(Potential1D(0.0), BoundaryCondition::far_wall());
    CHECK(wall.first_unknown == 1);
    CHECK(wall.robin_kappa == 0.0);
    CHECK(wall.unknowns() == fried.unknowns() - 1);

    // Limit point at zero (k >= 3/4): the mix collapses onto the decaying branch.
    const auto mix_lp = discretize_mode_operator(Potential1D(2.0), BoundaryCondition::mix(5.0));
    const auto fried_lp = discretize_mode_operator(Potential1D(2.0), BoundaryCondition::friedrichs());
    CHECK(mix_lp.robin_kappa == fried_lp.robin_kappa);
    CHECK(mix_lp.robin_kappa == doctest::Approx(2.0 / x0).epsilon(1e-12)); // psi+ = x^2
}

TEST_CASE("parameter and domain guards") {
    CHECK_THROWS_AS(
        discretize_mode_operator(Potential1D(-2.0), BoundaryCondition::friedrichs()),
        DomainError);
    CHECK_NOTHROW(discretize_mode_operator(Potential1D(-2.0), BoundaryCondition::far_wall()));

    const auto op = discretize_mode_operator(Potential1D(0.75), BoundaryCondition::friedrichs());
    const std::vector<double> u0 = bump_profile(op.x, 0.5, 1.5);
    CHECK_THROWS_AS(heat_evolve(op, u0, 2.0, 1.0), ParameterError); // dt > T
    CHECK_THROWS_AS(heat_evolve(op, u0, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(heat_evolve(op, u0, 1e-3, 1.0, 0), ParameterError);
    const std::vector<double> short_u0(3, 0.0);
    CHECK_THROWS_AS(heat_evolve(op, short_u0, 1e-3, 1.0), ParameterError);
}

TEST_CASE("boundary coefficient extraction inverts a known combination") {
    const FrobeniusPair pair = asymptotic_pair(0.0, 0.15);
    const double x0 = 1e-4, x1 = 1.2e-4;
    const double u0 = 2.0 * pair.psi_plus(x0) + 0.3 * pair.psi_minus(x0);
    const double u1 = 2.0 * pair.psi_plus(x1) + 0.3 * pair.psi_minus(x1);
    const auto [cp, cm] = boundary_coefficients(pair, x0, x1, u0, u1);
    CHECK(cp == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(cm == doctest::Approx(0.3).epsilon(1e-8));
    CHECK_THROWS_AS(boundary_coefficients(pair, x0, x0, u0, u0), DomainError);
}

TEST_CASE("confined heat flow: monotone mass and steep near-zero profile") {
    const auto op = discretize_mode_operator(Potential1D(0.75), BoundaryCondition::friedrichs());
    const std::vector<double> u0 = bump_profile(op.x, 0.5, 1.5);
    const EvolutionRun run = heat_evolve(op, u0, 1e-4, 0.5);

    REQUIRE(run.times.size() > 2);
    CHECK(run.times.front() == 0.0);
    CHECK(run.times.back() == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t s = 1; s < run.times.size(); ++s) {
        CHECK(run.times[s] > run.times[s - 1]);
        CHECK(run.mass[s] <= run.mass[s - 1] + 1e-12);
    }
    CHECK(run.mass.back() < run.mass.front());

    const ConfinementReport report = confinement_report(run);
    CHECK(report.near_zero_exponent.back() >= 1.45); // decay at least x^{3/2 - 0.05}
    CHECK(report.near_zero_exponent.back() == doctest::Approx(1.5).epsilon(0.01));
    CHECK(report.confined);
    CHECK_FALSE(report.leaking);

    // Heat runs stay real.
    for (const auto& field : run.fields) {
        for (const C& v : field) CHECK(v.imag() == 0.0);
    }
}

TEST_CASE("heat maximum principle under the decaying boundary branch") {
    const auto op = discretize_mode_operator(Potential1D(0.0), BoundaryCondition::friedrichs());
    const std::vector<double> u0 = bump_profile(op.x, 0.5, 1.5);
    const double peak = *std::max_element(u0.begin(), u0.end());
    const EvolutionRun run = heat_evolve(op, u0, 1e-3, 1.0);
    for (const auto& field : run.fields) {
        for (const C& v : field) CHECK(v.real() >= -1e-12 * peak);
    }
    // The Friedrichs-like branch for k = 0 is psi+ = x: the final profile
    // follows it linearly at the boundary.
    const auto& fin = run.fields.back();
    const double r0 = fin[0].real() / run.x[0];
    const double r1 = fin[1].real() / run.x[1];
    CHECK(r0 == doctest::Approx(r1).epsilon(0.01));
    const ConfinementReport report = confinement_report(run);
    CHECK(report.near_zero_exponent.back() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("free heat flow with a mixed extension reaches the boundary") {
    const auto op = discretize_mode_operator(Potential1D(0.0), BoundaryCondition::mix(1.0));
    const std::vector<double> u0 = bump_profile(op.x, 0.5, 1.5);
    const EvolutionRun run = heat_evolve(op, u0, 1e-3, 2.0);
    CHECK(run.fields.back()[0].real() > 0.01); // nonzero limit value at x_min
    const ConfinementReport report = confinement_report(run);
    CHECK(report.near_zero_exponent.back() == doctest::Approx(0.0).epsilon(0.05));
}

TEST_CASE("confinement dichotomy over the boundary-condition matrix") {
    struct Case {
        double k;
        BoundaryCondition bc;
        bool confined;
    };
    const std::vector<Case> cases{
        {0.0, BoundaryCondition::friedrichs(), true},
        {0.0, BoundaryCondition::mix(1.0), false},
        {0.35, BoundaryCondition::friedrichs(), true},
        {0.35, BoundaryCondition::mix(1.0), false},
        {0.75, BoundaryCondition::friedrichs(), true},
        {0.75, BoundaryCondition::mix(1.0), true}, // limit point: extension unique
        {2.0, BoundaryCondition::friedrichs(), true},
        {2.0, BoundaryCondition::mix(1.0), true},
    };
    for (const Case& cs : cases) {
        CAPTURE(cs.k);
        CAPTURE(static_cast<int>(cs.bc.kind));
        const auto op = discretize_mode_operator(Potential1D(cs.k), cs.bc);
        const std::vector<double> u0 = bump_profile(op.x, 2.75, 3.75);
        const EvolutionRun run = heat_evolve(op, u0, 1e-3, 4.0);
        const ConfinementReport report = confinement_report(run);
        CHECK(report.confined == cs.confined);
        CHECK(report.leaking == !cs.confined);
    }
}

TEST_CASE("crank-nicolson conserves the norm under every boundary condition") {
    for (const BoundaryCondition& bc :
         {BoundaryCondition::friedrichs(), BoundaryCondition::mix(1.0),
          BoundaryCondition::far_wall()}) {
        const auto op = discretize_mode_operator(Potential1D(0.35), bc);
        std::vector<C> u0(op.x.size());
        for (std::size_t i = 0; i < op.x.size(); ++i) {
            const double g = std::exp(-(op.x[i] - 2.0) * (op.x[i] - 2.0) / 0.18);
            u0[i] = g * std::exp(C(0.0, -2.0 * op.x[i]));
        }
        const EvolutionRun run = schrodinger_evolve(op, u0, 1e-3, 1.0); // 10^3 steps
        CHECK(run.norm_drift <= 1e-8);
        for (std::size_t s = 1; s < run.mass.size(); ++s) {
            CHECK(run.mass[s] == doctest::Approx(run.mass[0]).epsilon(1e-6));
        }
    }
}

TEST_CASE("wave packet reflects off the confining singularity") {
    const auto op = discretize_mode_operator(Potential1D(0.75), BoundaryCondition::friedrichs());
    std::vector<C> u0(op.x.size());
    for (std::size_t i = 0; i < op.x.size(); ++i) {
        const double g = std::exp(-(op.x[i] - 2.0) * (op.x[i] - 2.0) / (2.0 * 0.09));
        u0[i] = g * std::exp(C(0.0, -2.0 * op.x[i]));
    }
    const EvolutionRun run = schrodinger_evolve(op, u0, 5e-4, 1.2, 60);
    CHECK(run.norm_drift <= 1e-8);

    double max_near = 0.0;
    double min_pos = 1e300;
    for (const auto& field : run.fields) {
        max_near = std::max(max_near, near_fraction(run.x, field, 0.05));
        min_pos = std::min(min_pos, position_expectation(run.x, field));
    }
    CHECK(max_near < 0.01); // probability never accumulates at the singular end
    CHECK(position_expectation(run.x, run.fields.front()) == doctest::Approx(2.0).epsilon(0.01));
    CHECK(min_pos < 1.7); // the packet did travel toward the wall
    CHECK(position_expectation(run.x, run.fields.back()) > 2.0); // and came back
}

TEST_CASE("discrete eigenvector is stationary under crank-nicolson") {
    const auto op = discretize_mode_operator(Potential1D(0.75), BoundaryCondition::far_wall());
    const std::vector<double> gs = ground_state(op);
    std::vector<C> u0(gs.begin(), gs.end());
    const EvolutionRun run = schrodinger_evolve(op, u0, 1e-3, 0.5);
    double peak = 0.0;
    for (const double v : gs) peak = std::max(peak, std::abs(v));
    REQUIRE(peak > 0.0);
    const auto& fin = run.fields.back();
    for (std::size_t i = 0; i < fin.size(); ++i) {
        CHECK(std::abs(std::abs(fin[i]) - std::abs(gs[i])) <= 1e-6 * peak);
    }
}

TEST_CASE("zero initial data yields zero diagnostics") {
    const auto op = discretize_mode_operator(Potential1D(0.35), BoundaryCondition::friedrichs());
    const std::vector<double> u0(op.x.size(), 0.0);
    const EvolutionRun run = heat_evolve(op, u0, 1e-2, 0.1);
    const ConfinementReport report = confinement_report(run);
    CHECK(report.max_abs_flux == 0.0);
    CHECK(report.u0_l2_sq == 0.0);
    for (double m : run.mass) CHECK(m == 0.0);
    for (double e : report.near_zero_exponent) CHECK(e == 0.0);
}

} // TEST_SUITE("evolution")
