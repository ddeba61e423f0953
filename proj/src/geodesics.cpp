#include "grushinlab/geodesics.hpp"

#include <cmath>
#include <numbers>

namespace grushinlab {

namespace {

struct Rhs {
    double dx, dy, dpx, dpy;
};

// Hamilton's equations for H = (px^2 + f^2 py^2)/2:
//   x' = px,  y' = f^2 py,  px' = -f f_x py^2,  py' = -f f_y py^2.
Rhs rhs(const FrameProfile& p, const GeodesicState& s) {
    const double f = p.value(s.x, s.y);
    const double fx = p.value_dx(s.x, s.y);
    const double fy = p.value_dy(s.x, s.y);
    return Rhs{s.px, f * f * s.py, -f * fx * s.py * s.py, -f * fy * s.py * s.py};
}

GeodesicState advance(const GeodesicState& s, const Rhs& k, double h) {
    return GeodesicState{s.x + h * k.dx, s.y + h * k.dy, s.px + h * k.dpx, s.py + h * k.dpy};
}

GeodesicState rk4_step(const FrameProfile& p, const GeodesicState& s, double h) {
    const Rhs k1 = rhs(p, s);
    const Rhs k2 = rhs(p, advance(s, k1, 0.5 * h));
    const Rhs k3 = rhs(p, advance(s, k2, 0.5 * h));
    const Rhs k4 = rhs(p, advance(s, k3, h));
    return GeodesicState{
        s.x + h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
        s.y + h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
        s.px + h / 6.0 * (k1.dpx + 2.0 * k2.dpx + 2.0 * k3.dpx + k4.dpx),
        s.py + h / 6.0 * (k1.dpy + 2.0 * k2.dpy + 2.0 * k3.dpy + k4.dpy),
    };
}

double wrap_angle(double y) {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(y, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

} // namespace

double hamiltonian(const FrameProfile& profile, const GeodesicState& s) {
    const double f = profile.value(s.x, s.y);
    return 0.5 * (s.px * s.px + f * f * s.py * s.py);
}

Trajectory integrate_geodesic(const FrameProfile& profile, const GeodesicState& initial,
                              double t_final, double dt) {
    if (!(dt > 0.0) || !(t_final > 0.0)) {
        throw ParameterError("integrate_geodesic: dt and t_final must be positive");
    }
    const double ratio = t_final / dt;
    const long long n = std::llround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 0.5) {
        throw ParameterError("integrate_geodesic: t_final/dt is not within 0.5 of a step count");
    }

    Trajectory traj;
    traj.t.reserve(static_cast<std::size_t>(n) + 1);
    traj.states.reserve(static_cast<std::size_t>(n) + 1);

    GeodesicState s = initial; // y kept unwrapped here
    const double h0 = hamiltonian(profile, s);
    double drift = 0.0;

    auto record = [&](double t, const GeodesicState& st) {
        traj.t.push_back(t);
        traj.states.push_back(GeodesicState{st.x, wrap_angle(st.y), st.px, st.py});
    };
    record(0.0, s);

    for (long long i = 1; i <= n; ++i) {
        s = rk4_step(profile, s, dt);
        drift = std::max(drift, std::abs(hamiltonian(profile, s) - h0));
        record(static_cast<double>(i) * dt, s);
    }
    traj.energy_drift = drift;
    return traj;
}

std::vector<Trajectory> geodesic_fan(const FrameProfile& profile, int n_rays,
                                     double t_final, double dt) {
    if (n_rays < 1) {
        throw ParameterError("geodesic_fan: n_rays must be >= 1");
    }
    std::vector<Trajectory> fan;
    fan.reserve(static_cast<std::size_t>(n_rays));
    for (int i = 0; i < n_rays; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / n_rays;
        const GeodesicState s0{-0.5, 0.0, std::cos(theta), 2.0 * std::sin(theta)};
        fan.push_back(integrate_geodesic(profile, s0, t_final, dt));
    }
    return fan;
}

} // namespace grushinlab
