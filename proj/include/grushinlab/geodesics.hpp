#pragma once

#include <vector>

#include "grushinlab/frames.hpp"

namespace grushinlab {

// Cotangent-bundle state for the geodesic Hamiltonian
//   H(x, y, px, py) = (px^2 + f(x, y)^2 py^2) / 2.
struct GeodesicState {
    double x;
    double y;
    double px;
    double py;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<GeodesicState> states; // y reduced mod 2*pi at output
    double energy_drift = 0.0;         // max |H(t) - H(0)| over recorded steps
};

double hamiltonian(const FrameProfile& profile, const GeodesicState& s);

// Classical RK4 with fixed step dt; n = round(t_final / dt) steps.
// ParameterError when t_final / dt is not within 0.5 of a positive integer.
// y is integrated unwrapped and reduced mod 2*pi only in the output.
Trajectory integrate_geodesic(const FrameProfile& profile, const GeodesicState& initial,
                              double t_final, double dt);

// Fan of rays from (-1/2, 0) with covectors (cos theta, 2 sin theta),
// theta = 2*pi*i/n: unit-energy initial data for the standard Grushin
// cylinder since f(-1/2) = -1/2.
std::vector<Trajectory> geodesic_fan(const FrameProfile& profile, int n_rays,
                                     double t_final = 1.3, double dt = 1e-4);

} // namespace grushinlab
