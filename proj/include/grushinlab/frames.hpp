#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "grushinlab/errors.hpp"

namespace grushinlab {

// ---------------------------------------------------------------------------
// Conformal exponent phi(x, y) on the cylinder R x S^1.
// Catalog profiles carry hand-coded derivatives; custom profiles fall back to
// Richardson-extrapolated central differences with base step h = 1e-5.
// ---------------------------------------------------------------------------

class PhiField {
public:
    static PhiField zero();
    static PhiField constant(double value);
    static PhiField linear(double beta);    // phi = beta * x
    static PhiField separable(double beta); // phi = beta * x * sin(y)
    static PhiField custom(std::string name, std::function<double(double, double)> f,
                           bool depends_on_y);

    const std::string& name() const { return name_; }
    double beta() const { return beta_; }
    bool depends_on_y() const { return depends_on_y_; }
    bool is_catalog() const { return !fallback_; }

    double value(double x, double y) const;
    double dx(double x, double y) const;
    double dy(double x, double y) const;
    double dxx(double x, double y) const;
    double dyy(double x, double y) const;

private:
    PhiField() = default;
    enum class Kind { Zero, Constant, Linear, Separable, Custom };
    Kind kind_ = Kind::Zero;
    std::string name_ = "zero";
    double beta_ = 0.0;
    bool depends_on_y_ = false;
    bool fallback_ = false;
    std::function<double(double, double)> f_;
};

// ---------------------------------------------------------------------------
// Orthonormal-frame profile: the second frame field is f * d/dy with
//   Riemannian:    f = exp(phi)
//   Grushin:       f = x * exp(phi),  phi(0, y) = 0 enforced
//   AlphaGrushin:  f = x^alpha
// Domain is [-x_max, x_max] x S^1.
// ---------------------------------------------------------------------------

enum class FrameKind { Riemannian, Grushin, AlphaGrushin };

struct MetricData {
    double g11;
    double g22;
    double area_weight; // density of the Riemannian area form: 1/|f|
};

class FrameProfile {
public:
    static FrameProfile riemannian(PhiField phi, double x_max = 4.0);
    static FrameProfile grushin(PhiField phi, double x_max = 4.0);
    static FrameProfile alpha_grushin(double alpha, double x_max = 4.0);

    FrameKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    const PhiField& phi() const { return phi_; }
    double x_max() const { return x_max_; }

    // f and its partials. Throws DomainError outside [-x_max, x_max] and for
    // x < 0 with non-integer alpha.
    double value(double x, double y) const;
    double value_dx(double x, double y) const;
    double value_dy(double x, double y) const;
    double value_dxx(double x, double y) const;

    // K = (f f_xx - 2 f_x^2) / f^2. Rejects points within 1e-8 of the
    // singular set.
    double gauss_curvature(double x, double y) const;

    // Independent closed form: the expanded Grushin-side expression
    // -2/x^2 - 2 phi_x/x - phi_x^2 + phi_xx, and -alpha(alpha+1)/x^2 for the
    // power family. DomainError for kinds without one.
    double gauss_curvature_expanded(double x, double y) const;

    MetricData metric(double x, double y) const;

    // ∂x f(0, y) != 0 (tolerance 1e-10) across the sampled singular set;
    // vacuously true when the singular set is empty.
    bool step2_check(std::span<const double> y_samples) const;

    // Roots of f(., y) in [a, b] by sign-change bisection, |f| tol 1e-12.
    std::vector<double> singular_set_locate(double y, double a, double b) const;

private:
    FrameProfile() = default;
    void check_domain(double x) const;
    FrameKind kind_ = FrameKind::Grushin;
    double alpha_ = 1.0;
    bool alpha_integer_ = true;
    PhiField phi_ = PhiField::zero();
    double x_max_ = 4.0;
};

// JSON configuration round trip, e.g.
//   {"kind": "grushin", "phi": {"name": "separable", "beta": 0.3}, "x_max": 4.0}
//   {"kind": "alpha_grushin", "alpha": 2.0, "x_max": 4.0}
// Unknown keys are rejected.
FrameProfile frame_profile_from_json(const std::string& json_text);
std::string frame_profile_to_json(const FrameProfile& profile);

// ---------------------------------------------------------------------------
// Sampled fields on rectangular grids (x nodes ascending; y nodes uniform on
// the circle, right endpoint omitted). Row-major: v[i * ny + j].
// ---------------------------------------------------------------------------

template <class T>
struct Field2D {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<T> v;

    std::size_t nx() const { return x.size(); }
    std::size_t ny() const { return y.size(); }
    T& at(std::size_t i, std::size_t j) { return v[i * y.size() + j]; }
    const T& at(std::size_t i, std::size_t j) const { return v[i * y.size() + j]; }
};

template <class T, class F>
Field2D<T> sample_field(std::vector<double> x, std::vector<double> y, F&& f) {
    Field2D<T> u;
    u.x = std::move(x);
    u.y = std::move(y);
    u.v.resize(u.x.size() * u.y.size());
    for (std::size_t i = 0; i < u.x.size(); ++i) {
        for (std::size_t j = 0; j < u.y.size(); ++j) {
            u.at(i, j) = f(u.x[i], u.y[j]);
        }
    }
    return u;
}

// Second-order finite-difference application of the Laplace-Beltrami operator
//   Delta u = u_xx + f^2 u_yy - (f_x / f) u_x + f f_y u_y
// at the grid node nearest to (x, y) (must match within 1e-9 and be interior
// in x). Rejects evaluation within 1e-8 of the singular set.
double laplacian_apply(const FrameProfile& profile, const Field2D<double>& u, double x, double y);

// Same stencil, addressed by node index (i interior in x, j any).
double laplacian_apply_at(const FrameProfile& profile, const Field2D<double>& u,
                          std::size_t i, std::size_t j);

} // namespace grushinlab
