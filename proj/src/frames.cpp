#include "grushinlab/frames.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "grushinlab/numerics.hpp"

namespace grushinlab {

namespace {

constexpr double kSingularTol = 1e-8;  // rejection radius around Z
constexpr double kStep2Tol = 1e-10;
constexpr double kBisectTol = 1e-12;
constexpr double kFdStep = 1e-5;       // fallback differentiation base step

bool is_integer(double a) {
    return std::abs(a - std::round(a)) < 1e-12;
}

// Richardson-extrapolated central first derivative.
double fd1(const std::function<double(double)>& f, double t) {
    const double h = kFdStep;
    const double d_h = (f(t + h) - f(t - h)) / (2.0 * h);
    const double d_h2 = (f(t + 0.5 * h) - f(t - 0.5 * h)) / h;
    return (4.0 * d_h2 - d_h) / 3.0;
}

// Richardson-extrapolated central second derivative.
double fd2(const std::function<double(double)>& f, double t) {
    const double h = kFdStep;
    const double c = f(t);
    const double d_h = (f(t + h) - 2.0 * c + f(t - h)) / (h * h);
    const double d_h2 = (f(t + 0.5 * h) - 2.0 * c + f(t - 0.5 * h)) / (0.25 * h * h);
    return (4.0 * d_h2 - d_h) / 3.0;
}

} // namespace

// ---------------------------------------------------------------------------
// PhiField
// ---------------------------------------------------------------------------

PhiField PhiField::zero() {
    PhiField p;
    p.kind_ = Kind::Zero;
    p.name_ = "zero";
    return p;
}

PhiField PhiField::constant(double value) {
    PhiField p;
    p.kind_ = Kind::Constant;
    p.name_ = "constant";
    p.beta_ = value;
    return p;
}

PhiField PhiField::linear(double beta) {
    PhiField p;
    p.kind_ = Kind::Linear;
    p.name_ = "linear";
    p.beta_ = beta;
    return p;
}

PhiField PhiField::separable(double beta) {
    PhiField p;
    p.kind_ = Kind::Separable;
    p.name_ = "separable";
    p.beta_ = beta;
    p.depends_on_y_ = true;
    return p;
}

PhiField PhiField::custom(std::string name, std::function<double(double, double)> f,
                          bool depends_on_y) {
    if (!f) {
        throw DomainError("PhiField::custom: null function");
    }
    PhiField p;
    p.kind_ = Kind::Custom;
    p.name_ = std::move(name);
    p.depends_on_y_ = depends_on_y;
    p.fallback_ = true;
    p.f_ = std::move(f);
    return p;
}

double PhiField::value(double x, double y) const {
    switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Constant: return beta_;
        case Kind::Linear: return beta_ * x;
        case Kind::Separable: return beta_ * x * std::sin(y);
        case Kind::Custom: return f_(x, y);
    }
    return 0.0;
}

double PhiField::dx(double x, double y) const {
    switch (kind_) {
        case Kind::Zero:
        case Kind::Constant: return 0.0;
        case Kind::Linear: return beta_;
        case Kind::Separable: return beta_ * std::sin(y);
        case Kind::Custom: return fd1([&](double t) { return f_(t, y); }, x);
    }
    return 0.0;
}

double PhiField::dy(double x, double y) const {
    switch (kind_) {
        case Kind::Zero:
        case Kind::Constant:
        case Kind::Linear: return 0.0;
        case Kind::Separable: return beta_ * x * std::cos(y);
        case Kind::Custom:
            return depends_on_y_ ? fd1([&](double t) { return f_(x, t); }, y) : 0.0;
    }
    return 0.0;
}

double PhiField::dxx(double x, double y) const {
    switch (kind_) {
        case Kind::Zero:
        case Kind::Constant:
        case Kind::Linear:
        case Kind::Separable: return 0.0;
        case Kind::Custom: return fd2([&](double t) { return f_(t, y); }, x);
    }
    return 0.0;
}

double PhiField::dyy(double x, double y) const {
    switch (kind_) {
        case Kind::Zero:
        case Kind::Constant:
        case Kind::Linear: return 0.0;
        case Kind::Separable: return -beta_ * x * std::sin(y);
        case Kind::Custom:
            return depends_on_y_ ? fd2([&](double t) { return f_(x, t); }, y) : 0.0;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// FrameProfile
// ---------------------------------------------------------------------------

FrameProfile FrameProfile::riemannian(PhiField phi, double x_max) {
    if (!(x_max > 0.0)) {
        throw DomainError("FrameProfile: x_max must be positive");
    }
    FrameProfile p;
    p.kind_ = FrameKind::Riemannian;
    p.phi_ = std::move(phi);
    p.x_max_ = x_max;
    return p;
}

FrameProfile FrameProfile::grushin(PhiField phi, double x_max) {
    if (!(x_max > 0.0)) {
        throw DomainError("FrameProfile: x_max must be positive");
    }
    // The F2 normal form requires phi(0, y) = 0 on the singular circle.
    for (double y : circle_grid(32)) {
        if (std::abs(phi.value(0.0, y)) > kStep2Tol) {
            throw DomainError("FrameProfile::grushin: phi(0, y) must vanish");
        }
    }
    FrameProfile p;
    p.kind_ = FrameKind::Grushin;
    p.phi_ = std::move(phi);
    p.x_max_ = x_max;
    return p;
}

FrameProfile FrameProfile::alpha_grushin(double alpha, double x_max) {
    if (!(x_max > 0.0)) {
        throw DomainError("FrameProfile: x_max must be positive");
    }
    FrameProfile p;
    p.kind_ = FrameKind::AlphaGrushin;
    p.alpha_ = alpha;
    p.alpha_integer_ = is_integer(alpha);
    p.x_max_ = x_max;
    return p;
}

void FrameProfile::check_domain(double x) const {
    if (std::abs(x) > x_max_ * (1.0 + 1e-12)) {
        throw DomainError("FrameProfile: x outside [-x_max, x_max]");
    }
    if (kind_ == FrameKind::AlphaGrushin && !alpha_integer_ && x < 0.0) {
        throw DomainError("FrameProfile: x^alpha undefined for x < 0 with non-integer alpha");
    }
}

double FrameProfile::value(double x, double y) const {
    check_domain(x);
    switch (kind_) {
        case FrameKind::Riemannian: return std::exp(phi_.value(x, y));
        case FrameKind::Grushin: return x * std::exp(phi_.value(x, y));
        case FrameKind::AlphaGrushin: return std::pow(x, alpha_);
    }
    return 0.0;
}

double FrameProfile::value_dx(double x, double y) const {
    check_domain(x);
    switch (kind_) {
        case FrameKind::Riemannian:
            return phi_.dx(x, y) * std::exp(phi_.value(x, y));
        case FrameKind::Grushin:
            return std::exp(phi_.value(x, y)) * (1.0 + x * phi_.dx(x, y));
        case FrameKind::AlphaGrushin:
            if (alpha_ == 0.0) return 0.0;
            return alpha_ * std::pow(x, alpha_ - 1.0);
    }
    return 0.0;
}

double FrameProfile::value_dy(double x, double y) const {
    check_domain(x);
    switch (kind_) {
        case FrameKind::Riemannian:
            return phi_.dy(x, y) * std::exp(phi_.value(x, y));
        case FrameKind::Grushin:
            return x * phi_.dy(x, y) * std::exp(phi_.value(x, y));
        case FrameKind::AlphaGrushin:
            return 0.0;
    }
    return 0.0;
}

double FrameProfile::value_dxx(double x, double y) const {
    check_domain(x);
    const double px = phi_.dx(x, y);
    const double pxx = phi_.dxx(x, y);
    switch (kind_) {
        case FrameKind::Riemannian:
            return (pxx + px * px) * std::exp(phi_.value(x, y));
        case FrameKind::Grushin:
            return std::exp(phi_.value(x, y)) * (2.0 * px + x * (px * px + pxx));
        case FrameKind::AlphaGrushin:
            if (alpha_ == 0.0 || alpha_ == 1.0) return 0.0;
            return alpha_ * (alpha_ - 1.0) * std::pow(x, alpha_ - 2.0);
    }
    return 0.0;
}

double FrameProfile::gauss_curvature(double x, double y) const {
    const double f = value(x, y);
    if (kind_ != FrameKind::Riemannian && std::abs(x) < kSingularTol) {
        throw SingularityError("gauss_curvature: point within 1e-8 of the singular set");
    }
    if (std::abs(f) < kSingularTol) {
        throw SingularityError("gauss_curvature: frame value vanishes");
    }
    const double fx = value_dx(x, y);
    const double fxx = value_dxx(x, y);
    return (f * fxx - 2.0 * fx * fx) / (f * f);
}

double FrameProfile::gauss_curvature_expanded(double x, double y) const {
    switch (kind_) {
        case FrameKind::Grushin: {
            if (std::abs(x) < kSingularTol) {
                throw SingularityError("gauss_curvature_expanded: point within 1e-8 of Z");
            }
            const double px = phi_.dx(x, y);
            const double pxx = phi_.dxx(x, y);
            return -2.0 / (x * x) - 2.0 * px / x - px * px + pxx;
        }
        case FrameKind::AlphaGrushin: {
            if (std::abs(x) < kSingularTol) {
                throw SingularityError("gauss_curvature_expanded: point within 1e-8 of Z");
            }
            return -alpha_ * (alpha_ + 1.0) / (x * x);
        }
        case FrameKind::Riemannian:
            throw DomainError("gauss_curvature_expanded: no closed form for this kind");
    }
    throw DomainError("gauss_curvature_expanded: unreachable kind");
}

MetricData FrameProfile::metric(double x, double y) const {
    const double f = value(x, y);
    if (std::abs(f) < kSingularTol) {
        throw SingularityError("metric: point within 1e-8 of the singular set");
    }
    return MetricData{1.0, 1.0 / (f * f), 1.0 / std::abs(f)};
}

bool FrameProfile::step2_check(std::span<const double> y_samples) const {
    switch (kind_) {
        case FrameKind::Riemannian:
            return true; // f = e^phi never vanishes: empty singular set
        case FrameKind::Grushin: {
            for (double y : y_samples) {
                // d/dx (x e^phi) at x = 0 equals e^{phi(0,y)}.
                const double d = std::exp(phi_.value(0.0, y));
                if (std::abs(d) <= kStep2Tol) return false;
            }
            return true;
        }
        case FrameKind::AlphaGrushin: {
            if (alpha_ <= 0.0) return true;  // f does not vanish: empty singular set
            if (alpha_ > 1.0) return false;  // derivative alpha x^{alpha-1} -> 0
            return true;                     // alpha in (0, 1]: nonvanishing (or unbounded) slope
        }
    }
    return false;
}

std::vector<double> FrameProfile::singular_set_locate(double y, double a, double b) const {
    if (!(b > a)) {
        throw DomainError("singular_set_locate: requires a < b");
    }
    constexpr int kScan = 1024;
    std::vector<double> roots;
    double prev_x = a;
    double prev_f = value(prev_x, y);
    for (int i = 1; i <= kScan; ++i) {
        const double x = a + (b - a) * static_cast<double>(i) / kScan;
        const double f = value(x, y);
        if (prev_f == 0.0) {
            roots.push_back(prev_x);
        } else if (f != 0.0 && ((prev_f < 0.0) != (f < 0.0))) {
            double lo = prev_x, hi = x, flo = prev_f;
            while (hi - lo > kBisectTol) {
                const double mid = 0.5 * (lo + hi);
                const double fm = value(mid, y);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((flo < 0.0) != (fm < 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_f = f;
    }
    if (prev_f == 0.0) roots.push_back(prev_x);
    return roots;
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

namespace {

PhiField phi_from_json(const nlohmann::json& j) {
    for (const auto& [key, _] : j.items()) {
        if (key != "name" && key != "beta") {
            throw DomainError("frame profile config: unknown phi key '" + key + "'");
        }
    }
    const std::string name = j.at("name").get<std::string>();
    const double beta = j.value("beta", 0.0);
    if (name == "zero") return PhiField::zero();
    if (name == "constant") return PhiField::constant(beta);
    if (name == "linear") return PhiField::linear(beta);
    if (name == "separable") return PhiField::separable(beta);
    throw DomainError("frame profile config: unknown phi name '" + name + "'");
}

} // namespace

FrameProfile frame_profile_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    for (const auto& [key, _] : j.items()) {
        if (key != "kind" && key != "phi" && key != "alpha" && key != "x_max") {
            throw DomainError("frame profile config: unknown key '" + key + "'");
        }
    }
    const std::string kind = j.at("kind").get<std::string>();
    const double x_max = j.value("x_max", 4.0);
    if (kind == "riemannian") {
        return FrameProfile::riemannian(j.contains("phi") ? phi_from_json(j.at("phi"))
                                                          : PhiField::zero(),
                                        x_max);
    }
    if (kind == "grushin") {
        return FrameProfile::grushin(j.contains("phi") ? phi_from_json(j.at("phi"))
                                                       : PhiField::zero(),
                                     x_max);
    }
    if (kind == "alpha_grushin") {
        return FrameProfile::alpha_grushin(j.at("alpha").get<double>(), x_max);
    }
    throw DomainError("frame profile config: unknown kind '" + kind + "'");
}

std::string frame_profile_to_json(const FrameProfile& profile) {
    nlohmann::json j;
    switch (profile.kind()) {
        case FrameKind::Riemannian: j["kind"] = "riemannian"; break;
        case FrameKind::Grushin: j["kind"] = "grushin"; break;
        case FrameKind::AlphaGrushin: j["kind"] = "alpha_grushin"; break;
    }
    if (profile.kind() == FrameKind::AlphaGrushin) {
        j["alpha"] = profile.alpha();
    } else {
        j["phi"] = {{"name", profile.phi().name()}, {"beta", profile.phi().beta()}};
    }
    j["x_max"] = profile.x_max();
    return j.dump();
}

// ---------------------------------------------------------------------------
// Finite-difference Laplacian
// ---------------------------------------------------------------------------

double laplacian_apply_at(const FrameProfile& profile, const Field2D<double>& u,
                          std::size_t i, std::size_t j) {
    const std::size_t nx = u.nx();
    const std::size_t ny = u.ny();
    if (nx < 3 || ny < 3) {
        throw DomainError("laplacian_apply: grid too small for the stencil");
    }
    if (i == 0 || i + 1 >= nx) {
        throw DomainError("laplacian_apply: x index not interior");
    }
    const double x = u.x[i];
    const double y = u.y[j];
    const double f = profile.value(x, y);
    if (std::abs(f) < kSingularTol ||
        (profile.kind() != FrameKind::Riemannian && std::abs(x) < kSingularTol)) {
        throw SingularityError("laplacian_apply: point within 1e-8 of the singular set");
    }

    const double hm = u.x[i] - u.x[i - 1];
    const double hp = u.x[i + 1] - u.x[i];
    const double um = u.at(i - 1, j);
    const double u0 = u.at(i, j);
    const double up = u.at(i + 1, j);
    const double ux = (up - um) / (hp + hm);
    const double uxx = 2.0 * (um * hp - u0 * (hp + hm) + up * hm) / (hm * hp * (hm + hp));

    const std::size_t jm = (j == 0) ? ny - 1 : j - 1;
    const std::size_t jp = (j + 1 == ny) ? 0 : j + 1;
    const double hy = 2.0 * std::numbers::pi / static_cast<double>(ny);
    const double uy = (u.at(i, jp) - u.at(i, jm)) / (2.0 * hy);
    const double uyy = (u.at(i, jp) - 2.0 * u0 + u.at(i, jm)) / (hy * hy);

    const double fx = profile.value_dx(x, y);
    const double fy = profile.value_dy(x, y);
    return uxx + f * f * uyy - (fx / f) * ux + f * fy * uy;
}

double laplacian_apply(const FrameProfile& profile, const Field2D<double>& u, double x, double y) {
    constexpr double kMatchTol = 1e-9;
    std::size_t best_i = 0;
    double best_dx = 1e300;
    for (std::size_t i = 0; i < u.nx(); ++i) {
        const double d = std::abs(u.x[i] - x);
        if (d < best_dx) {
            best_dx = d;
            best_i = i;
        }
    }
    std::size_t best_j = 0;
    double best_dy = 1e300;
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t j = 0; j < u.ny(); ++j) {
        double d = std::abs(u.y[j] - y);
        d = std::min(d, std::abs(d - two_pi));
        if (d < best_dy) {
            best_dy = d;
            best_j = j;
        }
    }
    if (best_dx > kMatchTol || best_dy > kMatchTol) {
        throw DomainError("laplacian_apply: (x, y) does not match a grid node");
    }
    return laplacian_apply_at(profile, u, best_i, best_j);
}

} // namespace grushinlab
