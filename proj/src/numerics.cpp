#include "grushinlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grushinlab/errors.hpp"

namespace grushinlab {

std::vector<double> log_grid(double x_min, double x_max, int points_per_decade) {
    if (!(x_min > 0.0) || !(x_max > x_min)) {
        throw DomainError("log_grid: requires 0 < x_min < x_max");
    }
    if (points_per_decade < 1) {
        throw DomainError("log_grid: points_per_decade must be >= 1");
    }
    const double decades = std::log10(x_max / x_min);
    const int n = std::max(2, static_cast<int>(std::lround(decades * points_per_decade)) + 1);
    std::vector<double> x(static_cast<std::size_t>(n));
    const double l0 = std::log(x_min);
    const double l1 = std::log(x_max);
    for (int j = 0; j < n; ++j) {
        const double s = static_cast<double>(j) / static_cast<double>(n - 1);
        x[static_cast<std::size_t>(j)] = std::exp(l0 + s * (l1 - l0));
    }
    x.front() = x_min;
    x.back() = x_max;
    return x;
}

std::vector<double> uniform_grid(double a, double b, int n) {
    if (n < 2 || !(b > a)) {
        throw DomainError("uniform_grid: requires n >= 2 and b > a");
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        x[static_cast<std::size_t>(j)] = a + (b - a) * static_cast<double>(j) / static_cast<double>(n - 1);
    }
    x.back() = b;
    return x;
}

std::vector<double> circle_grid(int n) {
    if (n < 2) {
        throw DomainError("circle_grid: requires n >= 2");
    }
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        y[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    }
    return y;
}

double trapezoid(std::span<const double> x, std::span<const double> f) {
    if (x.size() != f.size() || x.size() < 2) {
        throw DomainError("trapezoid: mismatched or too-short arrays");
    }
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        s += 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
    }
    return s;
}

double periodic_mean(std::span<const double> f) {
    if (f.empty()) {
        throw DomainError("periodic_mean: empty input");
    }
    double s = 0.0;
    for (double v : f) s += v;
    return s / static_cast<double>(f.size());
}

PowerFit fit_power_law(std::span<const double> x, std::span<const double> absu) {
    if (x.size() != absu.size()) {
        throw DomainError("fit_power_law: mismatched arrays");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(absu[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(absu[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 3) {
        throw InconclusiveError("fit_power_law: fewer than 3 usable samples");
    }
    const double den = static_cast<double>(n) * sxx - sx * sx;
    if (den <= 0.0) {
        throw InconclusiveError("fit_power_law: degenerate abscissae");
    }
    PowerFit fit;
    fit.points = n;
    fit.exponent = (static_cast<double>(n) * sxy - sx * sy) / den;
    fit.log_amplitude = (sy - fit.exponent * sx) / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(absu[i] > 0.0)) continue;
        const double r = std::log(absu[i]) - fit.exponent * std::log(x[i]) - fit.log_amplitude;
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

PowerFit fit_power_law_window(std::span<const double> x, std::span<const double> absu,
                              double x_lo, double x_hi) {
    std::vector<double> xs, us;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= x_lo && x[i] <= x_hi) {
            xs.push_back(x[i]);
            us.push_back(absu[i]);
        }
    }
    return fit_power_law(xs, us);
}

double smoothstep01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep01_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return t * t * (30.0 + t * (-60.0 + 30.0 * t));
}

double smoothstep01_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return t * (60.0 + t * (-180.0 + 120.0 * t));
}

double cutoff_plateau(double x, double eps) {
    if (x <= 0.5 * eps) return 1.0;
    if (x >= eps) return 0.0;
    return smoothstep01(2.0 * (eps - x) / eps);
}

double cutoff_plateau_d1(double x, double eps) {
    if (x <= 0.5 * eps || x >= eps) return 0.0;
    return smoothstep01_d1(2.0 * (eps - x) / eps) * (-2.0 / eps);
}

double cutoff_plateau_d2(double x, double eps) {
    if (x <= 0.5 * eps || x >= eps) return 0.0;
    return smoothstep01_d2(2.0 * (eps - x) / eps) * (4.0 / (eps * eps));
}

template <class T>
void solve_tridiagonal(std::span<const T> lower, std::span<T> diag,
                       std::span<const T> upper, std::span<T> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n || n == 0) {
        throw DomainError("solve_tridiagonal: mismatched arrays");
    }
    for (std::size_t i = 1; i < n; ++i) {
        const T w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
}

template void solve_tridiagonal<double>(std::span<const double>, std::span<double>,
                                        std::span<const double>, std::span<double>);
template void solve_tridiagonal<std::complex<double>>(std::span<const std::complex<double>>,
                                                      std::span<std::complex<double>>,
                                                      std::span<const std::complex<double>>,
                                                      std::span<std::complex<double>>);

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw DomainError("symmetric_eigenvalues: bad dimensions");
    }
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = 0.5 * (at(q, q) - at(p, p)) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>>& a, int n) {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw DomainError("hermitian_eigenvalues: bad dimensions");
    }
    const int m = 2 * n;
    std::vector<double> e(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](int i, int j) -> double& { return e[static_cast<std::size_t>(i) * m + j]; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::complex<double> z = a[static_cast<std::size_t>(i) * n + j];
            at(i, j) = z.real();
            at(i, j + n) = -z.imag();
            at(i + n, j) = z.imag();
            at(i + n, j + n) = z.real();
        }
    }
    std::vector<double> ev = symmetric_eigenvalues(std::move(e), m);
    // The embedding doubles each eigenvalue; take every second entry of the sorted list.
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(ev[static_cast<std::size_t>(2 * i)]);
    return out;
}

std::uint64_t SplitMix64::next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double SplitMix64::uniform(double a, double b) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
}

} // namespace grushinlab
