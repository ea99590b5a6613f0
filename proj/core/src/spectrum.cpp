// spectrum.cpp - direct-quadrature Fourier transform and peak analysis
#include "nmqrt/spectrum.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nmqrt/errors.hpp"

namespace nmqrt::spectrum {

SpectrumResult fourier_spectrum(const std::vector<double>& t, const std::vector<cd>& series,
                                const std::vector<double>& omega, Taper taper, Input input, double taper_fraction) {
    if (t.size() != series.size()) throw InvalidInput("spectrum: time grid and series differ in length");
    if (t.size() < 2) throw InvalidInput("spectrum: need at least two samples");
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw InvalidInput("spectrum: time grid must increase");
    if (std::abs(t[0]) > 1e-12 * dt) throw InvalidInput("spectrum: time grid must start at 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-9 * dt) throw InvalidInput("spectrum: time grid is not uniform");
    if (taper == Taper::cosine_tail && !(taper_fraction > 0.0 && taper_fraction <= 1.0))
        throw InvalidInput("spectrum: taper fraction must be in (0, 1]");

    const std::size_t n = t.size();
    const double tmax = t.back();
    std::vector<cd> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        if (taper == Taper::cosine_tail) {
            const double t0 = tmax * (1.0 - taper_fraction);
            if (t[i] > t0) w *= 0.5 * (1.0 + std::cos(std::numbers::pi * (t[i] - t0) / (tmax - t0)));
        }
        const cd c = input == Input::real_part ? cd(series[i].real(), 0.0) : series[i];
        f[i] = w * dt * c;
    }
    SpectrumResult r;
    r.omega = omega;
    r.t_max = tmax;
    r.taper = taper;
    r.taper_fraction = taper == Taper::cosine_tail ? taper_fraction : 0.0;
    r.values.resize(omega.size());
    for (std::size_t k = 0; k < omega.size(); ++k) {
        // phase by recurrence, re-seeded every 512 samples
        const cd rot = std::polar(1.0, -omega[k] * dt);
        cd z{1.0, 0.0}, acc{};
        for (std::size_t i = 0; i < n; ++i) {
            if (i % 512 == 0) z = std::polar(1.0, -omega[k] * t[i]);
            acc += z * f[i];
            z *= rot;
        }
        r.values[k] = acc.real();
        if (!std::isfinite(r.values[k])) throw NumericalFailure("spectrum: non-finite value");
    }
    return r;
}

std::vector<double> symmetric_grid(double omega_max, std::size_t n) {
    if (!(omega_max > 0.0)) throw InvalidInput("spectrum grid: omega_max must be > 0");
    if (n < 3) throw InvalidInput("spectrum grid: need at least 3 points");
    if (n % 2 == 0) ++n;
    const std::size_t half = n / 2;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = omega_max * (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(half);
    w[half] = 0.0;
    return w;
}

std::optional<Peak> find_peak(const SpectrumResult& s, double lo, double hi) {
    const auto& w = s.omega;
    const auto& v = s.values;
    std::optional<std::size_t> best;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        if (w[i] < lo || w[i] > hi) continue;
        if (v[i] >= v[i - 1] && v[i] >= v[i + 1] && (!best || v[i] > v[*best])) best = i;
    }
    if (!best) return std::nullopt;
    const std::size_t i = *best;
    Peak p{w[i], v[i], std::numeric_limits<double>::quiet_NaN()};
    const double half = 0.5 * v[i];
    std::optional<double> left, right;
    for (std::size_t j = i; j > 0; --j)
        if (v[j - 1] < half) {
            left = w[j - 1] + (half - v[j - 1]) * (w[j] - w[j - 1]) / (v[j] - v[j - 1]);
            break;
        }
    for (std::size_t j = i; j + 1 < w.size(); ++j)
        if (v[j + 1] < half) {
            right = w[j] + (v[j] - half) * (w[j + 1] - w[j]) / (v[j] - v[j + 1]);
            break;
        }
    if (left && right) p.fwhm = *right - *left;
    return p;
}

} // namespace nmqrt::spectrum
