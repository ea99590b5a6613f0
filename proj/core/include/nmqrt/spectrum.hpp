// spectrum.hpp - one-sided Fourier spectrum of a correlator record
#pragma once

#include <optional>
#include <vector>

#include "nmqrt/operator_algebra.hpp"

namespace nmqrt::spectrum {

enum class Taper { rectangular, cosine_tail };
// which part of C(t) enters the transform
enum class Input { complex, real_part };

struct SpectrumResult {
    std::vector<double> omega;
    std::vector<double> values;
    double t_max = 0.0;
    Taper taper = Taper::rectangular;
    double taper_fraction = 0.0;
};

// S(w) = Re int_0^tmax dt exp(-i w t) C(t) win(t), trapezoid on the record grid.
// With this kernel C(t) = exp(-i w0 t - k t) peaks at w = -w0.
SpectrumResult fourier_spectrum(const std::vector<double>& t, const std::vector<cd>& series,
                                const std::vector<double>& omega, Taper taper = Taper::rectangular,
                                Input input = Input::complex, double taper_fraction = 0.1);

// n points symmetric about 0 on [-omega_max, omega_max]; n is forced odd so 0 is included
std::vector<double> symmetric_grid(double omega_max, std::size_t n);

struct Peak {
    double omega = 0.0;
    double height = 0.0;
    double fwhm = 0.0;        // linear interpolation at half height, NaN if not bracketed
};

// highest local maximum with omega in [lo, hi]
std::optional<Peak> find_peak(const SpectrumResult& s, double lo, double hi);

} // namespace nmqrt::spectrum
