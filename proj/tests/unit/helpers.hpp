// helpers.hpp - small shared fixtures for the unit tests
#pragma once

#include <cmath>
#include <memory>

#include "nmqrt/bath.hpp"
#include "nmqrt/model.hpp"

namespace testing {

inline nmqrt::op::State fig1_vector() {
    nmqrt::op::State psi(2);
    psi << std::sqrt(3.0) / 2.0, 0.5;
    return psi;
}

inline nmqrt::DensityMatrix fig1_state() { return nmqrt::DensityMatrix::pure(fig1_vector()); }

inline std::shared_ptr<nmqrt::bath::ContinuumBath> bath(double gamma, double cutoff, double kT) {
    nmqrt::bath::SpectralDensity sd;
    sd.gamma = gamma;
    sd.cutoff = cutoff;
    return std::make_shared<nmqrt::bath::ContinuumBath>(sd, nmqrt::bath::Temperature{kT});
}

template <class V>
double max_diff(const V& a, const V& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace testing
