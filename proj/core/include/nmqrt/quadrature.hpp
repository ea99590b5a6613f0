// quadrature.hpp - vector-valued adaptive Gauss-Kronrod (10/21 point) on finite intervals
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "nmqrt/errors.hpp"

namespace nmqrt::quad {

using cd = std::complex<double>;

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_panels = 200000;
};

template <std::size_t N>
using Values = std::array<cd, N>;

template <std::size_t N>
struct Result {
    Values<N> value{};
    double error = 0.0;         // max over components of the Kronrod-Gauss difference
    double abs_integral = 0.0;  // max over components of int |f|
    std::size_t panels = 0;
};

struct GK21 {
    static constexpr std::array<double, 11> x{
        0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
        0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
        0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
        0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
        0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
        0.0};
    static constexpr std::array<double, 11> wk{
        0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
        0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
        0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
        0.123491976262065851077600525478724, 0.134709217311473325928054001771707,
        0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
        0.149445554002916905664936468389821};
    // Gauss weights for the odd-indexed nodes x[1], x[3], ..., x[9]
    static constexpr std::array<double, 5> wg{
        0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
        0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
        0.295524224714752870173892994651338};
};

// Node abscissae of the 21-point rule mapped to [a,b], in a fixed order:
// centre first, then (c - h x_j, c + h x_j) for j = 0..9.
inline std::array<double, 21> gk21_nodes(double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    std::array<double, 21> n{};
    n[0] = c;
    for (std::size_t j = 0; j < 10; ++j) {
        n[1 + 2 * j] = c - h * GK21::x[j];
        n[2 + 2 * j] = c + h * GK21::x[j];
    }
    return n;
}

// Kronrod and Gauss weights matching gk21_nodes ordering (already scaled by h).
inline void gk21_weights(double a, double b, std::array<double, 21>& wk, std::array<double, 21>& wg) {
    const double h = 0.5 * (b - a);
    wk.fill(0.0);
    wg.fill(0.0);
    wk[0] = h * GK21::wk[10];
    for (std::size_t j = 0; j < 10; ++j) {
        wk[1 + 2 * j] = wk[2 + 2 * j] = h * GK21::wk[j];
        if (j % 2 == 1) wg[1 + 2 * j] = wg[2 + 2 * j] = h * GK21::wg[j / 2];
    }
}

namespace detail {

template <std::size_t N>
struct Panel {
    double a, b;
    Values<N> value;
    double error;
    std::array<double, N> abs_value;
};

template <std::size_t N, class F>
Panel<N> eval_panel(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Values<N> k{}, g{};
    std::array<double, N> ab{};
    auto fc = f(c);
    for (std::size_t n = 0; n < N; ++n) {
        k[n] = GK21::wk[10] * fc[n];
        ab[n] = GK21::wk[10] * std::abs(fc[n]);
    }
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = h * GK21::x[j];
        auto f1 = f(c - dx);
        auto f2 = f(c + dx);
        for (std::size_t n = 0; n < N; ++n) {
            cd s = f1[n] + f2[n];
            k[n] += GK21::wk[j] * s;
            ab[n] += GK21::wk[j] * (std::abs(f1[n]) + std::abs(f2[n]));
            if (j % 2 == 1) g[n] += GK21::wg[j / 2] * s;
        }
    }
    Panel<N> p{a, b, {}, 0.0, {}};
    for (std::size_t n = 0; n < N; ++n) {
        p.value[n] = h * k[n];
        p.abs_value[n] = std::abs(h) * ab[n];
        p.error = std::max(p.error, std::abs(h * (k[n] - g[n])));
    }
    return p;
}

} // namespace detail

// Globally adaptive integration over consecutive breakpoints. f(x) returns Values<N>.
// Converged when sum of panel errors <= max(abs_tol, rel_tol * max_n max(|I_n|, int|f_n|)).
template <std::size_t N, class F>
Result<N> integrate(F&& f, const std::vector<double>& breakpoints, const Options& opt = {}) {
    if (breakpoints.size() < 2) throw InvalidInput("integrate: need at least two breakpoints");
    std::vector<detail::Panel<N>> heap;
    heap.reserve(breakpoints.size() * 4);
    auto cmp = [](const detail::Panel<N>& x, const detail::Panel<N>& y) { return x.error < y.error; };
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i + 1] > breakpoints[i])) throw InvalidInput("integrate: breakpoints must increase");
        heap.push_back(detail::eval_panel<N>(f, breakpoints[i], breakpoints[i + 1]));
    }
    std::make_heap(heap.begin(), heap.end(), cmp);
    auto totals = [&](Result<N>& r) {
        r.value = {};
        r.error = 0.0;
        std::array<double, N> ab{};
        for (const auto& p : heap) {
            for (std::size_t n = 0; n < N; ++n) {
                r.value[n] += p.value[n];
                ab[n] += p.abs_value[n];
            }
            r.error += p.error;
        }
        double scale = 0.0;
        for (std::size_t n = 0; n < N; ++n) scale = std::max({scale, std::abs(r.value[n]), ab[n]});
        r.abs_integral = scale;
        r.panels = heap.size();
        return std::max(opt.abs_tol, opt.rel_tol * scale);
    };
    Result<N> r;
    double tol = totals(r);
    std::size_t since = 0;
    while (r.error > tol) {
        if (heap.size() >= opt.max_panels)
            throw NumericalFailure("quadrature did not converge: error estimate " +
                                       std::to_string(r.error) + " above tolerance " + std::to_string(tol),
                                   r.error);
        std::pop_heap(heap.begin(), heap.end(), cmp);
        auto worst = heap.back();
        heap.pop_back();
        const double m = 0.5 * (worst.a + worst.b);
        heap.push_back(detail::eval_panel<N>(f, worst.a, m));
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(detail::eval_panel<N>(f, m, worst.b));
        std::push_heap(heap.begin(), heap.end(), cmp);
        // incremental update drifts; recompute totals periodically
        r.error += heap[heap.size() - 1].error + heap[heap.size() - 2].error - worst.error;
        if (++since >= 64 || r.error <= tol) {
            tol = totals(r);
            since = 0;
        }
    }
    totals(r);
    return r;
}

template <std::size_t N, class F>
Result<N> integrate(F&& f, double a, double b, std::size_t initial_panels, const Options& opt = {}) {
    initial_panels = std::max<std::size_t>(1, initial_panels);
    std::vector<double> bp(initial_panels + 1);
    for (std::size_t i = 0; i <= initial_panels; ++i)
        bp[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(initial_panels);
    bp.back() = b;
    return integrate<N>(std::forward<F>(f), bp, opt);
}

// Scalar real convenience wrapper
template <class F>
double integrate_real(F&& f, double a, double b, std::size_t initial_panels = 1, const Options& opt = {}) {
    auto g = [&](double x) { return Values<1>{cd(f(x), 0.0)}; };
    return integrate<1>(g, a, b, initial_panels, opt).value[0].real();
}

} // namespace nmqrt::quad
