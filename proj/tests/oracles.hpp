#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

using complex = std::complex<double>;

// Average of f(t') over the gamma density with shape t/tau and scale tau,
// integrated directly in w = t'/tau. Near w = 0 the substitution v = w^s
// removes the w^(s-1) singularity; the rest is cut into panels no wider than
// `period` (in t') and integrated with Gauss-Kronrod.
inline complex gamma_average(const std::function<complex(double)>& f, double t, double tau,
                             double period = 0.0) {
    const double s = t / tau;
    const boost::math::gamma_distribution<double> dist(s, 1.0);
    const double hi = boost::math::quantile(boost::math::complement(dist, 1e-20));
    const double lo = s < 1.0 ? 0.0 : boost::math::quantile(dist, 1e-20);
    double width = (hi - lo) / 50.0;
    if (period > 0.0) width = std::min(width, period / tau);
    const double lg = std::lgamma(s);

    complex sum = 0.0;
    double a = lo;
    if (s < 1.0) {
        const double w1 = std::min(width, hi);
        boost::math::quadrature::tanh_sinh<double> ts;
        for (int im = 0; im < 2; ++im) {
            auto g = [&](double v) {
                if (v <= 0.0) return 0.0;
                const double w = std::pow(v, 1.0 / s);
                const complex e = f(tau * w) * std::exp(-w - std::lgamma(s + 1.0));
                return im ? e.imag() : e.real();
            };
            const double part = ts.integrate(g, 0.0, std::pow(w1, s));
            sum += im ? complex(0, part) : complex(part, 0);
        }
        a = w1;
    }
    while (a < hi) {
        const double b = std::min(a + width, hi);
        for (int im = 0; im < 2; ++im) {
            auto g = [&](double w) {
                if (w <= 0.0) return 0.0;
                const complex e = f(tau * w) * std::exp((s - 1) * std::log(w) - w - lg);
                return im ? e.imag() : e.real();
            };
            const double part = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 10, 1e-14);
            sum += im ? complex(0, part) : complex(part, 0);
        }
        a = b;
    }
    return sum;
}

// Average of exp(z t').
inline complex gamma_mgf(complex z, double t, double tau) {
    const double period = z.imag() != 0.0 ? 2 * std::numbers::pi / std::abs(z.imag()) : 0.0;
    return gamma_average([z](double tp) { return std::exp(z * tp); }, t, tau, period);
}

} // namespace oracle
