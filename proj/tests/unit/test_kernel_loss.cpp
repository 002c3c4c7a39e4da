#include <doctest.h>

#include <cmath>

#include "qsdr/kernel.hpp"
#include "qsdr/quantile_loss.hpp"
#include "qsdr/rng.hpp"
#include "qsdr/stats.hpp"

using qsdr::check_loss;
using qsdr::kernel_weight;
using qsdr::KernelKind;
using qsdr::KernelSpec;

namespace {

// bisection oracle for the inverse normal CDF, accurate to ~1e-12
double inv_cdf_bisect(double tau) {
    double lo = -10.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (qsdr::normal_cdf(mid) < tau) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("epanechnikov weights") {
    KernelSpec epa{KernelKind::epanechnikov};
    CHECK(kernel_weight(0.0, 1.0, epa) == doctest::Approx(0.75));
    CHECK(kernel_weight(0.5, 1.0, epa) == doctest::Approx(0.5625));
    CHECK(kernel_weight(2.0, 1.0, epa) == 0.0);
    CHECK(kernel_weight(1.5, 0.5, epa) == 0.0);  // distance 3h
    // K_h scales by 1/h
    CHECK(kernel_weight(0.0, 2.0, epa) == doctest::Approx(0.375));
}

TEST_CASE("uniform kernel is flat on its support and zero outside") {
    KernelSpec uni{KernelKind::uniform};
    CHECK(kernel_weight(0.0, 1.0, uni) == doctest::Approx(0.5));
    CHECK(kernel_weight(0.99, 1.0, uni) == doctest::Approx(0.5));
    CHECK(kernel_weight(1.01, 1.0, uni) == 0.0);
    CHECK(kernel_weight(2.0, 1.0, uni) == 0.0);
}

TEST_CASE("kernel values are nonnegative and maximal at zero") {
    qsdr::CounterRng rng(5);
    for (KernelKind kind : {KernelKind::uniform, KernelKind::epanechnikov}) {
        KernelSpec spec{kind};
        double at_zero = qsdr::kernel_value(0.0, spec);
        for (int i = 0; i < 100; ++i) {
            double u = 3.0 * rng.next_uniform();
            double v = qsdr::kernel_value(u, spec);
            CHECK(v >= 0.0);
            CHECK(v <= at_zero);
            if (u > 1.0) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("check loss closed-form values") {
    CHECK(check_loss(-2.0, 0.5) == doctest::Approx(2.0));
    CHECK(check_loss(1.0, 0.9) == doctest::Approx(1.8));
    CHECK(check_loss(-1.0, 0.9) == doctest::Approx(0.2));
    CHECK(check_loss(0.0, 0.3) == 0.0);
}

TEST_CASE("check loss piecewise form, positivity, convexity") {
    qsdr::CounterRng rng(7);
    for (int i = 0; i < 200; ++i) {
        double tau = 0.05 + 0.9 * rng.next_uniform();
        double s = 6.0 * rng.next_uniform() - 3.0;
        double v = check_loss(s, tau);
        CHECK(v >= -1e-15);
        if (s > 0) CHECK(v == doctest::Approx(2.0 * tau * s));
        if (s < 0) CHECK(v == doctest::Approx(2.0 * (1.0 - tau) * (-s)));
        // midpoint convexity on random pairs
        double t = 6.0 * rng.next_uniform() - 3.0;
        double mid = check_loss(0.5 * (s + t), tau);
        CHECK(mid <= 0.5 * (check_loss(s, tau) + check_loss(t, tau)) + 1e-12);
    }
}

TEST_CASE("inverse normal CDF against the bisection oracle") {
    CHECK(std::abs(qsdr::normal_inv_cdf(0.5)) < 1e-12);
    CHECK(std::abs(qsdr::normal_inv_cdf(0.975) - 1.959964) < 1e-5);
    CHECK(std::abs(qsdr::normal_inv_cdf(0.975) - inv_cdf_bisect(0.975)) < 1e-5);

    qsdr::CounterRng rng(9);
    for (int i = 0; i < 50; ++i) {
        double tau = 0.001 + 0.998 * rng.next_uniform();
        double x = qsdr::normal_inv_cdf(tau);
        CHECK(std::abs(qsdr::normal_cdf(x) - tau) < 1e-9);
        CHECK(std::abs(x - inv_cdf_bisect(tau)) < 1e-8);
        // antisymmetry
        CHECK(std::abs(qsdr::normal_inv_cdf(tau) + qsdr::normal_inv_cdf(1.0 - tau)) < 1e-12);
    }
}
