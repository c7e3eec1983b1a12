#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/numerics.hpp"
#include "nehari/phi.hpp"

using namespace nehari;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
        t[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    }
    return t;
}

} // namespace

TEST_CASE("power generator matches closed forms") {
    for (double p : {1.5, 2.0, 3.0}) {
        const PhiSpec spec = PhiSpec::power(p);
        for (double t : log_grid(1e-4, 1e4, 25)) {
            CHECK(spec.phi(t)
                  == doctest::Approx(std::pow(t, p - 2.0)).epsilon(1e-13));
            CHECK(spec.t_phi(t)
                  == doctest::Approx(std::pow(t, p - 1.0)).epsilon(1e-13));
            CHECK(spec.big_phi(t)
                  == doctest::Approx(std::pow(t, p) / p).epsilon(1e-13));
            CHECK(spec.t_phi_prime(t)
                  == doctest::Approx((p - 1.0) * std::pow(t, p - 2.0))
                         .epsilon(1e-12));
            CHECK(spec.big_phi_inverse(spec.big_phi(t))
                  == doctest::Approx(t).epsilon(1e-10));
        }
    }
}

TEST_CASE("double-power primitive agrees with quadrature") {
    const PhiSpec spec = PhiSpec::double_power(2.0, 2.5);
    for (double t : {0.1, 0.7, 1.0, 3.0, 20.0}) {
        const double oracle = adaptive_simpson(
            [&](double s) { return spec.t_phi(s); }, 0.0, t, 1e-12);
        CHECK(spec.big_phi(t) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("exponent extraction returns the family parameters") {
    for (double p : {1.5, 2.0, 3.0}) {
        const ExponentMeasurement meas =
            measure_exponents(PhiSpec::power(p));
        CHECK(std::abs(meas.ell - p) < 1e-9);
        CHECK(std::abs(meas.m - p) < 1e-9);
    }
    const ExponentMeasurement dp =
        measure_exponents(PhiSpec::double_power(1.8, 2.6));
    CHECK(std::abs(dp.ell - 1.8) < 1e-6);
    CHECK(std::abs(dp.m - 2.6) < 1e-6);
}

TEST_CASE("tabulated family recovers a sampled power law") {
    const double p = 2.3;
    const auto ts = log_grid(1e-3, 1e3, 60);
    std::vector<double> ph(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ph[i] = std::pow(ts[i], p - 2.0);
    }
    const PhiSpec spec = PhiSpec::tabulated(ts, ph);
    for (double t : {0.01, 0.3, 1.0, 5.0, 200.0}) {
        CHECK(spec.phi(t)
              == doctest::Approx(std::pow(t, p - 2.0)).epsilon(1e-6));
    }
    const ExponentMeasurement meas = measure_exponents(spec);
    CHECK(std::abs(meas.ell - p) < 1e-3);
    CHECK(std::abs(meas.m - p) < 1e-3);
}

TEST_CASE("derived exponents and the inequality chain") {
    const ExponentData e = extract_exponents(PhiSpec::power(2.0), 4);
    CHECK(e.ell == doctest::Approx(2.0));
    CHECK(e.m == doctest::Approx(2.0));
    CHECK(e.ell_star == doctest::Approx(4.0));
    CHECK(e.m_star == doctest::Approx(4.0));
    // h = ell (ell* - m) / (ell* - ell) = 2 * 2 / 2 = 2.
    CHECK(e.h_product == doctest::Approx(2.0));
    CHECK(e.h_ok);

    // ell = 2, m = 2.5, N = 5: ell* = 10/3, h = 2*(10/3-2.5)/(10/3-2) = 1.25.
    const ExponentData d = extract_exponents(PhiSpec::double_power(2.0, 2.5), 5);
    CHECK(d.h_product == doctest::Approx(1.25).epsilon(1e-6));
    CHECK(d.h_ok);

    CHECK_THROWS_AS((void)extract_exponents(PhiSpec::power(4.0), 4),
                    HypothesisError);
}

TEST_CASE("hypothesis report flags chain violations without throwing") {
    // ell = 2, m = 3, N = 5: ell* = 10/3, h = 2*(1/3)/(4/3) = 0.5 <= 1.
    const HypothesisReport bad =
        check_hypotheses(PhiSpec::double_power(2.0, 3.0), 5);
    CHECK(bad.phi3_ok);
    CHECK_FALSE(bad.h_ok);
    CHECK_FALSE(bad.all_ok());

    const HypothesisReport good = check_hypotheses(PhiSpec::power(2.0), 4);
    CHECK(good.phi1_ok);
    CHECK(good.phi2_ok);
    CHECK(good.phi3_ok);
    CHECK(good.h_ok);
    CHECK(good.psi_convex_ok);
    CHECK(good.all_ok());
}

TEST_CASE("Legendre conjugate matches the power closed form") {
    // For Phi = t^p/p the conjugate is t^{p'}/p' with p' = p/(p-1).
    for (double p : {1.5, 2.0, 3.0}) {
        const PhiSpec spec = PhiSpec::power(p);
        const double pp = p / (p - 1.0);
        for (double t : {0.2, 1.0, 4.0}) {
            CHECK(conjugate_phi(spec, t)
                  == doctest::Approx(std::pow(t, pp) / pp).epsilon(1e-9));
        }
    }
}

TEST_CASE("Young equality holds at s = t phi(t)") {
    const PhiSpec spec = PhiSpec::double_power(2.0, 2.5);
    for (double t : {0.3, 1.0, 2.5}) {
        const double s = spec.t_phi(t);
        const double lhs = conjugate_phi(spec, s) + spec.big_phi(t);
        CHECK(lhs == doctest::Approx(s * t).epsilon(1e-8));
    }
}

TEST_CASE("Sobolev conjugate inverse: power closed form") {
    // For Phi = t^p/p the defining integral evaluates by hand to
    //   G(t) = p^{1/p} t^{1/p - 1/N} / (1/p - 1/N).
    const int N = 4;
    const double p = 2.0;
    const SobolevConjugate star(PhiSpec::power(p), N);
    const double expo = 1.0 / p - 1.0 / N;
    for (double t : {0.5, 1.0, 3.0}) {
        const double oracle = std::pow(p, 1.0 / p) * std::pow(t, expo) / expo;
        CHECK(star.inverse_value(t) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("Sobolev conjugate inverse: quadrature oracle off the origin") {
    // G(t) - G(a) removes the integrable singularity at 0, so adaptive
    // Simpson on [a, t] is a clean independent oracle for any family.
    const int N = 5;
    const PhiSpec spec = PhiSpec::double_power(2.0, 2.5);
    const SobolevConjugate star(spec, N);
    const double a = 1e-4;
    for (double t : {0.5, 1.0, 3.0}) {
        const double oracle = adaptive_simpson(
            [&](double s) {
                return spec.big_phi_inverse(s)
                       / std::pow(s, double(N + 1) / N);
            },
            a, t, 1e-11);
        CHECK(star.inverse_value(t) - star.inverse_value(a)
              == doctest::Approx(oracle).epsilon(1e-5));
    }
}

TEST_CASE("Sobolev conjugate value and derivative are consistent") {
    const SobolevConjugate star(PhiSpec::power(2.0), 4);
    // value() inverts inverse_value().
    for (double t : {0.4, 1.0, 2.0}) {
        CHECK(star.inverse_value(star.value(t))
              == doctest::Approx(t).epsilon(1e-6));
    }
    // Derivative by the inverse-function rule vs central differences.
    for (double t : {0.5, 1.5}) {
        const double h = 1e-6;
        const double fd = (star.value(t + h) - star.value(t - h)) / (2 * h);
        CHECK(star.derivative(t) == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("scaling factor helpers order their arguments") {
    CHECK(min_power(0.5, 2.0, 3.0) == doctest::Approx(0.125));
    CHECK(max_power(0.5, 2.0, 3.0) == doctest::Approx(0.25));
    CHECK(min_power(2.0, 2.0, 3.0) == doctest::Approx(4.0));
    CHECK(max_power(2.0, 2.0, 3.0) == doctest::Approx(8.0));
}

TEST_CASE("generator hashes separate families and parameters") {
    const auto h1 = PhiSpec::power(2.0).hash();
    const auto h2 = PhiSpec::power(2.5).hash();
    const auto h3 = PhiSpec::double_power(2.0, 2.5).hash();
    CHECK(h1 != h2);
    CHECK(h1 != h3);
    CHECK(PhiSpec::power(2.0).hash() == h1);
}
