#include <catch2/catch_amalgamated.hpp>

#include "stagsix/coupling.hpp"

using namespace stagsix;
using Catch::Approx;

TEST_CASE("coupling from gamma derives all fields") {
    SECTION("gamma = pi/3: sqrtQ = 1") {
        Coupling c = coupling_from_gamma(PI / 3);
        CHECK(c.sqrtQ == Approx(1.0).margin(1e-15));
    }
    SECTION("gamma = pi/5: integer level detected") {
        Coupling c = coupling_from_gamma(PI / 5);
        REQUIRE(c.has_k());
        CHECK(c.k() == 5);
        CHECK(c.gamma0 == Approx(3 * PI / 5).margin(1e-15));
    }
    SECTION("gamma = pi/4: jimbo_k = i") {
        Coupling c = coupling_from_gamma(PI / 4);
        CHECK(std::abs(c.jimbo_k - Cplx(0, 1)) < 1e-15);
    }
    SECTION("generic gamma has no integer level") {
        CHECK_FALSE(coupling_from_gamma(0.57).has_k());
    }
}

TEST_CASE("coupling invariants") {
    for (double g : {0.2, 0.5, PI / 5, PI / 7, 1.2, 1.5}) {
        Coupling c = coupling_from_gamma(g);
        CHECK(std::abs(std::abs(c.jimbo_k) - 1.0) < 1e-14);
        // jimbo_k * e^{i gamma0} = -1
        CHECK(std::abs(c.jimbo_k * std::polar(1.0, c.gamma0) + 1.0) < 1e-14);
        CHECK(c.sqrtQ == Approx((std::polar(1.0, g) + std::polar(1.0, -g)).real()).margin(1e-14));
        CHECK(c.gamma0 == Approx(PI - 2 * g).margin(1e-15));
    }
}

TEST_CASE("integer level round trip") {
    for (int k = 3; k <= 12; ++k) {
        Coupling c = coupling_from_k(k);
        REQUIRE(c.has_k());
        CHECK(c.k() == k);
        CHECK(c.k_int_exact);
        Coupling c2 = coupling_from_gamma(PI / k);
        REQUIRE(c2.has_k());
        CHECK(c2.k() == k);
    }
}

TEST_CASE("out-of-range gamma rejected") {
    CHECK_THROWS_AS(coupling_from_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(coupling_from_gamma(-0.3), std::domain_error);
    CHECK_THROWS_AS(coupling_from_gamma(PI / 2), std::domain_error);
    CHECK_THROWS_AS(coupling_from_k(2), std::domain_error);
}

TEST_CASE("spectral point") {
    SECTION("u = 0") {
        SpectralPoint s = spectral_point(0.0);
        CHECK(std::abs(s.u0) < 1e-15);
        CHECK(std::abs(s.x - 1.0) < 1e-15);
    }
    SECTION("u = pi/4: x = i") {
        SpectralPoint s = spectral_point(PI / 4);
        CHECK(std::abs(s.x - Cplx(0, 1)) < 1e-15);
    }
    SECTION("complex u against an independent exponential") {
        // x = e^{2i(0.3+0.1i)} = e^{-0.2} (cos 0.6 + i sin 0.6)
        SpectralPoint s = spectral_point(Cplx(0.3, 0.1));
        double r = std::exp(-0.2);
        CHECK(s.x.real() == Approx(r * std::cos(0.6)).epsilon(1e-14));
        CHECK(s.x.imag() == Approx(r * std::sin(0.6)).epsilon(1e-14));
        CHECK(std::abs(s.u0 - Cplx(-0.6, -0.2)) < 1e-15);
    }
}
