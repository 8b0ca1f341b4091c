#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "topoquench/ising_statics.hpp"

using namespace topoquench;
using namespace topoquench::statics;

namespace {

// Independent oracle for the kernel: composite Simpson rule at 10x the
// production resolution. Shares nothing with the trapezoid path.
double kernel_simpson(double g, int delta, int n_panels) {
    auto f = [&](double k) {
        const double a = g - std::cos(k);
        const double b = std::sin(k);
        const double e = std::sqrt(a * a + b * b);
        if (e == 0.0) return 0.0;
        // real part of (a - ib)/e * e^{ik delta}
        return (a * std::cos(k * delta) + b * std::sin(k * delta)) / e;
    };
    const double h = 2.0 * pi / n_panels;
    double acc = f(-pi) + f(pi);
    for (int j = 1; j < n_panels; ++j) acc += f(-pi + j * h) * (j % 2 ? 4.0 : 2.0);
    return -(h / 3.0) / (2.0 * pi) * acc;
}

}  // namespace

TEST_CASE("correlation kernel", "[ising_statics]") {
    SECTION("strong-coupling limit: G(0) -> -1") {
        REQUIRE(kernel(1e6, 0) == Catch::Approx(-1.0).margin(1e-6));
    }
    SECTION("g = 0 reduces to a unit shift") {
        REQUIRE(kernel(0.0, -1) == Catch::Approx(1.0).margin(1e-10));
        for (int d : {-3, -2, 0, 1, 2, 3})
            REQUIRE(kernel(0.0, d) == Catch::Approx(0.0).margin(1e-10));
    }
    SECTION("agrees with independent Simpson oracle at 10x resolution") {
        REQUIRE(kernel(2.0, 0, 1024) ==
                Catch::Approx(kernel_simpson(2.0, 0, 10240)).margin(1e-8));
        REQUIRE(kernel(0.7, 3, 1024) ==
                Catch::Approx(kernel_simpson(0.7, 3, 10240)).margin(1e-8));
    }
    SECTION("quadrature convergence: doubling nk moves values < 1e-8") {
        for (double g : {0.5, 0.9, 1.1, 2.0})
            for (int d : {-2, 0, 1})
                REQUIRE(std::abs(kernel(g, d, 2048) - kernel(g, d, 1024)) < 1e-8);
    }
    SECTION("domain and precondition errors") {
        REQUIRE_THROWS_AS(kernel(-0.1, 0), config_error);
        REQUIRE_THROWS_AS(kernel(1.0, 0, 63), config_error);
        REQUIRE_THROWS_AS(kernel(1.0, 0, 32), config_error);
    }
    SECTION("values stay bounded by 1") {
        for (double g : {0.0, 0.3, 1.0, 1.7, 5.0})
            for (int d = -4; d <= 4; ++d)
                REQUIRE(std::abs(kernel(g, d)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("Toeplitz determinant", "[ising_statics]") {
    SECTION("n = 2 is the single entry G(-1)") {
        REQUIRE(toeplitz_det(0.8, 2) == Catch::Approx(kernel(0.8, -1)).margin(1e-14));
    }
    SECTION("g = 0 gives 1 for any n (identity-like matrix)") {
        for (int n : {2, 5, 16, 40})
            REQUIRE(toeplitz_det(0.0, n) == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("ordered side approaches (1-g^2)^(1/4)") {
        REQUIRE(toeplitz_det(0.6, 64) ==
                Catch::Approx(0.894427190999916).epsilon(0.01));
    }
    SECTION("n >= 2 enforced") {
        REQUIRE_THROWS_AS(toeplitz_det(0.5, 1), config_error);
    }
}

TEST_CASE("string order parameters", "[ising_statics]") {
    SECTION("psi2 at g = 0 is fully ordered") {
        REQUIRE(psi2(0.0, 32) == Catch::Approx(1.0).margin(1e-8));
    }
    SECTION("psi2 ordered-side value") {
        REQUIRE(psi2(0.6, 64) == Catch::Approx(0.894427190999916).epsilon(0.01));
    }
    SECTION("psi2 disordered side decays") {
        double v64 = psi2(1.5, 64);
        double v128 = psi2(1.5, 128);
        REQUIRE(v64 < 0.05);
        REQUIRE(std::abs(v128) < std::abs(v64));
    }
    SECTION("psi1 deep topological limit") {
        REQUIRE(psi1(1e6, 16) == Catch::Approx(1.0).margin(1e-3));
    }
    SECTION("psi1 topological-side value") {
        REQUIRE(psi1(2.0, 64) == Catch::Approx(0.964679622352378).epsilon(0.01));
    }
    SECTION("psi1 trivial side decays") {
        double v64 = psi1(0.5, 64);
        double v128 = psi1(0.5, 128);
        REQUIRE(v64 < 0.05);
        REQUIRE(v128 <= v64);
    }
    SECTION("psi1 rejects g = 0") {
        REQUIRE_THROWS_AS(psi1(0.0, 16), config_error);
    }
    SECTION("duality consistency: psi1(g,n)^2 equals the dual correlator") {
        for (double g : {0.4, 0.8, 1.3, 2.0, 3.7}) {
            double direct = psi1(g, 12, 256);
            double dual = toeplitz_det(1.0 / g, 12, 256);
            REQUIRE(direct * direct == Catch::Approx(std::max(dual, 0.0)).margin(1e-12));
        }
    }
}

TEST_CASE("closed-form asymptotics", "[ising_statics]") {
    SECTION("printed values") {
        REQUIRE(asymptotic_psi2(0.0) == 1.0);
        REQUIRE(asymptotic_psi2(0.6) == Catch::Approx(0.894427190999916).margin(1e-12));
        REQUIRE(asymptotic_psi2(1.0) == 0.0);
        REQUIRE(asymptotic_psi2(1.5) == 0.0);
        REQUIRE(asymptotic_psi1(2.0) == Catch::Approx(0.964679622352378).margin(1e-12));
        REQUIRE(asymptotic_psi1(1.0) == 0.0);
        REQUIRE(asymptotic_psi1(0.5) == 0.0);
    }
    SECTION("monotonicity on the respective ordered sides") {
        for (double g = 0.0; g < 0.94; g += 0.05)
            REQUIRE(asymptotic_psi2(g + 0.05) < asymptotic_psi2(g));
        for (double g = 1.05; g < 8.0; g += 0.25)
            REQUIRE(asymptotic_psi1(g + 0.25) > asymptotic_psi1(g));
    }
    SECTION("finite-size convergence toward the asymptote deep in the phase") {
        for (double g : {0.4, 0.6, 0.8}) {
            double a = asymptotic_psi2(g);
            double e16 = std::abs(psi2(g, 16) - a);
            double e32 = std::abs(psi2(g, 32) - a);
            double e64 = std::abs(psi2(g, 64) - a);
            // deep in the phase the error saturates at rounding level, so
            // compare against a machine-noise floor
            REQUIRE(e32 <= e16 + 1e-12);
            REQUIRE(e64 <= e32 + 1e-12);
        }
    }
    SECTION("slow-convergence window flag") {
        REQUIRE(slow_convergence(0.96));
        REQUIRE(slow_convergence(1.0));
        REQUIRE_FALSE(slow_convergence(0.9));
        REQUIRE_FALSE(slow_convergence(1.06));
    }
}
