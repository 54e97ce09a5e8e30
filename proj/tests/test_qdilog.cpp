#include <cmath>

#include "doctest.h"
#include "qteich/error.hpp"
#include "qteich/identities.hpp"
#include "qteich/qdilog.hpp"
#include "qteich/suites.hpp"

using namespace qteich;

TEST_CASE("modular parameter validation") {
    CHECK_THROWS_AS(ModularParameter::make(cplx(0, 2)), Error);
    CHECK_THROWS_AS(ModularParameter::make(cplx(1, -0.1)), Error);
    const auto p = ModularParameter::make(1.0);
    CHECK(p.unitary_regime);
    CHECK(p.consistent());
    CHECK(std::abs(p.c_b - cplx(0, 1)) < 1e-15);
}

TEST_CASE("value at the origin satisfies the inversion relation") {
    const auto p = ModularParameter::make(1.0);
    const cplx v = eb(0.0, p);
    CHECK(std::abs(v * v / inversion_factor(0.0, p) - 1.0) < 1e-10);
    CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
}

TEST_CASE("identities hold on strip points for real and complex b") {
    for (cplx b : {cplx(1.0), cplx(0.7), cplx(0.8, 0.6)}) {
        const auto p = ModularParameter::make(b);
        for (cplx z : strip_points(p, 12, 3)) {
            CHECK(inversion_residual(z, p) < 1e-8);
            CHECK(shift_residual(z, p, 1) < 1e-8);
            CHECK(shift_residual(z, p, -1) < 1e-8);
            if (p.unitary_regime) CHECK(unitarity_residual(z, p) < 1e-8);
        }
    }
}

TEST_CASE("integral and product agree off the unit circle") {
    const auto p = ModularParameter::make(std::exp(cplx(0, kPi / 6)));
    for (cplx z : strip_points(p, 8, 11)) CHECK(strategy_residual(z, p) < 1e-8);
}

TEST_CASE("evaluation far from the strip uses the shift equations") {
    const auto p = ModularParameter::make(1.0);
    const Evaluation e = eb_eval(cplx(0.2, 3.3), p);
    CHECK(e.shifts > 0);
    CHECK(std::isfinite(std::abs(e.value)));
}

TEST_CASE("evaluation at a pole is rejected") {
    const auto p = ModularParameter::make(1.0);
    const cplx pole = pole_zero_location({0, 0, PoleIndex::Kind::Pole}, p);
    CHECK_THROWS_AS(eb_eval(pole, p), Error);
}

TEST_CASE("fourier integral closed forms agree") {
    const auto p = ModularParameter::make(1.0);
    for (const auto& r : sample_strict(p, 3, 5)) {
        auto [a, b] = ramanujan_closed(r, p);
        CHECK(std::abs(a - b) / (1 + std::abs(a)) < 1e-9);
        CHECK(verify_ramanujan(r, p) < 1e-6);
    }
}

TEST_CASE("complex number parsing") {
    CHECK(parse_complex("1") == cplx(1, 0));
    CHECK(parse_complex("2i") == cplx(0, 2));
    CHECK(parse_complex("-i") == cplx(0, -1));
    CHECK(parse_complex("0.8+0.6i") == cplx(0.8, 0.6));
    CHECK(parse_complex("1e-3-2.5e-1i") == cplx(1e-3, -0.25));
    CHECK_THROWS_AS(parse_complex("abc"), Error);
    CHECK_THROWS_AS(parse_complex(""), Error);
}
