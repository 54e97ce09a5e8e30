#include <cmath>

#include "doctest.h"
#include "qteich/error.hpp"
#include "qteich/qgroup.hpp"

using namespace qteich;

TEST_CASE("generator relations hold weakly on two factors") {
    const auto s = LatticeSpec::balanced(64, 2);
    const auto p = ModularParameter::make(0.4);
    for (const auto& r : proposition1_residuals(s, p, 4, 5)) {
        INFO(r.name);
        CHECK(r.residual < 1e-3);
    }
}

TEST_CASE("beta variables reproduce the generators") {
    const auto s = LatticeSpec::balanced(64, 2);
    const auto p = ModularParameter::make(0.4);
    for (const auto& r : beta_residuals(s, p, 4, 5)) {
        INFO(r.name);
        CHECK(r.residual < 1e-3);
    }
}

TEST_CASE("eta images need q away from -1") {
    const auto s = LatticeSpec::balanced(16, 2);
    const auto p = ModularParameter::make(1.0);
    const GeneratorSet gs = build_generators(s, p);
    CHECK_THROWS_AS(eta(EtaGenerator::E, gs, s, p), Error);
    CHECK_NOTHROW(eta(EtaGenerator::K, gs, s, p));
}

TEST_CASE("weak residual sees a wrong right-hand side") {
    const auto s = LatticeSpec::balanced(64, 2);
    const auto p = ModularParameter::make(0.4);
    const GeneratorSet gs = build_generators(s, p);
    const auto right = relation_residual("[g12,f12]", s, commutator(gs.g12, gs.f12), gs.f12 * cplx(0, -p.b.real()), 4);
    const auto wrong = relation_residual("[g12,f12]", s, commutator(gs.g12, gs.f12), gs.f12 * cplx(0, p.b.real()), 4);
    CHECK(right.residual < 1e-6);
    CHECK(wrong.residual > 0.5);
}
