#include <cmath>

#include "doctest.h"
#include "qteich/error.hpp"
#include "qteich/lattice.hpp"
#include "qteich/operators.hpp"

using namespace qteich;

namespace {
StateVector packet(const LatticeSpec& s, std::uint64_t seed) { return gaussian_packet(s, packet_ensemble(s, 1, seed, 0.3)[0]); }
}  // namespace

TEST_CASE("balanced lattice grids coincide") {
    const auto s = LatticeSpec::balanced(64, 2);
    CHECK(s.is_balanced());
    CHECK(s.size() == 64u * 64u);
    CHECK(std::abs(s.x(40) - s.k(40)) < 1e-15);
    CHECK_THROWS_AS(LatticeSpec::balanced(63, 1).validate(), Error);
}

TEST_CASE("fourier transform is unitary and inverts") {
    const auto s = LatticeSpec::balanced(32, 2);
    const StateVector v = packet(s, 1);
    OperatorProgram f{2, {FourierAxis{1, 1}}};
    const StateVector w = apply_program(f, v);
    CHECK(std::abs(w.norm() - v.norm()) < 1e-12);
    CHECK(relative_residual(apply_program(f.inverse(), w), v) < 1e-13);
}

TEST_CASE("program inverse undoes every primitive") {
    const auto s = LatticeSpec::balanced(24, 3);
    const auto p = ModularParameter::make(1.0);
    OperatorProgram prog = product({build_T(s, 0, 2, p), build_A(s, 1, p), build_P(s, {2, 0, 1})}, 3);
    const StateVector v = packet(s, 2);
    CHECK(relative_residual(apply_program(prog.inverse(), apply_program(prog, v)), v) < 1e-12);
}

TEST_CASE("fused and unfused application agree") {
    const auto s = LatticeSpec::balanced(32, 2);
    const auto p = ModularParameter::make(1.0);
    OperatorProgram prog = product({build_A(s, 0, p), build_T(s, 0, 1, p), build_A(s, 1, p)}, 2);
    const StateVector v = packet(s, 3);
    auto a = v.amplitudes, b = v.amplitudes;
    apply_inplace(prog, a, s, true);
    apply_inplace(prog, b, s, false);
    StateVector va{s, a}, vb{s, b};
    CHECK(relative_residual(va, vb) < 1e-13);
}

TEST_CASE("function of a form matches the direct diagonal") {
    const auto s = LatticeSpec::balanced(32, 2);
    const LinearForm x = LinearForm::Q(2, 0) - LinearForm::Q(2, 1);
    auto f = [](double y) { return std::exp(cplx(0, 0.7 * y)); };
    const OperatorProgram via_form = function_of_form(s, x, f);
    OperatorProgram direct{2, {DiagMulti{{0, 1}, [f](const double* q) { return f(q[0] - q[1]); }}}};
    const StateVector v = packet(s, 4);
    CHECK(relative_residual(apply_program(via_form, v), apply_program(direct, v)) < 1e-12);
}

TEST_CASE("symplectic pairing gives the canonical commutator") {
    CHECK(pairing(LinearForm::P(2, 0), LinearForm::Q(2, 0)) == 1);
    CHECK(pairing(LinearForm::Q(2, 0), LinearForm::P(2, 0)) == -1);
    CHECK(pairing(LinearForm::P(2, 0), LinearForm::Q(2, 1)) == 0);
}

TEST_CASE("A has order three on a fine lattice") {
    const auto s = LatticeSpec::balanced(128, 1);
    const auto p = ModularParameter::make(1.0);
    const auto A = build_A(s, 0, p);
    CHECK(ensemble_residual(s, product({A, A, A}, 1), OperatorProgram{1, {}}, 4, 7) < 1e-10);
}

TEST_CASE("pentagon holds and a wrong scalar is detected") {
    const auto s = LatticeSpec::balanced(64, 3);
    const auto p = ModularParameter::make(1.0);
    auto T = [&](int i, int j) { return build_T(s, i, j, p); };
    const auto lhs = product({T(0, 1), T(0, 2), T(1, 2)}, 3), rhs = product({T(1, 2), T(0, 1)}, 3);
    CHECK(ensemble_residual_unitary(s, lhs, rhs, 2, 7) < 1e-4);
    const auto off = product({build_scalar(s, std::exp(cplx(0, 0.1))), rhs}, 3);
    CHECK(ensemble_residual_unitary(s, lhs, off, 2, 7) > 1e-2);
}

TEST_CASE("R written with hat and check indices equals R") {
    const auto s = LatticeSpec::balanced(12, 4);
    const auto p = ModularParameter::make(1.0);
    CHECK(ensemble_residual(s, build_R(s, p), build_R_hat_check(s, p), 3, 7, 0.3, 1.0) < 1e-10);
}

TEST_CASE("projective comparison recovers the scalar of rhs relative to lhs") {
    const auto s = LatticeSpec::balanced(32, 1);
    const auto p = ModularParameter::make(1.0);
    const auto A = build_A(s, 0, p);
    const cplx c = std::exp(cplx(0, 0.4));
    const auto r = ensemble_projective(s, product({build_scalar(s, c), A}, 1), A, 4, 7, 0.3);
    CHECK(r.residual < 1e-10);
    CHECK(std::abs(r.scalar - std::conj(c)) < 1e-10);  // rhs = scalar lhs
}

TEST_CASE("axis and permutation validation") {
    const auto s = LatticeSpec::balanced(16, 2);
    const auto p = ModularParameter::make(1.0);
    CHECK_THROWS_AS(build_A(s, 2, p), Error);
    CHECK_THROWS_AS(build_T(s, 1, 1, p), Error);
    CHECK_THROWS_AS(build_P(s, {0, 0}), Error);
}
