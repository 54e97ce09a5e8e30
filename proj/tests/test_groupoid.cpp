#include "doctest.h"
#include "qteich/error.hpp"
#include "qteich/groupoid.hpp"
#include "qteich/operators.hpp"

using namespace qteich;

TEST_CASE("flip of the quadrilateral fixture") {
    const auto f = fixture(Fixture::Flip);
    CHECK(apply_move(f, Move::flip(1, 2)) == fixture(Fixture::FlipResult));
    CHECK(apply_move(fixture(Fixture::FlipResult), Move::flip_inv(1, 2)) == f);
}

TEST_CASE("flip needs the marked corners in place") {
    const auto f = apply_move(fixture(Fixture::Flip), Move::rho(1));
    CHECK_THROWS_AS(apply_move(f, Move::flip(1, 2)), Error);
}

TEST_CASE("relations on fixtures") {
    const auto f = fixture(Fixture::Flip);
    CHECK(relation_holds(f, relation_rho_cubed(1)));
    CHECK(relation_holds(fixture(Fixture::Pentagon), relation_pentagon(1, 2, 3)));
    CHECK(relation_holds(f, relation_symmetry(1, 2, 2)));
    CHECK(relation_holds(f, relation_inversion(1, 2, 2)));
}

TEST_CASE("random instances are applicable and satisfy the relations") {
    for (const char* rel : {"rho_cubed", "pentagon", "symmetry", "inversion"}) {
        const auto v = random_instances(rel, 20, 7);
        CHECK(v.size() == 20u);
        for (const auto& x : v) CHECK(relation_holds(x.t, x.relation));
    }
}

TEST_CASE("canned surfaces and words") {
    const auto a = canned_surface(Surface::AnnulusTwoMarked), d = canned_surface(Surface::DiskTwoPunctures);
    CHECK(a.euler_characteristic() == 0);
    CHECK(d.euler_characteristic() == 1);
    MoveWord w = canonical_word(CanonicalWord::DehnTwistAnnulus);
    w.push_back(Move::flip(1, 2));
    CHECK(apply_word(a, w) == a);
    CHECK(apply_word(d, canonical_word(CanonicalWord::BraidingDisk)) == d);
}

TEST_CASE("word parsing round trip") {
    const MoveWord w = parse_word("p(132) w1,3 W21 r2 R3", 3);
    CHECK(w.size() == 5u);
    CHECK(parse_word(format_word(w), 3) == w);
    CHECK_THROWS_AS(parse_word("x12", 3), Error);
    CHECK_THROWS_AS(parse_word("w14", 3), Error);
}

TEST_CASE("triangulation json round trip") {
    const auto d = canned_surface(Surface::DiskTwoPunctures);
    CHECK(triangulation_from_json(to_json(d)) == d);
}

TEST_CASE("braiding word compiles to the permuted R") {
    const auto e = compile(canonical_word(CanonicalWord::BraidingDisk));
    CHECK(e.str() == "A3^-1 A1 T2,3 T1,3 T2,4 T1,4 A3 A1^-1 P(13)(24)");
    const auto s = LatticeSpec::balanced(12, 4);
    const auto p = ModularParameter::make(1.0);
    const auto rhs = product({build_P(s, {2, 3, 0, 1}), build_R(s, p)}, 4);
    CHECK(ensemble_projective(s, to_program(e, s, p), rhs, 3, 7, 0.3, 1.0).residual < 1e-10);
}
