#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qteich/lattice.hpp"

namespace qteich {

/// Partner of a side: triangle index (0-based label) and intrinsic side, or tri = -1 for boundary.
struct SideRef {
    int tri = -1;
    int side = -1;
    bool boundary() const { return tri < 0; }
    bool operator==(const SideRef& o) const { return tri == o.tri && side == o.side; }
};

/// Intrinsic side k runs counterclockwise from corner k to corner k+1.
struct Triangle {
    int marked_corner = 0;
    std::array<SideRef, 3> glue;
    std::array<std::string, 3> names;  ///< documentation only; ignored by equality
};

/// Triangles listed by number (index 0 is triangle 1). Slot r of a triangle is its r-th side
/// counterclockwise from the marked corner.
struct DecoratedTriangulation {
    std::vector<Triangle> triangles;

    int size() const { return static_cast<int>(triangles.size()); }
    int intrinsic(int tri, int slot) const { return (triangles.at(tri).marked_corner + slot) % 3; }
    SideRef partner_of_slot(int tri, int slot) const;
    bool glued(int ti, int si, int tj, int sj) const;  ///< slots si of ti and sj of tj glued together
    void validate() const;
    int vertex_count() const;
    int edge_count() const;
    int boundary_count() const;
    int euler_characteristic() const;
    /// Relative form: per triangle and slot, the partner (triangle, slot) or (-1,-1).
    std::vector<std::array<std::pair<int, int>, 3>> relative() const;
    bool operator==(const DecoratedTriangulation& o) const { return relative() == o.relative(); }
    bool operator!=(const DecoratedTriangulation& o) const { return !(*this == o); }
};

struct Move {
    enum Kind { Rho, RhoInv, Flip, FlipInv, Perm } kind;
    int i = 0;               ///< 1-based
    int j = 0;               ///< 1-based, flips only
    std::vector<int> sigma;  ///< 1-based images, Perm only

    static Move rho(int i) { return {Rho, i, 0, {}}; }
    static Move rho_inv(int i) { return {RhoInv, i, 0, {}}; }
    static Move flip(int i, int j) { return {Flip, i, j, {}}; }
    static Move flip_inv(int i, int j) { return {FlipInv, i, j, {}}; }
    static Move perm(std::vector<int> s) { return {Perm, 0, 0, std::move(s)}; }
    Move inverse() const;
    bool operator==(const Move& o) const { return kind == o.kind && i == o.i && j == o.j && sigma == o.sigma; }
};

using MoveWord = std::vector<Move>;

DecoratedTriangulation apply_move(const DecoratedTriangulation& t, const Move& m);
/// Moves applied left to right; failures name the step index.
DecoratedTriangulation apply_word(const DecoratedTriangulation& t, const MoveWord& w);

/// Tokens r3, R3, w12, W12, p(132)(45); indices may be comma separated (w1,12) beyond 9 triangles.
MoveWord parse_word(const std::string& text, int n_triangles);
std::string format_word(const MoveWord& w);
std::string format_move(const Move& m);
/// Permutation from cycle notation "(13)(24)" on n points, 1-based images.
std::vector<int> parse_cycles(const std::string& text, int n);

enum class Fixture { Flip, FlipResult, Pentagon, Annulus, Disk };
DecoratedTriangulation fixture(Fixture f);

enum class Surface { AnnulusTwoMarked, DiskTwoPunctures };
DecoratedTriangulation canned_surface(Surface s);

enum class CanonicalWord { DehnTwistAnnulus, BraidingDisk };
MoveWord canonical_word(CanonicalWord w);

std::string to_json(const DecoratedTriangulation& t);
DecoratedTriangulation triangulation_from_json(const std::string& text);

// ---- Relations -------------------------------------------------------------------------------

struct RelationCheck {
    std::string name;
    MoveWord lhs, rhs;
};

RelationCheck relation_rho_cubed(int i);
RelationCheck relation_pentagon(int i, int j, int k);
RelationCheck relation_symmetry(int i, int j, int n);
RelationCheck relation_inversion(int i, int j, int n);

/// Both sides applicable and equal.
bool relation_holds(const DecoratedTriangulation& t, const RelationCheck& r);

struct RandomInstance {
    DecoratedTriangulation t;
    RelationCheck relation;
};

/// Fixed-seed random walks from the fixtures, kept when the relation's left side is applicable.
std::vector<RandomInstance> random_instances(const std::string& relation, int count, std::uint64_t seed);

// ---- Compilation -----------------------------------------------------------------------------

struct Generator {
    enum Kind { A, Ainv, T, Tinv, P } kind;
    int i = 0, j = 0;        ///< 1-based
    std::vector<int> sigma;  ///< 1-based images
    bool operator==(const Generator& o) const { return kind == o.kind && i == o.i && j == o.j && sigma == o.sigma; }
};

/// Product in written order, defined up to a scalar.
struct OperatorExpr {
    std::vector<Generator> gens;
    cplx scalar = 1.0;
    bool projective = true;

    std::string str() const;
    OperatorExpr operator*(const OperatorExpr& o) const;
};

OperatorExpr compile(const MoveWord& w);
OperatorProgram to_program(const OperatorExpr& e, const LatticeSpec& spec, const ModularParameter& p);

}  // namespace qteich
