#pragma once

#include <array>
#include <string>
#include <vector>

#include "qteich/lattice.hpp"

namespace qteich {

/// Generators of G_phi on two factors (axes a, b play the roles 1, 2).
struct GeneratorSet {
    LinearForm g12_form, g21_form;  ///< p1 - q2 and p2 - q1
    OpSum g12, g21;
    OpSum f12, f21;
    double beta = 1.0;  ///< b^sign
    int n_factors = 2;
};

GeneratorSet build_generators(const LatticeSpec& spec, const ModularParameter& p, int sign = 1,
                              std::array<int, 2> axes = {0, 1});

/// z, p, q of contour beta; forms are stored doubled (2z, 2p, 2q) to keep integer coefficients.
struct BetaVariables {
    LinearForm z2, p2, q2;
    OpSum z, p, q;
};

BetaVariables build_beta(const LatticeSpec& spec, std::array<int, 2> axes = {0, 1});

/// f12 and f21 rewritten in the beta variables.
OpSum beta_f12(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 2> axes = {0, 1});
OpSum beta_f21(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 2> axes = {0, 1});

enum class EtaGenerator { K, Kinv, E, F };

/// Image of a U_q(sl2) generator; raises DegenerateQ when |q - 1/q| is below tol.
OpSum eta(EtaGenerator which, const GeneratorSet& gs, const LatticeSpec& spec, const ModularParameter& p,
          double tol = 1e-6);

/// exp(2 pi i (p1 - q2)(q3 - p4)) Ad(e_b(q1 - p2) / e_b(p3 - q4)) e_b(p2 - q2 - q3 + q4)^{-1}.
OperatorProgram build_R_kernel(const LatticeSpec& spec, const ModularParameter& p,
                               std::array<int, 4> a = {0, 1, 2, 3});

struct RelationResidual {
    std::string name;
    double residual;  ///< weak form: max |<w, (lhs - rhs) v>| / max |<w, lhs v>|, |<w, rhs v>| over packet pairs
    double strong;    ///< mean ||lhs v - rhs v|| / max(||lhs v||, ||rhs v||)
};

/// Unbounded products amplify round-off near the grid edge, so the weak form is the asserted residual.
RelationResidual relation_residual(const std::string& name, const LatticeSpec& spec, const OpSum& lhs,
                                   const OpSum& rhs, int count = 10, std::uint64_t seed = 5, double spread = 0.3);

std::vector<RelationResidual> proposition1_residuals(const LatticeSpec& spec, const ModularParameter& p,
                                                     int count = 10, std::uint64_t seed = 5);
std::vector<RelationResidual> uq_residuals(const LatticeSpec& spec, const ModularParameter& p, int count = 10,
                                           std::uint64_t seed = 5);
std::vector<RelationResidual> beta_residuals(const LatticeSpec& spec, const ModularParameter& p, int count = 10,
                                             std::uint64_t seed = 5);
/// Ad(T^-1)(1 x e_a) against the displayed co-products of p and exp(2 pi b q) on two factors.
std::vector<RelationResidual> heisenberg_coproduct_residuals(const LatticeSpec& spec, const ModularParameter& p,
                                                             int count = 10, std::uint64_t seed = 5);
/// Four factors, copies on (0,1) and (2,3): primitive Delta(g), and the Proposition 1 relations for
/// Delta and Delta_phi images.
std::vector<RelationResidual> coproduct_twist_check(const LatticeSpec& spec, const ModularParameter& p, double phi,
                                                    int count = 4, std::uint64_t seed = 5);

}  // namespace qteich
