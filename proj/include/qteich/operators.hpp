#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qteich/lattice.hpp"

namespace qteich {

/// A = exp(-i pi/3) exp(3 i pi q^2) exp(i pi (p+q)^2) on one factor.
OperatorProgram build_A(const LatticeSpec& spec, int axis, const ModularParameter& p);
/// T_ij = exp(2 pi i p_i q_j) e_b(q_i + p_j - q_j)^{-1}.
OperatorProgram build_T(const LatticeSpec& spec, int i, int j, const ModularParameter& p);
/// P_sigma from 0-based images.
OperatorProgram build_P(const LatticeSpec& spec, const std::vector<int>& sigma);
OperatorProgram build_scalar(const LatticeSpec& spec, cplx c);

/// R = A1^-1 A3 T41 T31 T42 T32 A1 A3^-1 on the axes (a[0], a[1], a[2], a[3]).
OperatorProgram build_R(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 4> a = {0, 1, 2, 3});
/// T_{1 check4} T13 T42 T_{3 hat2}.
OperatorProgram build_R_hat_check(const LatticeSpec& spec, const ModularParameter& p,
                                  std::array<int, 4> a = {0, 1, 2, 3});
/// Ad(A2 T12^-1 A4^-1 T43) T24.
OperatorProgram build_R_conjugated(const LatticeSpec& spec, const ModularParameter& p,
                                   std::array<int, 4> a = {0, 1, 2, 3});

/// zeta^-6 T12^-1 exp(2 pi i z^2), z = (p1 + q2)/2.
OperatorProgram build_dehn(const LatticeSpec& spec, const ModularParameter& p, int i = 0, int j = 1);
/// exp(2 pi i (q_a^2 - c_b^2)) e_b(p_a + q_a) with q_a = (q2 - p1)/2, p_a + q_a = q1 + p2 - p1.
OperatorProgram build_dehn_alpha(const LatticeSpec& spec, const ModularParameter& p, int i = 0, int j = 1);
/// exp(2 pi i (q^2 - c_b^2)) e_b(p + q) on one factor.
OperatorProgram build_dehn_single(const LatticeSpec& spec, const ModularParameter& p, int axis = 0);

/// 2 cosh(2 pi beta q_a) + exp(2 pi beta p_a), beta = b^sign, in two-factor alpha variables.
OpSum build_L_alpha(const LatticeSpec& spec, const ModularParameter& p, int sign, int i = 0, int j = 1);
/// 2 cosh(2 pi beta q) + exp(2 pi beta p) on one factor.
OpSum build_L_single(const LatticeSpec& spec, const ModularParameter& p, int sign, int axis = 0,
                     double cap = 0.0);

/// Real exponential with the argument clipped to keep diagonals finite.
double safe_exp(double x);

struct ResidualRecord {
    std::string relation;
    int n_points;
    int n_factors;
    double residual;
    std::uint64_t seed;
};

std::string to_json(const ResidualRecord& r);

/// Mean relative residual of lhs v vs rhs v over an ensemble (both programs applied).
double ensemble_residual(const LatticeSpec& spec, const OperatorProgram& lhs, const OperatorProgram& rhs,
                         int count, std::uint64_t seed, double spread = 0.5, double clip_tol = 1e-10);

/// Mean of ||rhs^-1 lhs v - v|| over the ensemble using one working vector (unitary rhs).
double ensemble_residual_unitary(const LatticeSpec& spec, const OperatorProgram& lhs, const OperatorProgram& rhs,
                                 int count, std::uint64_t seed, double spread = 0.5, double clip_tol = 1e-10);

ProjectiveResult ensemble_projective(const LatticeSpec& spec, const OperatorProgram& lhs, const OperatorProgram& rhs,
                                     int count, std::uint64_t seed, double spread = 0.5, double clip_tol = 1e-10);

}  // namespace qteich
