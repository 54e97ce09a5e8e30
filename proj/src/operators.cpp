#include "qteich/operators.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "qteich/error.hpp"

namespace qteich {

namespace {

LinearForm P(const LatticeSpec& s, int a) { return LinearForm::P(s.n_factors, a); }
LinearForm Q(const LatticeSpec& s, int a) { return LinearForm::Q(s.n_factors, a); }

cplx eb_real(double y, const ModularParameter& p) { return eb(cplx(y, 0.0), p); }

}  // namespace

double safe_exp(double x) { return std::exp(std::min(x, 700.0)); }

OperatorProgram build_scalar(const LatticeSpec& spec, cplx c) { return OperatorProgram{spec.n_factors, {Scalar{c}}}; }

OperatorProgram build_A(const LatticeSpec& spec, int axis, const ModularParameter&) {
    if (axis < 0 || axis >= spec.n_factors) throw Error(ErrorKind::AxisOutOfRange, "A axis");
    OperatorProgram r = function_of_form(spec, P(spec, axis) + Q(spec, axis),
                                         [](double y) { return std::exp(cplx(0, kPi * y * y)); });
    r.then(chirp(spec, axis, 3.0));
    r.then(Scalar{std::exp(cplx(0, -kPi / 3))});
    return r;
}

OperatorProgram build_T(const LatticeSpec& spec, int i, int j, const ModularParameter& p) {
    if (i == j) throw Error(ErrorKind::IdenticalAxes, "T needs two distinct factors");
    if (i < 0 || j < 0 || i >= spec.n_factors || j >= spec.n_factors)
        throw Error(ErrorKind::AxisOutOfRange, "T axes");
    OperatorProgram r = function_of_form(spec, Q(spec, i) + P(spec, j) - Q(spec, j),
                                         [p](double y) { return 1.0 / eb_real(y, p); });
    r.then(Shear{i, j, 1});
    return r;
}

OperatorProgram build_P(const LatticeSpec& spec, const std::vector<int>& sigma) {
    if (static_cast<int>(sigma.size()) != spec.n_factors) throw Error(ErrorKind::SpecMismatch, "permutation size");
    std::vector<bool> seen(sigma.size(), false);
    for (int s : sigma) {
        if (s < 0 || s >= spec.n_factors || seen[s]) throw Error(ErrorKind::InvalidParameter, "not a permutation");
        seen[s] = true;
    }
    return OperatorProgram{spec.n_factors, {PermuteFactors{sigma}}};
}

OperatorProgram build_R(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 4> a) {
    auto A = [&](int k) { return build_A(spec, a[k - 1], p); };
    auto T = [&](int k, int l) { return build_T(spec, a[k - 1], a[l - 1], p); };
    return product({A(1).inverse(), A(3), T(4, 1), T(3, 1), T(4, 2), T(3, 2), A(1), A(3).inverse()}, spec.n_factors);
}

OperatorProgram build_R_hat_check(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 4> a) {
    auto A = [&](int k) { return build_A(spec, a[k - 1], p); };
    auto T = [&](int k, int l) { return build_T(spec, a[k - 1], a[l - 1], p); };
    const int m = spec.n_factors;
    OperatorProgram t1c4 = product({A(4).inverse(), T(1, 4), A(4)}, m);
    OperatorProgram t3h2 = product({A(3), T(3, 2), A(3).inverse()}, m);
    return product({t1c4, T(1, 3), T(4, 2), t3h2}, m);
}

OperatorProgram build_R_conjugated(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 4> a) {
    auto A = [&](int k) { return build_A(spec, a[k - 1], p); };
    auto T = [&](int k, int l) { return build_T(spec, a[k - 1], a[l - 1], p); };
    const int m = spec.n_factors;
    OperatorProgram x = product({A(2), T(1, 2).inverse(), A(4).inverse(), T(4, 3)}, m);
    return product({x, T(2, 4), x.inverse()}, m);
}

OperatorProgram build_dehn(const LatticeSpec& spec, const ModularParameter& p, int i, int j) {
    const int m = spec.n_factors;
    OperatorProgram z2 = function_of_form(spec, P(spec, i) + Q(spec, j),
                                          [](double y) { return std::exp(cplx(0, 2 * kPi * y * y / 4)); });
    OperatorProgram r = product({build_T(spec, i, j, p).inverse(), z2}, m);
    r.then(Scalar{std::pow(p.zeta, -6)});
    return r;
}

OperatorProgram build_dehn_alpha(const LatticeSpec& spec, const ModularParameter& p, int i, int j) {
    const int m = spec.n_factors;
    OperatorProgram qa2 = function_of_form(spec, Q(spec, j) - P(spec, i),
                                           [](double y) { return std::exp(cplx(0, 2 * kPi * y * y / 4)); });
    OperatorProgram ebf = function_of_form(spec, Q(spec, i) + P(spec, j) - P(spec, i),
                                           [p](double y) { return eb_real(y, p); });
    OperatorProgram r = product({qa2, ebf}, m);
    r.then(Scalar{std::exp(cplx(0, -2 * kPi) * p.c_b * p.c_b)});
    return r;
}

OperatorProgram build_dehn_single(const LatticeSpec& spec, const ModularParameter& p, int axis) {
    OperatorProgram ebf = function_of_form(spec, P(spec, axis) + Q(spec, axis),
                                           [p](double y) { return eb_real(y, p); });
    ebf.then(chirp(spec, axis, 2.0));
    ebf.then(Scalar{std::exp(cplx(0, -2 * kPi) * p.c_b * p.c_b)});
    return ebf;
}

OpSum build_L_alpha(const LatticeSpec& spec, const ModularParameter& p, int sign, int i, int j) {
    const cplx beta = sign > 0 ? p.b : 1.0 / p.b;
    // q_a = (q_j - p_i)/2 and 2 p_a = 2 q_i + 2 p_j - q_j - p_i.
    OperatorProgram c = function_of_form(spec, Q(spec, j) - P(spec, i),
                                         [beta](double y) { return 2.0 * std::cosh(kPi * beta * y); });
    OperatorProgram e = function_of_form(spec, Q(spec, i) * 2 + P(spec, j) * 2 - Q(spec, j) - P(spec, i),
                                         [beta](double y) {
                                             const cplx z = kPi * beta * y;
                                             return safe_exp(z.real()) * std::exp(cplx(0, z.imag()));
                                         });
    return OpSum::of(c) + OpSum::of(e);
}

OpSum build_L_single(const LatticeSpec& spec, const ModularParameter& p, int sign, int axis, double cap) {
    const cplx beta = sign > 0 ? p.b : 1.0 / p.b;
    std::vector<cplx> cx(spec.n_points), ek(spec.n_points);
    auto clip = [cap](cplx z) { return (cap > 0 && std::abs(z) > cap) ? z * (cap / std::abs(z)) : z; };
    for (int l = 0; l < spec.n_points; ++l) {
        cx[l] = clip(2.0 * std::cosh(2 * kPi * beta * spec.x(l)));
        const cplx z = 2 * kPi * beta * spec.k(l);
        ek[l] = clip(safe_exp(z.real()) * std::exp(cplx(0, z.imag())));
    }
    OperatorProgram a{spec.n_factors, {DiagPosition{axis, cx}}};
    OperatorProgram b{spec.n_factors, {DiagMomentum{axis, ek}}};
    return OpSum::of(a) + OpSum::of(b);
}

std::string to_json(const ResidualRecord& r) {
    nlohmann::json j{{"relation", r.relation},
                     {"n_points", r.n_points},
                     {"n_factors", r.n_factors},
                     {"residual", r.residual},
                     {"seed", r.seed}};
    return j.dump();
}

double ensemble_residual(const LatticeSpec& spec, const OperatorProgram& lhs, const OperatorProgram& rhs, int count,
                         std::uint64_t seed, double spread, double clip_tol) {
    const auto packets = packet_ensemble(spec, count, seed, spread);
    std::vector<double> res(count);
    parallel_for(count, [&](int k) {
        const StateVector v = gaussian_packet(spec, packets[k], clip_tol);
        res[k] = relative_residual(apply_program(lhs, v), apply_program(rhs, v));
    });
    double s = 0;
    for (double r : res) s += r;
    return s / count;
}

double ensemble_residual_unitary(const LatticeSpec& spec, const OperatorProgram& lhs, const OperatorProgram& rhs,
                                 int count, std::uint64_t seed, double spread, double clip_tol) {
    const auto packets = packet_ensemble(spec, count, seed, spread);
    OperatorProgram prog = lhs;
    prog.then(rhs.inverse());
    double s = 0;
    for (int k = 0; k < count; ++k) {
        StateVector w = gaussian_packet(spec, packets[k], clip_tol);
        apply_inplace(prog, w.amplitudes, spec);
        s += distance_to_packet(w.amplitudes, spec, packets[k]);
    }
    return s / count;
}

ProjectiveResult ensemble_projective(const LatticeSpec& spec, const OperatorProgram& lhs, const OperatorProgram& rhs,
                                     int count, std::uint64_t seed, double spread, double clip_tol) {
    const auto packets = packet_ensemble(spec, count, seed, spread);
    std::vector<StateVector> l(count), r(count);
    parallel_for(count, [&](int k) {
        const StateVector v = gaussian_packet(spec, packets[k], clip_tol);
        l[k] = apply_program(lhs, v);
        r[k] = apply_program(rhs, v);
    });
    return projective_compare(l, r);
}

}  // namespace qteich
