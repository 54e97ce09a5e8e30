#include "qteich/qgroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "qteich/error.hpp"
#include "qteich/operators.hpp"

namespace qteich {

namespace {

LinearForm Pf(const LatticeSpec& s, int a) { return LinearForm::P(s.n_factors, a); }
LinearForm Qf(const LatticeSpec& s, int a) { return LinearForm::Q(s.n_factors, a); }

double real_beta(const ModularParameter& p, int sign) {
    if (std::abs(p.b.imag()) > 1e-12) throw Error(ErrorKind::InvalidParameter, "quantum-group checks need real b");
    return sign > 0 ? p.b.real() : 1.0 / p.b.real();
}

OpSum linear(const LatticeSpec& s, const LinearForm& x, double scale = 1.0) {
    return OpSum::of(function_of_form(s, x, [scale](double y) { return cplx(scale * y); }));
}

/// exp(c X) for real c.
OpSum expo(const LatticeSpec& s, const LinearForm& x, double c) {
    return OpSum::of(function_of_form(s, x, [c](double y) { return cplx(std::exp(c * y)); }));
}

OpSum fn(const LatticeSpec& s, const LinearForm& x, std::function<cplx(double)> f) {
    return OpSum::of(function_of_form(s, x, std::move(f)));
}

cplx q_of(double b) { return std::exp(cplx(0, kPi * b * b)); }

}  // namespace

GeneratorSet build_generators(const LatticeSpec& spec, const ModularParameter& p, int sign, std::array<int, 2> ax) {
    const double beta = real_beta(p, sign);
    const int a = ax[0], b = ax[1];
    GeneratorSet gs;
    gs.n_factors = spec.n_factors;
    gs.beta = beta;
    gs.g12_form = Pf(spec, a) - Qf(spec, b);
    gs.g21_form = Pf(spec, b) - Qf(spec, a);
    gs.g12 = linear(spec, gs.g12_form);
    gs.g21 = linear(spec, gs.g21_form);
    const double c = 2 * kPi * beta;
    gs.f12 = expo(spec, Qf(spec, a) - Qf(spec, b), c) + expo(spec, Pf(spec, b) - Qf(spec, b), c);
    gs.f21 = expo(spec, Qf(spec, b) - Qf(spec, a), c) + expo(spec, Pf(spec, a) - Qf(spec, a), c);
    return gs;
}

BetaVariables build_beta(const LatticeSpec& spec, std::array<int, 2> ax) {
    const int a = ax[0], b = ax[1];
    BetaVariables v;
    v.z2 = Pf(spec, a) - Qf(spec, a) + Pf(spec, b) - Qf(spec, b);
    v.p2 = Pf(spec, a) + Qf(spec, a) - Pf(spec, b) - Qf(spec, b);
    v.q2 = Qf(spec, a) - Pf(spec, a) + Pf(spec, b) - Qf(spec, b);
    v.z = linear(spec, v.z2, 0.5);
    v.p = linear(spec, v.p2, 0.5);
    v.q = linear(spec, v.q2, 0.5);
    return v;
}

OpSum beta_f12(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 2> ax) {
    const double b = real_beta(p, 1);
    const cplx cb = p.c_b;
    BetaVariables v = build_beta(spec, ax);
    // z + p = g12 and z - p = g21.
    LinearForm zp = Pf(spec, ax[0]) - Qf(spec, ax[1]), zm = Pf(spec, ax[1]) - Qf(spec, ax[0]);
    return expo(spec, v.q2, kPi * b) * expo(spec, zp, kPi * b) *
           fn(spec, zm, [b, cb](double y) { return std::sinh(kPi * b * (y + cb)); }) *
           (2.0 * std::exp(-kPi * b * cb));
}

OpSum beta_f21(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 2> ax) {
    const double b = real_beta(p, 1);
    const cplx cb = p.c_b;
    BetaVariables v = build_beta(spec, ax);
    LinearForm zp = Pf(spec, ax[0]) - Qf(spec, ax[1]), zm = Pf(spec, ax[1]) - Qf(spec, ax[0]);
    return expo(spec, zm, kPi * b) * expo(spec, v.q2, -kPi * b) *
           fn(spec, zp, [b, cb](double y) { return std::sinh(kPi * b * (y + cb)); }) *
           (-2.0 * std::exp(kPi * b * cb));
}

OpSum eta(EtaGenerator which, const GeneratorSet& gs, const LatticeSpec& spec, const ModularParameter& p, double tol) {
    const double b = gs.beta;
    const cplx q = q_of(b);
    const cplx dq = q - 1.0 / q;
    if ((which == EtaGenerator::E || which == EtaGenerator::F) && std::abs(dq) < tol)
        throw Error(ErrorKind::DegenerateQ, "q - 1/q vanishes");
    const cplx cb = p.c_b;
    const LinearForm h = gs.g12_form - gs.g21_form;
    switch (which) {
        case EtaGenerator::K: return expo(spec, h, kPi * b / 2);
        case EtaGenerator::Kinv: return expo(spec, h, -kPi * b / 2);
        case EtaGenerator::E: return expo(spec, gs.g21_form, -kPi * b) * gs.f21 * (std::exp(-kPi * b * cb) / dq);
        case EtaGenerator::F: return gs.f12 * expo(spec, gs.g12_form, -kPi * b) * (std::exp(kPi * b * cb) / dq);
    }
    return {};
}

OperatorProgram build_R_kernel(const LatticeSpec& spec, const ModularParameter& p, std::array<int, 4> a) {
    auto ebf = [p](double y) { return eb(cplx(y, 0.0), p); };
    auto ebinv = [p](double y) { return 1.0 / eb(cplx(y, 0.0), p); };
    OperatorProgram phase = function_of_forms(
        spec, {Pf(spec, a[0]) - Qf(spec, a[1]), Qf(spec, a[2]) - Pf(spec, a[3])},
        [](const std::vector<double>& v) { return std::exp(cplx(0, 2 * kPi * v[0] * v[1])); });
    OperatorProgram u = product({function_of_form(spec, Qf(spec, a[0]) - Pf(spec, a[1]), ebf),
                                 function_of_form(spec, Pf(spec, a[2]) - Qf(spec, a[3]), ebinv)},
                                spec.n_factors);
    OperatorProgram core =
        function_of_form(spec, Pf(spec, a[1]) - Qf(spec, a[1]) - Qf(spec, a[2]) + Qf(spec, a[3]), ebinv);
    return product({phase, u, core, u.inverse()}, spec.n_factors);
}

RelationResidual relation_residual(const std::string& name, const LatticeSpec& spec, const OpSum& lhs,
                                   const OpSum& rhs, int count, std::uint64_t seed, double spread) {
    auto packets = packet_ensemble(spec, count, seed, spread);
    const int n = static_cast<int>(packets.size());
    std::vector<StateVector> v, l, r;
    for (const auto& g : packets) v.push_back(gaussian_packet(spec, g));
    l.resize(n, v[0]);
    r.resize(n, v[0]);
    std::vector<double> strong(n);
    parallel_for(n, [&](int i) {
        l[i] = lhs.apply(v[i]);
        r[i] = rhs.apply(v[i]);
        const double s = relative_residual(l[i], r[i]);
        strong[i] = std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
    });
    double diff = 0, scale = 0, acc = 0;
    for (int i = 0; i < n; ++i) acc += strong[i];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx a = v[j].inner(l[i]), b = v[j].inner(r[i]);
            const double d = std::abs(a - b);
            if (!std::isfinite(d)) return {name, std::numeric_limits<double>::infinity(), acc / n};
            diff = std::max(diff, d);
            scale = std::max({scale, std::abs(a), std::abs(b)});
        }
    }
    return {name, scale > 0 ? diff / scale : diff, acc / n};
}

namespace {

std::vector<RelationResidual> algebra_relations(const LatticeSpec& spec, const OpSum& g12, const OpSum& g21,
                                                const OpSum& f12, const OpSum& f21, const OpSum& k12,
                                                const OpSum& k21, double b, int count, std::uint64_t seed,
                                                const std::string& prefix) {
    const cplx ib(0, b);
    const cplx q = q_of(b);
    auto rr = [&](const std::string& name, const OpSum& l, const OpSum& r) { return relation_residual(name, spec, l, r, count, seed); };
    return {
        rr(prefix + "[g12,g21]=0", g12 * g21, g21 * g12),
        rr(prefix + "[g12,f12]=-ib f12", commutator(g12, f12), f12 * (-ib)),
        rr(prefix + "[g21,f21]=-ib f21", commutator(g21, f21), f21 * (-ib)),
        rr(prefix + "[g21,f12]=ib f12", commutator(g21, f12), f12 * ib),
        rr(prefix + "[g12,f21]=ib f21", commutator(g12, f21), f21 * ib),
        rr(prefix + "[f12,f21]=(q-1/q)(K12-K21)", commutator(f12, f21), (k12 - k21) * (q - 1.0 / q)),
    };
}

}  // namespace

std::vector<RelationResidual> proposition1_residuals(const LatticeSpec& spec, const ModularParameter& p, int count,
                                                     std::uint64_t seed) {
    GeneratorSet gs = build_generators(spec, p);
    const double c = 2 * kPi * gs.beta;
    return algebra_relations(spec, gs.g12, gs.g21, gs.f12, gs.f21, expo(spec, gs.g12_form, c),
                             expo(spec, gs.g21_form, c), gs.beta, count, seed, "");
}

std::vector<RelationResidual> uq_residuals(const LatticeSpec& spec, const ModularParameter& p, int count,
                                           std::uint64_t seed) {
    GeneratorSet gs = build_generators(spec, p);
    const cplx q = q_of(gs.beta);
    OpSum K = eta(EtaGenerator::K, gs, spec, p), E = eta(EtaGenerator::E, gs, spec, p),
          F = eta(EtaGenerator::F, gs, spec, p);
    const LinearForm h = gs.g12_form - gs.g21_form;
    OpSum K2 = expo(spec, h, kPi * gs.beta), Km2 = expo(spec, h, -kPi * gs.beta);
    auto rr = [&](const std::string& name, const OpSum& l, const OpSum& r) { return relation_residual(name, spec, l, r, count, seed); };
    return {
        rr("KE=qEK", K * E, E * K * q),
        rr("KF=q^-1FK", K * F, F * K * (1.0 / q)),
        rr("[E,F]=-(K^2-K^-2)/(q-1/q)", commutator(E, F), (K2 - Km2) * (-1.0 / (q - 1.0 / q))),
        rr("K Kinv=1", K * eta(EtaGenerator::Kinv, gs, spec, p), OpSum::of(build_scalar(spec, 1.0))),
    };
}

std::vector<RelationResidual> beta_residuals(const LatticeSpec& spec, const ModularParameter& p, int count,
                                             std::uint64_t seed) {
    BetaVariables v = build_beta(spec);
    GeneratorSet gs = build_generators(spec, p);
    OpSum id = OpSum::of(build_scalar(spec, 1.0));
    const cplx h = 1.0 / cplx(0, 2 * kPi);
    auto rr = [&](const std::string& name, const OpSum& l, const OpSum& r) { return relation_residual(name, spec, l, r, count, seed); };
    std::vector<RelationResidual> out{
        rr("[z,p]=0", v.z * v.p, v.p * v.z),
        rr("[z,q]=0", v.z * v.q, v.q * v.z),
        rr("[p,q]=1/(2 pi i)", commutator(v.p, v.q), id * h),
        rr("g12=z+p", gs.g12, v.z + v.p),
        rr("g21=z-p", gs.g21, v.z - v.p),
        rr("f12 beta form", gs.f12, beta_f12(spec, p)),
        rr("f21 beta form", gs.f21, beta_f21(spec, p)),
    };
    const bool structural = (v.z2 + v.p2).p == (gs.g12_form * 2).p && (v.z2 + v.p2).q == (gs.g12_form * 2).q &&
                            (v.z2 - v.p2).p == (gs.g21_form * 2).p && (v.z2 - v.p2).q == (gs.g21_form * 2).q;
    out.push_back({"g from beta, structural", structural ? 0.0 : 1.0, structural ? 0.0 : 1.0});
    return out;
}

std::vector<RelationResidual> heisenberg_coproduct_residuals(const LatticeSpec& spec, const ModularParameter& p,
                                                             int count, std::uint64_t seed) {
    const double b = real_beta(p, 1), c = 2 * kPi * b;
    OpSum T = OpSum::of(build_T(spec, 0, 1, p)), Ti = OpSum::of(build_T(spec, 0, 1, p).inverse());
    auto rr = [&](const std::string& name, const OpSum& l, const OpSum& r) { return relation_residual(name, spec, l, r, count, seed); };
    const LinearForm p1 = Pf(spec, 0), p2 = Pf(spec, 1), q1 = Qf(spec, 0), q2 = Qf(spec, 1);
    return {
        rr("Ad(T^-1)(1 x p) = p1 + p2", Ti * linear(spec, p2) * T, linear(spec, p1 + p2)),
        rr("Ad(T^-1)(1 x e^{2 pi b q})", Ti * expo(spec, q2, c) * T, expo(spec, q1 + p2, c) + expo(spec, q2, c)),
        rr("Ad(T)(q x 1) = q1 + q2", T * linear(spec, q1) * Ti, linear(spec, q1 + q2)),
        rr("Ad(T)(e^{2 pi b (p-q)} x 1)", T * expo(spec, p1 - q1, c) * Ti, expo(spec, p1 - q1 - q2, c) + expo(spec, p2 - q2, c)),
    };
}

std::vector<RelationResidual> coproduct_twist_check(const LatticeSpec& spec, const ModularParameter& p, double phi,
                                                    int count, std::uint64_t seed) {
    if (spec.n_factors != 4) throw Error(ErrorKind::SpecMismatch, "co-product check runs on four factors");
    GeneratorSet a = build_generators(spec, p, 1, {0, 1}), b = build_generators(spec, p, 1, {2, 3});
    const double c = 2 * kPi * a.beta;
    OpSum Ka12 = expo(spec, a.g12_form, c), Ka21 = expo(spec, a.g21_form, c);
    OpSum Kb12 = expo(spec, b.g12_form, c), Kb21 = expo(spec, b.g21_form, c);

    OpSum dg12 = a.g12 + b.g12, dg21 = a.g21 + b.g21;
    OpSum df12 = a.f12 * Kb12 + b.f12;
    OpSum df21 = Ka21 * b.f21 + a.f21;
    OpSum dk12 = expo(spec, a.g12_form + b.g12_form, c), dk21 = expo(spec, a.g21_form + b.g21_form, c);

    std::vector<RelationResidual> out{
        relation_residual("Delta(g12) primitive", spec, dg12, linear(spec, a.g12_form + b.g12_form), count, seed),
        relation_residual("Delta(g21) primitive", spec, dg21, linear(spec, a.g21_form + b.g21_form), count, seed),
        relation_residual("Delta(K12) = K12 x K12", spec, dk12, Ka12 * Kb12, count, seed),
    };
    for (auto& r : algebra_relations(spec, dg12, dg21, df12, df21, dk12, dk21, a.beta, count, seed, "Delta "))
        out.push_back(r);

    // Delta_phi = Ad(J) Delta, J = exp(i phi (g21 x g12 - g12 x g21)).
    auto twist = [&](double sgn) {
        return OpSum::of(function_of_forms(spec, {a.g12_form, a.g21_form, b.g12_form, b.g21_form},
                                           [phi, sgn](const std::vector<double>& v) {
                                               return std::exp(cplx(0, sgn * phi * (v[1] * v[2] - v[0] * v[3])));
                                           }));
    };
    OpSum J = twist(1), Ji = twist(-1);
    auto ad = [&](const OpSum& x) { return J * x * Ji; };
    for (auto& r : algebra_relations(spec, ad(dg12), ad(dg21), ad(df12), ad(df21), ad(dk12), ad(dk21), a.beta, count,
                                     seed, "Delta_phi "))
        out.push_back(r);
    return out;
}

}  // namespace qteich
