#include "qteich/suites.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "json.hpp"
#include "qteich/error.hpp"
#include "qteich/groupoid.hpp"
#include "qteich/identities.hpp"
#include "qteich/operators.hpp"
#include "qteich/qgroup.hpp"
#include "qteich/spectral.hpp"

namespace qteich {

namespace {

const char* kSuiteNames[] = {"qdilog", "ramanujan", "system",   "pentagon", "yangbaxter",
                             "dehn",   "spectral",  "groupoid", "qgroup",   "all"};

struct Check {
    std::string id;
    std::string relation;
    std::map<std::string, std::string> params;
    double tolerance;
    std::function<double()> run;
};

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
}

std::string fmt(cplx z) {
    std::ostringstream os;
    os << std::setprecision(6) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

/// Largest step ratio r[k+1] / r[k]; values below floor count as floor so converged levels pass.
double step_ratio(const std::vector<double>& r, double floor = 1e-12) {
    double worst = 0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k)
        worst = std::max(worst, std::max(r[k + 1], floor) / std::max(r[k], floor));
    return worst;
}

std::vector<int> levels(int n) { return {n / 4, n / 2, n}; }

/// Lazily shared values so several records can come from one expensive computation.
template <class T>
struct Memo {
    std::function<T()> make;
    std::shared_ptr<std::optional<T>> cell = std::make_shared<std::optional<T>>();
    const T& get() const {
        if (!*cell) *cell = make();
        return **cell;
    }
};

// ---- qdilog ----------------------------------------------------------------------------------

void qdilog_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const auto pts = strip_points(p, 100, cfg.seed);
    const std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"points", "100"}, {"seed", std::to_string(cfg.seed)}};
    auto over = [pts](std::function<double(cplx)> f) {
        return [pts, f] {
            double worst = 0;
            for (cplx z : pts) worst = std::max(worst, f(z));
            return worst;
        };
    };
    out.push_back({"qdilog.inversion", "e_b(z) e_b(-z) = exp(i pi z^2 - i pi (1 + 2 c_b^2) / 6)", prm, 1e-8,
                   over([p](cplx z) { return inversion_residual(z, p); })});
    out.push_back({"qdilog.shift_b", "e_b(z - ib/2) = (1 + exp(2 pi b z)) e_b(z + ib/2)", prm, 1e-8,
                   over([p](cplx z) { return shift_residual(z, p, 1); })});
    out.push_back({"qdilog.shift_binv", "e_b(z - i/2b) = (1 + exp(2 pi z / b)) e_b(z + i/2b)", prm, 1e-8,
                   over([p](cplx z) { return shift_residual(z, p, -1); })});
    // 1/b leaves the upper half plane for complex b and equals b at b = 1, so those use b = 0.7
    const ModularParameter pd = p.b.imag() == 0 && std::abs(p.b - 1.0 / p.b) > 0.1 ? p : ModularParameter::make(0.7);
    const auto dpts = strip_points(pd, 100, cfg.seed);
    out.push_back({"qdilog.duality",
                   "e_b(z) = e_{1/b}(z)",
                   {{"b", fmt(pd.b)}, {"points", "100"}, {"seed", std::to_string(cfg.seed)}},
                   1e-8,
                   [pd, dpts] {
                       double worst = 0;
                       for (cplx z : dpts) worst = std::max(worst, duality_residual(z, pd));
                       return worst;
                   }});
    if (p.unitary_regime)
        out.push_back({"qdilog.unitarity", "conj(e_b(z)) e_b(conj z) = 1", prm, 1e-8,
                       over([p](cplx z) { return unitarity_residual(z, p); })});
    const ModularParameter ps = ModularParameter::make(std::exp(cplx(0, kPi / 6)));
    const auto spts = strip_points(ps, 50, cfg.seed);
    out.push_back({"qdilog.strategy_agreement",
                   "integral and product evaluation agree",
                   {{"b", fmt(ps.b)}, {"points", "50"}, {"seed", std::to_string(cfg.seed)}},
                   1e-8,
                   [ps, spts] {
                       double worst = 0;
                       for (cplx z : spts) worst = std::max(worst, strategy_residual(z, ps));
                       return worst;
                   }});
}

// ---- ramanujan -------------------------------------------------------------------------------

void ramanujan_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"seed", std::to_string(cfg.seed)}};
    auto with = [prm](std::string k, std::string v) {
        auto m = prm;
        m[k] = v;
        return m;
    };
    out.push_back({"ramanujan.closed_forms", "the two closed forms of the Fourier integral agree",
                   with("samples", "50"), 1e-9, [p, cfg] {
                       double worst = 0;
                       for (const auto& r : sample_strict(p, 50, cfg.seed)) {
                           auto [a, b] = ramanujan_closed(r, p);
                           worst = std::max(worst, std::abs(a - b) / (1 + std::abs(a)));
                       }
                       return worst;
                   }});
    out.push_back({"ramanujan.quadrature", "quadrature of the Fourier integral matches the closed form",
                   with("samples", "10"), 1e-6, [p, cfg] {
                       double worst = 0;
                       for (const auto& r : sample_strict(p, 10, cfg.seed)) worst = std::max(worst, verify_ramanujan(r, p));
                       return worst;
                   }});
    out.push_back({"ramanujan.node_doubling",
                   "quadrature residual falls as nodes per panel double 2, 4, 8, 16 (step ratio above 1e-13)",
                   with("samples", "3"), 1.0, [p, cfg] {
                       double worst = 0;
                       for (const auto& r : sample_strict(p, 3, cfg.seed)) {
                           std::vector<double> res;
                           for (int nodes : {2, 4, 8, 16}) {
                               RamanujanConfig rc;
                               rc.panel_nodes = nodes;
                               res.push_back(verify_ramanujan(r, p, rc));
                           }
                           worst = std::max(worst, step_ratio(res, 1e-13));
                       }
                       return worst;
                   }});
}

// ---- lattice relations -------------------------------------------------------------------------

struct SystemLevels {
    std::vector<double> a3, ata, tat, tat_perturbed;
};

void system_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const int n = cfg.n_points > 0 ? cfg.n_points : 512;
    const auto ns = levels(n);
    const std::uint64_t seed = cfg.seed;
    Memo<SystemLevels> m{[p, ns, seed] {
        SystemLevels s;
        for (int N : ns) {
            auto s1 = LatticeSpec::balanced(N, 1);
            auto A = build_A(s1, 0, p);
            s.a3.push_back(ensemble_residual(s1, product({A, A, A}, 1), OperatorProgram{1, {}}, 20, seed));
            auto s2 = LatticeSpec::balanced(N, 2);
            auto A1 = build_A(s2, 0, p), A2 = build_A(s2, 1, p);
            auto T12 = build_T(s2, 0, 1, p), T21 = build_T(s2, 1, 0, p);
            s.ata.push_back(ensemble_residual(s2, product({A1, T12, A2}, 2), product({A2, T21, A1}, 2), 10, seed));
            auto lhs = product({T12, A1, T21}, 2);
            auto rhs = [&](cplx z) { return product({build_scalar(s2, z), A1, A2, build_P(s2, {1, 0})}, 2); };
            s.tat.push_back(ensemble_residual(s2, lhs, rhs(p.zeta), 10, seed));
            s.tat_perturbed.push_back(ensemble_residual(s2, lhs, rhs(p.zeta * std::exp(cplx(0, 0.1))), 10, seed));
        }
        return s;
    }};
    std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"n_points", std::to_string(n)},
                                           {"seed", std::to_string(seed)}};
    auto lv = prm;
    lv["n_points"] = std::to_string(ns[0]) + "," + std::to_string(ns[1]) + "," + std::to_string(ns[2]);
    out.push_back({"system.a_cubed", "A^3 = 1", prm, 1e-3, [m] { return m.get().a3.back(); }});
    out.push_back({"system.a_cubed.refinement", "A^3 = 1 residual falls under refinement (step ratio)", lv, 1.0,
                   [m] { return step_ratio(m.get().a3); }});
    out.push_back({"system.ata", "A1 T12 A2 = A2 T21 A1", prm, 1e-3, [m] { return m.get().ata.back(); }});
    out.push_back({"system.ata.refinement", "A1 T12 A2 = A2 T21 A1 residual falls under refinement (step ratio)", lv,
                   1.0, [m] { return step_ratio(m.get().ata); }});
    out.push_back({"system.tat", "T12 A1 T21 = zeta A1 A2 P12", prm, 1e-3, [m] { return m.get().tat.back(); }});
    out.push_back({"system.tat.refinement", "T12 A1 T21 = zeta A1 A2 P12 residual falls under refinement (step ratio)",
                   lv, 1.0, [m] { return step_ratio(m.get().tat); }});
    out.push_back({"system.a_conjugation", "<A q A^-1> = <p - q> and <A p A^-1> = <-q> on packets (absolute)", prm,
                   1e-3, [p, n, seed] {
                       auto s1 = LatticeSpec::balanced(n, 1);
                       const auto A = build_A(s1, 0, p);
                       auto coord = [&](LinearForm f) {
                           return OpSum::of(function_of_form(s1, f, [](double y) { return cplx(y); }));
                       };
                       const OpSum Q = coord(LinearForm::Q(1, 0)), P = coord(LinearForm::P(1, 0));
                       double worst = 0;
                       for (const auto& g : packet_ensemble(s1, 10, seed)) {
                           const StateVector v = gaussian_packet(s1, g), w = apply_program(A.inverse(), v);
                           worst = std::max(worst, std::abs(expectation(Q, w) - expectation(P, v) + expectation(Q, v)));
                           worst = std::max(worst, std::abs(expectation(P, w) + expectation(Q, v)));
                       }
                       return worst;
                   }});
    out.push_back({"system.zeta_detected", "residual with zeta below residual with zeta exp(0.1i) (ratio)", prm, 1.0,
                   [m] { return m.get().tat.back() / m.get().tat_perturbed.back() * (1 - 1e-15); }});
}

void pentagon_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const int n = cfg.n_points > 0 ? cfg.n_points : 512;
    const auto ns = levels(n);
    const std::uint64_t seed = cfg.seed;
    Memo<std::vector<double>> m{[p, ns, seed] {
        std::vector<double> r;
        for (int N : ns) {
            auto s3 = LatticeSpec::balanced(N, 3);
            auto T = [&](int i, int j) { return build_T(s3, i, j, p); };
            r.push_back(ensemble_residual_unitary(s3, product({T(0, 1), T(0, 2), T(1, 2)}, 3),
                                                  product({T(1, 2), T(0, 1)}, 3), 2, seed));
        }
        return r;
    }};
    std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"n_points", std::to_string(n)},
                                           {"seed", std::to_string(seed)}};
    out.push_back({"pentagon.residual", "T12 T13 T23 = T23 T12", prm, 1e-3, [m] { return m.get().back(); }});
    prm["n_points"] = std::to_string(ns[0]) + "," + std::to_string(ns[1]) + "," + std::to_string(ns[2]);
    out.push_back({"pentagon.refinement", "pentagon residual falls under refinement (step ratio)", prm, 1.0,
                   [m] { return step_ratio(m.get()); }});
}

void yang_baxter_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const int n = cfg.n_points > 0 ? cfg.n_points : 16;
    const std::vector<int> ns = n == 16 ? std::vector<int>{8, 12, 16} : std::vector<int>{n};
    const std::uint64_t seed = cfg.seed;
    Memo<std::vector<double>> m{[p, ns, seed] {
        std::vector<double> r;
        for (int N : ns) {
            auto s6 = LatticeSpec::balanced(N, 6);
            auto R1234 = build_R(s6, p, {0, 1, 2, 3}), R1256 = build_R(s6, p, {0, 1, 4, 5}),
                 R3456 = build_R(s6, p, {2, 3, 4, 5});
            r.push_back(ensemble_residual(s6, product({R1234, R1256, R3456}, 6), product({R3456, R1256, R1234}, 6),
                                          10, seed, 0.3, 1.0));
        }
        return r;
    }};
    std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"n_points", std::to_string(n)},
                                           {"seed", std::to_string(seed)}, {"n_factors", "6"}};
    out.push_back({"yangbaxter.residual", "R1234 R1256 R3456 = R3456 R1256 R1234", prm, 5e-2,
                   [m] { return m.get().back(); }});
    if (ns.size() > 1) {
        prm["n_points"] = "8,12,16";
        out.push_back({"yangbaxter.refinement", "Yang-Baxter residual falls under refinement (step ratio)", prm, 1.0,
                       [m] { return step_ratio(m.get()); }});
    }
    const int n4 = 32;
    std::map<std::string, std::string> p4{{"b", fmt(p.b)}, {"n_points", std::to_string(n4)},
                                          {"seed", std::to_string(seed)}, {"n_factors", "4"}};
    out.push_back({"yangbaxter.r_hat_check", "R written with hat and check indices equals R", p4, 1e-10, [p, seed] {
                       auto s4 = LatticeSpec::balanced(n4, 4);
                       return ensemble_residual(s4, build_R(s4, p), build_R_hat_check(s4, p), 10, seed, 0.3);
                   }});
    out.push_back({"yangbaxter.r_rewritten", "R = Ad(A2 T12^-1 A4^-1 T43) T24", p4, 5e-2, [p, seed] {
                       auto s4 = LatticeSpec::balanced(n4, 4);
                       return ensemble_residual(s4, build_R(s4, p), build_R_conjugated(s4, p), 10, seed, 0.3);
                   }});
}

// ---- dehn and compiler -------------------------------------------------------------------------

double weak_commutator(const LatticeSpec& s, const OperatorProgram& d, const OpSum& l, std::uint64_t seed) {
    std::vector<StateVector> vs;
    for (const auto& g : packet_ensemble(s, 6, seed, 0.3)) vs.push_back(gaussian_packet(s, g));
    std::vector<StateVector> lv;
    for (const auto& v : vs) lv.push_back(l.apply(v));
    std::vector<StateVector> dv, dlv;
    for (std::size_t c = 0; c < vs.size(); ++c) {
        dv.push_back(apply_program(d, vs[c]));
        dlv.push_back(apply_program(d, lv[c]));
    }
    double diff = 0, scale = 0;
    for (std::size_t a = 0; a < vs.size(); ++a)
        for (std::size_t c = 0; c < vs.size(); ++c) {
            const cplx x = vs[a].inner(dlv[c]), y = lv[a].inner(dv[c]);
            if (!std::isfinite(std::abs(x - y))) return std::numeric_limits<double>::infinity();
            diff = std::max(diff, std::abs(x - y));
            scale = std::max({scale, std::abs(x), std::abs(y)});
        }
    return scale > 0 ? diff / scale : diff;
}

/// Compiled annulus twist word followed by the normalization zeta^-6 exp(2 pi i z_alpha^2).
OperatorProgram compiled_twist(const LatticeSpec& s, const ModularParameter& p) {
    OperatorProgram c = to_program(compile(canonical_word(CanonicalWord::DehnTwistAnnulus)), s, p);
    OperatorProgram z = function_of_form(s, LinearForm::P(2, 0) + LinearForm::Q(2, 1),
                                         [](double y) { return std::exp(cplx(0, 2 * kPi * y * y / 4)); });
    OperatorProgram r = product({c, z}, 2);
    r.then(Scalar{std::pow(p.zeta, -6)});
    return r;
}

void dehn_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const int n = cfg.n_points > 0 ? cfg.n_points : 512;
    const std::uint64_t seed = cfg.seed;
    std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"n_points", std::to_string(n)},
                                           {"seed", std::to_string(seed)}, {"word", "W12"}};
    out.push_back({"dehn.compiled_vs_twist", "compiled twist word matches the twist operator (projective)", prm, 1e-3,
                   [p, n, seed] {
                       auto s = LatticeSpec::balanced(n, 2);
                       return ensemble_projective(s, compiled_twist(s, p), build_dehn(s, p), 10, seed, 0.3).residual;
                   }});
    out.push_back({"dehn.compiled_vs_eigenform",
                   "compiled twist matches exp(2 pi i (q_a^2 - c_b^2)) e_b(p_a + q_a) (projective)", prm, 1e-3,
                   [p, n, seed] {
                       auto s = LatticeSpec::balanced(n, 2);
                       return ensemble_projective(s, compiled_twist(s, p), build_dehn_alpha(s, p), 10, seed, 0.3)
                           .residual;
                   }});
    for (int sign : {1, -1})
        out.push_back({sign > 0 ? "dehn.commutes_l_plus" : "dehn.commutes_l_minus",
                       "compiled twist commutes with the length operator (weak form, relative to the largest matrix element)", prm, 1e-3, [p, n, seed, sign] {
                           auto s = LatticeSpec::balanced(n, 2);
                           return weak_commutator(s, compiled_twist(s, p), build_L_alpha(s, p, sign), seed);
                       }});
    const int n4 = 24;
    out.push_back({"dehn.braid_squared",
                   "compiled braiding word squared equals the surrounding twist R3412 R1234 (projective)",
                   {{"b", fmt(p.b)}, {"n_points", std::to_string(n4)}, {"seed", std::to_string(seed)},
                    {"word", format_word(canonical_word(CanonicalWord::BraidingDisk))}},
                   1e-3,
                   [p, seed] {
                       auto s = LatticeSpec::balanced(n4, 4);
                       auto B = to_program(compile(canonical_word(CanonicalWord::BraidingDisk)), s, p);
                       auto rhs = product({build_R(s, p, {2, 3, 0, 1}), build_R(s, p, {0, 1, 2, 3})}, 4);
                       return ensemble_projective(s, product({B, B}, 4), rhs, 10, seed, 0.3, 1.0).residual;
                   }});
}

// ---- spectral ----------------------------------------------------------------------------------

void spectral_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.b);
    const int n = cfg.n_points > 0 ? cfg.n_points : 512;
    const std::vector<double> ss{0.45, 0.7, 1.3}, xs{-1.0, 0.3, 2.0};
    std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"s", "0.45,0.7,1.3"}, {"x", "-1,0.3,2"},
                                           {"epsilon", "1e-4"}};
    for (int which : {1, -1})
        out.push_back({which > 0 ? "spectral.eigen_plus" : "spectral.eigen_minus",
                       "L acting on the kernel gives 2 cosh(2 pi beta s)", prm, 1e-6, [p, ss, xs, which] {
                           double worst = 0;
                           for (double s : ss)
                               for (double x : xs)
                                   worst = std::max(worst, eigen_equation_residual(x, {s, 1e-4, p}, which));
                           return worst;
                       }});
    out.push_back({"spectral.kernel_symmetry", "kernel is even in s", prm, 1e-8, [p, ss, xs] {
                       double worst = 0;
                       for (double s : ss)
                           for (double x : xs) {
                               const cplx a = alpha_kernel_limit(x, {s, 1e-4, p}), b = alpha_kernel_limit(x, {-s, 1e-4, p});
                               worst = std::max(worst, std::abs(a - b) / std::abs(a));
                           }
                       return worst;
                   }});
    out.push_back({"spectral.shift_direction", "fitted shift sign equals the lattice sign (0 when equal)",
                   {{"b", fmt(p.b)}}, 0.5, [p, xs] {
                       const int fit = fit_shift_direction({0.7, 1e-4, p}, xs);
                       const int lat = lattice_shift_direction(LatticeSpec::balanced(256, 1), p);
                       return fit == lat && fit == kShiftDirection ? 0.0 : 1.0;
                   }});
    Memo<std::vector<CompletenessResult>> comp{[p] {
        Packet1D g0, g1{0.3, 0.2}, odd{0, 0, 0.3989422804014327, 1}, g2{-0.4, -0.1, 0.5};
        return completeness_residuals({{g0, g0}, {g1, g2}, {odd, g0}}, p);
    }};
    std::map<std::string, std::string> cp{{"b", fmt(p.b)}, {"pairs", "3"}, {"epsilon", "1e-3"}, {"s_max", "4"}};
    out.push_back({"spectral.completeness", "int nu(s) <f|a_s><a_s|g> ds = <f|g> after eps extrapolation", cp, 1e-2,
                   [comp] {
                       double worst = 0;
                       for (const auto& r : comp.get()) worst = std::max(worst, r.residual);
                       return worst;
                   }});
    out.push_back({"spectral.completeness.extrapolation", "extrapolated residual below the eps residual (ratio)", cp,
                   1.0, [comp] {
                       double worst = 0;
                       for (const auto& r : comp.get()) worst = std::max(worst, r.residual / r.residual_eps);
                       return worst * (1 - 1e-15);
                   }});
    out.push_back({"spectral.weak_orthogonality", "int nu(s) <a_r|a_s> phi(s) ds = phi(r) for a bump phi",
                   {{"b", fmt(p.b)}, {"r", "0.7"}, {"bump_center", "0.7"}, {"bump_width", "0.1"}, {"epsilon", "1e-3"}},
                   5e-2, [p] { return weak_orthogonality(0.7, 0.7, 0.1, 1e-3, p).error; }});
    Memo<LatticeSpectrumReport> lat{[p, n] { return lattice_spectrum_check(LatticeSpec::balanced(n, 1), p); }};
    std::map<std::string, std::string> lp{{"b", fmt(p.b)}, {"n_points", std::to_string(n)}, {"eigenvectors", "10"}};
    out.push_back({"spectral.lattice_lower_bound", "lattice L+ spectrum at least 2 (shortfall 2 - min)", lp, 1e-2,
                   [lat] { return std::max(0.0, 2.0 - lat.get().min_eigenvalue); }});
    out.push_back({"spectral.lattice_twist_phase", "twist acts as exp(2 pi i (s^2 - c_b^2)) on L+ eigenvectors", lp,
                   1e-2, [lat] { return lat.get().max_phase_error; }});
    out.push_back({"spectral.lattice_commutator", "twist commutes with L+ on the lattice (weak form)", lp, 1e-3,
                   [lat] { return lat.get().commutator; }});
}

// ---- groupoid ----------------------------------------------------------------------------------

void groupoid_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const std::uint64_t seed = cfg.seed;
    const std::map<std::string, std::string> fx{{"instances", "fixtures"}};
    auto failures = [](const DecoratedTriangulation& t, const RelationCheck& r) { return relation_holds(t, r) ? 0.0 : 1.0; };
    out.push_back({"groupoid.rho_cubed.fixtures", "rho_i^3 = id (failures)", fx, 0.5, [failures] {
                       double f = 0;
                       for (Fixture x : {Fixture::Flip, Fixture::Pentagon, Fixture::Annulus, Fixture::Disk}) {
                           auto t = fixture(x);
                           for (int i = 1; i <= t.size(); ++i) f += failures(t, relation_rho_cubed(i));
                       }
                       return f;
                   }});
    out.push_back({"groupoid.pentagon.fixtures", "w_jk w_ik w_ij = w_ij w_jk on the pentagon (failures)", fx, 0.5,
                   [failures] { return failures(fixture(Fixture::Pentagon), relation_pentagon(1, 2, 3)); }});
    out.push_back({"groupoid.symmetry.fixtures", "(R_i r_j) w_ij = w_ji (R_i r_j) (failures)", fx, 0.5, [failures] {
                       return failures(fixture(Fixture::Flip), relation_symmetry(1, 2, 2)) +
                              failures(fixture(Fixture::Annulus), relation_symmetry(1, 2, 2));
                   }});
    out.push_back({"groupoid.inversion.fixtures", "w_ji r_i w_ij = (ij) r_i r_j (failures)", fx, 0.5, [failures] {
                       return failures(fixture(Fixture::Flip), relation_inversion(1, 2, 2)) +
                              failures(fixture(Fixture::Annulus), relation_inversion(1, 2, 2));
                   }});
    for (std::string rel : {"rho_cubed", "pentagon", "symmetry", "inversion"})
        out.push_back({"groupoid." + rel + ".random", rel + " on random applicable instances (failures)",
                       {{"instances", "20"}, {"seed", std::to_string(seed)}}, 0.5, [rel, seed] {
                           const auto insts = random_instances(rel, 20, seed);
                           double f = 20.0 - static_cast<double>(insts.size());
                           for (const auto& inst : insts)
                               f += relation_holds(inst.t, inst.relation) ? 0.0 : 1.0;
                           return f;
                       }});
    out.push_back({"groupoid.flip", "flip of the quadrilateral gives the flipped fixture (mismatch)", fx, 0.5, [] {
                       return apply_move(fixture(Fixture::Flip), Move::flip(1, 2)) == fixture(Fixture::FlipResult) ? 0.0
                                                                                                                    : 1.0;
                   }});
    out.push_back({"groupoid.dehn_word", "w12 after the twist word returns the annulus (mismatch)",
                   {{"word", "W12 w12"}}, 0.5, [] {
                       auto t = canned_surface(Surface::AnnulusTwoMarked);
                       MoveWord w = canonical_word(CanonicalWord::DehnTwistAnnulus);
                       w.push_back(Move::flip(1, 2));
                       return apply_word(t, w) == t ? 0.0 : 1.0;
                   }});
    out.push_back({"groupoid.braid_word", "braiding word returns the disk triangulation (mismatch)",
                   {{"word", format_word(canonical_word(CanonicalWord::BraidingDisk))}}, 0.5, [] {
                       auto t = canned_surface(Surface::DiskTwoPunctures);
                       return apply_word(t, canonical_word(CanonicalWord::BraidingDisk)) == t ? 0.0 : 1.0;
                   }});
    out.push_back({"groupoid.braid_compile", "braiding word compiles to P(13)(24) R1234 (mismatch)",
                   {{"expected", "A3^-1 A1 T2,3 T1,3 T2,4 T1,4 A3 A1^-1 P(13)(24)"}}, 0.5, [] {
                       return compile(canonical_word(CanonicalWord::BraidingDisk)).str() ==
                                      "A3^-1 A1 T2,3 T1,3 T2,4 T1,4 A3 A1^-1 P(13)(24)"
                                  ? 0.0
                                  : 1.0;
                   }});
    out.push_back({"groupoid.euler", "annulus chi = 0 and disk chi = 1 (absolute error)", {}, 0.5, [] {
                       return std::abs(canned_surface(Surface::AnnulusTwoMarked).euler_characteristic()) +
                              std::abs(canned_surface(Surface::DiskTwoPunctures).euler_characteristic() - 1);
                   }});
}

// ---- qgroup ------------------------------------------------------------------------------------

void qgroup_checks(const SuiteConfig& cfg, std::vector<Check>& out) {
    const ModularParameter p = ModularParameter::make(cfg.qgroup_b);
    const int n = cfg.n_points > 0 ? cfg.n_points : 128;
    const std::uint64_t seed = cfg.seed;
    std::map<std::string, std::string> prm{{"b", fmt(p.b)}, {"n_points", std::to_string(n)},
                                           {"seed", std::to_string(seed)}, {"form", "weak"}};
    using Rs = std::vector<RelationResidual>;
    auto add = [&](const std::string& prefix, const std::vector<std::string>& names, Memo<Rs> m,
                   const std::map<std::string, std::string>& params) {
        for (std::size_t k = 0; k < names.size(); ++k)
            out.push_back({prefix + (k < 9 ? "0" : "") + std::to_string(k + 1), names[k], params, 1e-3, [m, k] { return m.get().at(k).residual; }});
    };
    add("qgroup.algebra.",
        {"[g12,g21] = 0", "[g12,f12] = -ib f12", "[g21,f21] = -ib f21", "[g21,f12] = ib f12", "[g12,f21] = ib f21",
         "[f12,f21] = (q - 1/q)(K12 - K21)"},
        Memo<Rs>{[p, n, seed] { return proposition1_residuals(LatticeSpec::balanced(n, 2), p, 10, seed); }}, prm);
    add("qgroup.uq.", {"KE = qEK", "KF = q^-1 FK", "[E,F] = -(K^2 - K^-2)/(q - 1/q)", "K K^-1 = 1"},
        Memo<Rs>{[p, n, seed] { return uq_residuals(LatticeSpec::balanced(n, 2), p, 10, seed); }}, prm);
    add("qgroup.beta.",
        {"[z,p] = 0", "[z,q] = 0", "[p,q] = 1/(2 pi i)", "g12 = z + p", "g21 = z - p", "f12 in beta variables",
         "f21 in beta variables", "g12 and g21 rebuilt from beta forms (structural)"},
        Memo<Rs>{[p, n, seed] { return beta_residuals(LatticeSpec::balanced(n, 2), p, 10, seed); }}, prm);
    add("qgroup.heisenberg_coproduct.",
        {"Ad(T^-1)(1 x p) = p1 + p2", "Ad(T^-1)(1 x exp(2 pi b q)) = exp(2 pi b (q1 + p2)) + exp(2 pi b q2)",
         "Ad(T)(q x 1) = q1 + q2", "Ad(T)(exp(2 pi b (p - q)) x 1) = exp(2 pi b (p1 - q1 - q2)) + exp(2 pi b (p2 - q2))"},
        Memo<Rs>{[p, n, seed] { return heisenberg_coproduct_residuals(LatticeSpec::balanced(n, 2), p, 10, seed); }},
        prm);
    const int n4 = 24;
    const std::vector<std::string> cop{"Delta g12 primitive",
                                       "Delta g21 primitive",
                                       "Delta K12 = K12 x K12",
                                       "Delta: [g12,g21] = 0",
                                       "Delta: [g12,f12] = -ib f12",
                                       "Delta: [g21,f21] = -ib f21",
                                       "Delta: [g21,f12] = ib f12",
                                       "Delta: [g12,f21] = ib f21",
                                       "Delta: [f12,f21] = (q - 1/q)(K12 - K21)",
                                       "Delta_phi: [g12,g21] = 0",
                                       "Delta_phi: [g12,f12] = -ib f12",
                                       "Delta_phi: [g21,f21] = -ib f21",
                                       "Delta_phi: [g21,f12] = ib f12",
                                       "Delta_phi: [g12,f21] = ib f21",
                                       "Delta_phi: [f12,f21] = (q - 1/q)(K12 - K21)"};
    for (auto [tag, phi] : {std::pair<const char*, double>{"phi0", 0.0}, {"phi_half_pi", kPi / 2}}) {
        auto pp = prm;
        pp["n_points"] = std::to_string(n4);
        pp["n_factors"] = "4";
        pp["phi"] = fmt(phi);
        std::vector<std::string> names = cop;
        if (phi == 0.0) names.resize(9);  // Delta_phi coincides with Delta
        add(std::string("qgroup.coproduct.") + tag + ".", names, Memo<Rs>{[p, seed, phi = phi] {
                return coproduct_twist_check(LatticeSpec::balanced(n4, 4), p, phi, 2, seed);
            }},
            pp);
    }
    const std::vector<int> kn{8, 12, 32};
    Memo<std::vector<std::pair<double, double>>> rk{[p, seed, kn] {
        std::vector<std::pair<double, double>> r;
        for (int N : kn) {
            auto s4 = LatticeSpec::balanced(N, 4);
            auto K = build_R_kernel(s4, p);
            const double proj = ensemble_projective(s4, K, build_R(s4, p), 10, seed, 0.3, 1.0).residual;
            auto fz = function_of_form(s4, build_beta(s4, {0, 1}).z2, [](double y) { return std::exp(cplx(0, 0.35 * y)); });
            const double zi = ensemble_residual(s4, product({K, fz}, 4), product({fz, K}, 4), 10, seed, 0.3, 1.0);
            r.push_back({proj, zi});
        }
        return r;
    }};
    for (std::size_t k = 0; k < kn.size(); ++k) {
        std::map<std::string, std::string> kp{{"b", fmt(p.b)}, {"n_points", std::to_string(kn[k])},
                                              {"seed", std::to_string(seed)}, {"n_factors", "4"}};
        const std::string tag = (kn[k] < 10 ? "n0" : "n") + std::to_string(kn[k]);
        out.push_back({"qgroup.r_kernel." + tag, "kernel form of R equals R (projective)", kp, 5e-2,
                       [rk, k] { return rk.get()[k].first; }});
        out.push_back({"qgroup.r_kernel.z_sector." + tag, "kernel form commutes with exp(0.7 i z_beta1)", kp, 5e-2,
                       [rk, k] { return rk.get()[k].second; }});
    }
    out.push_back({"qgroup.r_kernel.refinement", "kernel form residual falls over 8, 12, 32 points (step ratio)",
                   {{"b", fmt(p.b)}, {"n_points", "8,12,32"}, {"seed", std::to_string(seed)}}, 1.0, [rk] {
                       std::vector<double> r;
                       for (const auto& x : rk.get()) r.push_back(x.first);
                       return step_ratio(r);
                   }});
    out.push_back({"qgroup.r_kernel.yang_baxter", "kernel form satisfies Yang-Baxter at 8 points",
                   {{"b", fmt(p.b)}, {"n_points", "8"}, {"seed", std::to_string(seed)}, {"n_factors", "6"}}, 5e-2,
                   [p, seed] {
                       auto s6 = LatticeSpec::balanced(8, 6);
                       auto R1234 = build_R_kernel(s6, p, {0, 1, 2, 3}), R1256 = build_R_kernel(s6, p, {0, 1, 4, 5}),
                            R3456 = build_R_kernel(s6, p, {2, 3, 4, 5});
                       return ensemble_residual(s6, product({R1234, R1256, R3456}, 6),
                                                product({R3456, R1256, R1234}, 6), 10, seed, 0.3, 1.0);
                   }});
}

std::vector<Check> collect(const SuiteConfig& cfg, Suite s) {
    std::vector<Check> out;
    switch (s) {
        case Suite::Qdilog: qdilog_checks(cfg, out); break;
        case Suite::Ramanujan: ramanujan_checks(cfg, out); break;
        case Suite::System: system_checks(cfg, out); break;
        case Suite::Pentagon: pentagon_checks(cfg, out); break;
        case Suite::YangBaxter: yang_baxter_checks(cfg, out); break;
        case Suite::Dehn: dehn_checks(cfg, out); break;
        case Suite::Spectral: spectral_checks(cfg, out); break;
        case Suite::Groupoid: groupoid_checks(cfg, out); break;
        case Suite::Qgroup: qgroup_checks(cfg, out); break;
        case Suite::All: {
            SuiteConfig c = cfg;
            c.n_points = 0;
            for (int k = 0; k < static_cast<int>(Suite::All); ++k) {
                auto part = collect(c, static_cast<Suite>(k));
                out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
            }
            break;
        }
    }
    return out;
}

}  // namespace

Suite parse_suite(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(Suite::All); ++k)
        if (name == kSuiteNames[k]) return static_cast<Suite>(k);
    throw Error(ErrorKind::InvalidParameter, "unknown suite '" + name + "'");
}

std::string suite_name(Suite s) { return kSuiteNames[static_cast<int>(s)]; }

std::vector<std::string> suite_check_ids(Suite s) {
    SuiteConfig cfg;
    cfg.suite = s;
    std::vector<std::string> ids;
    for (const auto& c : collect(cfg, s)) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<CheckRecord> run_suite(const SuiteConfig& cfg) {
    auto checks = collect(cfg, cfg.suite);
    for (const auto& [key, v] : cfg.tolerances) {
        if (!(v > 0)) throw Error(ErrorKind::InvalidParameter, "tolerance for '" + key + "' must be positive");
        if (std::none_of(checks.begin(), checks.end(), [&](const Check& c) { return c.id == key; }))
            throw Error(ErrorKind::InvalidParameter, "no check named '" + key + "' in this suite");
    }
    if (!cfg.only.empty())
        std::erase_if(checks, [&](const Check& c) {
            return std::none_of(cfg.only.begin(), cfg.only.end(),
                                [&](const std::string& pre) { return c.id.rfind(pre, 0) == 0; });
        });
    std::sort(checks.begin(), checks.end(), [](const Check& a, const Check& b) { return a.id < b.id; });
    std::vector<CheckRecord> out;
    for (auto& c : checks) {
        CheckRecord r{c.id, c.relation, c.params, 0.0, c.tolerance, false};
        if (auto it = cfg.tolerances.find(c.id); it != cfg.tolerances.end()) r.tolerance = it->second;
        try {
            r.residual = c.run();
        } catch (const Error& e) {
            r.residual = std::numeric_limits<double>::infinity();
            r.params["error"] = e.what();
        }
        r.pass = std::isfinite(r.residual) && r.residual <= r.tolerance;
        out.push_back(std::move(r));
    }
    return out;
}

std::string report_json(const std::vector<CheckRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["check_id"] = r.check_id;
        j["relation"] = r.relation;
        j["params"] = r.params;
        j["residual"] = std::isfinite(r.residual) ? nlohmann::ordered_json(r.residual) : nlohmann::ordered_json("inf");
        j["tolerance"] = r.tolerance;
        j["pass"] = r.pass;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::string report_csv(const std::vector<CheckRecord>& records) {
    std::ostringstream os;
    os << "check_id,relation,residual,tolerance,pass\n" << std::setprecision(17);
    for (const auto& r : records)
        os << r.check_id << ",\"" << r.relation << "\"," << r.residual << "," << r.tolerance << ","
           << (r.pass ? "true" : "false") << "\n";
    return os.str();
}

cplx parse_complex(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
    auto bad = [&] { return Error(ErrorKind::InvalidParameter, "cannot parse complex number '" + text + "'"); };
    if (t.empty()) throw bad();
    auto real_part = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw bad();
        }
        if (used != s.size()) throw bad();
        return v;
    };
    if (t.back() != 'i') return real_part(t);
    t.pop_back();
    // split at the last sign that is not an exponent sign
    std::size_t cut = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;)
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            cut = k;
            break;
        }
    std::string re = cut == std::string::npos ? "" : t.substr(0, cut);
    std::string im = cut == std::string::npos ? t : t.substr(cut);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    return {re.empty() ? 0.0 : real_part(re), real_part(im)};
}

std::vector<cplx> strip_points(const ModularParameter& p, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(-2.0, 2.0), im(-0.6, 0.6);
    const double h = std::abs(p.c_b.imag());
    std::vector<cplx> z(count);
    for (auto& x : z) x = cplx(re(rng), im(rng) * h);
    return z;
}

double inversion_residual(cplx z, const ModularParameter& p) {
    return std::abs(eb(z, p) * eb(-z, p) / inversion_factor(z, p) - 1.0);
}

double shift_residual(cplx z, const ModularParameter& p, int sign) {
    const cplx beta = sign > 0 ? p.b : 1.0 / p.b;
    const cplx lhs = eb(z - kI * beta / 2.0, p);
    const cplx rhs = (1.0 + std::exp(2.0 * kPi * beta * z)) * eb(z + kI * beta / 2.0, p);
    return std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
}

double unitarity_residual(cplx z, const ModularParameter& p) {
    return std::abs(std::conj(eb(z, p)) * eb(std::conj(z), p) - 1.0);
}

double duality_residual(cplx z, const ModularParameter& p) {
    const ModularParameter q = ModularParameter::make(1.0 / p.b);
    const cplx a = eb(z, p), b = eb(z, q);
    return std::abs(a - b) / std::abs(a);
}

double strategy_residual(cplx z, const ModularParameter& p) {
    const cplx a = eb_integral(z, p);
    int trunc = 64;
    ProductValue v = eb_product(z, p, trunc);
    while (v.tail_bound > 1e-17 && trunc < (1 << 20)) v = eb_product(z, p, trunc *= 2);
    return std::abs(a - v.value) / std::abs(a);
}

}  // namespace qteich
