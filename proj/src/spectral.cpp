#include "qteich/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qteich/error.hpp"
#include "qteich/operators.hpp"
#include "qteich/quadrature.hpp"

namespace qteich {

namespace {

double real_b(const ModularParameter& p) {
    if (std::abs(p.b.imag()) > 1e-12) throw Error(ErrorKind::InvalidParameter, "spectral checks need real b");
    return p.b.real();
}

// Gauss-Legendre nodes on [a, b], panels refined geometrically toward the singular points.
void graded_rule(double a, double b, std::vector<double> pts, double eps, int nodes, double max_panel,
                 std::vector<double>& xs, std::vector<double>& ws) {
    std::vector<double> edges{a, b};
    pts.erase(std::remove_if(pts.begin(), pts.end(), [&](double t) { return t <= a || t >= b; }), pts.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [&](double u, double v) { return v - u < eps / 4; }), pts.end());
    for (double t : pts) edges.push_back(t);
    std::sort(edges.begin(), edges.end());
    std::vector<double> all;
    auto singular = [&](double t) { return std::find(pts.begin(), pts.end(), t) != pts.end(); };
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        double u = edges[k], v = edges[k + 1], half = (v - u) / 2;
        std::vector<double> e{u, v};
        for (double d = eps / 2; d < half; d *= 2) {
            if (singular(u)) e.push_back(u + d);
            if (singular(v)) e.push_back(v - d);
        }
        std::sort(e.begin(), e.end());
        for (std::size_t j = 0; j + 1 < e.size(); ++j) {
            int m = std::max(1, static_cast<int>(std::ceil((e[j + 1] - e[j]) / max_panel)));
            for (int i = 0; i < m; ++i) all.push_back(e[j] + (e[j + 1] - e[j]) * i / m);
        }
    }
    all.push_back(b);
    const GaussRule& g = gauss_legendre(nodes);
    for (std::size_t k = 0; k + 1 < all.size(); ++k) {
        double c = (all[k] + all[k + 1]) / 2, h = (all[k + 1] - all[k]) / 2;
        for (int i = 0; i < nodes; ++i) {
            xs.push_back(c + h * g.x[i]);
            ws.push_back(h * g.w[i]);
        }
    }
}

void uniform_rule(double a, double b, double panel, int nodes, std::vector<double>& xs, std::vector<double>& ws) {
    graded_rule(a, b, {}, 1.0, nodes, panel, xs, ws);
}

double packet_tail_mass(const Packet1D& f, double a) {
    double m = std::erfc(a);
    if (f.order == 1) m += 2 * a / std::sqrt(kPi) * std::exp(-a * a);
    return m;
}

}  // namespace

double spectral_measure(double s, const ModularParameter& p) {
    const double b = real_b(p);
    return 4 * std::sinh(2 * kPi * b * s) * std::sinh(2 * kPi * s / b);
}

cplx alpha_kernel(cplx x, const EigenKernelParams& k) {
    const ModularParameter& p = k.p;
    if (!(k.epsilon > 0)) throw Error(ErrorKind::InvalidParameter, "epsilon must be positive");
    const cplx num_arg = k.s + x + p.c_b - kI * k.epsilon;
    const cplx den_arg = k.s - x - p.c_b + kI * k.epsilon;
    double dn = 0, dd = 0;
    nearest_pole(num_arg, p, &dn);
    nearest_pole(den_arg, p, &dd);
    if (dn < 1e-10 || dd < 1e-10) throw Error(ErrorKind::PoleProximity, "kernel argument on a pole or zero");
    return eb(num_arg, p) / eb(den_arg, p) * std::exp(-2.0 * kPi * kI * (x + p.c_b) * k.s);
}

cplx alpha_kernel_limit(cplx x, const EigenKernelParams& k, int levels) {
    std::vector<cplx> t(levels);
    std::vector<double> e(levels);
    for (int i = 0; i < levels; ++i) {
        EigenKernelParams ki = k;
        ki.epsilon = k.epsilon / std::pow(2.0, i);
        e[i] = ki.epsilon;
        t[i] = alpha_kernel(x, ki);
    }
    // Neville's scheme evaluated at eps = 0.
    for (int m = 1; m < levels; ++m)
        for (int i = levels - 1; i >= m; --i) t[i] = (e[i - m] * t[i] - e[i] * t[i - 1]) / (e[i - m] - e[i]);
    return t[levels - 1];
}

double eigen_equation_residual(double x, const EigenKernelParams& k, int which, int sigma) {
    const double b = real_b(k.p);
    const double beta = which > 0 ? b : 1.0 / b;
    const cplx psi = alpha_kernel_limit(x, k);
    const cplx shifted = alpha_kernel_limit(cplx(x, -sigma * beta), k);
    const cplx lhs = 2 * std::cosh(2 * kPi * beta * x) * psi + shifted;
    return std::abs(lhs - 2 * std::cosh(2 * kPi * beta * k.s) * psi) / std::abs(psi);
}

int fit_shift_direction(const EigenKernelParams& k, const std::vector<double>& xs) {
    double best = 0;
    int sign = 0;
    for (int sg : {1, -1}) {
        double r = 0;
        for (double x : xs) r += eigen_equation_residual(x, k, 1, sg);
        if (sign == 0 || r < best) {
            best = r;
            sign = sg;
        }
    }
    return sign;
}

int lattice_shift_direction(const LatticeSpec& spec, const ModularParameter& p) {
    const double b = real_b(p);
    const int N = spec.n_points;
    std::vector<cplx> ek(N);
    for (int l = 0; l < N; ++l) ek[l] = safe_exp(2 * kPi * b * spec.k(l));
    LatticeSpec one{N, spec.spacing, 1};
    StateVector g{one, std::vector<cplx>(N)};
    auto gauss = [](cplx x) { return std::exp(-kPi * x * x); };
    for (int j = 0; j < N; ++j) g.amplitudes[j] = gauss(spec.x(j));
    StateVector out = apply_program(OperatorProgram{1, {DiagMomentum{0, ek}}}, g);
    double err[2] = {0, 0};
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < 2; ++i) {
            const int sg = i == 0 ? 1 : -1;
            err[i] += std::norm(out.amplitudes[j] - gauss(cplx(spec.x(j), -sg * b)));
        }
    return err[0] <= err[1] ? 1 : -1;
}

cplx packet_value(const Packet1D& f, cplx x) {
    const double w = f.width;
    const cplx d = x - f.center;
    cplx v = std::pow(kPi * w * w, -0.25) * std::exp(-d * d / (2 * w * w) + 2.0 * kPi * kI * f.momentum * x);
    if (f.order == 1) v *= std::sqrt(2.0) * d / w;
    return v;
}

cplx packet_inner(const Packet1D& f, const Packet1D& g) {
    const double lo = std::min(f.center - 12 * f.width, g.center - 12 * g.width);
    const double hi = std::max(f.center + 12 * f.width, g.center + 12 * g.width);
    std::vector<double> xs, ws;
    uniform_rule(lo, hi, std::min(f.width, g.width) / 2, 16, xs, ws);
    cplx acc = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += ws[i] * std::conj(packet_value(f, xs[i])) * packet_value(g, xs[i]);
    return acc;
}

std::vector<std::vector<cplx>> overlap_table(const std::vector<Packet1D>& fs, const std::vector<double>& s,
                                             double epsilon, const ModularParameter& p, const OverlapConfig& cfg) {
    if (fs.empty()) return std::vector<std::vector<cplx>>(s.size());
    double lo = 1e300, hi = -1e300;
    for (const auto& f : fs) {
        if (packet_tail_mass(f, cfg.half_window) > cfg.boundary_tol)
            throw Error(ErrorKind::BoundaryMass, "packet mass outside the overlap window");
        lo = std::min(lo, f.center - cfg.half_window * f.width);
        hi = std::max(hi, f.center + cfg.half_window * f.width);
    }
    std::vector<double> xs, ws;
    uniform_rule(lo, hi, cfg.panel_width, cfg.nodes, xs, ws);
    const std::size_t nx = xs.size();
    // conj(f(x)) continued analytically to x - i depth.
    std::vector<std::vector<cplx>> fbar(fs.size(), std::vector<cplx>(nx));
    for (std::size_t a = 0; a < fs.size(); ++a)
        for (std::size_t i = 0; i < nx; ++i)
            fbar[a][i] = ws[i] * std::conj(packet_value(fs[a], cplx(xs[i], cfg.depth)));
    std::vector<std::vector<cplx>> out(s.size(), std::vector<cplx>(fs.size()));
    parallel_for(static_cast<int>(s.size()), [&](int m) {
        EigenKernelParams k{s[m], epsilon, p};
        std::vector<cplx> psi(nx);
        for (std::size_t i = 0; i < nx; ++i) psi[i] = alpha_kernel(cplx(xs[i], -cfg.depth), k);
        for (std::size_t a = 0; a < fs.size(); ++a) {
            cplx acc = 0;
            for (std::size_t i = 0; i < nx; ++i) acc += fbar[a][i] * psi[i];
            out[m][a] = acc;
        }
    });
    return out;
}

cplx overlap(const Packet1D& f, const EigenKernelParams& k, const OverlapConfig& cfg) {
    return overlap_table({f}, {k.s}, k.epsilon, k.p, cfg)[0][0];
}

std::vector<CompletenessResult> completeness_residuals(const std::vector<std::pair<Packet1D, Packet1D>>& pairs,
                                                       const ModularParameter& p, const CompletenessConfig& cfg) {
    std::vector<Packet1D> packets;
    auto index = [&](const Packet1D& f) {
        for (std::size_t i = 0; i < packets.size(); ++i) {
            const auto& g = packets[i];
            if (g.center == f.center && g.momentum == f.momentum && g.width == f.width && g.order == f.order)
                return static_cast<int>(i);
        }
        packets.push_back(f);
        return static_cast<int>(packets.size() - 1);
    };
    std::vector<std::pair<int, int>> idx;
    for (const auto& [f, g] : pairs) idx.push_back({index(f), index(g)});

    std::vector<double> ss, sw;
    uniform_rule(0.0, cfg.s_max, cfg.s_max / cfg.panels, cfg.nodes, ss, sw);
    std::vector<double> with_end = ss;
    with_end.push_back(cfg.s_max);

    std::vector<CompletenessResult> res(pairs.size());
    std::vector<cplx> totals[2];
    for (int level = 0; level < 2; ++level) {
        const double eps = cfg.epsilon / (level == 0 ? 1.0 : 2.0);
        auto table = overlap_table(packets, with_end, eps, p, cfg.overlap);
        totals[level].assign(pairs.size(), 0.0);
        for (std::size_t m = 0; m < ss.size(); ++m) {
            const double nu = spectral_measure(ss[m], p);
            for (std::size_t q = 0; q < pairs.size(); ++q)
                totals[level][q] += sw[m] * nu * table[m][idx[q].first] * std::conj(table[m][idx[q].second]);
        }
        if (level == 0)
            for (std::size_t q = 0; q < pairs.size(); ++q)
                res[q].tail = spectral_measure(cfg.s_max, p) *
                              std::abs(table.back()[idx[q].first] * std::conj(table.back()[idx[q].second]));
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        auto& r = res[q];
        if (r.tail > cfg.tail_tol) throw Error(ErrorKind::TailTooLarge, "spectral integrand at s_max " + std::to_string(r.tail));
        r.exact = packet_inner(pairs[q].first, pairs[q].second);
        r.at_eps = totals[0][q];
        r.at_half_eps = totals[1][q];
        r.extrapolated = 2.0 * r.at_half_eps - r.at_eps;
        const double den = 1 + std::abs(r.exact);
        r.residual_eps = std::abs(r.at_eps - r.exact) / den;
        r.residual_half_eps = std::abs(r.at_half_eps - r.exact) / den;
        r.residual = std::abs(r.extrapolated - r.exact) / den;
    }
    return res;
}

cplx kernel_inner(double r, double s, double epsilon, const ModularParameter& p, const OrthogonalityConfig& cfg) {
    std::vector<double> xs, ws;
    graded_rule(-cfg.half_window, cfg.half_window, {-r, r, -s, s}, epsilon, cfg.nodes, cfg.max_panel, xs, ws);
    EigenKernelParams kr{r, epsilon, p}, ks{s, epsilon, p};
    std::vector<cplx> part(xs.size());
    parallel_for(static_cast<int>(xs.size()), [&](int i) {
        part[i] = ws[i] * std::conj(alpha_kernel(xs[i], kr)) * alpha_kernel(xs[i], ks);
    });
    cplx acc = 0;
    for (auto v : part) acc += v;
    return acc;
}

WeakFormResult weak_orthogonality(double r, double c, double sigma, double epsilon, const ModularParameter& p,
                                  const OrthogonalityConfig& cfg) {
    auto phi = [&](double s) { return std::exp(-(s - c) * (s - c) / (2 * sigma * sigma)); };
    const double s_lo = std::max(0.0, c - 8 * sigma), s_hi = c + 8 * sigma;
    std::vector<double> xs, ws;
    graded_rule(-cfg.half_window, cfg.half_window, {-r, r}, epsilon, cfg.nodes, cfg.max_panel, xs, ws);
    EigenKernelParams kr{r, epsilon, p};
    std::vector<cplx> part(xs.size());
    parallel_for(static_cast<int>(xs.size()), [&](int i) {
        // Phi(x) = int nu(s) phi(s) <x|alpha_s> ds, singular near s = |x|.
        std::vector<double> ss, sw;
        graded_rule(s_lo, s_hi, {std::abs(xs[i])}, epsilon, cfg.nodes, cfg.max_panel, ss, sw);
        cplx big_phi = 0;
        for (std::size_t m = 0; m < ss.size(); ++m)
            big_phi += sw[m] * spectral_measure(ss[m], p) * phi(ss[m]) * alpha_kernel(xs[i], {ss[m], epsilon, p});
        part[i] = ws[i] * std::conj(alpha_kernel(xs[i], kr)) * big_phi;
    });
    WeakFormResult res{r, 0.0, phi(r), 0.0};
    for (auto v : part) res.value += v;
    res.error = std::abs(res.value - res.expected);
    return res;
}

LatticeSpectrumReport lattice_spectrum_check(const LatticeSpec& spec, const ModularParameter& p, int interior,
                                             double cap) {
    if (spec.n_factors != 1) throw Error(ErrorKind::SpecMismatch, "spectral check runs on one factor");
    if (spec.n_points > 2048) throw Error(ErrorKind::InvalidParameter, "dense diagonalization limited to 2048 points");
    const double b = real_b(p);
    const int N = spec.n_points;
    OpSum L = build_L_single(spec, p, +1, 0, cap);
    OperatorProgram D = build_dehn_single(spec, p, 0);

    Eigen::MatrixXcd M(N, N);
    for (int c = 0; c < N; ++c) {
        StateVector e{spec, std::vector<cplx>(N, 0.0)};
        e.amplitudes[c] = 1.0;
        StateVector col = L.apply(e);
        for (int r = 0; r < N; ++r) M(r, c) = col.amplitudes[r];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (M + M.adjoint()));
    if (es.info() != Eigen::Success) throw Error(ErrorKind::DiagonalizationFailure, "dense eigensolver");

    LatticeSpectrumReport rep{};
    rep.n_points = N;
    rep.min_eigenvalue = es.eigenvalues()(0);
    rep.max_phase_error = 0;
    const double h = spec.spacing;
    for (int c = 0; c < std::min(interior, N); ++c) {
        const double lam = es.eigenvalues()(c);
        const double s = std::acosh(std::max(lam, 2.0) / 2) / (2 * kPi * b);
        StateVector v{spec, std::vector<cplx>(N)};
        for (int r = 0; r < N; ++r) v.amplitudes[r] = es.eigenvectors()(r, c);
        const cplx dv = v.inner(apply_program(D, v));
        const cplx target = std::exp(2.0 * kPi * kI * (s * s - p.c_b * p.c_b));
        const double err = std::abs(std::arg(dv / target));
        cplx ov = 0;
        double psi_norm = 0;
        for (int j = 0; j < N; ++j) {
            cplx psi;
            try {
                psi = alpha_kernel(spec.x(j), {s, h, p});
            } catch (const Error&) {
                psi = 0.0;
            }
            ov += std::conj(v.amplitudes[j]) * psi;
            psi_norm += std::norm(psi);
        }
        rep.eigenvalues.push_back(lam);
        rep.s_values.push_back(s);
        rep.phase_errors.push_back(err);
        rep.d_moduli.push_back(std::abs(dv));
        rep.kernel_match.push_back(std::abs(ov) / std::sqrt(psi_norm));
        rep.max_phase_error = std::max(rep.max_phase_error, err);
    }

    // D v has momentum tails ~ exp(-2 pi |k|), on the edge of the domain of exp(2 pi p), so the
    // commutator is taken between packets: <w|D L v> - <L w|D v>.
    std::vector<StateVector> packets;
    for (const auto& g : packet_ensemble(spec, 5, 11)) packets.push_back(gaussian_packet(spec, g));
    std::vector<StateVector> lp, dp;
    for (const auto& v : packets) {
        lp.push_back(L.apply(v));
        dp.push_back(apply_program(D, v));
    }
    rep.commutator = 0;
    rep.strong_commutator = 0;
    for (std::size_t a = 0; a < packets.size(); ++a) {
        const StateVector dlv = apply_program(D, lp[a]);
        for (std::size_t c = 0; c < packets.size(); ++c) {
            const cplx lhs = packets[c].inner(dlv), rhs = lp[c].inner(dp[a]);
            rep.commutator = std::max(rep.commutator, std::abs(lhs - rhs) / (lp[c].norm() * lp[a].norm()));
        }
        const StateVector ldv = L.apply(dp[a]);
        double num = 0;
        for (int j = 0; j < N; ++j) num += std::norm(dlv.amplitudes[j] - ldv.amplitudes[j]);
        rep.strong_commutator += std::sqrt(num) / lp[a].norm() / packets.size();
    }
    rep.shift_direction = lattice_shift_direction(spec, p);
    return rep;
}

}  // namespace qteich
