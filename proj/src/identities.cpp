#include "qteich/identities.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qteich/error.hpp"
#include "qteich/quadrature.hpp"

namespace qteich {

namespace {

struct Segment {
    cplx a, b;
};

cplx integrand(cplx x, const RamanujanParams& r, const ModularParameter& p, const QuadratureConfig& qc) {
    return eb(x + r.u, p, qc) / eb(x + r.v, p, qc) * std::exp(2.0 * kPi * kI * r.w * x);
}

double wrap_pi(double a) {
    while (a > kPi) a -= 2 * kPi;
    while (a <= -kPi) a += 2 * kPi;
    return a;
}

// Height of an x-monotone polyline at real abscissa X.
double height(const std::vector<cplx>& poly, double X) {
    if (X <= poly.front().real()) {
        const cplx d = poly[1] - poly[0];
        return poly[0].imag() + (X - poly[0].real()) * d.imag() / d.real();
    }
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const cplx a = poly[i], b = poly[i + 1];
        if (X <= b.real() || i + 2 == poly.size()) {
            const double dx = b.real() - a.real();
            if (std::abs(dx) < 1e-300) return std::max(a.imag(), b.imag());
            return a.imag() + (X - a.real()) * (b.imag() - a.imag()) / dx;
        }
    }
    return poly.back().imag();
}

double seg_distance(cplx z, cplx a, cplx b) {
    const cplx d = b - a;
    double t = ((z - a) * std::conj(d)).real() / std::norm(d);
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * d));
}

}  // namespace

bool in_strict_domain(const RamanujanParams& r, const ModularParameter& p) {
    return (r.v + p.c_b).imag() > 0 && (-r.u + p.c_b).imag() > 0 && (r.v - r.u).imag() < r.w.imag() &&
           r.w.imag() < 0;
}

bool in_relaxed_domain(const RamanujanParams& r, const ModularParameter& p) {
    const double lim = kPi - std::arg(p.b);
    for (cplx z : {r.w, r.v - r.u - r.w, r.u - r.v - 2.0 * p.c_b}) {
        if (std::abs(z) == 0.0) return false;
        if (!(std::abs(std::arg(kI * z)) < lim)) return false;
    }
    return true;
}

RamanujanDomain classify(const RamanujanParams& r, const ModularParameter& p) {
    if (in_strict_domain(r, p)) return RamanujanDomain::Strict;
    if (in_relaxed_domain(r, p)) return RamanujanDomain::Relaxed;
    std::ostringstream os;
    os << "(u,v,w)=(" << r.u << "," << r.v << "," << r.w << ") outside both domains";
    throw Error(ErrorKind::DomainViolation, os.str());
}

std::pair<cplx, cplx> ramanujan_closed(const RamanujanParams& r, const ModularParameter& p,
                                       const QuadratureConfig& qc) {
    classify(r, p);
    const cplx c = p.c_b;
    const cplx u = r.u, v = r.v, w = r.w;
    auto den = [&](cplx z) {
        const cplx e = eb(z, p, qc);
        if (std::abs(e) < 1e-12) throw Error(ErrorKind::PoleProximity, "zero of e_b in a denominator");
        return e;
    };
    const cplx k = kI * kPi * (1.0 - 4.0 * c * c) / 12.0;
    const cplx f1 = eb(u - v - c, p, qc) * eb(w + c, p, qc) / den(u - v + w - c) *
                    std::exp(-2.0 * kPi * kI * w * (v + c) + k);
    const cplx f2 = eb(v - u - w + c, p, qc) / (den(v - u + c) * den(-w - c)) *
                    std::exp(-2.0 * kPi * kI * w * (u - c) - k);
    return {f1, f2};
}

IntegralValue ramanujan_integral(const RamanujanParams& r, const ModularParameter& p,
                                 const RamanujanConfig& cfg) {
    QuadratureConfig qc = cfg.qdilog;
    qc.continuation_depth_max = std::max(qc.continuation_depth_max, 512);
    const cplx far_right = r.w + r.u - r.v;  // integrand ~ exp(2 pi i far_right x) as Re x -> +inf

    IntegralValue out{};
    std::vector<cplx> kinks;
    cplx dL, dR;
    double dmin;
    if (cfg.path == PathChoice::RealLine) {
        if (!(r.w.imag() < 0) || !(far_right.imag() > 0))
            throw Error(ErrorKind::NonDecayingTail, "integrand does not decay along the real line");
        if (!in_strict_domain(r, p))
            throw Error(ErrorKind::DomainViolation, "real-line path needs the strict domain");
    }
    out.domain = classify(r, p);
    const cplx Pu = p.c_b - r.u;   // apex of the upward pole lattice of e_b(x+u)
    const cplx Zv = -p.c_b - r.v;  // apex of the downward zero lattice of e_b(x+v)
    if (out.domain == RamanujanDomain::Strict &&
        (cfg.path == PathChoice::RealLine || cfg.path == PathChoice::Auto)) {
        kinks = {cplx(0.0, 0.0)};
        dL = -1.0;
        dR = 1.0;
        dmin = std::min(Pu.imag(), -Zv.imag());
    } else {
        const double ab = std::arg(p.b);
        const double m = cfg.ray_margin;
        // Left end: arg in (pi/2 + ab, 3pi/2 - ab); right end: (-pi/2 + ab, pi/2 - ab).
        double phiL = wrap_pi(kPi / 2 - std::arg(r.w));
        if (phiL < 0) phiL += 2 * kPi;
        phiL = std::clamp(phiL, kPi / 2 + ab + m, 3 * kPi / 2 - ab - m);
        double phiR = wrap_pi(kPi / 2 - std::arg(far_right));
        phiR = std::clamp(phiR, -kPi / 2 + ab + m, kPi / 2 - ab - m);
        dL = std::polar(1.0, phiL);
        dR = std::polar(1.0, phiR);
        const double delta = cfg.kink_offset;
        kinks = {Pu - kI * delta, Zv + kI * delta};
        std::sort(kinks.begin(), kinks.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
        // Separation check against both lattices.
        std::vector<cplx> poly;
        poly.push_back(kinks.front() + 50.0 * dL);
        for (cplx k : kinks) poly.push_back(k);
        poly.push_back(kinks.back() + 50.0 * dR);
        dmin = 1e300;
        for (int mm = 0; mm <= 30; ++mm)
            for (int nn = 0; nn <= 30; ++nn) {
                const cplx off = kI * (static_cast<double>(mm) * p.b + static_cast<double>(nn) / p.b);
                const cplx pole = Pu + off, zero = Zv - off;
                for (size_t i = 0; i + 1 < poly.size(); ++i)
                    dmin = std::min({dmin, seg_distance(pole, poly[i], poly[i + 1]),
                                     seg_distance(zero, poly[i], poly[i + 1])});
                if (!(pole.imag() > height(poly, pole.real())) || !(zero.imag() < height(poly, zero.real())))
                    throw Error(ErrorKind::DomainViolation, "no admissible piecewise-linear path");
            }
    }
    const double kL = 2 * kPi * (r.w * dL).imag();
    const double kR = 2 * kPi * (far_right * dR).imag();
    if (!(kL > 0) || !(kR > 0))
        throw Error(ErrorKind::NonDecayingTail, "integrand does not decay along the chosen end rays");
    const double lt = -std::log(cfg.tail_tolerance) + 3.0;
    const double LL = lt / kL + 8.0, LR = lt / kR + 8.0;

    std::vector<Segment> segs;
    segs.push_back({kinks.front() + LL * dL, kinks.front()});
    for (size_t i = 0; i + 1 < kinks.size(); ++i) segs.push_back({kinks[i], kinks[i + 1]});
    segs.push_back({kinks.back(), kinks.back() + LR * dR});

    const double osc = 1.0 + std::abs(r.w) + std::abs(r.u - r.v);
    const double plen = cfg.panel_scale * std::min(0.5 * dmin, 0.6 / osc);
    const GaussRule& g = gauss_legendre(cfg.panel_nodes);
    cplx sum = 0.0;
    int nodes = 0;
    for (const Segment& s : segs) {
        const double len = std::abs(s.b - s.a);
        if (len < 1e-300) continue;
        const int np = std::max(1, static_cast<int>(std::ceil(len / plen)));
        const cplx step = (s.b - s.a) / static_cast<double>(np);
        for (int k = 0; k < np; ++k) {
            const cplx mid = s.a + (k + 0.5) * step;
            for (size_t i = 0; i < g.x.size(); ++i) {
                sum += g.w[i] * 0.5 * step * integrand(mid + 0.5 * step * g.x[i], r, p, qc);
                ++nodes;
            }
        }
    }
    const double endL = std::abs(integrand(segs.front().a, r, p, qc)) / kL;
    const double endR = std::abs(integrand(segs.back().b, r, p, qc)) / kR;
    out.value = sum;
    out.truncation_error = endL + endR;
    out.nodes = nodes;
    return out;
}

double verify_ramanujan(const RamanujanParams& r, const ModularParameter& p, const RamanujanConfig& cfg) {
    const cplx closed = ramanujan_closed(r, p, cfg.qdilog).first;
    const cplx integral = ramanujan_integral(r, p, cfg).value;
    return std::abs(integral - closed) / (1.0 + std::abs(closed));
}

std::vector<RamanujanParams> sample_strict(const ModularParameter& p, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a = p.c_b.imag();
    std::vector<RamanujanParams> out;
    while (static_cast<int>(out.size()) < count) {
        const double iu = a * (-0.3 + 0.9 * unit(rng));
        const double iv_lo = -0.6 * a, iv_hi = iu - 0.3 * a;
        const double iv = iv_lo + (iv_hi - iv_lo) * unit(rng);
        const double gap = iu - iv;  // Im w must lie in (-gap, 0)
        const double iw = -gap * (0.2 + 0.6 * unit(rng));
        RamanujanParams r{cplx(-1 + 2 * unit(rng), iu), cplx(-1 + 2 * unit(rng), iv),
                          cplx(-1 + 2 * unit(rng), iw)};
        if (in_strict_domain(r, p)) out.push_back(r);
    }
    return out;
}

}  // namespace qteich
