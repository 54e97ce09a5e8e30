#include "qteich/qdilog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "qteich/error.hpp"

namespace qteich {

namespace {

struct Derived {
    cplx c_b, q, qbar, zeta;
};

Derived derive(cplx b) {
    Derived d;
    d.c_b = kI * (b + 1.0 / b) / 2.0;
    d.q = std::exp(kI * kPi * b * b);
    d.qbar = std::exp(-kI * kPi / (b * b));
    d.zeta = std::exp(kI * kPi * d.c_b * d.c_b / 3.0);
    return d;
}

// Trapezoidal weights h / (sinh(wb) sinh(w/b) w) on w = k h + i eps, grown on demand.
struct NodeTable {
    cplx b;
    double eps = 0, h = 0;
    std::vector<cplx> pos;  // k = 0, 1, 2, ...
    std::vector<cplx> neg;  // k = -1, -2, ...

    cplx weight(long k) const {
        const cplx w(static_cast<double>(k) * h, eps);
        return h / (std::sinh(w * b) * std::sinh(w / b) * w);
    }
    void grow(long K) {
        while (static_cast<long>(pos.size()) <= K) pos.push_back(weight(static_cast<long>(pos.size())));
        while (static_cast<long>(neg.size()) < K) neg.push_back(weight(-static_cast<long>(neg.size()) - 1));
    }
};

NodeTable& node_table(cplx b, double eps, double h) {
    thread_local std::vector<NodeTable> cache;
    for (auto& t : cache)
        if (t.b == b && t.eps == eps && t.h == h) return t;
    if (cache.size() >= 8) cache.erase(cache.begin());
    cache.push_back(NodeTable{b, eps, h, {}, {}});
    return cache.back();
}

double default_offset(const ModularParameter& p) { return 0.1 * std::abs(p.c_b.imag()); }

// Vertical clearance of the line Im w = eps from the integrand singularities.
double clearance(const ModularParameter& p, double eps) {
    const double upper = kPi * std::min(p.b.real(), (1.0 / p.b).real());
    return std::min(eps, upper - eps);
}

void check_pole(cplx z, const ModularParameter& p, double tol) {
    double dist = 0;
    const PoleIndex idx = nearest_pole(z, p, &dist);
    if (dist < tol) {
        std::ostringstream os;
        os << "z=" << z << " within " << dist << " of pole (m=" << idx.m << ", n=" << idx.n << ")";
        throw Error(ErrorKind::PoleProximity, os.str());
    }
}

}  // namespace

ModularParameter ModularParameter::make(cplx b, double regime_tol) {
    if (!(b.real() > 0.0) || b.imag() < 0.0 || !std::isfinite(b.real()) || !std::isfinite(b.imag())) {
        std::ostringstream os;
        os << "b=" << b << " must satisfy Re b > 0 and Im b >= 0";
        throw Error(ErrorKind::InvalidParameter, os.str());
    }
    ModularParameter p;
    p.b = b;
    const Derived d = derive(b);
    p.c_b = d.c_b;
    p.q = d.q;
    p.qbar = d.qbar;
    p.zeta = d.zeta;
    p.unitary_regime = std::abs((1.0 - std::abs(b)) * b.imag()) <= regime_tol;
    return p;
}

bool ModularParameter::consistent() const {
    const Derived d = derive(b);
    return d.c_b == c_b && d.q == q && d.qbar == qbar && d.zeta == zeta;
}

cplx inversion_factor(cplx z, const ModularParameter& p) {
    return std::exp(kI * kPi * z * z - kI * kPi * (1.0 + 2.0 * p.c_b * p.c_b) / 6.0);
}

cplx eb_integral(cplx z, const ModularParameter& p, const QuadratureConfig& cfg) {
    const double strip = std::abs(p.c_b.imag());
    if (!(std::abs(z.imag()) < strip)) {
        std::ostringstream os;
        os << "|Im z|=" << std::abs(z.imag()) << " outside strip of half-width " << strip;
        throw Error(ErrorKind::StripViolation, os.str());
    }
    const double eps = cfg.contour_offset > 0 ? cfg.contour_offset : default_offset(p);
    const double d = clearance(p, eps);
    if (!(d > 0)) throw Error(ErrorKind::InvalidParameter, "contour offset crosses an integrand pole");

    const double rate = 2.0 * strip - 2.0 * std::abs(z.imag());
    const double growth = 2.0 * std::abs(z.real()) * eps;
    double R = cfg.truncation_radius > 0 ? cfg.truncation_radius
                                         : (40.0 + growth + std::log(1.0 / d)) / rate;
    double h;
    if (cfg.node_count > 0) {
        if (cfg.node_count < 2) throw Error(ErrorKind::InvalidParameter, "node_count < 2");
        h = 2.0 * R / cfg.node_count;
    } else {
        h = 2.0 * kPi * d / (37.0 + 3.0 * std::log(1.0 / d) + 48.0 * eps);
    }
    const long K = static_cast<long>(std::ceil(R / h));
    if (K > 4000000 || R > 600.0)
        throw Error(ErrorKind::QuadratureDivergence, "truncation radius too large for the decay rate");

    NodeTable& tab = node_table(p.b, eps, h);
    tab.grow(K);

    const cplx base = 2.0 * z * eps;
    const cplx step = -2.0 * kI * z * h;
    auto exact = [&](long k) { return std::exp(base + step * static_cast<double>(k)); };

    cplx sum = tab.pos[0] * exact(0);
    cplx e = exact(0);
    const cplx r = std::exp(step);
    for (long k = 1; k <= K; ++k) {
        e = (k % 64 == 0) ? exact(k) : e * r;
        sum += tab.pos[k] * e;
    }
    e = exact(0);
    const cplx rinv = std::exp(-step);
    for (long k = 1; k <= K; ++k) {
        e = (k % 64 == 0) ? exact(-k) : e * rinv;
        sum += tab.neg[k - 1] * e;
    }
    const double tail = std::max(std::abs(tab.pos[K] * exact(K)), std::abs(tab.neg[K - 1] * exact(-K)));
    if (tail > cfg.tail_tolerance * std::max(1.0, std::abs(sum)) * 1e6)
        throw Error(ErrorKind::QuadratureDivergence, "integrand tail at the truncation radius too large");
    return std::exp(sum / 4.0);
}

ProductValue eb_product(cplx z, const ModularParameter& p, int trunc) {
    if (!((p.b * p.b).imag() > 0.0))
        throw Error(ErrorKind::RegimeViolation, "product formula needs Im b^2 > 0");
    if (trunc < 1) throw Error(ErrorKind::InvalidParameter, "trunc < 1");
    const cplx x1 = std::exp(2.0 * kPi * (z + p.c_b) * p.b);
    const cplx x2 = std::exp(2.0 * kPi * (z - p.c_b) / p.b);
    const cplx r1 = p.q * p.q;
    const cplx r2 = p.qbar * p.qbar;
    cplx num = 1.0, den = 1.0, a = x1, c = x2;
    for (int k = 0; k < trunc; ++k) {
        num *= 1.0 - a;
        const cplx f = 1.0 - c;
        if (std::abs(f) < 1e-14) throw Error(ErrorKind::PoleHit, "denominator factor vanishes");
        den *= f;
        a *= r1;
        c *= r2;
    }
    const double tb = std::abs(a) / (1.0 - std::abs(r1)) + std::abs(c) / (1.0 - std::abs(r2));
    return {num / den, tb};
}

PoleIndex nearest_pole(cplx z, const ModularParameter& p, double* distance) {
    PoleIndex best{0, 0, PoleIndex::Kind::Pole};
    double bd = std::abs(z - p.c_b);
    const cplx u = -kI * (z - p.c_b);  // = m b + n / b at a pole
    const cplx binv = 1.0 / p.b;
    const int mmax = static_cast<int>(std::ceil((std::abs(u) + 2.0) / std::abs(p.b))) + 1;
    for (int m = 0; m <= std::min(mmax, 100000); ++m) {
        const cplx rest = u - static_cast<double>(m) * p.b;
        const double nstar = (rest * std::conj(binv)).real() / std::norm(binv);
        const int n0 = std::max(0, static_cast<int>(std::floor(nstar)));
        for (int n = std::max(0, n0 - 1); n <= n0 + 2; ++n) {
            const double dd = std::abs(rest - static_cast<double>(n) * binv);
            if (dd < bd) {
                bd = dd;
                best.m = m;
                best.n = n;
            }
        }
    }
    if (distance) *distance = bd;
    return best;
}

Evaluation eb_eval(cplx z, const ModularParameter& p, const QuadratureConfig& cfg) {
    if (z.imag() > p.c_b.imag() - 1.0) check_pole(z, p, cfg.pole_tolerance);
    const double a = std::abs(p.c_b.imag());
    const double band = cfg.strip_fraction * a;
    Evaluation ev;
    if (std::abs(z.imag()) <= band) {
        ev.value = eb_integral(z, p, cfg);
        ev.strategy = "integral";
        ev.error_estimate = 1e-13 * std::max(1.0, std::abs(std::log(ev.value)));
        return ev;
    }
    // Shift count with each exponent; the b direction wins ties.
    const cplx betas[2] = {p.b, 1.0 / p.b};
    int choice = -1, best = std::numeric_limits<int>::max();
    for (int k = 0; k < 2; ++k) {
        const double s = betas[k].real();
        const int n = static_cast<int>(std::ceil((std::abs(z.imag()) - band) / s - 1e-12));
        if (std::abs(z.imag()) - n * s >= -band && n < best) {
            best = n;
            choice = k;
        }
    }
    if (best > cfg.continuation_depth_max)
        throw Error(ErrorKind::ContinuationDepthExceeded,
                    "needs " + std::to_string(best) + " shifts, limit " +
                        std::to_string(cfg.continuation_depth_max));
    const cplx beta = betas[choice];
    cplx w = z;
    cplx pref = 1.0;
    const bool down = z.imag() > 0;
    for (int k = 0; k < best; ++k) {
        if (down) {
            pref /= 1.0 + std::exp(2.0 * kPi * beta * (w - kI * beta / 2.0));
            w -= kI * beta;
        } else {
            pref *= 1.0 + std::exp(2.0 * kPi * beta * (w + kI * beta / 2.0));
            w += kI * beta;
        }
    }
    ev.value = pref * eb_integral(w, p, cfg);
    ev.strategy = "integral+shift";
    ev.shifts = best;
    ev.error_estimate = 1e-13 * (1 + best) * std::max(1.0, std::abs(std::log(ev.value)));
    return ev;
}

cplx pole_zero_location(const PoleIndex& idx, const ModularParameter& p) {
    if (idx.m < 0 || idx.n < 0) throw Error(ErrorKind::InvalidParameter, "m, n must be >= 0");
    const cplx v = p.c_b + kI * static_cast<double>(idx.m) * p.b + kI * static_cast<double>(idx.n) / p.b;
    return idx.kind == PoleIndex::Kind::Zero ? -v : v;
}

cplx theta(cplx z, cplx tau, double tol) {
    if (!(tau.imag() > 0)) throw Error(ErrorKind::HalfPlaneViolation, "theta needs Im tau > 0");
    const double t = tau.imag();
    const double n0 = -z.imag() / t;
    const double span = std::sqrt((-std::log(tol) + 10.0) / (kPi * t)) + 2.0;
    const long lo = static_cast<long>(std::floor(n0 - span));
    const long hi = static_cast<long>(std::ceil(n0 + span));
    cplx sum = 0.0;
    for (long n = lo; n <= hi; ++n) {
        const double dn = static_cast<double>(n);
        sum += std::exp(kI * kPi * tau * dn * dn + 2.0 * kPi * kI * z * dn);
    }
    return sum;
}

cplx qpochhammer(cplx x, cplx r, int max_factors) {
    if (!(std::abs(r) < 1.0)) throw Error(ErrorKind::RegimeViolation, "qpochhammer needs |r| < 1");
    cplx prod = 1.0, a = x;
    for (int k = 0; k < max_factors; ++k) {
        prod *= 1.0 - a;
        if (std::abs(a) < 1e-18) break;
        a *= r;
    }
    return prod;
}

Sector asymptotic_sector(cplx z, const ModularParameter& p, double wall_tol) {
    const double ab = std::arg(p.b);
    const double a = std::arg(z);
    const double h = kPi / 2;
    if (std::abs(a) > h + ab + wall_tol) return Sector::Unit;
    if (std::abs(a) < h - ab - wall_tol) return Sector::Gaussian;
    if (ab > wall_tol) {
        if (std::abs(a - h) < ab - wall_tol) return Sector::UpperTheta;
        if (std::abs(a + h) < ab - wall_tol) return Sector::LowerTheta;
    }
    std::ostringstream os;
    os << "arg z=" << a << " within " << wall_tol << " of a sector wall";
    throw Error(ErrorKind::SectorBoundary, os.str());
}

cplx eb_asymptotic(cplx z, const ModularParameter& p, double threshold, double wall_tol) {
    if (std::abs(z) < threshold)
        throw Error(ErrorKind::InvalidParameter, "|z| below the asymptotic threshold");
    switch (asymptotic_sector(z, p, wall_tol)) {
        case Sector::Unit: return 1.0;
        case Sector::Gaussian: return inversion_factor(z, p);
        case Sector::UpperTheta: {
            const cplx qb2 = p.qbar * p.qbar;
            return qpochhammer(qb2, qb2) / theta(kI * z / p.b, -1.0 / (p.b * p.b));
        }
        case Sector::LowerTheta: {
            const cplx q2 = p.q * p.q;
            return theta(kI * p.b * z, p.b * p.b) / qpochhammer(q2, q2);
        }
    }
    return 1.0;
}

}  // namespace qteich
