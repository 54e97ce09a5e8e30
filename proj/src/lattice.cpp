#include "qteich/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "qteich/error.hpp"

namespace qteich {

// ---- LatticeSpec / StateVector -------------------------------------------------------------

LatticeSpec LatticeSpec::balanced(int n_points, int n_factors) {
    LatticeSpec s{n_points, 1.0 / std::sqrt(static_cast<double>(n_points)), n_factors};
    s.validate();
    return s;
}

bool LatticeSpec::is_balanced() const {
    return std::abs(spacing * spacing * n_points - 1.0) < 1e-12;
}

std::size_t LatticeSpec::size() const {
    std::size_t n = 1;
    for (int i = 0; i < n_factors; ++i) n *= static_cast<std::size_t>(n_points);
    return n;
}

void LatticeSpec::validate() const {
    if (n_points < 2 || n_points % 2 != 0)
        throw Error(ErrorKind::InvalidParameter, "n_points must be even and >= 2");
    if (!(spacing > 0) || !std::isfinite(spacing))
        throw Error(ErrorKind::InvalidParameter, "spacing must be positive");
    if (n_factors < 1) throw Error(ErrorKind::InvalidParameter, "n_factors must be >= 1");
}

double StateVector::norm() const {
    double s = 0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

cplx StateVector::inner(const StateVector& o) const {
    if (!(spec == o.spec)) throw Error(ErrorKind::SpecMismatch, "inner product across lattices");
    cplx s = 0;
    for (std::size_t i = 0; i < amplitudes.size(); ++i) s += std::conj(amplitudes[i]) * o.amplitudes[i];
    return s;
}

// ---- Primitives ------------------------------------------------------------------------------

namespace {

std::vector<cplx> reciprocal(const std::vector<cplx>& t) {
    std::vector<cplx> r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = 1.0 / t[i];
    return r;
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

Primitive invert(const Primitive& prim) {
    return std::visit(
        overloaded{
            [](const DiagPosition& d) -> Primitive { return DiagPosition{d.axis, reciprocal(d.table)}; },
            [](const DiagMomentum& d) -> Primitive { return DiagMomentum{d.axis, reciprocal(d.table)}; },
            [](const FourierAxis& f) -> Primitive { return FourierAxis{f.axis, -f.sign}; },
            [](const Shear& s) -> Primitive { return Shear{s.target, s.source, -s.t}; },
            [](const PermuteFactors& p) -> Primitive {
                std::vector<int> inv(p.sigma.size());
                for (std::size_t i = 0; i < p.sigma.size(); ++i) inv[p.sigma[i]] = static_cast<int>(i);
                return PermuteFactors{inv};
            },
            [](const Scalar& s) -> Primitive { return Scalar{1.0 / s.c}; },
            [](const DiagLinear& d) -> Primitive { return DiagLinear{d.axes, d.coeffs, d.n_min, reciprocal(d.table)}; },
            [](const DiagMulti& d) -> Primitive { return DiagMulti{d.axes, d.fn, -d.power}; },
        },
        prim);
}

std::string describe(const Primitive& prim) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const DiagPosition& d) { os << "DiagPosition(" << d.axis << ")"; },
                   [&](const DiagMomentum& d) { os << "DiagMomentum(" << d.axis << ")"; },
                   [&](const FourierAxis& f) { os << "FourierAxis(" << f.axis << (f.sign > 0 ? ",+)" : ",-)"); },
                   [&](const Shear& s) { os << "Shear(" << s.target << "<-" << s.source << "," << s.t << ")"; },
                   [&](const PermuteFactors& p) {
                       os << "PermuteFactors(";
                       for (std::size_t i = 0; i < p.sigma.size(); ++i) os << (i ? "," : "") << p.sigma[i];
                       os << ")";
                   },
                   [&](const Scalar& s) { os << "Scalar(" << s.c.real() << "," << s.c.imag() << ")"; },
                   [&](const DiagLinear& d) {
                       os << "DiagLinear(";
                       for (std::size_t i = 0; i < d.axes.size(); ++i)
                           os << (i ? "," : "") << d.coeffs[i] << "*q" << d.axes[i];
                       os << ")";
                   },
                   [&](const DiagMulti& d) {
                       os << "DiagMulti(";
                       for (std::size_t i = 0; i < d.axes.size(); ++i) os << (i ? "," : "") << d.axes[i];
                       os << ")^" << d.power;
                   },
               },
               prim);
    return os.str();
}

OperatorProgram& OperatorProgram::then(const OperatorProgram& next) {
    if (next.n_factors != n_factors) throw Error(ErrorKind::SpecMismatch, "factor count mismatch");
    ops.insert(ops.end(), next.ops.begin(), next.ops.end());
    return *this;
}

OperatorProgram& OperatorProgram::then(const Primitive& next) {
    ops.push_back(next);
    return *this;
}

OperatorProgram OperatorProgram::inverse() const {
    OperatorProgram r{n_factors, {}};
    r.ops.reserve(ops.size());
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) r.ops.push_back(invert(*it));
    return r;
}

OperatorProgram product(const std::vector<OperatorProgram>& written_order, int n_factors) {
    OperatorProgram r{n_factors, {}};
    for (auto it = written_order.rbegin(); it != written_order.rend(); ++it) r.then(*it);
    return r;
}

// ---- Application -----------------------------------------------------------------------------

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct Geometry {
    int N;
    int m;
    std::vector<std::size_t> stride;  // stride[a] = N^(m-1-a)
    std::size_t size;

    explicit Geometry(const LatticeSpec& s) : N(s.n_points), m(s.n_factors), stride(s.n_factors), size(s.size()) {
        std::size_t st = 1;
        for (int a = m - 1; a >= 0; --a) {
            stride[a] = st;
            st *= static_cast<std::size_t>(N);
        }
    }
    std::size_t outer(int a) const { return size / (stride[a] * N); }
    void check_axis(int a) const {
        if (a < 0 || a >= m) throw Error(ErrorKind::AxisOutOfRange, "axis " + std::to_string(a));
    }
};

/// In-place strided transforms along one axis; plans are cached per shape and reused on any array.
class AxisFft {
public:
    ~AxisFft() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (auto& [k, p] : plans_) fftw_destroy_plan(p);
    }

    void run(const Geometry& g, int a, int fftw_sign, cplx* data) {
        auto* buf = reinterpret_cast<fftw_complex*>(data);
        const auto key = std::make_tuple(g.N, static_cast<long>(g.outer(a)), static_cast<long>(g.stride[a]), fftw_sign);
        auto it = plans_.find(key);
        if (it == plans_.end()) {
            std::lock_guard<std::mutex> lock(planner_mutex());
            const int s = static_cast<int>(g.stride[a]);
            fftw_iodim dim{g.N, s, s};
            fftw_iodim loops[2] = {{static_cast<int>(g.outer(a)), g.N * s, g.N * s}, {s, 1, 1}};
            fftw_plan plan = fftw_plan_guru_dft(1, &dim, 2, loops, buf, buf, fftw_sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
            if (!plan) throw Error(ErrorKind::InvalidParameter, "transform planning failed");
            it = plans_.emplace(key, plan).first;
        }
        fftw_execute_dft(it->second, buf, buf);
    }

private:
    std::map<std::tuple<int, long, long, int>, fftw_plan> plans_;
};

AxisFft& axis_fft() {
    thread_local AxisFft f;
    return f;
}

void check_table(const Geometry& g, const std::vector<cplx>& t) {
    if (static_cast<int>(t.size()) != g.N) throw Error(ErrorKind::SpecMismatch, "diagonal table size");
}

/// Visits rows (all digits but the last) maintaining digit values.
template <class RowFn>
void for_each_row(const Geometry& g, RowFn&& fn) {
    std::vector<int> digit(g.m, 0);
    const std::size_t rows = g.size / g.N;
    for (std::size_t r = 0; r < rows; ++r) {
        fn(r, digit);
        for (int d = g.m - 2; d >= 0; --d) {
            if (++digit[d] < g.N) break;
            digit[d] = 0;
        }
    }
}

/// Pointwise factors accumulated between transforms, applied in one sweep.
class PointwiseSweep {
public:
    PointwiseSweep(const Geometry& g, const LatticeSpec& spec) : g_(g), spec_(spec), axis_(g.m) {}

    bool empty() const { return ops_.empty() && !any_axis_; }

    void add(const Primitive* op) {
        std::visit(overloaded{
                       [&](const DiagPosition& d) {
                           g_.check_axis(d.axis);
                           check_table(g_, d.table);
                           multiply_axis(d.axis, d.table.data());
                       },
                       [&](const Scalar& s) { scalar_ *= s.c; },
                       [&](const DiagLinear& d) {
                           for (int c : d.axes) g_.check_axis(c);
                           ops_.push_back(op);
                       },
                       [&](const DiagMulti& d) {
                           for (int c : d.axes) g_.check_axis(c);
                           ops_.push_back(op);
                       },
                       [](const auto&) {},
                   },
                   *op);
    }

    void multiply_axis(int a, const cplx* t) {
        auto& row = axis_[a];
        if (row.empty()) row.assign(g_.N, 1.0);
        for (int j = 0; j < g_.N; ++j) row[j] *= t[j];
        any_axis_ = true;
    }

    void flush(std::vector<cplx>& v) {
        if (ops_.empty() && !any_axis_) {
            if (scalar_ != cplx(1.0))
                for (auto& z : v) z *= scalar_;
            scalar_ = 1.0;
            return;
        }
        const int N = g_.N, m = g_.m;
        const long half = N / 2;
        std::vector<cplx> last(N, scalar_);
        if (!axis_[m - 1].empty())
            for (int j = 0; j < N; ++j) last[j] *= axis_[m - 1][j];
        std::vector<cplx> f(N);
        std::vector<double> xs;
        for_each_row(g_, [&](std::size_t r, const std::vector<int>& digit) {
            cplx c = 1.0;
            for (int a = 0; a < m - 1; ++a)
                if (!axis_[a].empty()) c *= axis_[a][digit[a]];
            for (int j = 0; j < N; ++j) f[j] = c * last[j];
            for (const Primitive* op : ops_) {
                if (const auto* d = std::get_if<DiagLinear>(op)) {
                    long n0 = -d->n_min, cl = 0;
                    for (std::size_t k = 0; k < d->axes.size(); ++k) {
                        if (d->axes[k] == m - 1)
                            cl += d->coeffs[k];
                        else
                            n0 += d->coeffs[k] * (digit[d->axes[k]] - half);
                    }
                    for (int j = 0; j < N; ++j) f[j] *= d->table[static_cast<std::size_t>(n0 + cl * (j - half))];
                } else if (const auto* d = std::get_if<DiagMulti>(op)) {
                    xs.resize(d->axes.size());
                    int slot = -1;
                    for (std::size_t k = 0; k < d->axes.size(); ++k) {
                        if (d->axes[k] == m - 1)
                            slot = static_cast<int>(k);
                        else
                            xs[k] = spec_.x(digit[d->axes[k]]);
                    }
                    if (slot < 0) {
                        cplx z = d->fn(xs.data());
                        if (d->power < 0) z = 1.0 / z;
                        for (int j = 0; j < N; ++j) f[j] *= z;
                    } else {
                        for (int j = 0; j < N; ++j) {
                            xs[slot] = spec_.x(j);
                            const cplx z = d->fn(xs.data());
                            f[j] *= d->power < 0 ? 1.0 / z : z;
                        }
                    }
                }
            }
            cplx* row = v.data() + r * N;
            for (int j = 0; j < N; ++j) row[j] *= f[j];
        });
        ops_.clear();
        for (auto& row : axis_) row.clear();
        any_axis_ = false;
        scalar_ = 1.0;
    }

private:
    const Geometry& g_;
    const LatticeSpec& spec_;
    std::vector<const Primitive*> ops_;
    std::vector<std::vector<cplx>> axis_;
    bool any_axis_ = false;
    cplx scalar_ = 1.0;
};

/// Centered transform: (-1)^j before the raw transform, (-1)^l exp(-+ i pi N/2)/sqrt(N) after.
void centered_fourier(const Geometry& g, int a, int sign, PointwiseSweep& sweep, std::vector<cplx>& v) {
    const int N = g.N;
    std::vector<cplx> pre(N), post(N);
    const cplx global = std::exp(cplx(0, -sign * kPi * N / 2.0)) / std::sqrt(static_cast<double>(N));
    for (int j = 0; j < N; ++j) {
        pre[j] = (j % 2) ? -1.0 : 1.0;
        post[j] = pre[j] * global;
    }
    sweep.multiply_axis(a, pre.data());
    sweep.flush(v);
    axis_fft().run(g, a, sign > 0 ? FFTW_FORWARD : FFTW_BACKWARD, v.data());
    sweep.multiply_axis(a, post.data());
}

inline int pmod(long a, int n) {
    long r = a % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

void shear_axis(const Geometry& g, const Shear& sh, std::vector<cplx>& v) {
    const int N = g.N, a = sh.target, c = sh.source;
    const std::size_t s = g.stride[a], O = g.outer(a);
    auto shift_of = [&](long jc) { return pmod(static_cast<long>(sh.t) * (jc - N / 2), N); };
    if (s == 1) {
        for (std::size_t o = 0; o < O; ++o) {
            const long jc = static_cast<long>((o / (g.stride[c] / N)) % N);
            cplx* line = v.data() + o * N;
            std::rotate(line, line + shift_of(jc), line + N);
        }
        return;
    }
    if (c < a) {
        // Whole slabs move together.
        for (std::size_t o = 0; o < O; ++o) {
            const int sh0 = shift_of(static_cast<long>((o / (g.stride[c] / (g.stride[a] * N))) % N));
            cplx* base = v.data() + o * N * s;
            std::rotate(base, base + sh0 * s, base + N * s);
        }
        return;
    }
    // Source inside the slab: blocks of consecutive lines, each with its own shift.
    const std::size_t B = std::min<std::size_t>(s, 256), run = g.stride[c];
    std::vector<cplx> buf(B * N);
    std::vector<int> shift(B);
    for (std::size_t o = 0; o < O; ++o)
        for (std::size_t i0 = 0; i0 < s; i0 += B) {
            const std::size_t Bc = std::min(B, s - i0);
            for (std::size_t b = 0; b < Bc; ++b) shift[b] = shift_of(static_cast<long>(((i0 + b) / run) % N));
            cplx* base = v.data() + o * N * s + i0;
            for (int j = 0; j < N; ++j) std::copy(base + j * s, base + j * s + Bc, buf.begin() + j * B);
            for (int j = 0; j < N; ++j) {
                cplx* dst = base + j * s;
                for (std::size_t b = 0; b < Bc; ++b) dst[b] = buf[((j + shift[b]) % N) * B + b];
            }
        }
}

void permute_factors(const Geometry& g, const std::vector<int>& sigma, std::vector<cplx>& v) {
    if (static_cast<int>(sigma.size()) != g.m) throw Error(ErrorKind::SpecMismatch, "permutation size");
    std::vector<int> inv(g.m, -1);
    for (int a = 0; a < g.m; ++a) {
        g.check_axis(sigma[a]);
        if (inv[sigma[a]] != -1) throw Error(ErrorKind::InvalidParameter, "not a permutation");
        inv[sigma[a]] = a;
    }
    // New digit i is old digit inv[i].
    std::vector<std::size_t> ostride(g.m);
    for (int i = 0; i < g.m; ++i) ostride[i] = g.stride[inv[i]];
    std::vector<cplx> out(v.size());
    const std::size_t inner = ostride[g.m - 1];
    for_each_row(g, [&](std::size_t r, const std::vector<int>& digit) {
        std::size_t old = 0;
        for (int d = 0; d < g.m - 1; ++d) old += ostride[d] * digit[d];
        cplx* dst = out.data() + r * g.N;
        for (int j = 0; j < g.N; ++j) dst[j] = v[old + j * inner];
    });
    v.swap(out);
}

void apply_primitive(const Geometry& g, const LatticeSpec&, const Primitive& prim, PointwiseSweep& sweep,
                     std::vector<cplx>& amps) {
    std::visit(overloaded{
                   [&](const DiagMomentum& d) {
                       g.check_axis(d.axis);
                       check_table(g, d.table);
                       centered_fourier(g, d.axis, +1, sweep, amps);
                       sweep.multiply_axis(d.axis, d.table.data());
                       centered_fourier(g, d.axis, -1, sweep, amps);
                   },
                   [&](const FourierAxis& f) {
                       g.check_axis(f.axis);
                       centered_fourier(g, f.axis, f.sign, sweep, amps);
                   },
                   [&](const Shear& s) {
                       g.check_axis(s.target);
                       g.check_axis(s.source);
                       if (s.target == s.source) throw Error(ErrorKind::IdenticalAxes, "shear on one axis");
                       sweep.flush(amps);
                       if (s.t != 0) shear_axis(g, s, amps);
                   },
                   [&](const PermuteFactors& p) {
                       sweep.flush(amps);
                       permute_factors(g, p.sigma, amps);
                   },
                   [&](const auto&) { sweep.add(&prim); },
               },
               prim);
}

}  // namespace

void apply_inplace(const OperatorProgram& prog, std::vector<cplx>& amps, const LatticeSpec& spec, bool fused) {
    if (prog.n_factors != spec.n_factors)
        throw Error(ErrorKind::SpecMismatch, "program factor count differs from lattice");
    if (amps.size() != spec.size()) throw Error(ErrorKind::SpecMismatch, "amplitude count");
    const Geometry g(spec);
    PointwiseSweep sweep(g, spec);
    for (const auto& prim : prog.ops) {
        apply_primitive(g, spec, prim, sweep, amps);
        if (!fused) sweep.flush(amps);
    }
    sweep.flush(amps);
}

StateVector apply_program(const OperatorProgram& prog, const StateVector& v) {
    StateVector out = v;
    apply_inplace(prog, out.amplitudes, out.spec);
    return out;
}

// ---- OpSum ---------------------------------------------------------------------------------

OpSum OpSum::of(const OperatorProgram& p, cplx c) { return OpSum{p.n_factors, {{c, p}}}; }

OpSum OpSum::operator+(const OpSum& o) const {
    OpSum r = *this;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    return r;
}

OpSum OpSum::operator-(const OpSum& o) const { return *this + o * cplx(-1.0); }

OpSum OpSum::operator*(cplx c) const {
    OpSum r = *this;
    for (auto& t : r.terms) t.coef *= c;
    return r;
}

OpSum OpSum::operator*(const OpSum& o) const {
    OpSum r{n_factors, {}};
    for (const auto& a : terms)
        for (const auto& b : o.terms) {
            OperatorProgram p = b.prog;
            p.then(a.prog);
            r.terms.push_back({a.coef * b.coef, std::move(p)});
        }
    return r;
}

StateVector OpSum::apply(const StateVector& v) const {
    StateVector out{v.spec, std::vector<cplx>(v.amplitudes.size(), 0.0)};
    for (const auto& t : terms) {
        StateVector w = apply_program(t.prog, v);
        for (std::size_t i = 0; i < w.amplitudes.size(); ++i) out.amplitudes[i] += t.coef * w.amplitudes[i];
    }
    return out;
}

OpSum commutator(const OpSum& a, const OpSum& b) { return a * b - b * a; }

// ---- Linear forms ----------------------------------------------------------------------------

LinearForm LinearForm::zero(int m) { return LinearForm{std::vector<int>(m, 0), std::vector<int>(m, 0)}; }

LinearForm LinearForm::P(int m, int axis) {
    LinearForm f = zero(m);
    f.p.at(axis) = 1;
    return f;
}

LinearForm LinearForm::Q(int m, int axis) {
    LinearForm f = zero(m);
    f.q.at(axis) = 1;
    return f;
}

LinearForm LinearForm::operator+(const LinearForm& o) const {
    if (o.p.size() != p.size()) throw Error(ErrorKind::SpecMismatch, "form size");
    LinearForm r = *this;
    for (std::size_t i = 0; i < p.size(); ++i) {
        r.p[i] += o.p[i];
        r.q[i] += o.q[i];
    }
    return r;
}

LinearForm LinearForm::operator-(const LinearForm& o) const { return *this + o * -1; }

LinearForm LinearForm::operator*(int c) const {
    LinearForm r = *this;
    for (std::size_t i = 0; i < p.size(); ++i) {
        r.p[i] *= c;
        r.q[i] *= c;
    }
    return r;
}

int pairing(const LinearForm& x, const LinearForm& y) {
    // [p_i, q_i] = 1/(2 pi i)
    int s = 0;
    for (std::size_t i = 0; i < x.p.size(); ++i) s += x.p[i] * y.q[i] - x.q[i] * y.p[i];
    return s;
}

LinearForm transport(const LinearForm& x, const FormMove& m) {
    LinearForm r = x;
    switch (m.kind) {
        case FormMove::Fourier:  // F p F^-1 = q, F q F^-1 = -p
            r.p[m.axis] = -x.q[m.axis];
            r.q[m.axis] = x.p[m.axis];
            break;
        case FormMove::Chirp:  // exp(i pi t q^2): p -> p - t q
            r.q[m.axis] = x.q[m.axis] - m.t * x.p[m.axis];
            break;
        case FormMove::ShearMove:  // exp(2 pi i t p_i q_j): q_i -> q_i + t q_j, p_j -> p_j - t p_i
            r.p[m.axis] = x.p[m.axis] - m.t * x.p[m.source];
            r.q[m.source] = x.q[m.source] + m.t * x.q[m.axis];
            break;
    }
    return r;
}

Primitive chirp(const LatticeSpec& spec, int axis, double t) {
    std::vector<cplx> table(spec.n_points);
    for (int j = 0; j < spec.n_points; ++j) {
        const double x = spec.x(j);
        table[j] = std::exp(cplx(0, kPi * t * x * x));
    }
    return DiagPosition{axis, std::move(table)};
}

Primitive to_primitive(const LatticeSpec& spec, const FormMove& m) {
    switch (m.kind) {
        case FormMove::Fourier:
            return FourierAxis{m.axis, +1};
        case FormMove::Chirp:
            return chirp(spec, m.axis, m.t);
        case FormMove::ShearMove:
            return Shear{m.axis, m.source, m.t};
    }
    return Scalar{1.0};
}

namespace {

long round_div(long a, long b) {
    return static_cast<long>(std::llround(static_cast<double>(a) / static_cast<double>(b)));
}

}  // namespace

Diagonalizer diagonalize(const LatticeSpec& spec, const std::vector<LinearForm>& forms) {
    const int m = spec.n_factors;
    for (const auto& f : forms)
        if (static_cast<int>(f.p.size()) != m || static_cast<int>(f.q.size()) != m)
            throw Error(ErrorKind::SpecMismatch, "form size differs from factor count");
    for (std::size_t a = 0; a < forms.size(); ++a)
        for (std::size_t b = a + 1; b < forms.size(); ++b)
            if (pairing(forms[a], forms[b]) != 0)
                throw Error(ErrorKind::InvalidParameter, "forms do not commute");

    Diagonalizer out;
    std::vector<LinearForm> cur = forms;
    std::vector<bool> pivot(m, false);
    auto push = [&](const FormMove& mv) {
        out.moves.push_back(mv);
        for (auto& f : cur) f = transport(f, mv);
    };

    for (std::size_t k = 0; k < cur.size(); ++k) {
        for (int j = 0; j < m; ++j) {
            while (cur[k].p[j] != 0) {
                if (pivot[j]) throw Error(ErrorKind::InvalidParameter, "diagonalizer reached a pivot axis");
                const long t = round_div(cur[k].q[j], cur[k].p[j]);
                if (t != 0) push(FormMove{FormMove::Chirp, j, 0, static_cast<int>(t)});
                push(FormMove{FormMove::Fourier, j, 0, 0});
            }
        }
        if (k + 1 == cur.size()) break;
        // Collect the q-support on free axes into a single pivot.
        for (;;) {
            int big = -1, small = -1;
            for (int j = 0; j < m; ++j) {
                if (pivot[j] || cur[k].q[j] == 0) continue;
                if (big < 0 || std::abs(cur[k].q[j]) > std::abs(cur[k].q[big])) big = j;
            }
            for (int j = 0; j < m; ++j) {
                if (pivot[j] || j == big || cur[k].q[j] == 0) continue;
                if (small < 0 || std::abs(cur[k].q[j]) < std::abs(cur[k].q[small])) small = j;
            }
            if (small < 0) {
                if (big >= 0) pivot[big] = true;
                break;
            }
            // q_big += t q_small via shear with target small, source big.
            const long t = -round_div(cur[k].q[big], cur[k].q[small]);
            push(FormMove{FormMove::ShearMove, small, big, static_cast<int>(t)});
        }
    }
    for (const auto& f : cur) {
        for (int j = 0; j < m; ++j)
            if (f.p[j] != 0) throw Error(ErrorKind::InvalidParameter, "diagonalization incomplete");
        out.qcoef.push_back(f.q);
    }
    return out;
}

namespace {

OperatorProgram wrap(const LatticeSpec& spec, const Diagonalizer& d, const Primitive& diag) {
    OperatorProgram w{spec.n_factors, {}};
    for (const auto& mv : d.moves) w.then(to_primitive(spec, mv));
    OperatorProgram r = w;
    r.then(diag);
    r.then(w.inverse());
    return r;
}

}  // namespace

OperatorProgram function_of_form(const LatticeSpec& spec, const LinearForm& x, const std::function<cplx(double)>& f) {
    const Diagonalizer d = diagonalize(spec, {x});
    DiagLinear dl;
    const long half = spec.n_points / 2;
    long n_min = 0, n_max = 0;
    for (int j = 0; j < spec.n_factors; ++j)
        if (const long c = d.qcoef[0][j]; c != 0) {
            dl.axes.push_back(j);
            dl.coeffs.push_back(static_cast<int>(c));
            n_min += std::min(-c * half, c * (half - 1));
            n_max += std::max(-c * half, c * (half - 1));
        }
    dl.n_min = n_min;
    dl.table.resize(static_cast<std::size_t>(n_max - dl.n_min + 1));
    for (long n = dl.n_min; n <= n_max; ++n) dl.table[n - dl.n_min] = f(spec.spacing * n);
    return wrap(spec, d, dl);
}

OperatorProgram function_of_forms(const LatticeSpec& spec, const std::vector<LinearForm>& xs,
                                  const std::function<cplx(const std::vector<double>&)>& f) {
    const Diagonalizer d = diagonalize(spec, xs);
    DiagMulti dm;
    std::vector<int> slot(spec.n_factors, -1);
    for (const auto& qc : d.qcoef)
        for (int j = 0; j < spec.n_factors; ++j)
            if (qc[j] != 0 && slot[j] < 0) {
                slot[j] = static_cast<int>(dm.axes.size());
                dm.axes.push_back(j);
            }
    const auto qcoef = d.qcoef;
    dm.fn = [qcoef, slot, f](const double* x) {
        thread_local std::vector<double> y;
        y.assign(qcoef.size(), 0.0);
        for (std::size_t k = 0; k < qcoef.size(); ++k)
            for (std::size_t j = 0; j < slot.size(); ++j)
                if (qcoef[k][j] != 0) y[k] += qcoef[k][j] * x[slot[j]];
        return f(y);
    };
    return wrap(spec, d, dm);
}

// ---- Packets and residuals -------------------------------------------------------------------

double packet_clipped_mass(const LatticeSpec& spec, const GaussianPacket& g) {
    const double X = spec.extent() / 2;
    const double K = 1.0 / (2 * spec.spacing);
    double out = 0;
    for (int a = 0; a < spec.n_factors; ++a) {
        const double w = g.width[a];
        out += 0.5 * std::erfc((X - g.center[a]) / w) + 0.5 * std::erfc((X + g.center[a]) / w);
        const double wk = 2 * kPi * w;
        out += 0.5 * std::erfc((K - g.momentum[a]) * wk) + 0.5 * std::erfc((K + g.momentum[a]) * wk);
    }
    return out;
}

namespace {

std::vector<std::vector<cplx>> packet_lines(const LatticeSpec& spec, const GaussianPacket& g, double clip_tol) {
    spec.validate();
    const auto m = static_cast<std::size_t>(spec.n_factors);
    if (g.center.size() != m || g.momentum.size() != m || g.width.size() != m)
        throw Error(ErrorKind::SpecMismatch, "packet parameters per factor");
    for (double w : g.width)
        if (!(w > 0)) throw Error(ErrorKind::InvalidParameter, "packet width must be positive");
    const double clipped = packet_clipped_mass(spec, g);
    if (clipped > clip_tol)
        throw Error(ErrorKind::BoundaryClipping, "packet mass outside the grid " + std::to_string(clipped));
    const int N = spec.n_points;
    std::vector<std::vector<cplx>> line(m, std::vector<cplx>(N));
    for (std::size_t a = 0; a < m; ++a) {
        double s = 0;
        for (int j = 0; j < N; ++j) {
            const double x = spec.x(j), u = (x - g.center[a]) / g.width[a];
            line[a][j] = std::exp(cplx(-0.5 * u * u, 2 * kPi * g.momentum[a] * x));
            s += std::norm(line[a][j]);
        }
        for (auto& z : line[a]) z /= std::sqrt(s);
    }
    return line;
}

}  // namespace

StateVector gaussian_packet(const LatticeSpec& spec, const GaussianPacket& g, double clip_tol) {
    const auto line = packet_lines(spec, g, clip_tol);
    const int N = spec.n_points, m = spec.n_factors;
    StateVector v{spec, std::vector<cplx>(spec.size())};
    const Geometry geo(spec);
    for_each_row(geo, [&](std::size_t r, const std::vector<int>& digit) {
        cplx pre = 1.0;
        for (int a = 0; a < m - 1; ++a) pre *= line[a][digit[a]];
        cplx* row = v.amplitudes.data() + r * N;
        for (int j = 0; j < N; ++j) row[j] = pre * line[m - 1][j];
    });
    return v;
}

double distance_to_packet(const std::vector<cplx>& w, const LatticeSpec& spec, const GaussianPacket& g) {
    if (w.size() != spec.size()) throw Error(ErrorKind::SpecMismatch, "amplitude count");
    const auto line = packet_lines(spec, g, 1.0);
    const int N = spec.n_points, m = spec.n_factors;
    double d = 0;
    const Geometry geo(spec);
    for_each_row(geo, [&](std::size_t r, const std::vector<int>& digit) {
        cplx pre = 1.0;
        for (int a = 0; a < m - 1; ++a) pre *= line[a][digit[a]];
        const cplx* row = w.data() + r * N;
        for (int j = 0; j < N; ++j) d += std::norm(row[j] - pre * line[m - 1][j]);
    });
    return std::sqrt(d);
}

std::vector<GaussianPacket> packet_ensemble(const LatticeSpec& spec, int count, std::uint64_t seed, double spread) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    const double w = 1.0 / std::sqrt(2 * kPi);
    std::vector<GaussianPacket> out;
    for (int i = 0; i < count; ++i) {
        GaussianPacket g;
        for (int a = 0; a < spec.n_factors; ++a) {
            g.center.push_back(u(rng));
            g.momentum.push_back(u(rng));
            g.width.push_back(w);
        }
        out.push_back(std::move(g));
    }
    return out;
}

double relative_residual(const StateVector& a, const StateVector& b) {
    if (!(a.spec == b.spec)) throw Error(ErrorKind::SpecMismatch, "residual across lattices");
    double d = 0;
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) d += std::norm(a.amplitudes[i] - b.amplitudes[i]);
    const double scale = std::max(a.norm(), b.norm());
    return scale > 0 ? std::sqrt(d) / scale : std::sqrt(d);
}

ProjectiveResult projective_compare(const std::vector<StateVector>& lhs, const std::vector<StateVector>& rhs) {
    if (lhs.size() != rhs.size() || lhs.empty()) throw Error(ErrorKind::SpecMismatch, "ensemble sizes");
    std::vector<cplx> r;
    cplx num = 0;
    double den = 0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const cplx ip = lhs[i].inner(rhs[i]);
        const double nl = lhs[i].norm(), nr = rhs[i].norm();
        r.push_back(ip / (nl * nr));
        num += ip;
        den += nl * nl;
    }
    cplx mean = 0;
    for (auto z : r) mean += z;
    mean /= static_cast<double>(r.size());
    double res = 0, spread = 0;
    for (auto z : r) {
        res = std::max(res, 1.0 - std::abs(z));
        spread = std::max(spread, std::abs(std::arg(z / mean)));
    }
    return ProjectiveResult{res + spread, num / den};
}

cplx expectation(const OpSum& x, const StateVector& v) { return v.inner(x.apply(v)); }

int thread_count() {
    if (const char* e = std::getenv("QTEICH_THREADS")) {
        const int n = std::atoi(e);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_for(int count, const std::function<void(int)>& body) {
    const int nt = std::min(thread_count(), count);
    if (nt <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mutex;
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += nt) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace qteich
