#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "qteich/qdilog.hpp"

namespace qteich {

/// Uniform grid per tensor factor; position x_j = (j - N/2) h, momentum k_l = (l - N/2) / (N h).
struct LatticeSpec {
    int n_points = 256;
    double spacing = 0.0625;
    int n_factors = 1;

    /// spacing = 1/sqrt(n_points), so position and momentum grids coincide.
    static LatticeSpec balanced(int n_points, int n_factors);
    bool is_balanced() const;
    std::size_t size() const;
    double x(int j) const { return (j - n_points / 2) * spacing; }
    double k(int l) const { return (l - n_points / 2) / (n_points * spacing); }
    double extent() const { return n_points * spacing; }
    void validate() const;
    bool operator==(const LatticeSpec& o) const {
        return n_points == o.n_points && spacing == o.spacing && n_factors == o.n_factors;
    }
};

struct StateVector {
    LatticeSpec spec;
    std::vector<cplx> amplitudes;

    double norm() const;
    cplx inner(const StateVector& o) const;  ///< <this|o>, conjugate-linear in this
};

/// Multiply by table[j] along one axis in the position representation.
struct DiagPosition {
    int axis;
    std::vector<cplx> table;
};
/// Multiply by table[l] along one axis in the momentum representation.
struct DiagMomentum {
    int axis;
    std::vector<cplx> table;
};
/// Centered unitary transform; sign +1 maps position to momentum amplitudes.
struct FourierAxis {
    int axis;
    int sign;
};
/// f(.., x_target, .., x_source, ..) -> f(.., x_target + t x_source, .., x_source, ..), i.e. exp(2 pi i t p_target q_source).
struct Shear {
    int target;
    int source;
    int t;
};
/// P_sigma: factor i of the result is factor sigma^{-1}(i) of the input (0-based images).
struct PermuteFactors {
    std::vector<int> sigma;
};
struct Scalar {
    cplx c;
};
/// Multiply by table[n - n_min] where n = sum_k coeffs[k] (j_{axes[k]} - N/2), i.e. f(h n).
struct DiagLinear {
    std::vector<int> axes;
    std::vector<int> coeffs;
    long n_min;
    std::vector<cplx> table;
};
/// Multiply by fn(x_{axes[0]}, x_{axes[1]}, ...) raised to power (+1 or -1).
struct DiagMulti {
    std::vector<int> axes;
    std::function<cplx(const double*)> fn;
    int power = 1;
};

using Primitive =
    std::variant<DiagPosition, DiagMomentum, FourierAxis, Shear, PermuteFactors, Scalar, DiagLinear, DiagMulti>;

Primitive invert(const Primitive& prim);
std::string describe(const Primitive& prim);

/// Primitives in application order: ops[0] acts first.
struct OperatorProgram {
    int n_factors = 1;
    std::vector<Primitive> ops;

    OperatorProgram& then(const OperatorProgram& next);  ///< appends: next acts after this
    OperatorProgram& then(const Primitive& next);
    OperatorProgram inverse() const;
};

/// Operator product X1 X2 ... Xn in written order; Xn acts first.
OperatorProgram product(const std::vector<OperatorProgram>& written_order, int n_factors);

/// fused = false applies primitive by primitive; the default sweeps runs of diagonals and same-axis transforms together.
void apply_inplace(const OperatorProgram& prog, std::vector<cplx>& amps, const LatticeSpec& spec, bool fused = true);
StateVector apply_program(const OperatorProgram& prog, const StateVector& v);

/// Linear combination of operator programs.
struct OpSum {
    struct Term {
        cplx coef;
        OperatorProgram prog;
    };
    int n_factors = 1;
    std::vector<Term> terms;

    static OpSum of(const OperatorProgram& p, cplx c = 1.0);
    OpSum operator+(const OpSum& o) const;
    OpSum operator-(const OpSum& o) const;
    OpSum operator*(cplx c) const;
    OpSum operator*(const OpSum& o) const;  ///< operator product: o acts first
    StateVector apply(const StateVector& v) const;
};

OpSum commutator(const OpSum& a, const OpSum& b);

// ---- Functions of linear forms in the Heisenberg operators -------------------------------

/// X = sum_i p[i] p_i + q[i] q_i with integer coefficients.
struct LinearForm {
    std::vector<int> p, q;

    static LinearForm zero(int m);
    static LinearForm P(int m, int axis);
    static LinearForm Q(int m, int axis);
    LinearForm operator+(const LinearForm& o) const;
    LinearForm operator-(const LinearForm& o) const;
    LinearForm operator*(int c) const;
    LinearForm operator-() const { return *this * -1; }
    bool operator==(const LinearForm& o) const { return p == o.p && q == o.q; }
};

/// Symplectic pairing; [X, Y] = pairing(X, Y) / (2 pi i).
int pairing(const LinearForm& x, const LinearForm& y);

/// Symplectic move: Fourier on an axis, chirp exp(i pi t q^2), or shear exp(2 pi i t p_target q_source).
struct FormMove {
    enum Kind { Fourier, Chirp, ShearMove } kind;
    int axis = 0;    ///< Fourier/Chirp axis, shear target
    int source = 0;  ///< shear source
    int t = 0;
};

/// X -> M X M^{-1}.
LinearForm transport(const LinearForm& x, const FormMove& m);
Primitive to_primitive(const LatticeSpec& spec, const FormMove& m);

/// Moves W with W X_k W^{-1} = sum_j qcoef[k][j] q_j for every commuting form X_k.
struct Diagonalizer {
    std::vector<FormMove> moves;          ///< application order
    std::vector<std::vector<int>> qcoef;  ///< per form, per axis
};

Diagonalizer diagonalize(const LatticeSpec& spec, const std::vector<LinearForm>& forms);

/// f(X) for one integer form, as W^{-1} f(diag) W.
OperatorProgram function_of_form(const LatticeSpec& spec, const LinearForm& x,
                                 const std::function<cplx(double)>& f);
/// f(X_1, ..., X_r) for mutually commuting forms.
OperatorProgram function_of_forms(const LatticeSpec& spec, const std::vector<LinearForm>& xs,
                                  const std::function<cplx(const std::vector<double>&)>& f);

/// exp(i pi t q^2) on one axis.
Primitive chirp(const LatticeSpec& spec, int axis, double t);

// ---- Packets and residuals -----------------------------------------------------------------

struct GaussianPacket {
    std::vector<double> center;
    std::vector<double> momentum;
    std::vector<double> width;
};

/// Product of normalized sampled Gaussians exp(-(x-c)^2/(2 w^2) + 2 pi i k x).
StateVector gaussian_packet(const LatticeSpec& spec, const GaussianPacket& g, double clip_tol = 1e-10);

/// ||w - packet|| without materializing the packet.
double distance_to_packet(const std::vector<cplx>& w, const LatticeSpec& spec, const GaussianPacket& g);

/// Continuum mass of the packet outside the position or momentum window.
double packet_clipped_mass(const LatticeSpec& spec, const GaussianPacket& g);

/// Fixed-seed ensemble of balanced packets near the origin.
std::vector<GaussianPacket> packet_ensemble(const LatticeSpec& spec, int count, std::uint64_t seed,
                                            double spread = 0.5);

/// ||a - b|| / max(||a||, ||b||).
double relative_residual(const StateVector& a, const StateVector& b);

struct ProjectiveResult {
    double residual;  ///< max(1 - |r|) plus the spread of arg r over the ensemble
    cplx scalar;      ///< mean of r, the fitted overall factor of rhs relative to lhs
};

ProjectiveResult projective_compare(const std::vector<StateVector>& lhs, const std::vector<StateVector>& rhs);

/// <v, X v> for an OpSum.
cplx expectation(const OpSum& x, const StateVector& v);

/// Worker count from QTEICH_THREADS (default 1).
int thread_count();
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace qteich
