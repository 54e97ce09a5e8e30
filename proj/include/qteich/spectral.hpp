#pragma once

#include <utility>
#include <vector>

#include "qteich/lattice.hpp"
#include "qteich/qdilog.hpp"

namespace qteich {

struct EigenKernelParams {
    double s = 0.0;
    double epsilon = 1e-4;
    ModularParameter p;
};

/// nu(s) = 4 sinh(2 pi b s) sinh(2 pi s / b), real b.
double spectral_measure(double s, const ModularParameter& p);

/// <x|alpha_s> = e_b(s + x + c_b - i eps) / e_b(s - x - c_b + i eps) exp(-2 pi i (x + c_b) s).
cplx alpha_kernel(cplx x, const EigenKernelParams& k);
/// eps -> 0 limit from the values at eps, eps/2, ..., eps/2^(levels-1) (polynomial extrapolation).
cplx alpha_kernel_limit(cplx x, const EigenKernelParams& k, int levels = 4);

/// exp(2 pi beta p) psi(x) = psi(x - i sigma beta) in the coordinate basis.
inline constexpr int kShiftDirection = 1;

/// |2 cosh(2 pi beta x) psi(x) + psi(x - i sigma beta) - 2 cosh(2 pi beta s) psi(x)| / |psi(x)| with
/// beta = b^which and psi the eps -> 0 kernel.
double eigen_equation_residual(double x, const EigenKernelParams& k, int which, int sigma = kShiftDirection);

/// Sign minimizing the summed eigen residual over the sample points.
int fit_shift_direction(const EigenKernelParams& k, const std::vector<double>& xs);
/// Sign realized by the lattice momentum diagonal exp(2 pi b k) on a Gaussian.
int lattice_shift_direction(const LatticeSpec& spec, const ModularParameter& p);

/// Normalized (x - x0)^order exp(-(x - x0)^2 / (2 w^2) + 2 pi i k0 x), order 0 or 1.
struct Packet1D {
    double center = 0.0;
    double momentum = 0.0;
    double width = 0.3989422804014327;  ///< 1/sqrt(2 pi)
    int order = 0;
};

cplx packet_value(const Packet1D& f, cplx x);
/// <f|g> by quadrature on the real line.
cplx packet_inner(const Packet1D& f, const Packet1D& g);

struct OverlapConfig {
    double depth = 0.25;         ///< the x contour runs along Im x = -depth
    double half_window = 8.0;    ///< in packet widths
    double panel_width = 0.25;
    int nodes = 12;
    double boundary_tol = 1e-12;
};

/// <f|alpha_s> = int conj(f(x)) <x|alpha_s> dx. The kernel is analytic below the real axis, so the
/// x contour is lowered by cfg.depth.
cplx overlap(const Packet1D& f, const EigenKernelParams& k, const OverlapConfig& cfg = {});
/// Overlaps of every packet at every s (rows follow s).
std::vector<std::vector<cplx>> overlap_table(const std::vector<Packet1D>& fs, const std::vector<double>& s,
                                             double epsilon, const ModularParameter& p,
                                             const OverlapConfig& cfg = {});

struct CompletenessConfig {
    double s_max = 4.0;
    double epsilon = 1e-3;
    int panels = 8;
    int nodes = 16;
    double tail_tol = 1e-8;
    OverlapConfig overlap;
};

struct CompletenessResult {
    cplx exact;
    cplx at_eps;
    cplx at_half_eps;
    cplx extrapolated;
    double residual_eps;
    double residual_half_eps;
    double residual;  ///< after extrapolation
    double tail;      ///< integrand modulus at s_max
};

/// |int_0^s_max nu(s) <f|alpha_s> <alpha_s|g> ds - <f|g>| / (1 + |<f|g>|), one entry per pair.
std::vector<CompletenessResult> completeness_residuals(const std::vector<std::pair<Packet1D, Packet1D>>& pairs,
                                                       const ModularParameter& p,
                                                       const CompletenessConfig& cfg = {});

struct OrthogonalityConfig {
    double half_window = 4.0;
    int nodes = 16;
    double max_panel = 0.125;
};

/// Regularized <alpha_r|alpha_s> on [-half_window, half_window].
cplx kernel_inner(double r, double s, double epsilon, const ModularParameter& p, const OrthogonalityConfig& cfg = {});

struct WeakFormResult {
    double r;
    cplx value;     ///< int nu(s) <alpha_r|alpha_s> phi(s) ds
    double expected;  ///< phi(r)
    double error;
};

/// Gaussian bump phi centered at c with width sigma.
WeakFormResult weak_orthogonality(double r, double c, double sigma, double epsilon, const ModularParameter& p,
                                  const OrthogonalityConfig& cfg = {});

struct LatticeSpectrumReport {
    int n_points;
    double min_eigenvalue;
    std::vector<double> eigenvalues;   ///< ascending, the examined ones
    std::vector<double> s_values;
    std::vector<double> phase_errors;  ///< |arg(<v|D v> / exp(2 pi i (s^2 - c_b^2)))|
    std::vector<double> d_moduli;      ///< |<v|D v>|
    std::vector<double> kernel_match;  ///< |<v|psi_s>| / (|v| |psi_s|) with psi_s sampled at eps = h
    double max_phase_error;
    double commutator;         ///< max |<w|D L+ v> - <L+ w|D v>| / (|L+ w| |L+ v|) over packet pairs
    double strong_commutator;  ///< mean ||[D, L+] v|| / ||L+ v||; cutoff dependent
    int shift_direction;
};

/// Dense L+ = 2 cosh(2 pi b q) + exp(2 pi b p) on one factor, entries clipped at cap; examines the
/// `interior` lowest eigenvectors.
LatticeSpectrumReport lattice_spectrum_check(const LatticeSpec& spec, const ModularParameter& p, int interior = 10,
                                             double cap = 1e6);

}  // namespace qteich
