#pragma once

#include <complex>
#include <string>

namespace qteich {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Coupling b and the constants derived from it.
struct ModularParameter {
    cplx b;
    cplx c_b;
    cplx q;
    cplx qbar;
    cplx zeta;
    bool unitary_regime = false;

    /// Validates Re b > 0, Im b >= 0 and fills in the derived constants.
    static ModularParameter make(cplx b, double regime_tol = 1e-12);
    /// Recomputes every derived constant from b and compares bitwise.
    bool consistent() const;
};

struct QuadratureConfig {
    double contour_offset = 0.0;     ///< height of Im w; 0 selects 0.1 |Im c_b|
    double truncation_radius = 0.0;  ///< |Re w| cutoff; 0 selects it from the decay rate
    int node_count = 0;              ///< nodes on [-R, R]; 0 selects the step from the pole distance
    int continuation_depth_max = 64;
    double tail_tolerance = 1e-16;
    double pole_tolerance = 1e-6;
    double strip_fraction = 0.75;    ///< dispatcher uses the integral when |Im z| <= fraction |Im c_b|
};

struct PoleIndex {
    enum class Kind { Zero, Pole };
    int m = 0;
    int n = 0;
    Kind kind = Kind::Zero;
};

cplx eb_integral(cplx z, const ModularParameter& p, const QuadratureConfig& cfg = {});

struct ProductValue {
    cplx value;
    double tail_bound;  ///< bound on the relative error from dropping factors past trunc
};

ProductValue eb_product(cplx z, const ModularParameter& p, int trunc);

struct Evaluation {
    cplx value;
    std::string strategy;  ///< "integral", "product" or "integral+shift"
    int shifts = 0;
    double error_estimate = 0.0;
};

/// e_b(z) anywhere off the poles: shift equations carry z into the strip.
Evaluation eb_eval(cplx z, const ModularParameter& p, const QuadratureConfig& cfg = {});

inline cplx eb(cplx z, const ModularParameter& p, const QuadratureConfig& cfg = {}) {
    return eb_eval(z, p, cfg).value;
}

cplx pole_zero_location(const PoleIndex& idx, const ModularParameter& p);

/// Nearest pole of e_b to z, with its distance.
PoleIndex nearest_pole(cplx z, const ModularParameter& p, double* distance);

/// Lattice theta series sum_n exp(i pi tau n^2 + 2 pi i z n), Im tau > 0.
cplx theta(cplx z, cplx tau, double tol = 1e-18);

/// (x; r)_infty truncated once factors stop changing the product.
cplx qpochhammer(cplx x, cplx r, int max_factors = 100000);

enum class Sector { Unit, Gaussian, UpperTheta, LowerTheta };

/// Sector of Eq. "behavior at infinity" containing arg z, or SectorBoundary.
Sector asymptotic_sector(cplx z, const ModularParameter& p, double wall_tol = 1e-2);

cplx eb_asymptotic(cplx z, const ModularParameter& p, double threshold = 3.0,
                   double wall_tol = 1e-2);

/// exp(i pi z^2 - i pi (1 + 2 c_b^2) / 6), the right side of the inversion relation.
cplx inversion_factor(cplx z, const ModularParameter& p);

}  // namespace qteich
