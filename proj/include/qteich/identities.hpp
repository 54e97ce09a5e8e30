#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qteich/qdilog.hpp"

namespace qteich {

enum class RamanujanDomain { Strict, Relaxed };

struct RamanujanParams {
    cplx u, v, w;
};

bool in_strict_domain(const RamanujanParams& r, const ModularParameter& p);
bool in_relaxed_domain(const RamanujanParams& r, const ModularParameter& p);

/// Strict if possible, else Relaxed; DomainViolation when neither holds.
RamanujanDomain classify(const RamanujanParams& r, const ModularParameter& p);

/// Both closed-form right-hand sides of the Ramanujan integral.
std::pair<cplx, cplx> ramanujan_closed(const RamanujanParams& r, const ModularParameter& p,
                                       const QuadratureConfig& qc = {});

enum class PathChoice { Auto, RealLine };

struct RamanujanConfig {
    QuadratureConfig qdilog;
    int panel_nodes = 16;        ///< Gauss-Legendre nodes per panel
    double panel_scale = 1.0;    ///< multiplies the default panel length
    double kink_offset = 0.25;   ///< distance of deformed-path kinks from the lattice apexes
    double ray_margin = 0.05;    ///< radians kept inside the admissible end sectors
    double tail_tolerance = 1e-15;
    PathChoice path = PathChoice::Auto;
};

struct IntegralValue {
    cplx value;
    double truncation_error;
    int nodes;
    RamanujanDomain domain;
};

IntegralValue ramanujan_integral(const RamanujanParams& r, const ModularParameter& p,
                                 const RamanujanConfig& cfg = {});

/// |integral - closed| / (1 + |closed|), closed being the first form.
double verify_ramanujan(const RamanujanParams& r, const ModularParameter& p,
                        const RamanujanConfig& cfg = {});

/// Fixed-seed samples from the strict domain with margins from every boundary.
std::vector<RamanujanParams> sample_strict(const ModularParameter& p, int count, std::uint64_t seed);

}  // namespace qteich
