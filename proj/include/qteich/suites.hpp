#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qteich/qdilog.hpp"

namespace qteich {

enum class Suite { Qdilog, Ramanujan, System, Pentagon, YangBaxter, Dehn, Spectral, Groupoid, Qgroup, All };

Suite parse_suite(const std::string& name);
std::string suite_name(Suite s);

struct SuiteConfig {
    Suite suite = Suite::All;
    cplx b = 1.0;
    int n_points = 0;  ///< 0 keeps each suite's default grid
    std::uint64_t seed = 7;
    std::map<std::string, double> tolerances;  ///< overrides keyed by check_id
    double qgroup_b = 0.4;  ///< the quantum-group suite needs q != -1
    std::vector<std::string> only;  ///< check_id prefixes to run; empty runs every check
};

struct CheckRecord {
    std::string check_id;
    std::string relation;  ///< the identity checked, in words
    std::map<std::string, std::string> params;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Records sorted by check_id. Unknown tolerance keys raise InvalidParameter before anything runs.
/// A check that throws is recorded as failed with infinite residual and the message in params["error"].
std::vector<CheckRecord> run_suite(const SuiteConfig& cfg);

/// check_ids a suite can emit, for validating tolerance overrides.
std::vector<std::string> suite_check_ids(Suite s);

std::string report_json(const std::vector<CheckRecord>& records);
std::string report_csv(const std::vector<CheckRecord>& records);

/// "1", "-0.5", "2i", "-i", "0.8+0.6i", "1e-3-2.5e-1i".
cplx parse_complex(const std::string& text);

/// Strip sample points |Im z| <= 0.6 |Im c_b|, |Re z| <= 2.
std::vector<cplx> strip_points(const ModularParameter& p, int count, std::uint64_t seed);

/// |e_b(z) e_b(-z) / rhs - 1|.
double inversion_residual(cplx z, const ModularParameter& p);
/// |e_b(z - i beta/2) - (1 + exp(2 pi beta z)) e_b(z + i beta/2)| relative, beta = b^sign.
double shift_residual(cplx z, const ModularParameter& p, int sign);
/// |conj(e_b(z)) e_b(conj z) - 1|, real b.
double unitarity_residual(cplx z, const ModularParameter& p);
/// |e_b(z) - e_{1/b}(z)| relative.
double duality_residual(cplx z, const ModularParameter& p);
/// Integral against product evaluation, relative, Im b^2 > 0.
double strategy_residual(cplx z, const ModularParameter& p);

}  // namespace qteich
