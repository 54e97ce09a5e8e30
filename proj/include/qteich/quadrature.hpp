#pragma once

#include <vector>

namespace qteich {

struct GaussRule {
    std::vector<double> x;  ///< nodes on [-1, 1]
    std::vector<double> w;
};

/// n-point Gauss-Legendre rule, cached per n.
const GaussRule& gauss_legendre(int n);

}  // namespace qteich
