#pragma once

#include <vector>

namespace ckn {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on the three-term recurrence; rules are cached per order
/// and the cache is safe to read from concurrent workers.
const GaussRule& gauss_legendre(int order);

} // namespace ckn
