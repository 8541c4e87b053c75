#pragma once

#include <span>
#include <vector>

namespace rlab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    int size() const { return static_cast<int>(nodes.size()); }
};

GaussRule gauss_legendre(int n);
/// Shared 16- and 32-point rules.
const GaussRule& gauss16();
const GaussRule& gauss32();

/// Sum with a fixed pairwise tree over blocks of 64, independent of threading.
double pairwise_sum(std::span<const double> values);

}  // namespace rlab
