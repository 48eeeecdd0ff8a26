#include "ckn/gauss.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "ckn/errors.hpp"

namespace ckn {

namespace {

GaussRule build_rule(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0;
            double p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double step = p1 / pp;
            z -= step;
            if (std::abs(step) < 1e-16)
                break;
        }
        // One more evaluation at the converged root for the weight.
        double p1 = 1.0;
        double p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1)
        rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order)
{
    if (order < 1 || order > 512)
        throw InvalidArgument("Gauss-Legendre order must be in [1, 512]");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[order];
    if (!slot)
        slot = std::make_unique<GaussRule>(build_rule(order));
    return *slot;
}

} // namespace ckn
