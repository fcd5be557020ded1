#include "mbph/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mbph/errors.hpp"

namespace mbph {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw ParameterError("Gauss-Legendre order must be >= 1");
    nodes_.resize(order);
    weights_.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged root for the weight.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes_[i] = -x;
        nodes_[order - 1 - i] = x;
        weights_[i] = w;
        weights_[order - 1 - i] = w;
    }
    if (order % 2 == 1) nodes_[order / 2] = 0.0;
}

QuadPoints composite_points(double lo, double hi, const QuadSpec& spec,
                            std::span<const double> breakpoints) {
    if (spec.panels < 1) throw ParameterError("quadrature needs at least one panel");
    const GaussLegendre rule(spec.order);

    std::vector<double> cuts;
    cuts.reserve(spec.panels + 1 + breakpoints.size());
    for (int p = 0; p <= spec.panels; ++p)
        cuts.push_back(lo + (hi - lo) * static_cast<double>(p) / spec.panels);
    for (double bp : breakpoints)
        if (bp > lo && bp < hi) cuts.push_back(bp);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    QuadPoints q;
    q.x.reserve((cuts.size() - 1) * rule.order());
    q.w.reserve(q.x.capacity());
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
        const double half = 0.5 * (cuts[c + 1] - cuts[c]);
        if (half <= 0.0) continue;
        for (int k = 0; k < rule.order(); ++k) {
            q.x.push_back(mid + half * rule.nodes()[k]);
            q.w.push_back(half * rule.weights()[k]);
        }
    }
    return q;
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadSpec& spec, std::span<const double> breakpoints) {
    const QuadPoints q = composite_points(lo, hi, spec, breakpoints);
    double sum = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) sum += q.w[k] * f(q.x[k]);
    return sum;
}

} // namespace mbph
