#pragma once

#include <functional>
#include <span>
#include <vector>

namespace mbph {

/// Gauss-Legendre rule on the reference interval [-1, 1]. Exact for
/// polynomials of degree 2 * order - 1.
class GaussLegendre {
public:
    explicit GaussLegendre(int order);

    int order() const { return static_cast<int>(nodes_.size()); }
    int exact_degree() const { return 2 * order() - 1; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Composite rule: `panels` equal panels, each further split at any
/// breakpoint that falls inside it, `order` Gauss points per sub-panel.
struct QuadSpec {
    int order = 8;
    int panels = 8;
};

/// Rule used for whole-field integrals over [0, 1] (8 x 64 points).
inline constexpr QuadSpec kFieldQuad{8, 64};

/// Integrates a scalar function over [lo, hi].
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadSpec& spec = kFieldQuad, std::span<const double> breakpoints = {});

/// Quadrature points and weights of the composite rule, for callers that
/// evaluate vector-valued integrands themselves.
struct QuadPoints {
    std::vector<double> x;
    std::vector<double> w;
};
QuadPoints composite_points(double lo, double hi, const QuadSpec& spec,
                            std::span<const double> breakpoints = {});

} // namespace mbph
