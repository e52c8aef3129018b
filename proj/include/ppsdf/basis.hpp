#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <vector>

namespace ppsdf {

/// Axis-aligned interval [lo, hi] in world units.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
};

/// Configuration of the piecewise Bernstein basis: polynomial degree,
/// segment count per axis, input dimension, and the per-axis domain.
struct BasisConfig {
    int degree = 3;     // K
    int segments = 4;   // S, per axis
    int dim = 3;        // D, 1..3
    std::array<Interval, 3> domain{Interval{}, Interval{}, Interval{}};

    /// Free parameters per axis after C1 constraints: (K-1)*S + 2.
    int params_per_axis() const { return (degree - 1) * segments + 2; }

    void validate() const;
};

/// Binomial coefficient as a double (exact for the small K used here).
double binomial(int n, int k);

/// Bernstein basis values of degree K at local parameter t in [0, 1].
/// Entry k is K!/(k!(K-k)!) * (1-t)^(K-k) * t^k.
Eigen::RowVectorXd bernstein_basis(int K, double t);

/// (K+1)x(K+1) matrix B with T(t)*B = bernstein_basis(K, t), where
/// T(t) = [1 t t^2 ... t^K]. Lower-triangular in the monomial ordering.
Eigen::MatrixXd coeff_matrix(int K);

/// ((K+1)*S) x ((K-1)*S + 2) matrix mapping free weights to raw
/// per-segment Bernstein weights, enforcing C0/C1 continuity at the
/// interior knots. Free parameters are ordered as: all K+1 weights of
/// segment 0, then weights 2..K of each following segment.
Eigen::MatrixXd constraint_matrix(int K, int S);

/// Maps world coordinate x to (segment index, local t in [0,1]).
/// Interior knots belong to the right segment; x == hi maps to (S-1, 1).
std::pair<int, double> locate_segment(double x, const Interval& axis, int S);

/// One-dimensional basis (and derivative) row over axis `axis_index`
/// of `cfg`. Precomputes B*C once; evaluation touches only the K+1
/// columns of the containing segment.
class Basis1D {
public:
    Basis1D(int K, int S, Interval axis);

    int params() const { return static_cast<int>(bc_.cols()); }
    const Interval& axis() const { return axis_; }
    int segments() const { return S_; }
    int degree() const { return K_; }

    /// Row vector of length params(); `order` in {0,1,2} selects value,
    /// first or second derivative in world coordinates (chain-rule
    /// factor (S/(hi-lo))^order included).
    Eigen::RowVectorXd row(double x, int order) const;

private:
    int K_;
    int S_;
    Interval axis_;
    double inv_h_;          // S / (hi - lo)
    Eigen::MatrixXd bc_;    // (K+1)*S x M, the product B*C stacked per segment
};

/// Clamps x into the axis interval. Callers that want to query at or
/// beyond the boundary must opt in explicitly through this helper;
/// basis evaluation itself rejects out-of-domain inputs.
double clamp_to_domain(double x, const Interval& axis);

}  // namespace ppsdf
