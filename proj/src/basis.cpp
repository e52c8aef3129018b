#include "ppsdf/basis.hpp"

#include <cmath>

namespace ppsdf {

void BasisConfig::validate() const {
    if (degree < 2) throw std::invalid_argument("basis: degree K must be >= 2");
    if (segments < 1) throw std::invalid_argument("basis: segments S must be >= 1");
    if (dim < 1 || dim > 3) throw std::invalid_argument("basis: dim D must be in {1,2,3}");
    for (int d = 0; d < dim; ++d) {
        if (!(domain[d].lo < domain[d].hi))
            throw std::invalid_argument("basis: domain lo must be < hi on every axis");
    }
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

Eigen::RowVectorXd bernstein_basis(int K, double t) {
    if (K < 0) throw std::invalid_argument("bernstein_basis: K must be >= 0");
    if (t < 0.0 || t > 1.0) throw std::domain_error("bernstein_basis: t outside [0,1]");
    Eigen::RowVectorXd phi(K + 1);
    for (int k = 0; k <= K; ++k)
        phi(k) = binomial(K, k) * std::pow(1.0 - t, K - k) * std::pow(t, k);
    return phi;
}

Eigen::MatrixXd coeff_matrix(int K) {
    if (K < 1) throw std::invalid_argument("coeff_matrix: K must be >= 1");
    // phi_k(t) = C(K,k) t^k (1-t)^(K-k); expanding (1-t)^(K-k) gives the
    // monomial coefficient of t^i as C(K,k) C(K-k, i-k) (-1)^(i-k).
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(K + 1, K + 1);
    for (int k = 0; k <= K; ++k)
        for (int i = k; i <= K; ++i)
            B(i, k) = binomial(K, k) * binomial(K - k, i - k) *
                      ((i - k) % 2 == 0 ? 1.0 : -1.0);
    return B;
}

Eigen::MatrixXd constraint_matrix(int K, int S) {
    if (K < 2) throw std::invalid_argument("constraint_matrix: K must be >= 2");
    if (S < 1) throw std::invalid_argument("constraint_matrix: S must be >= 1");
    const int M = (K - 1) * S + 2;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero((K + 1) * S, M);
    // Segment 0 owns its K+1 weights; every later segment ties its first
    // two weights to the previous one (w_K^a = w_0^b, w_1^b = -w_{K-1}^a
    // + 2 w_0^b) and owns weights 2..K.
    for (int k = 0; k <= K; ++k) C(k, k) = 1.0;
    int col = K + 1;
    for (int s = 1; s < S; ++s) {
        const int row = s * (K + 1);
        const int prev = (s - 1) * (K + 1);
        C.row(row) = C.row(prev + K);
        C.row(row + 1) = 2.0 * C.row(prev + K) - C.row(prev + K - 1);
        for (int k = 2; k <= K; ++k) C(row + k, col++) = 1.0;
    }
    return C;
}

std::pair<int, double> locate_segment(double x, const Interval& axis, int S) {
    if (x < axis.lo || x > axis.hi)
        throw std::domain_error("locate_segment: coordinate outside domain");
    const double u = (x - axis.lo) / axis.width() * S;
    int seg = static_cast<int>(std::floor(u));
    if (seg >= S) seg = S - 1;  // x == hi lands in the last segment
    return {seg, u - seg};
}

Basis1D::Basis1D(int K, int S, Interval axis)
    : K_(K), S_(S), axis_(axis), inv_h_(S / axis.width()) {
    const Eigen::MatrixXd B = coeff_matrix(K);
    const Eigen::MatrixXd C = constraint_matrix(K, S);
    bc_.resize((K + 1) * S, C.cols());
    for (int s = 0; s < S; ++s)
        bc_.middleRows(s * (K + 1), K + 1) = B * C.middleRows(s * (K + 1), K + 1);
}

Eigen::RowVectorXd Basis1D::row(double x, int order) const {
    auto [seg, t] = locate_segment(x, axis_, S_);
    Eigen::RowVectorXd T = Eigen::RowVectorXd::Zero(K_ + 1);
    switch (order) {
        case 0:
            for (int i = 0; i <= K_; ++i) T(i) = std::pow(t, i);
            break;
        case 1:
            for (int i = 1; i <= K_; ++i) T(i) = i * std::pow(t, i - 1);
            break;
        case 2:
            for (int i = 2; i <= K_; ++i) T(i) = i * (i - 1) * std::pow(t, i - 2);
            break;
        default:
            throw std::invalid_argument("Basis1D::row: order must be 0, 1, or 2");
    }
    Eigen::RowVectorXd r = T * bc_.middleRows(seg * (K_ + 1), K_ + 1);
    return std::pow(inv_h_, order) * r;
}

double clamp_to_domain(double x, const Interval& axis) {
    return std::min(std::max(x, axis.lo), axis.hi);
}

}  // namespace ppsdf
