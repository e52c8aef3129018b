#include "ppsdf/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace ppsdf {

void RegularizerSpec::validate() const {
    if (lambda_d < 0 || lambda_g < 0 || lambda_t < 0)
        throw std::invalid_argument("regularizer: lambda weights must be nonnegative");
    if (lambda_d == 0 && lambda_g == 0)
        throw std::invalid_argument("regularizer: lambda_d or lambda_g must be positive");
    if (sigma2 <= 0) throw std::invalid_argument("regularizer: sigma2 must be positive");
    if (tension_points < 0)
        throw std::invalid_argument("regularizer: tension point count must be >= 0");
    if (tension_points > 0 && ray_extent < 0)
        throw std::invalid_argument("regularizer: ray extent must be >= 0");
}

double RegularizerSpec::effective_ray_extent(const BasisConfig& cfg) const {
    if (ray_extent > 0) return ray_extent;
    double diag2 = 0.0;
    for (int d = 0; d < cfg.dim; ++d) diag2 += cfg.domain[d].width() * cfg.domain[d].width();
    return 0.35 * std::sqrt(diag2);
}

std::vector<Eigen::Vector3d> tension_points(const SurfaceSample& sample,
                                            const RegularizerSpec& spec,
                                            const BasisConfig& cfg) {
    const int R = spec.tension_points;
    std::vector<Eigen::Vector3d> pts;
    if (R < 1) return pts;
    const double e = spec.effective_ray_extent(cfg);

    // R+1 uniform offsets over [-e, e]; the one nearest zero is dropped
    // (it is exactly zero for even R), leaving R candidates off-surface.
    std::vector<double> offsets;
    int skip = 0;
    for (int i = 1; i <= R; ++i)
        if (std::abs(-e + 2.0 * e * i / R) < std::abs(-e + 2.0 * e * skip / R)) skip = i;
    for (int i = 0; i <= R; ++i)
        if (i != skip) offsets.push_back(-e + 2.0 * e * i / R);

    for (double t : offsets) {
        Eigen::Vector3d p = sample.position + t * sample.normal;
        bool inside = true;
        for (int d = 0; d < cfg.dim; ++d)
            if (p(d) < cfg.domain[d].lo || p(d) > cfg.domain[d].hi) inside = false;
        if (inside) pts.push_back(p);
    }
    return pts;
}

SystemRows assemble_rows(const std::vector<SurfaceSample>& samples,
                         const RegularizerSpec& spec, const FieldModel& model) {
    spec.validate();
    const BasisConfig& cfg = model.config();
    const int D = cfg.dim;
    const long n = model.num_params();
    const int tension_rows = D * (D + 1) / 2;

    std::vector<std::vector<Eigen::Vector3d>> controls(samples.size());
    long rows = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
        if (spec.lambda_t > 0)
            controls[i] = tension_points(samples[i], spec, cfg);
        rows += 1 + D + static_cast<long>(controls[i].size()) * tension_rows;
    }

    SystemRows out;
    out.A.resize(rows, n);
    out.s.resize(rows);
    long r = 0;
    const double sqrt2 = std::sqrt(2.0);
    for (size_t i = 0; i < samples.size(); ++i) {
        const SurfaceSample& smp = samples[i];
        out.A.row(r) = spec.lambda_d * model.features(smp.position, {0, 0, 0});
        out.s(r++) = 0.0;
        for (int d = 0; d < D; ++d) {
            std::array<int, 3> orders{0, 0, 0};
            orders[d] = 1;
            out.A.row(r) = spec.lambda_g * model.features(smp.position, orders);
            out.s(r++) = spec.lambda_g * smp.normal(d);
        }
        for (const Eigen::Vector3d& p : controls[i]) {
            for (int a = 0; a < D; ++a) {
                for (int b = a; b < D; ++b) {
                    std::array<int, 3> orders{0, 0, 0};
                    orders[a] += 1;
                    orders[b] += 1;
                    const double scale = (a == b) ? spec.lambda_t : sqrt2 * spec.lambda_t;
                    out.A.row(r) = scale * model.features(p, orders);
                    out.s(r++) = 0.0;
                }
            }
        }
    }
    return out;
}

FieldModel batch_fit(const std::vector<SurfaceSample>& samples,
                     const RegularizerSpec& spec, const FieldModel& prior) {
    spec.validate();
    if (samples.empty()) return prior;
    const SystemRows sys = assemble_rows(samples, spec, prior);
    const Eigen::MatrixXd AtA = sys.A.transpose() * sys.A;
    const Eigen::MatrixXd lhs = AtA + spec.sigma2 * prior.precision();
    const Eigen::VectorXd rhs =
        sys.A.transpose() * sys.s + spec.sigma2 * prior.precision() * prior.weights();
    Eigen::LLT<Eigen::MatrixXd> llt(lhs);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("batch_fit: normal equations not positive definite");
    FieldModel out = prior;
    out.set_state(llt.solve(rhs), prior.precision() + AtA / spec.sigma2);
    return out;
}

void rls_update(FieldModel& model, const SystemRows& rows, double sigma2) {
    if (rows.A.rows() == 0) throw std::invalid_argument("rls_update: empty row block");
    if (sigma2 <= 0) throw std::invalid_argument("rls_update: sigma2 must be positive");

    model.add_information(rows.A, sigma2);
    const auto& llt = model.cholesky();
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("rls_update: precision matrix lost positive definiteness");
    const Eigen::VectorXd innovation = rows.s - rows.A * model.weights();
    model.set_weights(model.weights() +
                      llt.solve(rows.A.transpose() * innovation) / sigma2);
}

void ingest(FieldModel& model, const std::vector<SurfaceSample>& samples,
            const RegularizerSpec& spec) {
    if (samples.empty()) return;
    rls_update(model, assemble_rows(samples, spec, model), spec.sigma2);
}

}  // namespace ppsdf
