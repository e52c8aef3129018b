#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ppsdf/field.hpp"

namespace ppsdf {

/// One training observation: a surface position with its unit outward
/// normal. Positions are in model-domain coordinates.
struct SurfaceSample {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d::Zero();
};

/// Cost weights and the tension control-point policy.
struct RegularizerSpec {
    double lambda_d = 1.0;    // distance cost weight
    double lambda_g = 1.0;    // gradient (normal) cost weight
    double lambda_t = 0.1;    // tension cost weight
    double sigma2 = 1e-4;     // measurement noise variance
    int tension_points = 4;   // R, control points per sample
    double ray_extent = 0.0;  // half-span of the normal ray; 0 = auto (0.35 * domain diagonal)

    void validate() const;
    double effective_ray_extent(const BasisConfig& cfg) const;
};

/// Stacked least-squares system: A w = s.
struct SystemRows {
    Eigen::MatrixXd A;
    Eigen::VectorXd s;
};

/// Uniformly spaced control points on the sample's normal ray, offset 0
/// excluded, clipped to the domain (the result may hold fewer than R
/// points, possibly none).
std::vector<Eigen::Vector3d> tension_points(const SurfaceSample& sample,
                                            const RegularizerSpec& spec,
                                            const BasisConfig& cfg);

/// Builds the stacked rows for a batch of samples: per sample one
/// distance row (target 0) and D gradient rows (targets the normal
/// components), plus per tension control point the D(D+1)/2 distinct
/// second-derivative rows with mixed partials weighted by sqrt(2) so
/// that ||rows * w||^2 equals the squared Frobenius norm of the Hessian.
SystemRows assemble_rows(const std::vector<SurfaceSample>& samples,
                         const RegularizerSpec& spec, const FieldModel& model);

/// Batch ridge solution of the Bayesian posterior:
///   (A^T A + sigma2 * P0) w = A^T s + sigma2 * P0 * w0,  P = P0 + A^T A / sigma2.
/// The prior (w0, P0) comes from `prior`; its config carries over.
FieldModel batch_fit(const std::vector<SurfaceSample>& samples,
                     const RegularizerSpec& spec, const FieldModel& prior);

/// Recursive least-squares update over one block of rows. Equivalent to
/// folding the rows into the batch posterior: P <- P + A^T A / sigma2,
/// w <- w + P_new^{-1} A^T (s - A w) / sigma2 (the information form of
/// the Kalman-gain update).
void rls_update(FieldModel& model, const SystemRows& rows, double sigma2);

/// One online step: tension points + row assembly + rls_update for the
/// given batch of samples. Empty batches leave the model unchanged.
void ingest(FieldModel& model, const std::vector<SurfaceSample>& samples,
            const RegularizerSpec& spec);

}  // namespace ppsdf
