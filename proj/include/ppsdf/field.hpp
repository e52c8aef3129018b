#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "ppsdf/basis.hpp"

namespace ppsdf {

/// Distance and gradient of the field at one query point.
struct QueryResult {
    double distance = 0.0;
    Eigen::Vector3d gradient = Eigen::Vector3d::Zero();  // first D entries used
};

/// The learned SDF: basis configuration, constrained superposition
/// weights w, and the weight precision matrix P (inverse covariance).
/// Immutable through the query interface; the solver mutates it under
/// a single-writer contract.
class FieldModel {
public:
    FieldModel() = default;
    FieldModel(BasisConfig cfg, Eigen::VectorXd w, Eigen::MatrixXd P);

    const BasisConfig& config() const { return cfg_; }
    const Eigen::VectorXd& weights() const { return w_; }
    const Eigen::MatrixXd& precision() const { return P_; }

    int num_params() const { return static_cast<int>(w_.size()); }

    /// Scalars held by the model: N_w weights plus the N_w^2 precision
    /// entries. No training data is retained.
    long state_size() const { return w_.size() + w_.size() * w_.size(); }

    /// Tensor-product feature row at x with the given per-axis
    /// derivative orders (each 0..2, total <= 2). Kronecker ordering is
    /// axis 0 outermost.
    Eigen::RowVectorXd features(const Eigen::Vector3d& x,
                                const std::array<int, 3>& orders) const;

    QueryResult query(const Eigen::Vector3d& x) const;
    Eigen::MatrixXd query_hessian(const Eigen::Vector3d& x) const;

    /// Solver-side mutation; keeps P symmetric and drops the cached
    /// Cholesky factor.
    void set_state(Eigen::VectorXd w, Eigen::MatrixXd P);

    /// Replaces the weights without touching P or its factor.
    void set_weights(Eigen::VectorXd w);

    /// P += A^T A / sigma2. Small row blocks update the cached Cholesky
    /// factor one rank at a time, O(rows * N^2), so a per-sample ingest
    /// avoids a fresh O(N^3) factorization; large blocks refactor.
    void add_information(const Eigen::MatrixXd& A, double sigma2);

    /// Cholesky factor of P, computed on demand and cached.
    const Eigen::LLT<Eigen::MatrixXd>& cholesky() const;

    const Basis1D& basis(int axis) const { return bases_[axis]; }

private:
    BasisConfig cfg_;
    Eigen::VectorXd w_;
    Eigen::MatrixXd P_;
    std::vector<Basis1D> bases_;  // one per axis, derived from cfg_
    mutable Eigen::LLT<Eigen::MatrixXd> chol_;
    mutable bool chol_valid_ = false;
};

/// Number of constrained superposition weights M^D; for K=3, D=3 this
/// equals 8(S+1)^3.
long param_count(const BasisConfig& cfg);

/// Model whose weights are a ridge fit of the analytic sphere SDF
/// ||x - center|| - radius over a dense domain grid, with precision
/// initialized to prior_strength * I.
FieldModel init_spherical_prior(const BasisConfig& cfg,
                                const Eigen::Vector3d& center, double radius,
                                double prior_strength,
                                int grid_per_axis = 16);

/// Uniform scale + offset from raw world coordinates into the model
/// domain (model = scale * (raw - offset)); carried in snapshots so
/// later commands can map queries and ground truth consistently.
struct WorldMapping {
    double scale = 1.0;
    Eigen::Vector3d offset = Eigen::Vector3d::Zero();
};

/// Binary model snapshot, bit-exact for w and P across save/load.
void save_model(const FieldModel& model, const std::string& path,
                const WorldMapping& mapping = {});
FieldModel load_model(const std::string& path, WorldMapping* mapping = nullptr);

}  // namespace ppsdf
