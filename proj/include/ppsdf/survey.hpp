#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ppsdf/field.hpp"
#include "ppsdf/solver.hpp"

namespace ppsdf {

/// Analytic 2D shape with an exact SDF; ground truth for the simulated
/// surveying experiment.
class HiddenShape {
public:
    virtual ~HiddenShape() = default;
    virtual double sdf(const Eigen::Vector2d& p) const = 0;
    Eigen::Vector2d normal(const Eigen::Vector2d& p) const;  // central differences

    /// First surface hit of the ray p + t*dir (t > 0), by sphere tracing
    /// on the exact SDF. Empty when the ray misses within max_range.
    std::optional<Eigen::Vector2d> raycast(const Eigen::Vector2d& origin,
                                           const Eigen::Vector2d& dir,
                                           double max_range = 10.0) const;
};

class Circle : public HiddenShape {
public:
    Circle(Eigen::Vector2d center, double radius) : center_(center), radius_(radius) {}
    double sdf(const Eigen::Vector2d& p) const override {
        return (p - center_).norm() - radius_;
    }
    const Eigen::Vector2d& center() const { return center_; }
    double radius() const { return radius_; }

private:
    Eigen::Vector2d center_;
    double radius_;
};

class Capsule : public HiddenShape {
public:
    Capsule(Eigen::Vector2d a, Eigen::Vector2d b, double radius)
        : a_(a), b_(b), radius_(radius) {}
    double sdf(const Eigen::Vector2d& p) const override;

private:
    Eigen::Vector2d a_, b_;
    double radius_;
};

/// Simple closed polygon (vertices in order); exact SDF with winding sign.
class Polygon : public HiddenShape {
public:
    explicit Polygon(std::vector<Eigen::Vector2d> vertices) : verts_(std::move(vertices)) {}
    double sdf(const Eigen::Vector2d& p) const override;

private:
    std::vector<Eigen::Vector2d> verts_;
};

struct AgentState {
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    Eigen::Vector2d heading = Eigen::Vector2d::UnitX();
    long step = 0;
};

struct SenseConfig {
    int rays = 7;
    double cone_half_angle = 0.6;  // radians, around the heading
    double noise_sigma = 0.0;      // isotropic position noise
    double max_range = 2.0;
};

/// Casts rays in a cone around the agent heading; hits return the
/// surface point (perturbed by noise) with the exact shape normal.
std::vector<SurfaceSample> sense(const HiddenShape& shape, const AgentState& agent,
                                 const SenseConfig& cfg, std::uint64_t seed);

struct ControlGains {
    double tangential = 1.0;  // k_t
    double normal = 4.0;      // k_n, proportional distance correction
};

/// One step of level-set-tangential control on the learned field:
/// move along the rotated gradient plus a proportional correction
/// toward the target distance d*, clamped to the domain.
AgentState control_step(const FieldModel& model, const AgentState& agent,
                        double target_distance, const ControlGains& gains, double step);

struct EpisodeConfig {
    long steps = 500;
    double target_distance = 0.08;
    double step_size = 0.01;
    ControlGains gains{};
    SenseConfig sense{};
    // Streaming episodes revisit the same region thousands of times, so
    // the accumulated tension information swamps the data at the batch
    // default weight; a lighter tension keeps the near field sharp.
    RegularizerSpec regularizer{.lambda_t = 0.01};
    long metrics_interval = 50;  // steps between MAE probes
    std::uint64_t seed = 0;
};

struct EpisodeStep {
    long step = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    double field_value = 0.0;
    double gradient_norm = 0.0;
    double true_distance = 0.0;
    double mae_near = -1.0;  // filled on metrics steps only
};

struct EpisodeResult {
    std::vector<EpisodeStep> trajectory;
    FieldModel model;
    double final_mae_near = 0.0;
    bool halted_on_degenerate_gradient = false;
};

/// sense -> ingest -> control loop, recording per-step state and a
/// periodic near-surface MAE against the shape's exact SDF.
EpisodeResult run_episode(const HiddenShape& shape, FieldModel prior,
                          const EpisodeConfig& cfg, AgentState start);

/// Near-surface (|sdf| < 0.05) MAE of a 2D model against the shape,
/// probed on a dense domain grid.
double near_surface_mae(const FieldModel& model, const HiddenShape& shape,
                        int grid = 64, double shell = 0.05);

/// Text trajectory log: `step x y f |grad| mae_near` per line.
void write_trajectory(const std::vector<EpisodeStep>& traj, const std::string& path);

}  // namespace ppsdf
