#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>

#include "ppsdf/basis.hpp"
#include "ppsdf/solver.hpp"

namespace ppsdf {

/// Full run configuration: basis, regularizer, prior, paths, seeds.
/// Loaded from a flat key=value file; command-line flags override file
/// values. Unknown keys are rejected.
struct RunConfig {
    // basis
    int degree = 3;
    int segments = 4;
    int dim = 3;
    double margin = 0.25;

    // regularizer
    double lambda_d = 1.0;
    double lambda_g = 1.0;
    double lambda_t = 0.1;
    double sigma2 = 1e-4;
    int tension_points = 4;
    double ray_extent = 0.0;  // 0 = auto (0.35 * domain diagonal)

    // prior
    Eigen::Vector3d prior_center = Eigen::Vector3d::Constant(0.5);
    double prior_radius = 0.25;
    double prior_strength = 1e2;

    // run
    long batch_size = 1;
    std::uint64_t seed = 0;
    int grid_res = 64;
    double iso = 0.0;
    std::string input_path;
    std::string output_path;
    std::string model_path;

    // simulate
    long sim_steps = 500;
    double sim_target_distance = 0.08;
    double sim_noise_sigma = 0.002;

    BasisConfig basis_config() const;  // unit-cube domain
    RegularizerSpec regularizer_spec() const;
    void validate() const;
};

/// Parses a flat `key = value` file (# comments). Throws on unknown or
/// malformed keys, naming the offender.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});

/// Applies `key=value` overrides (same key set as the file format).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace ppsdf
