#include "ppsdf/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace ppsdf {

BasisConfig RunConfig::basis_config() const {
    BasisConfig c;
    c.degree = degree;
    c.segments = segments;
    c.dim = dim;
    for (int d = 0; d < 3; ++d) c.domain[d] = {0.0, 1.0};
    return c;
}

RegularizerSpec RunConfig::regularizer_spec() const {
    RegularizerSpec s;
    s.lambda_d = lambda_d;
    s.lambda_g = lambda_g;
    s.lambda_t = lambda_t;
    s.sigma2 = sigma2;
    s.tension_points = tension_points;
    s.ray_extent = ray_extent;
    return s;
}

void RunConfig::validate() const {
    basis_config().validate();
    regularizer_spec().validate();
    if (margin < 0 || margin >= 0.5)
        throw std::invalid_argument("config: margin must be in [0, 0.5)");
    if (prior_radius <= 0) throw std::invalid_argument("config: prior_radius must be > 0");
    if (prior_strength <= 0)
        throw std::invalid_argument("config: prior_strength must be > 0");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (grid_res < 2) throw std::invalid_argument("config: grid_res must be >= 2");
    if (sim_steps < 1) throw std::invalid_argument("config: sim_steps must be >= 1");
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&](double& out) {
        std::istringstream ss(value);
        if (!(ss >> out) || !(ss >> std::ws).eof())
            throw std::invalid_argument("config: bad numeric value for key '" + key + "'");
    };
    auto integer = [&](auto& out) {
        double v;
        num(v);
        out = static_cast<std::decay_t<decltype(out)>>(v);
        if (out != v)
            throw std::invalid_argument("config: key '" + key + "' must be an integer");
    };

    if (key == "degree") integer(cfg.degree);
    else if (key == "segments") integer(cfg.segments);
    else if (key == "dim") integer(cfg.dim);
    else if (key == "margin") num(cfg.margin);
    else if (key == "lambda_d") num(cfg.lambda_d);
    else if (key == "lambda_g") num(cfg.lambda_g);
    else if (key == "lambda_t") num(cfg.lambda_t);
    else if (key == "sigma2") num(cfg.sigma2);
    else if (key == "tension_points") integer(cfg.tension_points);
    else if (key == "ray_extent") num(cfg.ray_extent);
    else if (key == "prior_center") {
        std::istringstream ss(value);
        if (!(ss >> cfg.prior_center.x() >> cfg.prior_center.y() >> cfg.prior_center.z()))
            throw std::invalid_argument("config: prior_center needs three numbers");
    } else if (key == "prior_radius") num(cfg.prior_radius);
    else if (key == "prior_strength") num(cfg.prior_strength);
    else if (key == "batch_size") integer(cfg.batch_size);
    else if (key == "seed") integer(cfg.seed);
    else if (key == "grid_res") integer(cfg.grid_res);
    else if (key == "iso") num(cfg.iso);
    else if (key == "in") cfg.input_path = value;
    else if (key == "out") cfg.output_path = value;
    else if (key == "model") cfg.model_path = value;
    else if (key == "sim_steps") integer(cfg.sim_steps);
    else if (key == "sim_target_distance") num(cfg.sim_target_distance);
    else if (key == "sim_noise_sigma") num(cfg.sim_noise_sigma);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto eq = line.find('=');
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
        if (trimmed.empty()) continue;
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t\r"));
            const auto end = s.find_last_not_of(" \t\r");
            s.resize(end == std::string::npos ? 0 : end + 1);
            return s;
        };
        apply_override(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

}  // namespace ppsdf
