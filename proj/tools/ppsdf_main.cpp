#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "ppsdf/config.hpp"
#include "ppsdf/field.hpp"
#include "ppsdf/ingest.hpp"
#include "ppsdf/oracle.hpp"
#include "ppsdf/recon.hpp"
#include "ppsdf/solver.hpp"
#include "ppsdf/survey.hpp"

namespace {

using namespace ppsdf;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIO = 2;
constexpr int kExitNumerical = 3;

std::vector<SurfaceSample> to_model_space(const PointCloud& cloud,
                                          const DomainTransform& t) {
    std::vector<SurfaceSample> out;
    out.reserve(cloud.samples.size());
    for (const SurfaceSample& s : cloud.samples) out.push_back(t.to_model(s));
    return out;
}

FieldModel make_prior(const RunConfig& cfg) {
    return init_spherical_prior(cfg.basis_config(), cfg.prior_center, cfg.prior_radius,
                                cfg.prior_strength);
}

int cmd_fit(const RunConfig& cfg, bool stream) {
    const PointCloud cloud = load_point_cloud(cfg.input_path);
    if (cloud.dropped > 0)
        std::cerr << "warning: dropped " << cloud.dropped
                  << " records with degenerate normals\n";
    if (cloud.samples.empty()) throw std::runtime_error("fit: no usable samples");

    std::vector<Eigen::Vector3d> positions;
    for (const auto& s : cloud.samples) positions.push_back(s.position);
    const DomainTransform dt = fit_domain(positions, cfg.margin, cfg.dim);
    const std::vector<SurfaceSample> samples = to_model_space(cloud, dt);

    FieldModel model = make_prior(cfg);
    const RegularizerSpec spec = cfg.regularizer_spec();
    if (stream) {
        for (size_t i = 0; i < samples.size(); i += cfg.batch_size) {
            const size_t end = std::min(samples.size(), i + cfg.batch_size);
            std::vector<SurfaceSample> batch(samples.begin() + i, samples.begin() + end);
            const auto t0 = std::chrono::steady_clock::now();
            ingest(model, batch, spec);
            const auto t1 = std::chrono::steady_clock::now();
            std::printf("batch %zu..%zu update_ms %.3f\n", i, end - 1,
                        std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
    } else {
        model = batch_fit(samples, spec, model);
    }
    save_model(model, cfg.output_path, {dt.scale, dt.offset});
    std::cout << "wrote " << cfg.output_path << " (" << model.num_params()
              << " weights, " << samples.size() << " samples)\n";
    return kExitOk;
}

int cmd_update(const RunConfig& cfg) {
    WorldMapping mapping;
    FieldModel model = load_model(cfg.model_path, &mapping);
    const PointCloud cloud = load_point_cloud(cfg.input_path);
    if (cloud.samples.empty()) {
        std::cerr << "warning: no usable samples in " << cfg.input_path
                  << "; snapshot unchanged\n";
        save_model(model, cfg.output_path, mapping);
        return kExitOk;
    }
    const DomainTransform dt{mapping.scale, mapping.offset};
    const std::vector<SurfaceSample> samples = to_model_space(cloud, dt);
    const RegularizerSpec spec = cfg.regularizer_spec();
    for (size_t i = 0; i < samples.size(); i += cfg.batch_size) {
        const size_t end = std::min(samples.size(), i + cfg.batch_size);
        ingest(model, {samples.begin() + i, samples.begin() + end}, spec);
    }
    save_model(model, cfg.output_path, mapping);
    std::cout << "wrote " << cfg.output_path << " (+" << samples.size() << " samples)\n";
    return kExitOk;
}

int cmd_query(const RunConfig& cfg) {
    WorldMapping mapping;
    const FieldModel model = load_model(cfg.model_path, &mapping);
    const DomainTransform dt{mapping.scale, mapping.offset};

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!cfg.input_path.empty()) {
        file.open(cfg.input_path);
        if (!file) throw std::runtime_error("query: cannot open " + cfg.input_path);
        in = &file;
    }
    std::cout.precision(9);
    double x, y, z = 0.0;
    while (*in >> x >> y && (model.config().dim < 3 || *in >> z)) {
        const Eigen::Vector3d p = dt.to_model(Eigen::Vector3d(x, y, z));
        const QueryResult q = model.query(p);
        std::cout << q.distance;
        for (int d = 0; d < model.config().dim; ++d) std::cout << " " << q.gradient(d);
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_reconstruct(const RunConfig& cfg) {
    const FieldModel model = load_model(cfg.model_path);
    std::array<int, 3> res{cfg.grid_res, cfg.grid_res, cfg.grid_res};
    const ScalarGrid grid = eval_grid(model, res);
    write_grid(grid, cfg.output_path + ".grid");
    if (model.config().dim == 3) {
        const LevelSetMesh mesh = extract_isosurface(grid, cfg.iso);
        if (mesh.faces.empty()) std::cerr << "warning: empty level set at iso " << cfg.iso << "\n";
        write_mesh(mesh, cfg.output_path + ".obj");
        std::cout << "wrote " << cfg.output_path << ".grid and .obj (" << mesh.faces.size()
                  << " faces)\n";
    } else {
        const auto segs = extract_contours(grid, cfg.iso);
        std::ofstream os(cfg.output_path + ".contour");
        os.precision(9);
        for (const auto& s : segs)
            os << s[0].x() << " " << s[0].y() << " " << s[1].x() << " " << s[1].y() << "\n";
        std::cout << "wrote " << cfg.output_path << ".grid and .contour (" << segs.size()
                  << " segments)\n";
    }
    return kExitOk;
}

int cmd_eval(const RunConfig& cfg) {
    WorldMapping mapping;
    const FieldModel model = load_model(cfg.model_path, &mapping);
    const DomainTransform dt{mapping.scale, mapping.offset};
    const TriangleMesh raw_mesh = load_mesh(cfg.input_path);

    std::vector<Eigen::Vector3d> verts;
    for (const auto& v : raw_mesh.vertices()) verts.push_back(dt.to_model(v));
    const TriangleMesh mesh(std::move(verts), raw_mesh.faces());
    const MeshOracle oracle(mesh);

    // Uniform points over the domain plus a near-surface shell set.
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_real_distribution<double> shell(-0.04, 0.04);
    const BasisConfig& bc = model.config();
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 2000; ++i) {
        Eigen::Vector3d p = Eigen::Vector3d::Zero();
        for (int d = 0; d < bc.dim; ++d)
            p(d) = bc.domain[d].lo + uni(rng) * bc.domain[d].width();
        pts.push_back(p);
    }
    for (const SurfaceSample& s : sample_surface(mesh, 2000, cfg.seed + 1)) {
        Eigen::Vector3d p = s.position + shell(rng) * s.normal;
        bool inside = true;
        for (int d = 0; d < bc.dim; ++d)
            if (p(d) < bc.domain[d].lo || p(d) > bc.domain[d].hi) inside = false;
        if (inside) pts.push_back(p);
    }

    const MetricsReport report = evaluate(model, oracle, pts);
    std::cout << report.to_text();
    if (!cfg.output_path.empty()) {
        std::ofstream os(cfg.output_path);
        if (!os) throw std::runtime_error("eval: cannot open " + cfg.output_path);
        os << report.to_text();
    }
    return kExitOk;
}

int cmd_simulate(const RunConfig& cfg) {
    RunConfig sim = cfg;
    sim.dim = 2;
    const Circle shape({0.5, 0.5}, 0.25);

    FieldModel prior = init_spherical_prior(sim.basis_config(), sim.prior_center,
                                            sim.prior_radius, sim.prior_strength);
    EpisodeConfig ec;
    ec.steps = sim.sim_steps;
    ec.target_distance = sim.sim_target_distance;
    ec.sense.noise_sigma = sim.sim_noise_sigma;
    ec.regularizer = sim.regularizer_spec();
    ec.seed = sim.seed;

    AgentState start;
    start.position = {0.5, 0.08};
    start.heading = Eigen::Vector2d(1.0, 0.0);

    const EpisodeResult result = run_episode(shape, std::move(prior), ec, start);
    write_trajectory(result.trajectory, sim.output_path + ".traj");
    save_model(result.model, sim.output_path + ".model");
    std::cout << "episode steps " << result.trajectory.size() << " final_mae_near "
              << result.final_mae_near << "\n";
    if (result.halted_on_degenerate_gradient)
        std::cerr << "warning: halted early on a degenerate gradient\n";
    return kExitOk;
}

int classify_exit(const std::exception& e) {
    const std::string msg = e.what();
    if (dynamic_cast<const std::invalid_argument*>(&e)) return kExitUsage;
    for (const char* hint : {"cannot open", "truncated", "write failed", "missing", "bad "})
        if (msg.find(hint) != std::string::npos) return kExitIO;
    return kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental piecewise-polynomial signed distance fields"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::vector<std::string> overrides;  // (key, value) pairs collected from flags
    bool stream = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value configuration file");
        auto opt = [&, sub](const char* flag, const char* key, const char* help) {
            sub->add_option_function<std::string>(
                flag,
                [&overrides, key](const std::string& v) {
                    overrides.push_back(key);
                    overrides.push_back(v);
                },
                help);
        };
        opt("--degree", "degree", "polynomial degree K");
        opt("--segments", "segments", "segments per axis S");
        opt("--dim", "dim", "input dimension D");
        opt("--margin", "margin", "domain margin fraction");
        opt("--lambda-d", "lambda_d", "distance cost weight");
        opt("--lambda-g", "lambda_g", "gradient cost weight");
        opt("--lambda-t", "lambda_t", "tension cost weight");
        opt("--sigma2", "sigma2", "measurement noise variance");
        opt("--tension-points", "tension_points", "tension control points per sample");
        opt("--ray-extent", "ray_extent", "normal-ray half extent (0 = auto)");
        opt("--prior-center", "prior_center", "prior sphere center, three numbers");
        opt("--prior-radius", "prior_radius", "prior sphere radius");
        opt("--prior-strength", "prior_strength", "prior precision scale");
        opt("--batch-size", "batch_size", "samples per incremental update");
        opt("--seed", "seed", "random seed");
        opt("--grid-res", "grid_res", "reconstruction grid resolution");
        opt("--iso", "iso", "level-set iso value");
        opt("--in", "in", "input path");
        opt("--out", "out", "output path");
        opt("--model", "model", "model snapshot path");
        opt("--steps", "sim_steps", "simulation steps");
        opt("--target-distance", "sim_target_distance", "surveying standoff distance");
        opt("--noise-sigma", "sim_noise_sigma", "sensor noise sigma");
    };

    CLI::App* fit = app.add_subcommand("fit", "train a model from a point cloud");
    fit->add_flag("--stream", stream, "ingest in batches instead of one batch solve");
    CLI::App* update = app.add_subcommand("update", "ingest more samples into a snapshot");
    CLI::App* query = app.add_subcommand("query", "print f and grad f for points");
    CLI::App* reconstruct = app.add_subcommand("reconstruct", "grid + level-set export");
    CLI::App* eval = app.add_subcommand("eval", "metrics against a ground-truth mesh");
    CLI::App* simulate = app.add_subcommand("simulate", "2D online surveying episode");
    for (CLI::App* sub : {fit, update, query, reconstruct, eval, simulate}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    std::string out_for_cleanup;
    try {
        if (!config_path.empty()) cfg = parse_config_file(config_path, cfg);
        for (size_t i = 0; i + 1 < overrides.size(); i += 2)
            apply_override(cfg, overrides[i], overrides[i + 1]);
        cfg.validate();
        out_for_cleanup = cfg.output_path;

        if (fit->parsed()) {
            if (cfg.input_path.empty() || cfg.output_path.empty())
                throw std::invalid_argument("fit: --in and --out are required");
            return cmd_fit(cfg, stream);
        }
        if (update->parsed()) {
            if (cfg.model_path.empty() || cfg.input_path.empty() || cfg.output_path.empty())
                throw std::invalid_argument("update: --model, --in, --out are required");
            return cmd_update(cfg);
        }
        if (query->parsed()) {
            if (cfg.model_path.empty())
                throw std::invalid_argument("query: --model is required");
            return cmd_query(cfg);
        }
        if (reconstruct->parsed()) {
            if (cfg.model_path.empty() || cfg.output_path.empty())
                throw std::invalid_argument("reconstruct: --model and --out are required");
            return cmd_reconstruct(cfg);
        }
        if (eval->parsed()) {
            if (cfg.model_path.empty() || cfg.input_path.empty())
                throw std::invalid_argument("eval: --model and --in are required");
            return cmd_eval(cfg);
        }
        if (simulate->parsed()) {
            if (cfg.output_path.empty())
                throw std::invalid_argument("simulate: --out is required");
            return cmd_simulate(cfg);
        }
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (!out_for_cleanup.empty()) {
            std::error_code ec;
            for (const char* suffix : {"", ".grid", ".grid.hdr", ".obj", ".contour",
                                       ".traj", ".model"})
                std::filesystem::remove(out_for_cleanup + suffix, ec);
        }
        return classify_exit(e);
    }
}
