// Serial vs OpenMP comparisons for the batch kernels, plus the two
// latency-critical single-threaded paths (query, single-sample ingest).

#include <benchmark/benchmark.h>

#include <random>

#include "ppsdf/field.hpp"
#include "ppsdf/oracle.hpp"
#include "ppsdf/recon.hpp"
#include "ppsdf/solver.hpp"

using namespace ppsdf;

namespace {

BasisConfig sphere_config(int segments) {
    BasisConfig cfg;
    cfg.degree = 3;
    cfg.segments = segments;
    cfg.dim = 3;
    for (int d = 0; d < 3; ++d) cfg.domain[d] = {0.0, 1.0};
    return cfg;
}

FieldModel sphere_model(int segments) {
    return init_spherical_prior(sphere_config(segments), {0.5, 0.5, 0.5}, 0.3, 100.0);
}

TriangleMesh icosphere_mesh() {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Eigen::Vector3d> v = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<int, 3>> f = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    for (int s = 0; s < 3; ++s) {
        std::vector<std::array<int, 3>> next;
        for (const auto& [a, b, c] : f) {
            const int ab = static_cast<int>(v.size());
            v.push_back(0.5 * (v[a] + v[b]));
            const int bc = static_cast<int>(v.size());
            v.push_back(0.5 * (v[b] + v[c]));
            const int ca = static_cast<int>(v.size());
            v.push_back(0.5 * (v[c] + v[a]));
            next.push_back({a, ab, ca});
            next.push_back({b, bc, ab});
            next.push_back({c, ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    for (auto& p : v) p = Eigen::Vector3d(0.5, 0.5, 0.5) + 0.3 * p.normalized();
    return TriangleMesh(std::move(v), std::move(f));
}

std::vector<Eigen::Vector3d> random_points(int n) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.emplace_back(uni(rng), uni(rng), uni(rng));
    return pts;
}

void BM_eval_grid_parallel(benchmark::State& state) {
    const FieldModel model = sphere_model(4);
    const int res = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const ScalarGrid grid = eval_grid(model, {res, res, res});
        benchmark::DoNotOptimize(grid.values.data());
    }
    state.SetItemsProcessed(state.iterations() * res * res * res);
}

void BM_eval_grid_serial(benchmark::State& state) {
    const FieldModel model = sphere_model(4);
    const int res = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const ScalarGrid grid = eval_grid_serial(model, {res, res, res});
        benchmark::DoNotOptimize(grid.values.data());
    }
    state.SetItemsProcessed(state.iterations() * res * res * res);
}

void BM_mesh_distances_parallel(benchmark::State& state) {
    const TriangleMesh mesh = icosphere_mesh();
    const auto pts = random_points(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto d = mesh.signed_distances(pts);
        benchmark::DoNotOptimize(d.data());
    }
    state.SetItemsProcessed(state.iterations() * pts.size());
}

void BM_mesh_distances_serial(benchmark::State& state) {
    const TriangleMesh mesh = icosphere_mesh();
    const auto pts = random_points(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto d = mesh.signed_distances_serial(pts);
        benchmark::DoNotOptimize(d.data());
    }
    state.SetItemsProcessed(state.iterations() * pts.size());
}

void BM_query(benchmark::State& state) {
    const FieldModel model = sphere_model(static_cast<int>(state.range(0)));
    const auto pts = random_points(1024);
    size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.query(pts[i++ & 1023]).distance);
    }
}

void BM_single_sample_ingest(benchmark::State& state) {
    FieldModel model = sphere_model(static_cast<int>(state.range(0)));
    RegularizerSpec spec;
    spec.ray_extent = 0.25;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    for (auto _ : state) {
        Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
        dir.normalize();
        SurfaceSample s{Eigen::Vector3d(0.5, 0.5, 0.5) + 0.3 * dir, dir};
        ingest(model, {s}, spec);
    }
}

BENCHMARK(BM_eval_grid_parallel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_eval_grid_serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mesh_distances_parallel)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mesh_distances_serial)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_query)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_single_sample_ingest)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
