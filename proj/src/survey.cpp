#include "ppsdf/survey.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace ppsdf {

Eigen::Vector2d HiddenShape::normal(const Eigen::Vector2d& p) const {
    const double h = 1e-6;
    Eigen::Vector2d g;
    g.x() = (sdf({p.x() + h, p.y()}) - sdf({p.x() - h, p.y()})) / (2 * h);
    g.y() = (sdf({p.x(), p.y() + h}) - sdf({p.x(), p.y() - h})) / (2 * h);
    const double n = g.norm();
    return n > 0 ? (g / n).eval() : Eigen::Vector2d::UnitX();
}

std::optional<Eigen::Vector2d> HiddenShape::raycast(const Eigen::Vector2d& origin,
                                                    const Eigen::Vector2d& dir,
                                                    double max_range) const {
    double t = 0.0;
    for (int iter = 0; iter < 256; ++iter) {
        const Eigen::Vector2d p = origin + t * dir;
        const double d = sdf(p);
        if (d < 1e-10) {
            // Bisect the last interval for a tight surface point.
            double lo = std::max(0.0, t - std::abs(d)), hi = t;
            for (int b = 0; b < 60; ++b) {
                const double mid = 0.5 * (lo + hi);
                (sdf(origin + mid * dir) > 0 ? lo : hi) = mid;
            }
            return origin + 0.5 * (lo + hi) * dir;
        }
        t += d;
        if (t > max_range) return std::nullopt;
    }
    return std::nullopt;
}

double Capsule::sdf(const Eigen::Vector2d& p) const {
    const Eigen::Vector2d ab = b_ - a_;
    const double t = std::clamp((p - a_).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a_ + t * ab)).norm() - radius_;
}

double Polygon::sdf(const Eigen::Vector2d& p) const {
    const size_t n = verts_.size();
    double d2 = std::numeric_limits<double>::infinity();
    int winding = 0;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Eigen::Vector2d e = verts_[j] - verts_[i];
        const Eigen::Vector2d w = p - verts_[i];
        const double t = std::clamp(w.dot(e) / e.squaredNorm(), 0.0, 1.0);
        d2 = std::min(d2, (w - t * e).squaredNorm());
        // Crossing-number sign (Inigo Quilez formulation).
        const bool c1 = p.y() >= verts_[i].y(), c2 = p.y() < verts_[j].y();
        const bool left = e.x() * w.y() > e.y() * w.x();
        if (c1 && c2 && left) ++winding;
        if (!c1 && !c2 && !left) --winding;
    }
    return (winding != 0 ? -1.0 : 1.0) * std::sqrt(d2);
}

std::vector<SurfaceSample> sense(const HiddenShape& shape, const AgentState& agent,
                                 const SenseConfig& cfg, std::uint64_t seed) {
    if (cfg.rays < 1) throw std::invalid_argument("sense: rays must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, cfg.noise_sigma);

    std::vector<SurfaceSample> hits;
    const double base = std::atan2(agent.heading.y(), agent.heading.x());
    for (int r = 0; r < cfg.rays; ++r) {
        const double frac = cfg.rays == 1 ? 0.0 : -1.0 + 2.0 * r / (cfg.rays - 1);
        const double ang = base + frac * cfg.cone_half_angle;
        const Eigen::Vector2d dir(std::cos(ang), std::sin(ang));
        const auto hit = shape.raycast(agent.position, dir, cfg.max_range);
        if (!hit) continue;
        Eigen::Vector2d p = *hit;
        const Eigen::Vector2d n = shape.normal(p);
        if (cfg.noise_sigma > 0) p += Eigen::Vector2d(noise(rng), noise(rng));
        SurfaceSample s;
        s.position = Eigen::Vector3d(p.x(), p.y(), 0.0);
        s.normal = Eigen::Vector3d(n.x(), n.y(), 0.0);
        hits.push_back(s);
    }
    return hits;
}

AgentState control_step(const FieldModel& model, const AgentState& agent,
                        double target_distance, const ControlGains& gains, double step) {
    const Eigen::Vector3d pos3(agent.position.x(), agent.position.y(), 0.0);
    const QueryResult q = model.query(pos3);
    const Eigen::Vector2d grad(q.gradient.x(), q.gradient.y());
    const double gn = grad.norm();
    if (gn < 1e-8)
        throw std::runtime_error("control_step: vanishing field gradient at agent position");
    const Eigen::Vector2d g = grad / gn;
    const Eigen::Vector2d tangent(-g.y(), g.x());

    // f / |grad f| estimates the geometric distance even where the
    // tension term has flattened the field below unit gradient norm.
    const double distance_est = q.distance / gn;
    const Eigen::Vector2d velocity =
        gains.tangential * tangent - gains.normal * (distance_est - target_distance) * g;
    AgentState next = agent;
    next.position = agent.position + step * velocity;
    for (int d = 0; d < 2; ++d)
        next.position(d) = clamp_to_domain(next.position(d), model.config().domain[d]);
    const Eigen::Vector2d motion = next.position - agent.position;
    if (motion.norm() > 1e-12) next.heading = motion.normalized();
    next.step = agent.step + 1;
    return next;
}

double near_surface_mae(const FieldModel& model, const HiddenShape& shape, int grid,
                        double shell) {
    const BasisConfig& cfg = model.config();
    double sum = 0.0;
    long count = 0;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Eigen::Vector2d p(cfg.domain[0].lo + (i + 0.5) / grid * cfg.domain[0].width(),
                              cfg.domain[1].lo + (j + 0.5) / grid * cfg.domain[1].width());
            const double truth = shape.sdf(p);
            if (std::abs(truth) >= shell) continue;
            const double est = model.query({p.x(), p.y(), 0.0}).distance;
            sum += std::abs(est - truth);
            ++count;
        }
    }
    return count > 0 ? sum / count : 0.0;
}

EpisodeResult run_episode(const HiddenShape& shape, FieldModel prior,
                          const EpisodeConfig& cfg, AgentState start) {
    EpisodeResult result{.trajectory = {}, .model = std::move(prior)};
    AgentState agent = start;

    for (long step = 0; step < cfg.steps; ++step) {
        const auto samples = sense(shape, agent, cfg.sense, cfg.seed * 1000003 + step);
        ingest(result.model, samples, cfg.regularizer);

        EpisodeStep rec;
        rec.step = step;
        rec.position = agent.position;
        const QueryResult q =
            result.model.query({agent.position.x(), agent.position.y(), 0.0});
        rec.field_value = q.distance;
        rec.gradient_norm = Eigen::Vector2d(q.gradient.x(), q.gradient.y()).norm();
        rec.true_distance = shape.sdf(agent.position);
        if (cfg.metrics_interval > 0 && step % cfg.metrics_interval == 0)
            rec.mae_near = near_surface_mae(result.model, shape);
        result.trajectory.push_back(rec);

        try {
            agent = control_step(result.model, agent, cfg.target_distance, cfg.gains,
                                 cfg.step_size);
        } catch (const std::runtime_error&) {
            result.halted_on_degenerate_gradient = true;
            break;
        }
    }
    result.final_mae_near = near_surface_mae(result.model, shape);
    return result;
}

void write_trajectory(const std::vector<EpisodeStep>& traj, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("write_trajectory: cannot open " + path);
    os.precision(9);
    for (const EpisodeStep& s : traj)
        os << s.step << " " << s.position.x() << " " << s.position.y() << " "
           << s.field_value << " " << s.gradient_norm << " " << s.mae_near << "\n";
}

}  // namespace ppsdf
