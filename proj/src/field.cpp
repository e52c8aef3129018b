#include "ppsdf/field.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ppsdf {

namespace {

std::vector<Basis1D> make_bases(const BasisConfig& cfg) {
    cfg.validate();
    std::vector<Basis1D> bases;
    bases.reserve(cfg.dim);
    for (int d = 0; d < cfg.dim; ++d)
        bases.emplace_back(cfg.degree, cfg.segments, cfg.domain[d]);
    return bases;
}

Eigen::RowVectorXd kron_rows(const std::vector<Eigen::RowVectorXd>& rows) {
    Eigen::RowVectorXd out = rows[0];
    for (size_t d = 1; d < rows.size(); ++d) {
        Eigen::RowVectorXd next(out.size() * rows[d].size());
        for (Eigen::Index i = 0; i < out.size(); ++i)
            next.segment(i * rows[d].size(), rows[d].size()) = out(i) * rows[d];
        out = std::move(next);
    }
    return out;
}

}  // namespace

FieldModel::FieldModel(BasisConfig cfg, Eigen::VectorXd w, Eigen::MatrixXd P)
    : cfg_(cfg), w_(std::move(w)), P_(std::move(P)), bases_(make_bases(cfg)) {
    const long n = param_count(cfg_);
    if (w_.size() != n || P_.rows() != n || P_.cols() != n)
        throw std::invalid_argument("FieldModel: w/P dimensions do not match config");
}

void FieldModel::set_state(Eigen::VectorXd w, Eigen::MatrixXd P) {
    if (w.size() != w_.size() || P.rows() != P_.rows() || P.cols() != P_.cols())
        throw std::invalid_argument("FieldModel::set_state: dimension mismatch");
    w_ = std::move(w);
    P_ = 0.5 * (P + P.transpose());
    chol_valid_ = false;
}

void FieldModel::set_weights(Eigen::VectorXd w) {
    if (w.size() != w_.size())
        throw std::invalid_argument("FieldModel::set_weights: dimension mismatch");
    w_ = std::move(w);
}

void FieldModel::add_information(const Eigen::MatrixXd& A, double sigma2) {
    if (A.cols() != P_.cols())
        throw std::invalid_argument("FieldModel::add_information: dimension mismatch");
    // Crossover between rows rank-1 factor updates and one full
    // refactorization is near rows ~ 2N/3.
    const bool incremental = chol_valid_ && 2 * A.rows() < P_.rows();
    P_.selfadjointView<Eigen::Lower>().rankUpdate(A.transpose(), 1.0 / sigma2);
    P_ = P_.selfadjointView<Eigen::Lower>();
    if (incremental) {
        const double inv_sigma = 1.0 / std::sqrt(sigma2);
        for (long i = 0; i < A.rows(); ++i)
            chol_.rankUpdate(A.row(i).transpose() * inv_sigma, 1.0);
    } else {
        chol_valid_ = false;
    }
}

const Eigen::LLT<Eigen::MatrixXd>& FieldModel::cholesky() const {
    if (!chol_valid_) {
        chol_.compute(P_);
        chol_valid_ = true;
    }
    return chol_;
}

Eigen::RowVectorXd FieldModel::features(const Eigen::Vector3d& x,
                                        const std::array<int, 3>& orders) const {
    int total = 0;
    std::vector<Eigen::RowVectorXd> rows(cfg_.dim);
    for (int d = 0; d < cfg_.dim; ++d) {
        if (orders[d] < 0 || orders[d] > 2)
            throw std::invalid_argument("features: per-axis order must be in 0..2");
        total += orders[d];
        rows[d] = bases_[d].row(x(d), orders[d]);
    }
    if (total > 2)
        throw std::invalid_argument("features: total derivative order must be <= 2");
    return kron_rows(rows);
}

QueryResult FieldModel::query(const Eigen::Vector3d& x) const {
    QueryResult r;
    std::vector<Eigen::RowVectorXd> val(cfg_.dim), der(cfg_.dim);
    for (int d = 0; d < cfg_.dim; ++d) {
        val[d] = bases_[d].row(x(d), 0);
        der[d] = bases_[d].row(x(d), 1);
    }
    r.distance = kron_rows(val).dot(w_);
    for (int d = 0; d < cfg_.dim; ++d) {
        std::vector<Eigen::RowVectorXd> rows = val;
        rows[d] = der[d];
        r.gradient(d) = kron_rows(rows).dot(w_);
    }
    return r;
}

Eigen::MatrixXd FieldModel::query_hessian(const Eigen::Vector3d& x) const {
    const int D = cfg_.dim;
    Eigen::MatrixXd H(D, D);
    for (int i = 0; i < D; ++i) {
        for (int j = i; j < D; ++j) {
            std::array<int, 3> orders{0, 0, 0};
            orders[i] += 1;
            orders[j] += 1;
            H(i, j) = H(j, i) = features(x, orders).dot(w_);
        }
    }
    return H;
}

long param_count(const BasisConfig& cfg) {
    cfg.validate();
    long n = 1;
    for (int d = 0; d < cfg.dim; ++d) n *= cfg.params_per_axis();
    return n;
}

FieldModel init_spherical_prior(const BasisConfig& cfg,
                                const Eigen::Vector3d& center, double radius,
                                double prior_strength, int grid_per_axis) {
    cfg.validate();
    if (radius <= 0.0) throw std::invalid_argument("spherical prior: radius must be > 0");
    if (prior_strength <= 0.0)
        throw std::invalid_argument("spherical prior: prior strength must be > 0");

    // Reject spheres whose surface cannot be seen from the domain at all:
    // the nearest domain point must be within one radius of the surface.
    Eigen::Vector3d nearest = center;
    for (int d = 0; d < cfg.dim; ++d)
        nearest(d) = clamp_to_domain(center(d), cfg.domain[d]);
    Eigen::Vector3d delta = Eigen::Vector3d::Zero();
    for (int d = 0; d < cfg.dim; ++d) delta(d) = nearest(d) - center(d);
    if (delta.norm() > 2.0 * radius)
        throw std::invalid_argument("spherical prior: sphere surface lies outside the domain");

    const long n = param_count(cfg);
    FieldModel probe(cfg, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n));

    const int D = cfg.dim;
    const int G = grid_per_axis;
    long rows = 1;
    for (int d = 0; d < D; ++d) rows *= G;

    Eigen::MatrixXd AtA = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd Atb = Eigen::VectorXd::Zero(n);
    std::array<int, 3> idx{0, 0, 0};
    for (long r = 0; r < rows; ++r) {
        long rem = r;
        Eigen::Vector3d x = Eigen::Vector3d::Zero();
        for (int d = D - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rem % G);
            rem /= G;
            const Interval& iv = cfg.domain[d];
            x(d) = iv.lo + (idx[d] + 0.5) / G * iv.width();
        }
        double dist = 0.0;
        for (int d = 0; d < D; ++d) dist += (x(d) - center(d)) * (x(d) - center(d));
        const double target = std::sqrt(dist) - radius;
        const Eigen::RowVectorXd psi = probe.features(x, {0, 0, 0});
        AtA.selfadjointView<Eigen::Lower>().rankUpdate(psi.transpose());
        Atb += psi.transpose() * target;
    }
    AtA = AtA.selfadjointView<Eigen::Lower>();
    AtA.diagonal().array() += 1e-8 * AtA.trace() / n;
    const Eigen::VectorXd w0 = AtA.ldlt().solve(Atb);
    return FieldModel(cfg, w0, prior_strength * Eigen::MatrixXd::Identity(n, n));
}

namespace {

constexpr char kMagic[8] = {'P', 'P', 'S', 'D', 'F', '0', '0', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

void save_model(const FieldModel& model, const std::string& path,
                const WorldMapping& mapping) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_model: cannot open " + path);
    os.write(kMagic, sizeof(kMagic));
    const BasisConfig& c = model.config();
    put<std::int32_t>(os, c.degree);
    put<std::int32_t>(os, c.segments);
    put<std::int32_t>(os, c.dim);
    for (int d = 0; d < 3; ++d) {
        put<double>(os, c.domain[d].lo);
        put<double>(os, c.domain[d].hi);
    }
    put<double>(os, mapping.scale);
    for (int d = 0; d < 3; ++d) put<double>(os, mapping.offset(d));
    const std::int64_t n = model.num_params();
    put<std::int64_t>(os, n);
    os.write(reinterpret_cast<const char*>(model.weights().data()), n * sizeof(double));
    os.write(reinterpret_cast<const char*>(model.precision().data()),
             n * n * sizeof(double));
    if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

FieldModel load_model(const std::string& path, WorldMapping* mapping) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("load_model: bad magic in " + path);
    BasisConfig c;
    c.degree = get<std::int32_t>(is);
    c.segments = get<std::int32_t>(is);
    c.dim = get<std::int32_t>(is);
    for (int d = 0; d < 3; ++d) {
        c.domain[d].lo = get<double>(is);
        c.domain[d].hi = get<double>(is);
    }
    WorldMapping m;
    m.scale = get<double>(is);
    for (int d = 0; d < 3; ++d) m.offset(d) = get<double>(is);
    if (mapping) *mapping = m;
    const std::int64_t n = get<std::int64_t>(is);
    if (n != param_count(c))
        throw std::runtime_error("load_model: parameter count mismatch in " + path);
    Eigen::VectorXd w(n);
    Eigen::MatrixXd P(n, n);
    is.read(reinterpret_cast<char*>(w.data()), n * sizeof(double));
    is.read(reinterpret_cast<char*>(P.data()), n * n * sizeof(double));
    if (!is) throw std::runtime_error("load_model: truncated file " + path);
    return FieldModel(c, std::move(w), std::move(P));
}

}  // namespace ppsdf
