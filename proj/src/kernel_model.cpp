#include "vkelm/kernel_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "vkelm/error.hpp"

namespace vkelm {

void KernelParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("kernel gamma must be a positive finite number");
    if (!(c > 0.0) || !std::isfinite(c))
        throw std::invalid_argument("regularization c must be a positive finite number");
}

WeightVector WeightVector::uniform(const std::vector<std::string>& names, double w_min) {
    return WeightVector{names, std::vector<double>(names.size(), 1.0), w_min};
}

WeightVector WeightVector::per_column(const std::vector<double>& values, double w_min) {
    return WeightVector{anonymous_origin(values.size()), values, w_min};
}

double WeightVector::at(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw std::invalid_argument("no weight for feature '" + name + "'");
    return values[static_cast<std::size_t>(it - names.begin())];
}

bool WeightVector::within_bounds() const {
    return std::all_of(values.begin(), values.end(),
                       [this](double w) { return w >= w_min && w <= 1.0; });
}

std::vector<std::string> anonymous_origin(std::size_t columns) {
    std::vector<std::string> out;
    out.reserve(columns);
    for (std::size_t j = 0; j < columns; ++j) out.push_back("x" + std::to_string(j));
    return out;
}

Eigen::VectorXd column_scales(const WeightVector& weights, const std::vector<std::string>& origin) {
    if (weights.names.size() != weights.values.size())
        throw std::invalid_argument("weight vector names/values length mismatch");
    Eigen::VectorXd scales(static_cast<Eigen::Index>(origin.size()));
    for (std::size_t j = 0; j < origin.size(); ++j)
        scales(static_cast<Eigen::Index>(j)) = weights.at(origin[j]);
    return scales;
}

double weighted_rbf(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                    const Eigen::Ref<const Eigen::RowVectorXd>& z, double gamma,
                    const Eigen::Ref<const Eigen::VectorXd>& scales) {
    if (x.size() != z.size() || x.size() != scales.size())
        throw std::invalid_argument("weighted_rbf: dimension mismatch");
    double sq = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double diff = scales(j) * x(j) - scales(j) * z(j);
        sq += diff * diff;
    }
    return std::exp(-gamma * sq);
}

namespace {

// Columns are samples so each sample's coordinates are contiguous.
Eigen::MatrixXd scaled_samples(const Eigen::MatrixXd& X, const Eigen::VectorXd& scales) {
    if (X.cols() != scales.size()) throw std::invalid_argument("kernel: column/weight dimension mismatch");
    if (!X.allFinite()) throw std::invalid_argument("kernel: non-finite input");
    return (X * scales.asDiagonal()).transpose();
}

inline double sq_distance(const double* a, const double* b, Eigen::Index d) {
    double sq = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        sq += diff * diff;
    }
    return sq;
}

}  // namespace

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, double gamma, const Eigen::VectorXd& scales) {
    if (X.rows() < 1) throw std::invalid_argument("kernel_matrix: need at least one row");
    const Eigen::MatrixXd S = scaled_samples(X, scales);
    const Eigen::Index n = S.cols();
    const Eigen::Index d = S.rows();
    Eigen::MatrixXd K(n, n);

#if defined(VKELM_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic, 16) if (n > 256)
#endif
    for (Eigen::Index j = 0; j < n; ++j) {
        const double* xj = S.col(j).data();
        K(j, j) = 1.0;
        for (Eigen::Index i = 0; i < j; ++i) K(i, j) = std::exp(-gamma * sq_distance(S.col(i).data(), xj, d));
    }
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) K(j, i) = K(i, j);
    return K;
}

Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& support,
                             double gamma, const Eigen::VectorXd& scales) {
    if (queries.cols() != support.cols())
        throw std::invalid_argument("cross_kernel: query/support dimension mismatch");
    const Eigen::MatrixXd Q = scaled_samples(queries, scales);
    const Eigen::MatrixXd S = scaled_samples(support, scales);
    const Eigen::Index d = S.rows();
    Eigen::MatrixXd K(Q.cols(), S.cols());
    for (Eigen::Index i = 0; i < S.cols(); ++i)
        for (Eigen::Index k = 0; k < Q.cols(); ++k)
            K(k, i) = std::exp(-gamma * sq_distance(Q.col(k).data(), S.col(i).data(), d));
    return K;
}

Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw std::invalid_argument("solve_spd: dimension mismatch");

    const auto attempt = [&](double jitter) -> std::optional<Eigen::VectorXd> {
        Eigen::LLT<Eigen::MatrixXd> llt;
        if (jitter > 0.0) {
            Eigen::MatrixXd M = A;
            M.diagonal().array() += jitter;
            llt.compute(M);
        } else {
            llt.compute(A);
        }
        if (llt.info() != Eigen::Success) return std::nullopt;
        Eigen::VectorXd x = llt.solve(b);
        if (!x.allFinite()) return std::nullopt;
        return x;
    };

    if (auto x = attempt(0.0)) return *x;
    double jitter = 1e-10;
    for (; jitter <= 1e-6 * 1.0000001; jitter *= 10.0)
        if (auto x = attempt(jitter)) return *x;
    throw NumericError("Cholesky factorization failed after jitter escalation", jitter / 10.0);
}

KelmModel train_kelm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const KernelParams& params, const WeightVector& weights,
                     const std::vector<std::string>& column_origin,
                     const std::optional<SampleWeights>& sample_weights) {
    params.validate();
    if (X.rows() < 1) throw std::invalid_argument("train_kelm: need at least one sample");
    if (X.rows() != y.size()) throw std::invalid_argument("train_kelm: X/y row mismatch");
    if (!y.allFinite()) throw std::invalid_argument("train_kelm: non-finite target");
    if (column_origin.size() != static_cast<std::size_t>(X.cols()))
        throw std::invalid_argument("train_kelm: column origin length mismatch");

    const Eigen::VectorXd scales = column_scales(weights, column_origin);
    Eigen::MatrixXd system = kernel_matrix(X, params.gamma, scales);
    if (sample_weights) {
        const auto& s = sample_weights->s;
        if (s.size() != X.rows()) throw std::invalid_argument("train_kelm: sample weight length mismatch");
        if (!s.allFinite() || (s.array() <= 0.0).any())
            throw std::invalid_argument("train_kelm: sample weights must be positive and finite");
        system.diagonal().array() += 1.0 / (params.c * s.array());
    } else {
        system.diagonal().array() += 1.0 / params.c;
    }

    KelmModel model;
    model.beta = solve_spd(system, y);
    model.support = X;
    model.params = params;
    model.feature_weights = weights;
    model.column_origin = column_origin;
    return model;
}

KelmModel train_kelm(const Dataset& train, const KernelParams& params, const WeightVector& weights,
                     const std::optional<SampleWeights>& sample_weights) {
    return train_kelm(train.features, train.targets, params, weights, train.origin_feature,
                      sample_weights);
}

Eigen::VectorXd predict(const KelmModel& model, const Eigen::MatrixXd& queries) {
    if (static_cast<std::size_t>(queries.cols()) != model.input_dim())
        throw std::invalid_argument("predict: query has " + std::to_string(queries.cols()) +
                                    " columns, model expects " + std::to_string(model.input_dim()));
    const Eigen::VectorXd scales = column_scales(model.feature_weights, model.column_origin);
    const Eigen::MatrixXd Q = scaled_samples(queries, scales);
    const Eigen::MatrixXd S = (model.support * scales.asDiagonal()).transpose();
    const Eigen::Index n = S.cols();
    const Eigen::Index d = S.rows();
    const double gamma = model.params.gamma;

    Eigen::VectorXd out(Q.cols());
#if defined(VKELM_HAVE_OPENMP)
#pragma omp parallel for schedule(static) if (Q.cols() * n > 100000)
#endif
    for (Eigen::Index k = 0; k < Q.cols(); ++k) {
        const double* q = Q.col(k).data();
        double acc = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            acc += std::exp(-gamma * sq_distance(q, S.col(i).data(), d)) * model.beta(i);
        out(k) = acc;
    }
    return out;
}

}  // namespace vkelm
