#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vkelm/data.hpp"

namespace vkelm {

struct KernelParams {
    double gamma = 0.15;  // RBF width per unit squared normalized distance
    double c = 180.0;     // regularization strength; enters the solve as 1/c

    void validate() const;
};

/// Per original feature importance weights. Names follow the schema's
/// feature order; one-hot and lagged columns inherit their parent's weight.
struct WeightVector {
    std::vector<std::string> names;
    std::vector<double> values;
    double w_min = 0.05;

    static WeightVector uniform(const std::vector<std::string>& names, double w_min = 0.05);
    /// One anonymous feature per column ("x0", "x1", ...), for raw matrices.
    static WeightVector per_column(const std::vector<double>& values, double w_min = 0.05);

    std::size_t size() const { return values.size(); }
    double at(const std::string& name) const;
    bool within_bounds() const;

    bool operator==(const WeightVector&) const = default;
};

/// Column origin list matching WeightVector::per_column.
std::vector<std::string> anonymous_origin(std::size_t columns);

/// Broadcasts feature weights to encoded columns. Throws std::invalid_argument
/// when a column's origin has no weight.
Eigen::VectorXd column_scales(const WeightVector& weights, const std::vector<std::string>& origin);

/// Per-sample confidence; enters the solve as D_ii = 1 / (c * s_i).
struct SampleWeights {
    Eigen::VectorXd s;
};

/// exp(-gamma * sum_j (scale_j * (x_j - z_j))^2).
double weighted_rbf(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                    const Eigen::Ref<const Eigen::RowVectorXd>& z, double gamma,
                    const Eigen::Ref<const Eigen::VectorXd>& scales);

/// Symmetric kernel matrix over the rows of X with a unit diagonal. The upper
/// triangle is computed and mirrored, so the result is exactly symmetric.
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, double gamma, const Eigen::VectorXd& scales);

/// Kernel values between query rows (m) and support rows (n), m x n.
Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& support,
                             double gamma, const Eigen::VectorXd& scales);

/// Solves (A) x = b for symmetric positive definite A with Cholesky. On
/// failure retries with diagonal jitter 1e-10, 1e-9, ... 1e-6, then throws
/// NumericError carrying the last jitter tried.
Eigen::VectorXd solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

inline constexpr int kModelFormatVersion = 1;

struct KelmModel {
    Eigen::MatrixXd support;  // stored training inputs, n x d_enc
    Eigen::VectorXd beta;     // dual coefficients
    KernelParams params;
    WeightVector feature_weights;
    std::vector<std::string> column_origin;
    // Empty for models trained directly on matrices.
    Schema schema;
    PreprocessStats stats;
    int format_version = kModelFormatVersion;

    std::size_t support_size() const { return static_cast<std::size_t>(support.rows()); }
    std::size_t input_dim() const { return static_cast<std::size_t>(support.cols()); }
};

/// Fits beta = (Omega + D)^-1 y with Omega the weighted RBF kernel matrix.
KelmModel train_kelm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const KernelParams& params, const WeightVector& weights,
                     const std::vector<std::string>& column_origin,
                     const std::optional<SampleWeights>& sample_weights = std::nullopt);

KelmModel train_kelm(const Dataset& train, const KernelParams& params, const WeightVector& weights,
                     const std::optional<SampleWeights>& sample_weights = std::nullopt);

/// Each prediction is accumulated sequentially over support points, so a
/// row's value does not depend on the batch it was submitted in.
Eigen::VectorXd predict(const KelmModel& model, const Eigen::MatrixXd& queries);

/// Canonical JSON, key order fixed:
/// {format_version, schema, preprocess_stats, gamma, c, feature_weights,
///  support_matrix, beta}.
std::string serialize_model(const KelmModel& model);
KelmModel deserialize_model(const std::string& text);

}  // namespace vkelm
