#pragma once

#include <chrono>

namespace vkelm {

template <typename PredictFn>
double time_per_sample_ms(const Eigen::MatrixXd& queries, std::size_t min_calls, PredictFn&& predict_row) {
    const auto rows = queries.rows();
    if (rows == 0 || min_calls == 0) return 0.0;
    volatile double sink = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t call = 0; call < min_calls; ++call) {
        const Eigen::MatrixXd row = queries.row(static_cast<Eigen::Index>(call % static_cast<std::size_t>(rows)));
        sink = sink + predict_row(row)(0);
    }
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    return elapsed.count() / static_cast<double>(min_calls);
}

}  // namespace vkelm
