#include "vkelm/tuning.hpp"

#include <cmath>
#include <exception>
#include <stdexcept>

#include "vkelm/error.hpp"
#include "vkelm/metrics.hpp"

namespace vkelm {

namespace {

void validate_axis(const std::vector<double>& values, const char* name) {
    if (values.empty()) throw std::invalid_argument(std::string("search grid: ") + name + " is empty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw std::invalid_argument(std::string("search grid: ") + name + " values must be positive");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw std::invalid_argument(std::string("search grid: ") + name + " must be strictly increasing");
    }
}

std::vector<SurfaceRow> scan(const SearchGrid& grid, const CellEvaluator& evaluate) {
    grid.validate();
    const auto nc = grid.c_values.size();
    std::vector<SurfaceRow> rows(grid.cells());
    std::exception_ptr failure;

#if defined(VKELM_HAVE_OPENMP)
#pragma omp parallel for schedule(dynamic, 1)
#endif
    for (long long cell = 0; cell < static_cast<long long>(rows.size()); ++cell) {
        const auto idx = static_cast<std::size_t>(cell);
        auto& row = rows[idx];
        row.gamma = grid.gamma_values[idx / nc];
        row.c = grid.c_values[idx % nc];
        try {
            const auto score = evaluate(row.gamma, row.c);
            if (score.rmse && std::isfinite(*score.rmse)) {
                row.rmse_val = score.rmse;
                row.r2_val = score.r2;
            }
        } catch (...) {
#if defined(VKELM_HAVE_OPENMP)
#pragma omp critical(vkelm_grid_failure)
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return rows;
}

CellEvaluator kelm_cell_evaluator(const Dataset& train, const Dataset& val, const WeightVector& weights) {
    return [&train, &val, &weights](double gamma, double c) -> CellScore {
        CellScore score;
        try {
            const auto model = train_kelm(train, KernelParams{gamma, c}, weights);
            const auto predicted = predict(model, val.features);
            score.rmse = rmse(val.targets, predicted);
            try {
                score.r2 = r2(val.targets, predicted);
            } catch (const MetricError&) {
            }
        } catch (const NumericError&) {
            return CellScore{};
        }
        return score;
    };
}

}  // namespace

void SearchGrid::validate() const {
    validate_axis(gamma_values, "gamma_values");
    validate_axis(c_values, "c_values");
}

GridSearchResult grid_search(const SearchGrid& grid, const CellEvaluator& evaluate) {
    GridSearchResult result;
    result.surface = scan(grid, evaluate);

    const SurfaceRow* best = nullptr;
    for (const auto& row : result.surface) {
        if (!row.rmse_val) continue;
        // Strict comparison in gamma-major ascending order keeps the
        // smaller (gamma, c) on exact ties.
        if (!best || *row.rmse_val < *best->rmse_val) best = &row;
    }
    if (!best) throw SearchError("grid search failed: every (gamma, c) cell was numerically unusable");

    result.best = KernelParams{best->gamma, best->c};
    result.best_rmse = *best->rmse_val;
    result.best_r2 = best->r2_val;
    return result;
}

GridSearchResult grid_search(const Dataset& train, const Dataset& val, const SearchGrid& grid,
                             const WeightVector& weights) {
    return grid_search(grid, kelm_cell_evaluator(train, val, weights));
}

std::vector<SurfaceRow> sensitivity_surface(const Dataset& train, const Dataset& val,
                                            const SearchGrid& grid, const WeightVector& weights) {
    return scan(grid, kelm_cell_evaluator(train, val, weights));
}

std::string surface_to_csv(const std::vector<SurfaceRow>& surface) {
    std::string out = "gamma,c,rmse_val,r2_val\n";
    for (const auto& row : surface) {
        out += format_double(row.gamma) + "," + format_double(row.c) + ",";
        if (row.rmse_val) out += format_double(*row.rmse_val);
        out += ",";
        if (row.r2_val) out += format_double(*row.r2_val);
        out += "\n";
    }
    return out;
}

}  // namespace vkelm
