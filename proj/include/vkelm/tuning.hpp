#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vkelm/data.hpp"
#include "vkelm/kernel_model.hpp"

namespace vkelm {

struct SearchGrid {
    std::vector<double> gamma_values = {0.01, 0.05, 0.1, 0.15, 0.2, 0.5, 1.0};
    std::vector<double> c_values = {1, 10, 50, 100, 180, 500, 1000};

    /// Non-empty, strictly increasing, positive.
    void validate() const;
    std::size_t cells() const { return gamma_values.size() * c_values.size(); }
};

struct SurfaceRow {
    double gamma;
    double c;
    std::optional<double> rmse_val;
    std::optional<double> r2_val;
};

struct CellScore {
    std::optional<double> rmse;
    std::optional<double> r2;
};

struct GridSearchResult {
    KernelParams best;
    double best_rmse;
    std::optional<double> best_r2;
    std::vector<SurfaceRow> surface;  // gamma-major, c ascending
};

/// Scores one (gamma, c) cell; an empty rmse marks a failed cell.
using CellEvaluator = std::function<CellScore(double gamma, double c)>;

/// Exhaustive scan in gamma-major order. Argmin by validation RMSE; exact ties
/// go to the smaller gamma, then the smaller c. Throws SearchError if every
/// cell fails.
GridSearchResult grid_search(const SearchGrid& grid, const CellEvaluator& evaluate);

/// Trains one KELM per cell on train with fixed weights, scores on val.
GridSearchResult grid_search(const Dataset& train, const Dataset& val, const SearchGrid& grid,
                             const WeightVector& weights);

/// Every cell's validation metrics, failed cells as nulls.
std::vector<SurfaceRow> sensitivity_surface(const Dataset& train, const Dataset& val,
                                            const SearchGrid& grid, const WeightVector& weights);

/// CSV with header gamma,c,rmse_val,r2_val; null metrics are empty fields.
std::string surface_to_csv(const std::vector<SurfaceRow>& surface);

}  // namespace vkelm
