#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrtc/patterns.hpp"
#include "lrtc/solver.hpp"
#include "lrtc/tensor.hpp"

namespace lrtc {

/// Accuracy of an imputation over a scoring mask.
struct ScoreStats {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t masked_count = 0;
};

/// Mean absolute and root-mean-square error between truth and imputed
/// values over the entries where eval_mask is 1. Errors if the mask
/// selects nothing.
ScoreStats score(const Tensor3& truth, const Tensor3& imputed, const MaskTensor& eval_mask);

/// Experiment-level knobs: the solver configuration plus the truncation
/// decay schedule. The solver's theta field is overwritten with the
/// decayed value theta0 * exp(-beta * realized missing rate).
struct ExperimentConfig {
    SolverConfig solver;
    double theta0 = 0.1;
    double beta = 2.0;

    void validate() const;
};

/// Everything a single imputation run reports. Scoring fields are absent
/// when no entry was held out for evaluation.
struct ImputationReport {
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_trace;
    std::array<std::size_t, 3> truncation_ranks = {0, 0, 0};
    std::array<double, 3> per_mode_spn = {0.0, 0.0, 0.0};

    double realized_missing_rate = 0.0;  // zero-fraction of the solver input mask
    SolverConfig solver_config;          // echo; theta holds the decayed value
    std::optional<double> theta0;
    std::optional<double> beta;
    std::optional<MissingSpec> missing;  // echo of the synthesized pattern, if any

    std::optional<double> mae;
    std::optional<double> rmse;
    std::size_t masked_count = 0;

    double wall_time_seconds = 0.0;
};

/// Runs one full hold-out experiment: synthesizes the missing pattern,
/// intersects it with the native observation mask, decays theta with the
/// realized missing rate, solves, and scores on the entries that were
/// natively observed but synthetically removed. Errors if that evaluation
/// set is empty.
ImputationReport run_experiment(const Tensor3& truth, const MaskTensor& native,
                                const MissingSpec& mspec, const ExperimentConfig& cfg);

/// Cartesian sweep description. Rows are enumerated pattern-major in the
/// order patterns, rates, p values, theta0 values, beta values,
/// repetitions; the mask seed of row i is base_seed + i.
struct SweepGrid {
    std::vector<Pattern> patterns;
    std::vector<double> rates;
    std::vector<double> p_values;
    std::vector<double> theta0_values;
    std::vector<double> beta_values;
    int repetitions = 1;
    std::uint64_t base_seed = 0;
    SolverConfig base;  // p and theta are overridden per row
    int workers = 1;

    void validate() const;
    std::size_t row_count() const;
};

/// One sweep cell. A failed run keeps its coordinates and carries the
/// error text instead of a report.
struct SweepRow {
    Pattern pattern = Pattern::RM;
    double rate = 0.0;
    double p = 0.0;
    double theta0 = 0.0;
    double beta = 0.0;
    int repetition = 0;
    std::uint64_t seed = 0;
    std::optional<ImputationReport> report;
    std::string error;
};

/// Runs every cell of the grid. Row order and seeds are deterministic and
/// independent of grid.workers; failures are captured per row rather than
/// aborting the sweep.
std::vector<SweepRow> run_sweep(const Tensor3& truth, const MaskTensor& native,
                                const SweepGrid& grid);

}  // namespace lrtc
