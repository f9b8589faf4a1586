#include "lrtc/eval.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace lrtc {

namespace {

void check_same_dims(const Dims& a, const Dims& b, const char* what) {
    if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

}  // namespace

ScoreStats score(const Tensor3& truth, const Tensor3& imputed, const MaskTensor& eval_mask) {
    check_same_dims(truth.dims(), imputed.dims(), "score");
    check_same_dims(truth.dims(), eval_mask.dims(), "score");
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < eval_mask.size(); ++i) {
        if (eval_mask[i]) {
            const double d = truth[i] - imputed[i];
            abs_sum += std::abs(d);
            sq_sum += d * d;
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("score: evaluation mask selects no entries");
    ScoreStats s;
    s.mae = abs_sum / static_cast<double>(n);
    s.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    s.masked_count = n;
    return s;
}

void ExperimentConfig::validate() const {
    solver.validate();
    if (!(theta0 >= 0.0 && theta0 <= 1.0)) {
        throw std::invalid_argument("theta0 must lie in [0, 1]");
    }
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
}

ImputationReport run_experiment(const Tensor3& truth, const MaskTensor& native,
                                const MissingSpec& mspec, const ExperimentConfig& cfg) {
    cfg.validate();
    check_same_dims(truth.dims(), native.dims(), "run_experiment");
    const auto t0 = std::chrono::steady_clock::now();

    const MaskTensor generated = generate_mask(truth.dims(), mspec);
    const MaskTensor observed = mask_and(native, generated);
    const MaskTensor held_out = mask_and(native, complement(generated));
    if (held_out.count_ones() == 0) {
        throw std::invalid_argument(
            "empty evaluation set: no natively observed entry was masked out");
    }

    const double psi = missing_rate(observed);
    SolverConfig scfg = cfg.solver;
    scfg.theta = decayed_theta(cfg.theta0, cfg.beta, psi);

    const CompletionResult res = solve(truth, observed, scfg);

    ImputationReport rep;
    rep.iterations = res.iterations;
    rep.converged = res.converged;
    rep.residual_trace = res.residual_trace;
    rep.truncation_ranks = res.truncation_ranks;
    rep.per_mode_spn = res.per_mode_spn;
    rep.realized_missing_rate = psi;
    rep.solver_config = scfg;
    rep.theta0 = cfg.theta0;
    rep.beta = cfg.beta;
    rep.missing = mspec;
    const ScoreStats s = score(truth, res.X_hat, held_out);
    rep.mae = s.mae;
    rep.rmse = s.rmse;
    rep.masked_count = s.masked_count;
    rep.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

void SweepGrid::validate() const {
    if (patterns.empty() || rates.empty() || p_values.empty() || theta0_values.empty() ||
        beta_values.empty()) {
        throw std::invalid_argument("sweep grid: every axis needs at least one value");
    }
    if (repetitions < 1) throw std::invalid_argument("sweep grid: repetitions must be >= 1");
    if (workers < 1) throw std::invalid_argument("sweep grid: workers must be >= 1");
    for (double r : rates) {
        if (!(r > 0.0 && r < 1.0)) {
            throw std::invalid_argument("sweep grid: rates must lie strictly in (0, 1)");
        }
    }
    for (double p : p_values) {
        if (!(p > 0.0 && p <= 1.0)) {
            throw std::invalid_argument("sweep grid: p values must lie in (0, 1]");
        }
    }
    for (double t : theta0_values) {
        if (!(t >= 0.0 && t <= 1.0)) {
            throw std::invalid_argument("sweep grid: theta0 values must lie in [0, 1]");
        }
    }
    for (double b : beta_values) {
        if (!(b >= 0.0)) throw std::invalid_argument("sweep grid: beta values must be nonnegative");
    }
}

std::size_t SweepGrid::row_count() const {
    return patterns.size() * rates.size() * p_values.size() * theta0_values.size() *
           beta_values.size() * static_cast<std::size_t>(repetitions);
}

std::vector<SweepRow> run_sweep(const Tensor3& truth, const MaskTensor& native,
                                const SweepGrid& grid) {
    grid.validate();
    check_same_dims(truth.dims(), native.dims(), "run_sweep");

    std::vector<SweepRow> rows(grid.row_count());
    std::size_t idx = 0;
    for (Pattern pat : grid.patterns) {
        for (double rate : grid.rates) {
            for (double p : grid.p_values) {
                for (double theta0 : grid.theta0_values) {
                    for (double beta : grid.beta_values) {
                        for (int rep = 0; rep < grid.repetitions; ++rep) {
                            SweepRow& row = rows[idx];
                            row.pattern = pat;
                            row.rate = rate;
                            row.p = p;
                            row.theta0 = theta0;
                            row.beta = beta;
                            row.repetition = rep;
                            row.seed = grid.base_seed + idx;
                            ++idx;
                        }
                    }
                }
            }
        }
    }

    auto run_row = [&](SweepRow& row) {
        try {
            MissingSpec mspec;
            mspec.pattern = row.pattern;
            mspec.rate = row.rate;
            mspec.seed = row.seed;
            ExperimentConfig ecfg;
            ecfg.solver = grid.base;
            ecfg.solver.p = row.p;
            ecfg.theta0 = row.theta0;
            ecfg.beta = row.beta;
            row.report = run_experiment(truth, native, mspec, ecfg);
        } catch (const std::exception& e) {
            row.report.reset();
            row.error = e.what();
        }
    };

    const int workers = std::min<int>(grid.workers, static_cast<int>(rows.size()));
    if (workers <= 1) {
        for (SweepRow& row : rows) run_row(row);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= rows.size()) return;
                run_row(rows[i]);
            }
        });
    }
    for (std::thread& t : pool) t.join();
    return rows;
}

}  // namespace lrtc
