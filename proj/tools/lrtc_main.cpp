#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrtc/eval.hpp"
#include "lrtc/io.hpp"
#include "lrtc/patterns.hpp"
#include "lrtc/solver.hpp"
#include "lrtc/tensor.hpp"

namespace {

lrtc::Dims parse_dims(const std::string& s) {
    std::vector<std::size_t> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            const std::string piece = s.substr(start, i - start);
            try {
                std::size_t pos = 0;
                const unsigned long long v = std::stoull(piece, &pos);
                if (pos != piece.size()) throw std::invalid_argument(piece);
                parts.push_back(static_cast<std::size_t>(v));
            } catch (const std::exception&) {
                throw std::invalid_argument("cannot parse dims \"" + s +
                                            "\": expected n1,n2,n3 with positive integers");
            }
            start = i + 1;
        }
    }
    if (parts.size() != 3 || parts[0] == 0 || parts[1] == 0 || parts[2] == 0) {
        throw std::invalid_argument("cannot parse dims \"" + s +
                                    "\": expected n1,n2,n3 with positive integers");
    }
    return {parts[0], parts[1], parts[2]};
}

std::array<double, 3> parse_alpha(const std::string& s) {
    std::vector<double> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            const std::string piece = s.substr(start, i - start);
            try {
                std::size_t pos = 0;
                const double v = std::stod(piece, &pos);
                if (pos != piece.size()) throw std::invalid_argument(piece);
                parts.push_back(v);
            } catch (const std::exception&) {
                throw std::invalid_argument("cannot parse alpha \"" + s +
                                            "\": expected three comma-separated weights");
            }
            start = i + 1;
        }
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("cannot parse alpha \"" + s +
                                    "\": expected three comma-separated weights");
    }
    return {parts[0], parts[1], parts[2]};
}

struct MaskArgs {
    std::string dims;
    std::string pattern;
    double rate = 0.5;
    std::uint64_t seed = 0;
    std::string out;
};

struct ImputeArgs {
    std::string data;
    std::string mask;
    std::string native_mask;
    double p = 0.5;
    double theta0 = 0.1;
    double beta = 2.0;
    double epsilon = 1e-4;
    int max_iters = 200;
    double mu0 = 1e-5;
    double mu_growth = 1.05;
    double mu_cap = 1e5;
    std::string alpha = "0.333,0.333,0.334";
    int gst_inner_iters = 10;
    double gst_inner_tol = 1e-12;
    std::string out;
    std::string report;
};

struct EvalArgs {
    std::string truth;
    std::string imputed;
    std::string score_mask;
    std::string report;
};

struct SweepArgs {
    std::string config;
    std::string out;
};

struct ConvertArgs {
    std::string csv;
    std::string dims;
    std::string out_tensor;
    std::string out_mask;
};

void run_mask(const MaskArgs& a) {
    lrtc::MissingSpec spec;
    spec.pattern = lrtc::pattern_from_name(a.pattern);
    spec.rate = a.rate;
    spec.seed = a.seed;
    const lrtc::MaskTensor P = lrtc::generate_mask(parse_dims(a.dims), spec);
    lrtc::write_mask(a.out, P);
}

void run_impute(const ImputeArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lrtc::Tensor3 data = lrtc::read_tensor(a.data);
    const lrtc::MaskTensor mask = lrtc::read_mask(a.mask);
    lrtc::MaskTensor native(data.dims());
    if (!a.native_mask.empty()) native = lrtc::read_mask(a.native_mask);

    const lrtc::MaskTensor observed = lrtc::mask_and(native, mask);
    const double psi = lrtc::missing_rate(observed);

    lrtc::SolverConfig cfg;
    cfg.p = a.p;
    cfg.theta = lrtc::decayed_theta(a.theta0, a.beta, psi);
    cfg.alpha = parse_alpha(a.alpha);
    cfg.mu0 = a.mu0;
    cfg.mu_growth = a.mu_growth;
    cfg.mu_cap = a.mu_cap;
    cfg.epsilon = a.epsilon;
    cfg.max_iters = a.max_iters;
    cfg.gst_inner_iters = a.gst_inner_iters;
    cfg.gst_inner_tol = a.gst_inner_tol;

    const lrtc::CompletionResult res = lrtc::solve(data, observed, cfg);
    lrtc::write_tensor(a.out, res.X_hat);

    if (!a.report.empty()) {
        lrtc::ImputationReport rep;
        rep.iterations = res.iterations;
        rep.converged = res.converged;
        rep.residual_trace = res.residual_trace;
        rep.truncation_ranks = res.truncation_ranks;
        rep.per_mode_spn = res.per_mode_spn;
        rep.realized_missing_rate = psi;
        rep.solver_config = cfg;
        rep.theta0 = a.theta0;
        rep.beta = a.beta;
        const lrtc::MaskTensor held_out = lrtc::mask_and(native, lrtc::complement(mask));
        if (held_out.count_ones() > 0) {
            const lrtc::ScoreStats s = lrtc::score(data, res.X_hat, held_out);
            rep.mae = s.mae;
            rep.rmse = s.rmse;
            rep.masked_count = s.masked_count;
        }
        rep.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        lrtc::write_report(a.report, rep);
    }
}

void run_eval(const EvalArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const lrtc::Tensor3 truth = lrtc::read_tensor(a.truth);
    const lrtc::Tensor3 imputed = lrtc::read_tensor(a.imputed);
    const lrtc::MaskTensor mask = lrtc::read_mask(a.score_mask);
    const lrtc::ScoreStats s = lrtc::score(truth, imputed, mask);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    lrtc::write_score_report(a.report, s, wall);
}

void run_sweep(const SweepArgs& a) {
    const lrtc::SweepFileConfig cfg = lrtc::parse_sweep_config(a.config);
    const lrtc::Tensor3 data = lrtc::read_tensor(cfg.data_path);
    lrtc::MaskTensor native(data.dims());
    if (!cfg.native_mask_path.empty()) native = lrtc::read_mask(cfg.native_mask_path);
    const std::vector<lrtc::SweepRow> rows = lrtc::run_sweep(data, native, cfg.grid);
    lrtc::write_sweep_csv(a.out, rows);
}

void run_convert(const ConvertArgs& a) {
    std::optional<lrtc::Dims> dims;
    if (!a.dims.empty()) dims = parse_dims(a.dims);
    auto [tensor, mask] = lrtc::ingest_csv(a.csv, dims);
    lrtc::write_tensor(a.out_tensor, tensor);
    lrtc::write_mask(a.out_mask, mask);
}

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Low-rank tensor completion for spatiotemporal data"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    MaskArgs mask_args;
    CLI::App* mask_cmd = app.add_subcommand("mask", "Synthesize a missing-pattern mask");
    mask_cmd->add_option("--dims", mask_args.dims, "Tensor extents n1,n2,n3")->required();
    mask_cmd->add_option("--pattern", mask_args.pattern, "One of rm, fm0, fm1, fm2")->required();
    mask_cmd->add_option("--rate", mask_args.rate, "Target missing rate in (0,1)")->required();
    mask_cmd->add_option("--seed", mask_args.seed, "RNG seed")->capture_default_str();
    mask_cmd->add_option("--out", mask_args.out, "Output mask file")->required();

    ImputeArgs imp;
    CLI::App* impute_cmd = app.add_subcommand("impute", "Complete a partially observed tensor");
    impute_cmd->add_option("--data", imp.data, "Input tensor file")->required();
    impute_cmd->add_option("--mask", imp.mask, "Observation mask file")->required();
    impute_cmd->add_option("--native-mask", imp.native_mask,
                           "Mask of entries genuinely present in the source data");
    impute_cmd->add_option("--p", imp.p, "Schatten exponent in (0,1]")->capture_default_str();
    impute_cmd->add_option("--theta0", imp.theta0, "Base truncation rate")->capture_default_str();
    impute_cmd->add_option("--beta", imp.beta, "Truncation decay strength")->capture_default_str();
    impute_cmd->add_option("--epsilon", imp.epsilon, "Relative-change stopping tolerance")->capture_default_str();
    impute_cmd->add_option("--max-iters", imp.max_iters, "Iteration cap")->capture_default_str();
    impute_cmd->add_option("--mu0", imp.mu0, "Initial penalty")->capture_default_str();
    impute_cmd->add_option("--mu-growth", imp.mu_growth, "Penalty growth factor")->capture_default_str();
    impute_cmd->add_option("--mu-cap", imp.mu_cap, "Penalty ceiling")->capture_default_str();
    impute_cmd->add_option("--alpha", imp.alpha, "Mode weights a1,a2,a3")->capture_default_str();
    impute_cmd->add_option("--gst-inner-iters", imp.gst_inner_iters,
                           "Fixed-point iterations of the shrinkage kernel")->capture_default_str();
    impute_cmd->add_option("--gst-inner-tol", imp.gst_inner_tol,
                           "Early-exit tolerance of the shrinkage kernel (0 disables)")->capture_default_str();
    impute_cmd->add_option("--out", imp.out, "Output tensor file")->required();
    impute_cmd->add_option("--report", imp.report, "Report file (.json for JSON)");

    EvalArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Score an imputation against ground truth");
    eval_cmd->add_option("--truth", ev.truth, "Ground-truth tensor file")->required();
    eval_cmd->add_option("--imputed", ev.imputed, "Imputed tensor file")->required();
    eval_cmd->add_option("--score-mask", ev.score_mask, "Mask of entries to score")->required();
    eval_cmd->add_option("--report", ev.report, "Report file (.json for JSON)")->required();

    SweepArgs sw;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
    sweep_cmd->add_option("--config", sw.config, "Sweep configuration file")->required();
    sweep_cmd->add_option("--out", sw.out, "Output CSV file")->required();

    ConvertArgs cv;
    CLI::App* convert_cmd =
        app.add_subcommand("convert", "Ingest a long-format CSV into tensor and mask files");
    convert_cmd->add_option("--csv", cv.csv, "Input CSV file")->required();
    convert_cmd->add_option("--dims", cv.dims, "Tensor extents n1,n2,n3 (or use a # dims= line)");
    convert_cmd->add_option("--out-tensor", cv.out_tensor, "Output tensor file")->required();
    convert_cmd->add_option("--out-mask", cv.out_mask, "Output mask file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (mask_cmd->parsed()) run_mask(mask_args);
        else if (impute_cmd->parsed()) run_impute(imp);
        else if (eval_cmd->parsed()) run_eval(ev);
        else if (sweep_cmd->parsed()) run_sweep(sw);
        else if (convert_cmd->parsed()) run_convert(cv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 0;
}
