// End-to-end checks of the command-line tool. Runs the binary given as
// argv[1] through std::system with stdout/stderr captured to files, so
// everything here exercises the real process boundary: exit codes, error
// text, and the files left on disk.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <sys/wait.h>

#include "lrtc/io.hpp"
#include "lrtc/patterns.hpp"
#include "lrtc/solver.hpp"
#include "lrtc/tensor.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            ++g_failures;                                                     \
            std::cerr << "FAILED " << __FILE__ << ":" << __LINE__ << ": "     \
                      << #cond << "\n";                                       \
        }                                                                     \
    } while (0)

std::string g_cli;
fs::path g_dir;

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

RunResult run(const std::string& args) {
    const fs::path out = g_dir / "stdout.txt";
    const fs::path err = g_dir / "stderr.txt";
    const std::string cmd =
        "\"" + g_cli + "\" " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    int code = -1;
    if (status != -1 && WIFEXITED(status)) code = WEXITSTATUS(status);
    return {code, slurp(out), slurp(err)};
}

std::string path(const std::string& name) { return (g_dir / name).string(); }

void test_mask_generation() {
    const RunResult r = run("mask --dims 6,5,4 --pattern fm1 --rate 0.4 --seed 3 --out " +
                            path("fm1.msk"));
    EXPECT(r.exit_code == 0);
    const lrtc::MaskTensor m = lrtc::read_mask(path("fm1.msk"));
    EXPECT((m.dims() == lrtc::Dims{6, 5, 4}));
    EXPECT(lrtc::fiber_structure_check(m, 1));
    EXPECT(std::abs(lrtc::missing_rate(m) - 0.4) <= 1.0 / 24.0);

    // Same seed, same bytes.
    const RunResult r2 = run("mask --dims 6,5,4 --pattern fm1 --rate 0.4 --seed 3 --out " +
                             path("fm1_again.msk"));
    EXPECT(r2.exit_code == 0);
    EXPECT(slurp(path("fm1.msk")) == slurp(path("fm1_again.msk")));
}

void test_impute_with_score() {
    const lrtc::Tensor3 truth = testsupport::low_rank_tensor({10, 10, 6}, 2, 42);
    lrtc::write_tensor(path("truth.tsr"), truth);

    RunResult r = run("mask --dims 10,10,6 --pattern rm --rate 0.5 --seed 7 --out " +
                      path("rm.msk"));
    EXPECT(r.exit_code == 0);

    r = run("impute --data " + path("truth.tsr") + " --mask " + path("rm.msk") +
            " --p 0.5 --theta0 0.05 --beta 1.0 --out " + path("xhat.tsr") + " --report " +
            path("report.txt"));
    EXPECT(r.exit_code == 0);

    const lrtc::Tensor3 xhat = lrtc::read_tensor(path("xhat.tsr"));
    EXPECT(xhat.dims() == truth.dims());
    const lrtc::MaskTensor mask = lrtc::read_mask(path("rm.msk"));
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) EXPECT(xhat[i] == truth[i]);
    }

    const std::string rep = slurp(path("report.txt"));
    EXPECT(rep.find("format=lrtc-report-v1\n") != std::string::npos);
    EXPECT(rep.find("\nmae=") != std::string::npos);
    EXPECT(rep.find("\nrmse=") != std::string::npos);
    EXPECT(rep.find("\ntheta0=0.05") != std::string::npos);
    EXPECT(rep.find("wall_time_seconds=") != std::string::npos);

    // The file-driven run must agree bit-for-bit with an in-process solve
    // under the same configuration.
    lrtc::SolverConfig cfg;
    cfg.p = 0.5;
    cfg.theta = lrtc::decayed_theta(0.05, 1.0, lrtc::missing_rate(mask));
    const lrtc::CompletionResult expected = lrtc::solve(truth, mask, cfg);
    EXPECT(xhat == expected.X_hat);
}

void test_impute_fully_observed() {
    const lrtc::Tensor3 truth = testsupport::low_rank_tensor({6, 6, 4}, 2, 11);
    lrtc::write_tensor(path("full.tsr"), truth);
    lrtc::write_mask(path("ones.msk"), lrtc::MaskTensor(truth.dims()));

    const RunResult r = run("impute --data " + path("full.tsr") + " --mask " + path("ones.msk") +
                            " --out " + path("full_out.tsr") + " --report " + path("full.txt"));
    EXPECT(r.exit_code == 0);
    const lrtc::Tensor3 xhat = lrtc::read_tensor(path("full_out.tsr"));
    EXPECT(xhat == truth);

    // Nothing was held out, so there is no score to report.
    const std::string rep = slurp(path("full.txt"));
    EXPECT(rep.find("converged=true") != std::string::npos);
    EXPECT(rep.find("mae=") == std::string::npos);
    EXPECT(rep.find("rmse=") == std::string::npos);
}

void test_eval_matches_library_score() {
    const lrtc::Tensor3 truth = testsupport::random_tensor({4, 3, 2}, 5, 0.0, 10.0);
    lrtc::Tensor3 imputed = truth;
    imputed(0, 0, 0) += 2.0;
    imputed(1, 2, 1) -= 4.0;
    lrtc::MaskTensor score_mask(truth.dims());
    for (std::size_t i = 0; i < score_mask.size(); ++i) score_mask[i] = 0;
    score_mask(0, 0, 0) = 1;
    score_mask(1, 2, 1) = 1;

    lrtc::write_tensor(path("ev_truth.tsr"), truth);
    lrtc::write_tensor(path("ev_imp.tsr"), imputed);
    lrtc::write_mask(path("ev_mask.msk"), score_mask);

    const RunResult r = run("eval --truth " + path("ev_truth.tsr") + " --imputed " +
                            path("ev_imp.tsr") + " --score-mask " + path("ev_mask.msk") +
                            " --report " + path("score.txt"));
    EXPECT(r.exit_code == 0);
    const std::string rep = slurp(path("score.txt"));
    EXPECT(rep.find("format=lrtc-score-v1\n") != std::string::npos);
    EXPECT(rep.find("mae=3\n") != std::string::npos);    // (2 + 4) / 2
    EXPECT(rep.find("masked_count=2\n") != std::string::npos);
}

void test_convert_and_native_mask() {
    {
        std::ofstream csv(path("data.csv"));
        csv << "# dims=2,2,2\n";
        csv << "interval,location,day,value\n";
        csv << "0,0,0,1.5\n";
        csv << "0,0,1,\n";  // present in the file but natively missing
        csv << "1,1,1,4.25\n";
    }
    const RunResult r = run("convert --csv " + path("data.csv") + " --out-tensor " +
                            path("conv.tsr") + " --out-mask " + path("conv.msk"));
    EXPECT(r.exit_code == 0);
    const lrtc::Tensor3 t = lrtc::read_tensor(path("conv.tsr"));
    const lrtc::MaskTensor m = lrtc::read_mask(path("conv.msk"));
    EXPECT((t.dims() == lrtc::Dims{2, 2, 2}));
    EXPECT(t(0, 0, 0) == 1.5);
    EXPECT(t(1, 1, 1) == 4.25);
    EXPECT(m(0, 0, 0) == 1);
    EXPECT(m(0, 0, 1) == 0);
    EXPECT(m.count_ones() == 2);
}

void test_sweep() {
    const lrtc::Tensor3 truth = testsupport::low_rank_tensor({8, 8, 4}, 2, 3);
    lrtc::write_tensor(path("sw.tsr"), truth);
    {
        std::ofstream cfg(path("sweep.cfg"));
        cfg << "data=" << path("sw.tsr") << "\n";
        cfg << "patterns=rm\n";
        cfg << "rates=0.4\n";
        cfg << "p=0.5\n";
        cfg << "theta0=0.05\n";
        cfg << "beta=1.0\n";
        cfg << "repetitions=2\n";
        cfg << "base_seed=100\n";
        cfg << "workers=2\n";
        cfg << "max_iters=60\n";
    }
    const RunResult r = run("sweep --config " + path("sweep.cfg") + " --out " + path("sweep.csv"));
    EXPECT(r.exit_code == 0);
    std::ifstream is(path("sweep.csv"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(is, line)) ++lines;
    EXPECT(lines == 3);  // header + 2 repetitions
}

void test_error_paths() {
    // Unknown flag: CLI rejects it and prints usage.
    RunResult r = run("impute --bogus x");
    EXPECT(r.exit_code != 0);
    EXPECT(r.err.find("Usage") != std::string::npos);

    // No subcommand at all.
    r = run("");
    EXPECT(r.exit_code != 0);

    // Missing input file: runtime failure with a one-line error.
    r = run("impute --data " + path("no_such.tsr") + " --mask " + path("no_such.msk") +
            " --out " + path("never.tsr"));
    EXPECT(r.exit_code == 1);
    EXPECT(r.err.rfind("error: ", 0) == 0);

    // Bad pattern name.
    r = run("mask --dims 4,4,4 --pattern fm3 --rate 0.5 --out " + path("never.msk"));
    EXPECT(r.exit_code == 1);
    EXPECT(r.err.rfind("error: ", 0) == 0);

    // Impossible rate: every entry would be masked.
    r = run("mask --dims 2,2,2 --pattern rm --rate 0.99 --out " + path("never.msk"));
    EXPECT(r.exit_code == 1);
    EXPECT(r.err.find("no observed entry") != std::string::npos);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-cli>\n";
        return 2;
    }
    g_cli = argv[1];
    g_dir = fs::temp_directory_path() / "lrtc_cli_tests";
    fs::remove_all(g_dir);
    fs::create_directories(g_dir);

    test_mask_generation();
    test_impute_with_score();
    test_impute_fully_observed();
    test_eval_matches_library_score();
    test_convert_and_native_mask();
    test_sweep();
    test_error_paths();

    if (g_failures == 0) {
        std::cout << "cli_tests: all checks passed\n";
        return 0;
    }
    std::cerr << "cli_tests: " << g_failures << " check(s) failed\n";
    return 1;
}
