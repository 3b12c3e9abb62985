// Command-line front end: synthesize snapshots, pick sparse subarrays,
// interpolate by Hankel completion, extract DOAs, and run benchmark
// campaigns. Exit codes: 0 success, 2 validation error, 3 I/O error.
#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hankeldoa/hankeldoa.hpp"

namespace {

using namespace hankeldoa;

struct SynthArgs {
    std::string scene_path;
    int n = 0;
    std::uint64_t seed = 0;
    double noise_std = 0.0;
    std::string mask_path;
    std::string out_path;
};

int run_synth(const SynthArgs& args) {
    const SourceScene scene = read_scene(args.scene_path);
    Snapshot snapshot = synthesize_snapshot(scene, args.n, args.seed, args.noise_std);
    if (!args.mask_path.empty()) {
        const PlanFile plan = read_plan(args.mask_path);
        if (plan.mask.n != args.n) {
            throw ValidationError("mask length " + std::to_string(plan.mask.n) +
                                  " does not match --n " + std::to_string(args.n));
        }
        snapshot = project(snapshot, plan.mask);
    }
    write_snapshot(args.out_path, snapshot);
    std::cout << "wrote " << args.out_path << " (n=" << snapshot.n << ", observed="
              << (snapshot.mask ? snapshot.mask->count() : snapshot.n) << ")\n";
    return 0;
}

struct SampleArgs {
    std::string snapshot_path;
    int m = 0;
    std::string mode = "leverage-top-m";
    std::uint64_t seed = 0;
    int rank_cap = 0;
    std::string scores_path;
    std::string out_path;
};

int run_sample(const SampleArgs& args) {
    const Snapshot snapshot = read_snapshot(args.snapshot_path);
    const SamplingModeTag mode = parse_sampling_mode(args.mode);
    if (mode == SamplingModeTag::uniform_random) {
        const SamplingMask mask = uniform_random_mask(snapshot.n, args.m, args.seed);
        write_plan(args.out_path, mask, {}, "uniform-random");
        std::cout << "wrote " << args.out_path << " (uniform, m=" << args.m << ")\n";
        return 0;
    }
    const HankelShape shape = HankelShape::square(snapshot.n);
    // Default cap matches the pipeline: keeps m >= 2 * rank_used feasible.
    const int cap = args.rank_cap > 0 ? args.rank_cap : std::max(1, args.m / 2);
    const LeverageScores scores = leverage_scores(snapshot, shape, 0.0, cap);
    if (!args.scores_path.empty()) write_scores(args.scores_path, scores);
    const SelectionMode sel = mode == SamplingModeTag::leverage_top_m
                                  ? SelectionMode::top_m
                                  : SelectionMode::probabilistic;
    const SamplingPlan plan = select_elements(scores, args.m, sel, args.seed);
    write_plan(args.out_path, plan);
    std::cout << "wrote " << args.out_path << " (" << to_string(mode)
              << ", m=" << plan.mask.count() << ", rank_used=" << scores.rank_used << ")\n";
    return 0;
}

struct CompleteArgs {
    std::string snapshot_path;
    std::string out_path;
    AdmmConfig admm;
    std::string trace_path;
    std::string truth_path;
};

int run_complete(const CompleteArgs& args) {
    const Snapshot observed = read_snapshot(args.snapshot_path);
    const HankelShape shape = HankelShape::square(observed.n);

    std::ostringstream trace;
    AdmmObserver observer;
    if (!args.trace_path.empty()) {
        trace << "iter,primal_residual,objective\n";
        observer = [&trace](const AdmmState& st) {
            const double objective = 0.5 * (st.U.squaredNorm() + st.V.squaredNorm());
            trace << st.iter << ',' << detail::format_double(st.primal_residual_history.back())
                  << ',' << detail::format_double(objective) << "\n";
        };
    }

    const CompletionResult result = complete(observed, shape, args.admm, observer);
    Snapshot completed;
    completed.n = observed.n;
    completed.values = result.y_hat;
    write_snapshot(args.out_path, completed);
    if (!args.trace_path.empty()) detail::write_text_file(args.trace_path, trace.str());

    std::cout << "wrote " << args.out_path << " (iters=" << result.iters_used << ", residual="
              << result.final_residual << (result.converged ? ", converged" : ", max iters")
              << ")\n";
    if (!args.truth_path.empty()) {
        const Snapshot truth = read_snapshot(args.truth_path);
        if (truth.n != observed.n) {
            throw ValidationError("truth length does not match the observed snapshot");
        }
        if (observed.mask && !observed.mask->full()) {
            std::cout << "off-mask nmse=" << nmse(result.y_hat, truth.values, *observed.mask)
                      << "\n";
        } else {
            std::cout << "off-mask nmse=0 (no missing elements)\n";
        }
    }
    return 0;
}

struct DoaArgs {
    std::string snapshot_path;
    int r = 0;
    std::string method = "matrix-pencil";
    double filter_tol = 1e-3;
    std::string out_path;
    std::string scene_path;
    std::string report_path;
    double threshold = 0.005;
};

int run_doa(const DoaArgs& args) {
    const Snapshot snapshot = read_snapshot(args.snapshot_path);
    if (snapshot.mask && !snapshot.mask->full()) {
        throw ValidationError("snapshot has missing elements; run 'complete' first");
    }
    DoaMethod method;
    if (args.method == "matrix-pencil") {
        method = DoaMethod::matrix_pencil;
    } else if (args.method == "prony") {
        method = DoaMethod::prony;
    } else {
        throw ValidationError("unknown method '" + args.method +
                              "' (expected matrix-pencil or prony)");
    }
    int r = args.r;
    if (r == 0) {
        const HankelShape shape = HankelShape::square(snapshot.n);
        r = std::min(rank_estimate(snapshot.values, shape, kModelOrderTolerance),
                     (snapshot.n - 1) / 2);
        if (r < 1) throw DegenerateInputError("model order estimated as zero");
        std::cout << "estimated model order r=" << r << "\n";
    }
    const DoaEstimate raw = estimate_doa(snapshot.values, r, method);
    const DoaEstimate est = filter_by_amplitude(raw, args.filter_tol);
    write_estimates(args.out_path, est);
    for (const auto& w : est.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "wrote " << args.out_path << " (" << est.sources.size() << " sources";
    if (est.sources.size() < raw.sources.size()) {
        std::cout << ", " << raw.sources.size() - est.sources.size() << " filtered";
    }
    std::cout << ")\n";

    if (!args.scene_path.empty()) {
        const SourceScene scene = read_scene(args.scene_path);
        const DetectionReport report = match_detections(scene, est, args.threshold);
        if (!args.report_path.empty()) write_report(args.report_path, report);
        std::cout << "matched " << report.matches.size() << "/" << scene.size() << " sources, "
                  << report.false_positives.size() << " false positive(s)"
                  << (report.all_detected ? ", all detected" : "") << "\n";
    }
    return 0;
}

struct BenchArgs {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

int run_bench(const BenchArgs& args) {
    ExperimentConfig cfg = read_experiment_config(args.config_path);
    if (args.seed) cfg.base_seed = *args.seed;
    const CampaignResult result = run_campaign(cfg, args.jobs);
    emit_outputs(result, args.out_dir);
    std::cout << "m,mode,recovery_rate,mean_nmse\n";
    for (const auto& row : result.summary) {
        std::cout << row.m << ',' << to_string(row.mode) << ',' << row.recovery_rate << ','
                  << row.mean_nmse << "\n";
    }
    std::cout << "wrote " << result.records.size() << " trial records to " << args.out_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-array DOA estimation via leverage-guided Hankel completion"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a ULA snapshot from a scene");
    synth_cmd->add_option("--scene", synth.scene_path, "Scene JSON")->required();
    synth_cmd->add_option("--n", synth.n, "Array length")->required()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth.seed, "Noise seed");
    synth_cmd->add_option("--noise-std", synth.noise_std, "Complex noise std dev");
    synth_cmd->add_option("--mask", synth.mask_path, "Plan CSV to project onto");
    synth_cmd->add_option("--out", synth.out_path, "Output snapshot CSV")->required();

    SampleArgs sample;
    auto* sample_cmd =
        app.add_subcommand("sample", "Score elements and pick an informative subarray");
    sample_cmd->add_option("--snapshot", sample.snapshot_path, "Observed snapshot CSV")
        ->required();
    sample_cmd->add_option("--m", sample.m, "Subarray size")->required()->check(
        CLI::PositiveNumber);
    sample_cmd->add_option("--mode", sample.mode,
                           "leverage-top-m | leverage-probabilistic | uniform-random");
    sample_cmd->add_option("--seed", sample.seed, "Selection seed");
    sample_cmd->add_option("--rank-cap", sample.rank_cap, "Cap on the score rank (0 = auto)");
    sample_cmd->add_option("--scores", sample.scores_path, "Also write scores CSV here");
    sample_cmd->add_option("--out", sample.out_path, "Output plan CSV")->required();

    CompleteArgs comp;
    auto* complete_cmd =
        app.add_subcommand("complete", "Interpolate missing elements by Hankel completion");
    complete_cmd->add_option("--snapshot", comp.snapshot_path, "Masked snapshot CSV")->required();
    complete_cmd->add_option("--out", comp.out_path, "Output completed snapshot CSV")->required();
    complete_cmd->add_option("--rho", comp.admm.rho, "ADMM penalty");
    complete_cmd->add_option("--factor-rank", comp.admm.factor_rank, "Factor width (0 = auto)");
    complete_cmd->add_option("--max-iters", comp.admm.max_iters, "Iteration cap");
    complete_cmd->add_option("--primal-tol", comp.admm.primal_tol, "Primal stopping tolerance");
    complete_cmd->add_option("--stall-tol", comp.admm.stall_tol, "Stall tolerance");
    complete_cmd->add_option("--seed", comp.admm.seed, "Init padding seed");
    complete_cmd->add_option("--trace", comp.trace_path, "Write iteration trace CSV here");
    complete_cmd->add_option("--truth", comp.truth_path, "Full snapshot CSV to report NMSE against");

    DoaArgs doa;
    auto* doa_cmd = app.add_subcommand("doa", "Extract source directions from a full snapshot");
    doa_cmd->add_option("--snapshot", doa.snapshot_path, "Full snapshot CSV")->required();
    doa_cmd->add_option("--r", doa.r, "Model order (0 = estimate)")->check(
        CLI::NonNegativeNumber);
    doa_cmd->add_option("--method", doa.method, "matrix-pencil | prony");
    doa_cmd->add_option("--filter-tol", doa.filter_tol, "Relative amplitude filter");
    doa_cmd->add_option("--out", doa.out_path, "Output estimates CSV")->required();
    doa_cmd->add_option("--scene", doa.scene_path, "Truth scene JSON for matching");
    doa_cmd->add_option("--report", doa.report_path, "Detection report JSON (needs --scene)");
    doa_cmd->add_option("--threshold", doa.threshold, "Detection threshold on |sin t - sin t'|");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a Monte Carlo campaign");
    bench_cmd->add_option("--config", bench.config_path, "Experiment config JSON")->required();
    bench_cmd->add_option("--out", bench.out_dir, "Output directory")->required();
    bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Override the config base_seed");

    try {
        app.parse(argc, argv);
        if (synth_cmd->parsed()) return run_synth(synth);
        if (sample_cmd->parsed()) return run_sample(sample);
        if (complete_cmd->parsed()) return run_complete(comp);
        if (doa_cmd->parsed()) return run_doa(doa);
        if (bench_cmd->parsed()) return run_bench(bench);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
