// Two-snapshot pipeline and Monte Carlo campaign driver.
//
// A trial: draw a uniform subset Omega of size m, observe snapshot 1 on it,
// estimate leverage scores from that partial data, build the second-snapshot
// subset per sampling mode, observe snapshot 2 there, interpolate the full
// array by Hankel completion, and extract the source directions. The
// uniform-random mode skips scoring and draws a fresh uniform subset instead,
// which is the plain-completion baseline the leverage modes are compared to.
//
// Every trial is a pure function of its seed, so campaigns parallelize over
// trials and still produce byte-identical CSV output for any worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/completion.hpp"
#include "hankeldoa/doa.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/hankel.hpp"
#include "hankeldoa/io.hpp"
#include "hankeldoa/leverage.hpp"
#include "hankeldoa/svg.hpp"

namespace hankeldoa {

/// Relative singular-value threshold for picking the model order from the
/// interpolated vector. Looser than the exact-data tolerance because the
/// completion leaves residual energy in the noise space.
inline constexpr double kModelOrderTolerance = 1e-5;

enum class SamplingModeTag { leverage_top_m, leverage_probabilistic, uniform_random };

inline std::string to_string(SamplingModeTag mode) {
    switch (mode) {
        case SamplingModeTag::leverage_top_m: return "leverage-top-m";
        case SamplingModeTag::leverage_probabilistic: return "leverage-probabilistic";
        case SamplingModeTag::uniform_random: return "uniform-random";
    }
    throw ValidationError("to_string: unknown sampling mode");
}

inline SamplingModeTag parse_sampling_mode(const std::string& name) {
    if (name == "leverage-top-m") return SamplingModeTag::leverage_top_m;
    if (name == "leverage-probabilistic") return SamplingModeTag::leverage_probabilistic;
    if (name == "uniform-random") return SamplingModeTag::uniform_random;
    throw ValidationError("unknown sampling mode '" + name +
                          "' (expected leverage-top-m, leverage-probabilistic, "
                          "or uniform-random)");
}

struct ExperimentConfig {
    SourceScene scene;
    int n = 0;
    std::vector<int> m_values;
    int trials = 100;
    std::vector<SamplingModeTag> sampling_modes{SamplingModeTag::leverage_top_m};
    AdmmConfig admm;
    double detection_threshold = 0.005;
    std::uint64_t base_seed = 0;

    void validate() const {
        scene.validate();
        if (n < 3) throw ValidationError("ExperimentConfig: n must be >= 3");
        if (trials < 1) throw ValidationError("ExperimentConfig: trials must be >= 1");
        if (m_values.empty()) throw ValidationError("ExperimentConfig: m_values is empty");
        for (int m : m_values) {
            if (m < 1 || m > n) {
                throw ValidationError("ExperimentConfig: m=" + std::to_string(m) +
                                      " outside 1..n=" + std::to_string(n));
            }
        }
        if (sampling_modes.empty()) {
            throw ValidationError("ExperimentConfig: sampling_modes is empty");
        }
        if (!(detection_threshold > 0.0)) {
            throw ValidationError("ExperimentConfig: detection_threshold must be positive");
        }
        admm.validate();
    }
};

struct TrialRecord {
    int trial = 0;  ///< 0-based; the trial seed is base_seed XOR this value
    int m = 0;
    SamplingModeTag mode = SamplingModeTag::leverage_top_m;
    bool recovered_all = false;
    double nmse = 0.0;  ///< off-mask completion NMSE; +inf when the trial errored out
    int n_detected = 0;
    int n_false_positive = 0;
    double seconds = 0.0;
};

/// Full per-trial outputs for diagnostics and acceptance checks; campaigns
/// keep only the record.
struct PipelineResult {
    TrialRecord record;
    SamplingMask omega1;
    std::optional<LeverageScores> scores;  ///< absent in uniform-random mode
    SamplingMask omega2;
    std::vector<int> forced;
    CompletionResult completion;
    Eigen::VectorXcd truth;  ///< clean full second snapshot
    int model_order = 0;
    DoaEstimate estimate_raw;  ///< all model_order roots, unfiltered
    DoaEstimate estimate;      ///< after the relative-amplitude filter
    DetectionReport report;
    std::string error;  ///< nonempty when the trial failed; record marks it unrecovered
};

inline PipelineResult run_pipeline_detailed(const SourceScene& scene, int n, int m,
                                            SamplingModeTag mode, const AdmmConfig& admm,
                                            std::uint64_t seed,
                                            double detection_threshold = 0.005) {
    PipelineResult out;
    out.record.m = m;
    out.record.mode = mode;
    out.record.nmse = std::numeric_limits<double>::infinity();

    // Independent per-stage seeds so a change in one stage's draw count never
    // shifts another stage's randomness.
    std::mt19937_64 seeder(seed);
    const std::uint64_t omega_seed = seeder();
    const std::uint64_t snapshot1_seed = seeder();
    const std::uint64_t plan_seed = seeder();
    const std::uint64_t snapshot2_seed = seeder();
    const std::uint64_t admm_seed = seeder();

    const auto t0 = std::chrono::steady_clock::now();
    try {
        const HankelShape shape = HankelShape::square(n);

        // Snapshot 1 on a uniform subset, scores from the zero-filled data.
        out.omega1 = uniform_random_mask(n, m, omega_seed);
        const Snapshot y1 = synthesize_snapshot(scene, n, snapshot1_seed);
        const Snapshot p1 = project(y1, out.omega1);

        // Second-snapshot subset per mode. The rank cap keeps the selection
        // feasible: select_elements wants m >= 2 * rank_used.
        if (mode == SamplingModeTag::uniform_random) {
            out.omega2 = uniform_random_mask(n, m, plan_seed);
        } else {
            const int rank_cap = std::max(1, m / 2);
            out.scores = leverage_scores(p1, shape, 0.0, rank_cap);
            const SelectionMode sel = mode == SamplingModeTag::leverage_top_m
                                          ? SelectionMode::top_m
                                          : SelectionMode::probabilistic;
            SamplingPlan plan = select_elements(*out.scores, m, sel, plan_seed);
            out.omega2 = std::move(plan.mask);
            out.forced = std::move(plan.forced);
        }

        // Snapshot 2, completion, interpolation error.
        const Snapshot y2 = synthesize_snapshot(scene, n, snapshot2_seed);
        out.truth = y2.values;
        const Snapshot p2 = project(y2, out.omega2);
        AdmmConfig trial_admm = admm;
        trial_admm.seed = admm_seed;
        out.completion = complete(p2, shape, trial_admm);
        out.record.nmse =
            out.omega2.full() ? 0.0 : nmse(out.completion.y_hat, out.truth, out.omega2);
        out.completion.nmse_vs_truth = out.record.nmse;

        // Detection. A DOA failure keeps the completion NMSE on the record.
        try {
            const int max_order = (n - 1) / 2;
            out.model_order =
                std::min(rank_estimate(out.completion.y_hat, shape, kModelOrderTolerance),
                         max_order);
            if (out.model_order < 1) {
                throw DegenerateInputError("model order estimated as zero");
            }
            out.estimate_raw =
                estimate_doa(out.completion.y_hat, out.model_order, DoaMethod::matrix_pencil);
            out.estimate = filter_by_amplitude(out.estimate_raw);
            out.report = match_detections(scene, out.estimate, detection_threshold);
            out.record.recovered_all = out.report.all_detected;
            out.record.n_detected = static_cast<int>(out.report.matches.size());
            out.record.n_false_positive = static_cast<int>(out.report.false_positives.size());
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    out.record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline TrialRecord run_pipeline(const SourceScene& scene, int n, int m, SamplingModeTag mode,
                                const AdmmConfig& admm, std::uint64_t seed,
                                double detection_threshold = 0.005) {
    return run_pipeline_detailed(scene, n, m, mode, admm, seed, detection_threshold).record;
}

struct SummaryRow {
    int m = 0;
    SamplingModeTag mode = SamplingModeTag::leverage_top_m;
    double recovery_rate = 0.0;
    double mean_nmse = 0.0;
};

struct CampaignResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;  ///< ordered by (m, mode, trial)
    std::vector<SummaryRow> summary;   ///< ordered by (m, mode)
};

/// Run trials x |m_values| x |sampling_modes| pipeline instances. Trials are
/// independent; `jobs` worker threads fill a pre-indexed record table, so the
/// result is identical for any worker count. Trial t uses seed
/// base_seed XOR t across all (m, mode) cells: comparisons between modes see
/// common random numbers.
inline CampaignResult run_campaign(const ExperimentConfig& cfg, int jobs = 1) {
    cfg.validate();
    if (jobs < 1) throw ValidationError("run_campaign: jobs must be >= 1");

    struct Cell {
        int m;
        SamplingModeTag mode;
        int trial;
    };
    std::vector<Cell> cells;
    cells.reserve(cfg.m_values.size() * cfg.sampling_modes.size() *
                  static_cast<std::size_t>(cfg.trials));
    for (int m : cfg.m_values) {
        for (SamplingModeTag mode : cfg.sampling_modes) {
            for (int t = 0; t < cfg.trials; ++t) cells.push_back({m, mode, t});
        }
    }

    CampaignResult result;
    result.config = cfg;
    result.records.resize(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& c = cells[i];
            const std::uint64_t seed = cfg.base_seed ^ static_cast<std::uint64_t>(c.trial);
            TrialRecord rec = run_pipeline(cfg.scene, cfg.n, c.m, c.mode, cfg.admm, seed,
                                           cfg.detection_threshold);
            rec.trial = c.trial;
            result.records[i] = std::move(rec);
        }
    };

    const int worker_count =
        static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(jobs), cells.size()));
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (int m : cfg.m_values) {
        for (SamplingModeTag mode : cfg.sampling_modes) {
            SummaryRow row;
            row.m = m;
            row.mode = mode;
            int count = 0;
            for (const auto& rec : result.records) {
                if (rec.m != m || rec.mode != mode) continue;
                ++count;
                row.recovery_rate += rec.recovered_all ? 1.0 : 0.0;
                row.mean_nmse += rec.nmse;
            }
            row.recovery_rate /= count;
            row.mean_nmse /= count;
            result.summary.push_back(row);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Config JSON, mirroring ExperimentConfig field-for-field.

inline nlohmann::json admm_to_json(const AdmmConfig& admm) {
    return {{"rho", admm.rho},
            {"factor_rank", admm.factor_rank},
            {"max_iters", admm.max_iters},
            {"primal_tol", admm.primal_tol},
            {"stall_tol", admm.stall_tol},
            {"seed", admm.seed}};
}

inline AdmmConfig admm_from_json(const nlohmann::json& j, const std::string& context) {
    AdmmConfig admm;
    try {
        admm.rho = j.value("rho", admm.rho);
        admm.factor_rank = j.value("factor_rank", admm.factor_rank);
        admm.max_iters = j.value("max_iters", admm.max_iters);
        admm.primal_tol = j.value("primal_tol", admm.primal_tol);
        admm.stall_tol = j.value("stall_tol", admm.stall_tol);
        admm.seed = j.value("seed", admm.seed);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad admm field in " + context + ": " + e.what());
    }
    return admm;
}

inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["scene"] = scene_to_json(cfg.scene);
    j["n"] = cfg.n;
    j["m_values"] = cfg.m_values;
    j["trials"] = cfg.trials;
    j["sampling_modes"] = nlohmann::json::array();
    for (SamplingModeTag mode : cfg.sampling_modes) {
        j["sampling_modes"].push_back(to_string(mode));
    }
    j["admm"] = admm_to_json(cfg.admm);
    j["detection_threshold"] = cfg.detection_threshold;
    j["base_seed"] = cfg.base_seed;
    return j;
}

/// Parse a config. "sampling_modes" may also be spelled "sampling_mode" and
/// may be a single string; everything except scene/n/m_values/trials has a
/// default. Throws IoError for malformed JSON, ValidationError for invalid
/// values.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j,
                                                    const std::string& context) {
    ExperimentConfig cfg;
    try {
        if (!j.contains("scene")) throw IoError(context + " is missing \"scene\"");
        cfg.scene = scene_from_json(j["scene"], context);
        cfg.n = j.at("n").get<int>();
        cfg.m_values = j.at("m_values").get<std::vector<int>>();
        cfg.trials = j.at("trials").get<int>();
        const char* mode_key =
            j.contains("sampling_modes") ? "sampling_modes" : "sampling_mode";
        if (j.contains(mode_key)) {
            cfg.sampling_modes.clear();
            if (j[mode_key].is_string()) {
                cfg.sampling_modes.push_back(parse_sampling_mode(j[mode_key].get<std::string>()));
            } else {
                for (const auto& item : j[mode_key]) {
                    cfg.sampling_modes.push_back(parse_sampling_mode(item.get<std::string>()));
                }
            }
        }
        if (j.contains("admm")) cfg.admm = admm_from_json(j["admm"], context);
        cfg.detection_threshold = j.value("detection_threshold", cfg.detection_threshold);
        cfg.base_seed = j.value("base_seed", cfg.base_seed);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad config field in " + context + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return experiment_config_from_json(j, path.string());
}

// ---------------------------------------------------------------------------
// Campaign outputs.

/// Write trials.csv, summary.csv, recovery_rate.svg, nmse.svg, and
/// run_meta.json into out_dir (created if needed). Wall-clock times stay off
/// disk on purpose: every emitted file is a pure function of the config, so
/// repeated runs are byte-identical for any worker count. Per-trial seconds
/// live in the in-memory TrialRecord for callers that want them.
inline void emit_outputs(const CampaignResult& result, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::ostringstream trials;
    trials << "trial,m,mode,recovered_all,nmse,n_detected,n_false_positive\n";
    for (const auto& rec : result.records) {
        trials << rec.trial << ',' << rec.m << ',' << to_string(rec.mode) << ','
               << (rec.recovered_all ? 1 : 0) << ',' << detail::format_double(rec.nmse) << ','
               << rec.n_detected << ',' << rec.n_false_positive << "\n";
    }
    detail::write_text_file(out_dir / "trials.csv", trials.str());

    std::ostringstream summary;
    summary << "m,mode,recovery_rate,mean_nmse\n";
    for (const auto& row : result.summary) {
        summary << row.m << ',' << to_string(row.mode) << ','
                << detail::format_double(row.recovery_rate) << ','
                << detail::format_double(row.mean_nmse) << "\n";
    }
    detail::write_text_file(out_dir / "summary.csv", summary.str());

    // One curve per mode; non-finite means (errored cells) are left off the
    // plots, the CSV keeps the authoritative values.
    std::vector<SvgSeries> recovery_series, nmse_series;
    for (SamplingModeTag mode : result.config.sampling_modes) {
        SvgSeries rec_s, nmse_s;
        rec_s.label = to_string(mode);
        nmse_s.label = to_string(mode);
        for (const auto& row : result.summary) {
            if (row.mode != mode) continue;
            rec_s.points.emplace_back(row.m, row.recovery_rate);
            if (std::isfinite(row.mean_nmse)) nmse_s.points.emplace_back(row.m, row.mean_nmse);
        }
        recovery_series.push_back(std::move(rec_s));
        if (!nmse_s.points.empty()) nmse_series.push_back(std::move(nmse_s));
    }
    SvgChartOptions rec_opt;
    rec_opt.title = "Recovery rate vs. active elements";
    rec_opt.x_label = "active elements m";
    rec_opt.y_label = "recovery rate";
    write_line_chart(out_dir / "recovery_rate.svg", recovery_series, rec_opt);

    SvgChartOptions nmse_opt;
    nmse_opt.title = "Interpolation NMSE vs. active elements";
    nmse_opt.x_label = "active elements m";
    nmse_opt.y_label = "mean NMSE";
    nmse_opt.log_y = true;
    if (nmse_series.empty()) {
        // Nothing finite to draw; keep the file contract with an empty-axes chart.
        SvgSeries placeholder;
        placeholder.label = "no finite data";
        placeholder.points.emplace_back(result.config.m_values.front(), 1.0);
        nmse_series.push_back(placeholder);
    }
    write_line_chart(out_dir / "nmse.svg", nmse_series, nmse_opt);

    nlohmann::json meta;
    meta["config"] = experiment_config_to_json(result.config);
    meta["version"] = kVersion;
    meta["trial_seeds"] = nlohmann::json::array();
    for (int t = 0; t < result.config.trials; ++t) {
        meta["trial_seeds"].push_back(result.config.base_seed ^ static_cast<std::uint64_t>(t));
    }
    detail::write_text_file(out_dir / "run_meta.json", meta.dump(2) + "\n");
}

}  // namespace hankeldoa
