// File formats: scene JSON, snapshot/scores/plan/estimate CSV, report JSON.
//
// Doubles are printed with %.17g so every file round-trips bit-exactly and
// repeated runs produce byte-identical output. Indices in files are 1-based,
// matching the conventions used everywhere else in the library.
#pragma once

#include <algorithm>
#include <cerrno>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/doa.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/leverage.hpp"

namespace hankeldoa {

inline constexpr const char* kVersion = "0.1.0";

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& field, const std::string& context) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw IoError(context + ": expected a number, got '" + field + "'");
    }
    return value;
}

inline long parse_long(const std::string& field, const std::string& context) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    const long value = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        throw IoError(context + ": expected an integer, got '" + field + "'");
    }
    return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    fields.push_back(current);
    return fields;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed on " + path.string());
    return buf.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed on " + path.string());
}

/// Split into lines, dropping trailing carriage returns and a trailing blank.
inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string current;
    for (char ch : text) {
        if (ch == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(current);
            current.clear();
        } else {
            current.push_back(ch);
        }
    }
    if (!current.empty()) {
        if (current.back() == '\r') current.pop_back();
        lines.push_back(current);
    }
    return lines;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenes: JSON {"wavelength_ratio": r, "sources": [{"tau", "amp_re", "amp_im"}]}

inline nlohmann::json scene_to_json(const SourceScene& scene) {
    nlohmann::json j;
    j["wavelength_ratio"] = scene.wavelength_ratio;
    j["sources"] = nlohmann::json::array();
    for (const auto& s : scene.sources) {
        j["sources"].push_back({{"tau", s.tau},
                                {"amp_re", s.amplitude.real()},
                                {"amp_im", s.amplitude.imag()}});
    }
    return j;
}

/// Throws IoError naming `context` on missing or mistyped fields; semantic
/// validity is the caller's problem (call scene.validate()).
inline SourceScene scene_from_json(const nlohmann::json& j, const std::string& context) {
    SourceScene scene;
    try {
        scene.wavelength_ratio = j.value("wavelength_ratio", 0.5);
        if (!j.contains("sources") || !j["sources"].is_array()) {
            throw IoError(context + " is missing a \"sources\" array");
        }
        for (const auto& item : j["sources"]) {
            SceneSource s;
            s.tau = item.at("tau").get<double>();
            s.amplitude = {item.at("amp_re").get<double>(), item.at("amp_im").get<double>()};
            scene.sources.push_back(s);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad scene field in " + context + ": " + e.what());
    }
    return scene;
}

inline void write_scene(const std::filesystem::path& path, const SourceScene& scene) {
    detail::write_text_file(path, scene_to_json(scene).dump(2) + "\n");
}

inline SourceScene read_scene(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
    SourceScene scene = scene_from_json(j, path.string());
    scene.validate();
    return scene;
}

// ---------------------------------------------------------------------------
// Snapshots: CSV `index,re,im`, one row per observed element. A leading
// `# n=<N>` comment preserves the full length so masked snapshots round-trip.

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& snapshot) {
    std::ostringstream out;
    out << "# n=" << snapshot.n << "\n";
    out << "index,re,im\n";
    auto row = [&](int k) {
        const std::complex<double> v = snapshot.values(k - 1);
        out << k << ',' << detail::format_double(v.real()) << ','
            << detail::format_double(v.imag()) << "\n";
    };
    if (snapshot.mask.has_value()) {
        for (int k : snapshot.mask->omega) row(k);
    } else {
        for (int k = 1; k <= snapshot.n; ++k) row(k);
    }
    detail::write_text_file(path, out.str());
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
    const auto lines = detail::split_lines(detail::read_text_file(path));
    int n = 0;
    std::size_t i = 0;
    while (i < lines.size() && (lines[i].empty() || lines[i][0] == '#')) {
        if (lines[i].rfind("# n=", 0) == 0) {
            n = static_cast<int>(detail::parse_long(lines[i].substr(4), path.string()));
        }
        ++i;
    }
    if (i >= lines.size() || lines[i] != "index,re,im") {
        throw IoError("snapshot " + path.string() + " is missing the 'index,re,im' header");
    }
    ++i;
    std::vector<int> indices;
    std::vector<std::complex<double>> values;
    for (; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i][0] == '#') continue;
        const auto fields = detail::split_csv_line(lines[i]);
        if (fields.size() != 3) {
            throw IoError("snapshot " + path.string() + ": expected 3 columns, got " +
                          std::to_string(fields.size()));
        }
        const std::string ctx = path.string() + " line " + std::to_string(i + 1);
        indices.push_back(static_cast<int>(detail::parse_long(fields[0], ctx)));
        values.emplace_back(detail::parse_double(fields[1], ctx),
                            detail::parse_double(fields[2], ctx));
    }
    if (indices.empty()) throw IoError("snapshot " + path.string() + " has no data rows");
    if (n == 0) n = *std::max_element(indices.begin(), indices.end());

    Snapshot snapshot;
    snapshot.n = n;
    snapshot.values = Eigen::VectorXcd::Zero(n);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const int k = indices[r];
        if (k < 1 || k > n) {
            throw IoError("snapshot " + path.string() + ": index " + std::to_string(k) +
                          " outside 1.." + std::to_string(n));
        }
        snapshot.values(k - 1) = values[r];
    }
    if (static_cast<int>(indices.size()) < n) {
        SamplingMask mask;
        mask.n = n;
        mask.omega = indices;
        std::sort(mask.omega.begin(), mask.omega.end());
        mask.validate();
        snapshot.mask = std::move(mask);
    }
    return snapshot;
}

// ---------------------------------------------------------------------------
// Leverage scores: CSV `index,mu`, one row per element.

inline void write_scores(const std::filesystem::path& path, const LeverageScores& scores) {
    std::ostringstream out;
    out << "index,mu\n";
    for (int k = 1; k <= scores.n; ++k) {
        out << k << ',' << detail::format_double(scores.mu(k - 1)) << "\n";
    }
    detail::write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Sampling plans: CSV `index,selected,forced`, one row per element. A leading
// `# mode=<tag>` comment records how the plan was built.

inline void write_plan(const std::filesystem::path& path, const SamplingMask& mask,
                       const std::vector<int>& forced, const std::string& mode) {
    std::ostringstream out;
    out << "# mode=" << mode << "\n";
    out << "index,selected,forced\n";
    for (int k = 1; k <= mask.n; ++k) {
        const bool sel = mask.contains(k);
        const bool is_forced =
            std::find(forced.begin(), forced.end(), k) != forced.end();
        out << k << ',' << (sel ? 1 : 0) << ',' << (is_forced ? 1 : 0) << "\n";
    }
    detail::write_text_file(path, out.str());
}

inline void write_plan(const std::filesystem::path& path, const SamplingPlan& plan) {
    write_plan(path, plan.mask, plan.forced,
               plan.mode == SelectionMode::top_m ? "leverage-top-m" : "leverage-probabilistic");
}

struct PlanFile {
    SamplingMask mask;
    std::vector<int> forced;
    std::string mode;
};

inline PlanFile read_plan(const std::filesystem::path& path) {
    const auto lines = detail::split_lines(detail::read_text_file(path));
    PlanFile plan;
    std::size_t i = 0;
    while (i < lines.size() && (lines[i].empty() || lines[i][0] == '#')) {
        if (lines[i].rfind("# mode=", 0) == 0) plan.mode = lines[i].substr(7);
        ++i;
    }
    if (i >= lines.size() || lines[i] != "index,selected,forced") {
        throw IoError("plan " + path.string() + " is missing the 'index,selected,forced' header");
    }
    ++i;
    int n = 0;
    for (; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i][0] == '#') continue;
        const auto fields = detail::split_csv_line(lines[i]);
        if (fields.size() != 3) {
            throw IoError("plan " + path.string() + ": expected 3 columns, got " +
                          std::to_string(fields.size()));
        }
        const std::string ctx = path.string() + " line " + std::to_string(i + 1);
        const int k = static_cast<int>(detail::parse_long(fields[0], ctx));
        const long sel = detail::parse_long(fields[1], ctx);
        const long fc = detail::parse_long(fields[2], ctx);
        n = std::max(n, k);
        if (sel != 0) plan.mask.omega.push_back(k);
        if (fc != 0) plan.forced.push_back(k);
    }
    plan.mask.n = n;
    std::sort(plan.mask.omega.begin(), plan.mask.omega.end());
    plan.mask.validate();
    return plan;
}

// ---------------------------------------------------------------------------
// DOA estimates: CSV `tau_hat,amp_re,amp_im`, sorted by tau_hat.

inline void write_estimates(const std::filesystem::path& path, const DoaEstimate& est) {
    std::ostringstream out;
    out << "tau_hat,amp_re,amp_im\n";
    for (const auto& s : est.sources) {
        out << detail::format_double(s.tau_hat) << ','
            << detail::format_double(s.amplitude_hat.real()) << ','
            << detail::format_double(s.amplitude_hat.imag()) << "\n";
    }
    detail::write_text_file(path, out.str());
}

inline DoaEstimate read_estimates(const std::filesystem::path& path) {
    const auto lines = detail::split_lines(detail::read_text_file(path));
    std::size_t i = 0;
    while (i < lines.size() && (lines[i].empty() || lines[i][0] == '#')) ++i;
    if (i >= lines.size() || lines[i] != "tau_hat,amp_re,amp_im") {
        throw IoError("estimates " + path.string() +
                      " is missing the 'tau_hat,amp_re,amp_im' header");
    }
    ++i;
    DoaEstimate est;
    for (; i < lines.size(); ++i) {
        if (lines[i].empty() || lines[i][0] == '#') continue;
        const auto fields = detail::split_csv_line(lines[i]);
        if (fields.size() != 3) {
            throw IoError("estimates " + path.string() + ": expected 3 columns, got " +
                          std::to_string(fields.size()));
        }
        const std::string ctx = path.string() + " line " + std::to_string(i + 1);
        DoaSource s;
        s.tau_hat = detail::parse_double(fields[0], ctx);
        s.amplitude_hat = {detail::parse_double(fields[1], ctx),
                           detail::parse_double(fields[2], ctx)};
        est.sources.push_back(s);
    }
    return est;
}

// ---------------------------------------------------------------------------
// Detection reports: JSON.

inline void write_report(const std::filesystem::path& path, const DetectionReport& report) {
    nlohmann::json j;
    j["all_detected"] = report.all_detected;
    j["matches"] = nlohmann::json::array();
    for (const auto& m : report.matches) {
        j["matches"].push_back({{"true_index", m.true_index},
                                {"estimate_index", m.estimate_index},
                                {"sin_error", m.sin_error}});
    }
    j["missed"] = report.missed;
    j["false_positives"] = report.false_positives;
    detail::write_text_file(path, j.dump(2) + "\n");
}

}  // namespace hankeldoa
