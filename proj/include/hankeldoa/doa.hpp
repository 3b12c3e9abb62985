// Frequency and amplitude extraction from a full ULA vector by Prony linear
// prediction or the matrix-pencil method, plus detection matching against a
// ground-truth scene.
#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/hankel.hpp"
#include "hankeldoa/leverage.hpp"

namespace hankeldoa {

enum class DoaMethod { prony, matrix_pencil };

struct DoaSource {
    double tau_hat = 0.0;
    std::complex<double> amplitude_hat{0.0, 0.0};
    bool off_unit_circle = false;  ///< | |z| - 1 | > 0.2 for the underlying root
};

struct DoaEstimate {
    std::vector<DoaSource> sources;  ///< sorted by tau_hat, taus distinct
    DoaMethod method = DoaMethod::matrix_pencil;
    std::vector<std::string> warnings;
};

namespace detail {

/// Map a root z = exp(-j 2 pi tau) back to tau in [-1/2, 1/2).
inline double root_to_tau(const std::complex<double>& z) {
    double tau = -std::arg(z) / (2.0 * std::numbers::pi);
    if (tau >= 0.5) tau -= 1.0;
    if (tau < -0.5) tau += 1.0;
    return tau;
}

/// Roots of the monic polynomial z^r + a(0) z^(r-1) + ... + a(r-1) via the
/// companion matrix.
inline Eigen::VectorXcd companion_roots(const Eigen::VectorXcd& a) {
    const int r = static_cast<int>(a.size());
    if (r == 1) {
        Eigen::VectorXcd root(1);
        root(0) = -a(0);
        return root;
    }
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(r, r);
    for (int i = 1; i < r; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < r; ++i) companion(i, r - 1) = -a(r - 1 - i);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(companion, false);
    return eig.eigenvalues();
}

/// Least-squares solve with rank truncation; reports the numerical rank so the
/// caller can warn on deficiency.
inline std::pair<Eigen::VectorXcd, int> truncated_lstsq(const Eigen::MatrixXcd& a,
                                                        const Eigen::VectorXcd& b,
                                                        double rel_tol = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rel_tol);
    return {svd.solve(b), static_cast<int>(svd.rank())};
}

}  // namespace detail

/// Estimate r source frequencies and amplitudes from full uniform samples
/// y_k = sum_l b_l exp(-j 2 pi tau_l k), k = 1..n.
///
/// prony solves the least-squares linear prediction system over all n - r
/// prediction equations and roots the characteristic polynomial; matrix_pencil
/// uses the shift invariance of the Hankel column space. Both map roots to
/// tau = -arg(z) / (2 pi) and fit amplitudes on the Vandermonde system.
inline DoaEstimate estimate_doa(const Eigen::VectorXcd& y, int r,
                                DoaMethod method = DoaMethod::matrix_pencil) {
    const int n = static_cast<int>(y.size());
    if (r < 1) throw ValidationError("estimate_doa: r must be >= 1");
    if (n < 2 * r + 1) {
        throw ValidationError("estimate_doa: need len(y) >= 2r+1, got n=" + std::to_string(n) +
                              " for r=" + std::to_string(r));
    }

    DoaEstimate est;
    est.method = method;
    Eigen::VectorXcd roots;

    if (method == DoaMethod::prony) {
        // Prediction rows: y(k+r) + a_1 y(k+r-1) + ... + a_r y(k) = 0.
        const int rows = n - r;
        Eigen::MatrixXcd pred(rows, r);
        Eigen::VectorXcd rhs(rows);
        for (int k = 0; k < rows; ++k) {
            for (int i = 1; i <= r; ++i) {
                pred(k, i - 1) = y(k + r - i);
            }
            rhs(k) = -y(k + r);
        }
        auto [coeffs, rank] = detail::truncated_lstsq(pred, rhs);
        if (rank < r) {
            est.warnings.push_back("prony: prediction system rank " + std::to_string(rank) +
                                   " below model order " + std::to_string(r) +
                                   "; solved with truncated pseudo-inverse");
        }
        roots = detail::companion_roots(coeffs);
    } else {
        // Shifted column blocks of the Hankel lifting share the signal space.
        const HankelShape shape = HankelShape::square(n);
        const Eigen::MatrixXcd lifted = hankelize(y, shape);
        const Eigen::MatrixXcd y0 = lifted.leftCols(shape.cols() - 1);
        const Eigen::MatrixXcd y1 = lifted.rightCols(shape.cols() - 1);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(y0, Eigen::ComputeThinU | Eigen::ComputeThinV);
        int effective = r;
        const int rank = detail::numerical_rank(svd.singularValues(), 1e-12);
        if (rank < r) {
            est.warnings.push_back("matrix_pencil: numerical rank " + std::to_string(rank) +
                                   " below model order " + std::to_string(r) +
                                   "; reducing the order");
            effective = rank;
        }
        if (effective < 1) {
            throw DegenerateInputError("estimate_doa: input has no signal content");
        }
        const Eigen::MatrixXcd u = svd.matrixU().leftCols(effective);
        const Eigen::MatrixXcd v = svd.matrixV().leftCols(effective);
        const Eigen::VectorXd s = svd.singularValues().head(effective);
        const Eigen::MatrixXcd pencil =
            s.cwiseInverse().asDiagonal() * (u.adjoint() * y1 * v);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(pencil, false);
        roots = eig.eigenvalues();
    }

    // Amplitudes: least-squares fit of y on the Vandermonde system z^k, k = 1..n.
    const int found = static_cast<int>(roots.size());
    Eigen::MatrixXcd vandermonde(n, found);
    for (int l = 0; l < found; ++l) {
        std::complex<double> p = 1.0;
        for (int k = 0; k < n; ++k) {
            p *= roots(l);
            vandermonde(k, l) = p;
        }
    }
    auto [amps, vrank] = detail::truncated_lstsq(vandermonde, y);
    (void)vrank;

    est.sources.reserve(found);
    for (int l = 0; l < found; ++l) {
        DoaSource src;
        src.tau_hat = detail::root_to_tau(roots(l));
        src.amplitude_hat = amps(l);
        src.off_unit_circle = std::abs(std::abs(roots(l)) - 1.0) > 0.2;
        est.sources.push_back(src);
    }
    std::sort(est.sources.begin(), est.sources.end(),
              [](const DoaSource& a, const DoaSource& b) { return a.tau_hat < b.tau_hat; });
    // Coincident roots would violate the distinct-tau invariant; merge them.
    for (std::size_t i = 1; i < est.sources.size();) {
        if (est.sources[i].tau_hat == est.sources[i - 1].tau_hat) {
            est.sources[i - 1].amplitude_hat += est.sources[i].amplitude_hat;
            est.sources.erase(est.sources.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return est;
}

/// Drop estimated sources whose amplitude falls below rel_tol times the
/// largest; spurious roots from an overestimated model order land there.
inline DoaEstimate filter_by_amplitude(const DoaEstimate& est, double rel_tol = 1e-3) {
    double peak = 0.0;
    for (const auto& s : est.sources) peak = std::max(peak, std::abs(s.amplitude_hat));
    DoaEstimate out;
    out.method = est.method;
    out.warnings = est.warnings;
    for (const auto& s : est.sources) {
        if (std::abs(s.amplitude_hat) >= rel_tol * peak) out.sources.push_back(s);
    }
    return out;
}

struct DetectionMatch {
    int true_index = 0;      ///< position in the truth scene's source list
    int estimate_index = 0;  ///< position in the estimate's source list
    double sin_error = 0.0;
};

struct DetectionReport {
    std::vector<DetectionMatch> matches;
    std::vector<int> missed;           ///< truth indices left unmatched
    std::vector<int> false_positives;  ///< estimate indices left unmatched
    bool all_detected = false;
};

/// Greedy matching on ascending sin-domain error |sin t - sin t_hat| =
/// |tau - tau_hat| / wavelength_ratio: repeatedly pair the closest unmatched
/// truth/estimate with error <= threshold.
inline DetectionReport match_detections(const SourceScene& truth, const DoaEstimate& est,
                                        double threshold = 0.005) {
    if (!(threshold > 0.0)) throw ValidationError("match_detections: threshold must be positive");
    const int nt = truth.size();
    const int ne = static_cast<int>(est.sources.size());

    struct Pair {
        double err;
        int t;
        int e;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(nt) * static_cast<std::size_t>(ne));
    for (int t = 0; t < nt; ++t) {
        for (int e = 0; e < ne; ++e) {
            const double err =
                std::abs(truth.sources[t].tau - est.sources[e].tau_hat) / truth.wavelength_ratio;
            if (err <= threshold) pairs.push_back({err, t, e});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        return std::tie(a.err, a.t, a.e) < std::tie(b.err, b.t, b.e);
    });

    DetectionReport report;
    std::vector<bool> t_used(nt, false), e_used(ne, false);
    for (const auto& p : pairs) {
        if (t_used[p.t] || e_used[p.e]) continue;
        t_used[p.t] = true;
        e_used[p.e] = true;
        report.matches.push_back({p.t, p.e, p.err});
    }
    for (int t = 0; t < nt; ++t) {
        if (!t_used[t]) report.missed.push_back(t);
    }
    for (int e = 0; e < ne; ++e) {
        if (!e_used[e]) report.false_positives.push_back(e);
    }
    report.all_detected = report.missed.empty();
    return report;
}

}  // namespace hankeldoa
