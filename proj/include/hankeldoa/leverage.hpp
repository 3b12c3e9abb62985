// Hankel leverage scores, element selection for the second snapshot, and the
// sufficient-sampling diagnostics.
//
// The score of array element k is
//   mu_k = (n/r) * max{ ||U^H A_k||_F^2, ||A_k V||_F^2 },
// where U S V^H is the rank-r truncated SVD of the Hankelized snapshot and
// A_k = H(e_k) / sqrt(c_k) is the unit-norm Hankel basis matrix for element k.
// Since A_k has a single populated anti-diagonal, both Frobenius norms reduce
// to row-energy sums of U and V along that anti-diagonal.
#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/hankel.hpp"

namespace hankeldoa {

/// Relative singular-value threshold for full, unmasked data.
inline constexpr double kExactRankTolerance = 1e-8;
/// Looser threshold for zero-filled (masked) data, where the projection
/// inflates the numerical rank.
inline constexpr double kApproximateRankTolerance = 1e-2;

enum class ScoreSource { exact, approximate_from_partial };

struct LeverageScores {
    int n = 0;
    Eigen::VectorXd mu;   ///< nonnegative, mu[k] <= n / rank_used
    int rank_used = 0;
    ScoreSource source = ScoreSource::exact;
};

namespace detail {

/// Count singular values above rel_tol * sigma_1.
inline int numerical_rank(const Eigen::VectorXd& singular_values, double rel_tol) {
    if (singular_values.size() == 0) return 0;
    const double cutoff = rel_tol * singular_values(0);
    int r = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
        if (singular_values(i) > cutoff) ++r;
    }
    return r;
}

}  // namespace detail

/// Numerical rank of the Hankelization of y at a relative threshold.
inline int rank_estimate(const Eigen::VectorXcd& y, const HankelShape& shape, double rel_tol) {
    if (y.size() != shape.n) {
        throw DimensionError("rank_estimate: vector length does not match shape");
    }
    if (y.isZero(0.0)) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hankelize(y, shape));
    return detail::numerical_rank(svd.singularValues(), rel_tol);
}

/// Leverage scores of a snapshot. Masked snapshots are Hankelized as-is
/// (zero-filled), which yields the approximate scores used to pick the
/// second-snapshot elements. rank_tolerance <= 0 selects the default for the
/// snapshot kind; rank_cap > 0 additionally truncates the rank used.
inline LeverageScores leverage_scores(const Snapshot& y, const HankelShape& shape,
                                      double rank_tolerance = 0.0, int rank_cap = 0) {
    if (y.values.size() != y.n || y.n != shape.n) {
        throw DimensionError("leverage_scores: snapshot length does not match shape");
    }
    if (y.values.isZero(0.0)) {
        throw DegenerateInputError("leverage_scores: all-zero input");
    }
    const bool partial = y.masked() && !y.mask->full();
    if (rank_tolerance <= 0.0) {
        rank_tolerance = partial ? kApproximateRankTolerance : kExactRankTolerance;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hankelize(y.values, shape),
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    int r = detail::numerical_rank(svd.singularValues(), rank_tolerance);
    r = std::max(r, 1);
    if (rank_cap > 0) r = std::min(r, rank_cap);

    const Eigen::MatrixXcd u = svd.matrixU().leftCols(r);
    const Eigen::MatrixXcd v = svd.matrixV().leftCols(r);
    const Eigen::VectorXd row_energy_u = u.rowwise().squaredNorm();
    const Eigen::VectorXd row_energy_v = v.rowwise().squaredNorm();
    const Eigen::VectorXi counts = anti_diagonal_counts(shape);

    LeverageScores scores;
    scores.n = shape.n;
    scores.rank_used = r;
    scores.source = partial ? ScoreSource::approximate_from_partial : ScoreSource::exact;
    scores.mu.resize(shape.n);
    const double scale = static_cast<double>(shape.n) / static_cast<double>(r);
    for (int k = 1; k <= shape.n; ++k) {
        // Anti-diagonal k holds positions (i, k - i) in 1-based terms.
        const int i_lo = std::max(1, k - shape.cols() + 1);
        const int i_hi = std::min(shape.d, k);
        double sum_u = 0.0;
        double sum_v = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
            sum_u += row_energy_u(i - 1);
            sum_v += row_energy_v(k - i);
        }
        const double c = static_cast<double>(counts(k - 1));
        scores.mu(k - 1) = scale * std::max(sum_u, sum_v) / c;
    }
    return scores;
}

enum class SelectionMode { top_m, probabilistic };

/// Element selection for the second snapshot. The mask carries the chosen
/// indices; forced lists the endpoints that were always included.
struct SamplingPlan {
    SamplingMask mask;
    SelectionMode mode = SelectionMode::top_m;
    std::vector<int> forced;
};

/// Choose second-snapshot elements from leverage scores.
///
/// top_m: the m highest-scoring indices (ties broken by lower index), with
/// elements {1, n} forced in by replacing the lowest-scored picks. The Hankel
/// corners appear in a single matrix entry each, so nothing else constrains
/// them and exact endpoint interpolation needs them observed.
///
/// probabilistic: index k joins independently with probability
/// min(1, m * mu_k / sum(mu)); endpoints are forced in afterwards.
inline SamplingPlan select_elements(const LeverageScores& scores, int m, SelectionMode mode,
                                    std::uint64_t seed = 0) {
    const int n = scores.n;
    if (m > n) {
        throw ValidationError("select_elements: m exceeds n");
    }
    const int m_min = std::max(4, 2 * scores.rank_used);
    if (m < m_min) {
        throw ValidationError("select_elements: infeasible plan, m=" + std::to_string(m) +
                              " below minimum " + std::to_string(m_min));
    }

    SamplingPlan plan;
    plan.mode = mode;
    plan.forced = {1, n};
    plan.mask.n = n;

    if (mode == SelectionMode::top_m) {
        std::vector<int> order(n);
        for (int k = 0; k < n; ++k) order[k] = k + 1;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (scores.mu(a - 1) != scores.mu(b - 1)) return scores.mu(a - 1) > scores.mu(b - 1);
            return a < b;
        });
        std::vector<int> picked(order.begin(), order.begin() + m);
        for (int forced_index : plan.forced) {
            if (std::find(picked.begin(), picked.end(), forced_index) != picked.end()) continue;
            // Drop the lowest-ranked pick that is not itself an endpoint.
            for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
                if (*it != 1 && *it != n) {
                    *it = forced_index;
                    break;
                }
            }
        }
        std::sort(picked.begin(), picked.end());
        plan.mask.omega = std::move(picked);
    } else {
        const double total = scores.mu.sum();
        if (!(total > 0.0)) {
            throw DegenerateInputError("select_elements: scores sum to zero");
        }
        Eigen::VectorXd prob(n);
        for (int k = 0; k < n; ++k) {
            prob(k) = std::min(1.0, static_cast<double>(m) * scores.mu(k) / total);
        }
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<int> picked;
        for (int k = 1; k <= n; ++k) {
            if (unit(rng) < prob(k - 1)) picked.push_back(k);
        }
        for (int forced_index : plan.forced) {
            if (!std::binary_search(picked.begin(), picked.end(), forced_index)) {
                picked.insert(std::lower_bound(picked.begin(), picked.end(), forced_index),
                              forced_index);
            }
            prob(forced_index - 1) = 1.0;
        }
        plan.mask.omega = std::move(picked);
        plan.mask.probabilities = prob;
    }
    plan.mask.validate();
    return plan;
}

/// Right-hand side of the sufficient-sampling bound,
///   p_k = min{1, max(c mu_k r^2 ln^3(n), 1) / n},
/// with natural logarithm. Diagnostic only; sum(p) is the expected sample
/// count it certifies.
inline Eigen::VectorXd theorem1_probabilities(const LeverageScores& scores, double c = 1.0) {
    if (!(c > 0.0)) throw ValidationError("theorem1_probabilities: c must be positive");
    const double n = static_cast<double>(scores.n);
    const double r = static_cast<double>(scores.rank_used);
    const double log_cubed = std::pow(std::log(n), 3);
    Eigen::VectorXd p(scores.n);
    for (int k = 0; k < scores.n; ++k) {
        p(k) = std::min(1.0, std::max(c * scores.mu(k) * r * r * log_cubed, 1.0) / n);
    }
    return p;
}

/// Projection energies of the Hankel corners onto the signal subspaces,
/// and whether they clear the 1/(8 ln n) floor.
struct EdgeCondition {
    double first_element_energy = 0.0;  ///< ||U U^H e_1||_F^2
    double last_element_energy = 0.0;   ///< ||e_last V V^H||_F^2
    bool holds = false;
};

inline EdgeCondition theorem1_edge_condition(const Snapshot& y, const HankelShape& shape,
                                             double rank_tolerance = kExactRankTolerance) {
    if (y.masked() && !y.mask->full()) {
        throw ValidationError("theorem1_edge_condition: needs a full snapshot");
    }
    if (y.values.size() != y.n || y.n != shape.n) {
        throw DimensionError("theorem1_edge_condition: snapshot length does not match shape");
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hankelize(y.values, shape),
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    const int r = std::max(1, detail::numerical_rank(svd.singularValues(), rank_tolerance));
    EdgeCondition edge;
    edge.first_element_energy = svd.matrixU().leftCols(r).row(0).squaredNorm();
    edge.last_element_energy = svd.matrixV().leftCols(r).row(shape.cols() - 1).squaredNorm();
    const double floor = 1.0 / (8.0 * std::log(static_cast<double>(shape.n)));
    edge.holds = floor <= std::min(edge.first_element_energy, edge.last_element_energy);
    return edge;
}

}  // namespace hankeldoa
