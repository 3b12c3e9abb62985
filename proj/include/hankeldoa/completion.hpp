// Hankel-structured nuclear-norm completion via SVD-free factorized ADMM.
//
// The interpolant g solves
//   argmin ||H(g)||_*  s.t.  P(g) = P(y)  on the active index set,
// with the nuclear norm replaced by the Burer-Monteiro surrogate
// (||U||_F^2 + ||V||_F^2) under H(g) = U V^H, and the split handled by the
// augmented Lagrangian
//   L(U, V, g, Lambda) = ||U||_F^2 + ||V||_F^2 + rho ||H(g) - U V^H + Lambda||_F^2
// with the data constraint enforced exactly in the g-update. The cyclic
// block updates are
//   U      <- rho (H(g) + Lambda) V (I + rho V^H V)^-1
//   V      <- rho (H(g) + Lambda)^H U (I + rho U^H U)^-1
//   g      <- de-Hankelization of (U V^H - Lambda) off the mask,
//             observed values on the mask
//   Lambda <- Lambda + H(g) - U V^H
#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/hankel.hpp"
#include "hankeldoa/leverage.hpp"

namespace hankeldoa {

struct AdmmConfig {
    // The penalty trades consensus speed against the pull toward minimal norm:
    // past ~1e2 the factor updates degenerate into pure projections and the
    // iteration needs O(rho) cycles to shed excess nuclear norm. rho = 1 is
    // robust across the instance sizes this library targets.
    double rho = 1.0;
    int factor_rank = 0;       ///< factor width R; 0 picks min(2 r_est + 2, rank budget)
    int max_iters = 2000;
    double primal_tol = 1e-7;  ///< relative ||H(g) - U V^H||_F stopping threshold
    double stall_tol = 1e-12;  ///< relative change of g that counts as stalled
    std::uint64_t seed = 0;    ///< seeds the init padding beyond the data's numerical rank

    void validate() const {
        if (!(rho > 0.0)) throw ValidationError("AdmmConfig: rho must be positive");
        if (factor_rank < 0) throw ValidationError("AdmmConfig: factor_rank must be >= 0");
        if (max_iters < 1) throw ValidationError("AdmmConfig: max_iters must be >= 1");
        if (!(primal_tol > 0.0) || !(stall_tol > 0.0)) {
            throw ValidationError("AdmmConfig: tolerances must be positive");
        }
    }
};

struct AdmmState {
    Eigen::MatrixXcd U;       ///< d x R
    Eigen::MatrixXcd V;       ///< cols x R
    Eigen::VectorXcd g;       ///< length n; observed entries pinned to the data
    Eigen::MatrixXcd Lambda;  ///< multiplier, same size as H(g)
    int iter = 0;
    std::vector<double> primal_residual_history;
};

struct CompletionResult {
    Eigen::VectorXcd y_hat;
    bool converged = false;
    int iters_used = 0;
    double final_residual = 0.0;  ///< ||H(y_hat) - U V^H||_F / ||H(y_hat)||_F at exit
    std::optional<double> nmse_vs_truth;
};

/// Sum of singular values.
inline double nuclear_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues().sum();
}

/// Normalized squared error over the entries the mask did not observe.
inline double nmse(const Eigen::VectorXcd& estimate, const Eigen::VectorXcd& truth,
                   const SamplingMask& mask) {
    if (estimate.size() != truth.size()) {
        throw DimensionError("nmse: estimate and truth lengths differ");
    }
    if (truth.size() != mask.n) {
        throw DimensionError("nmse: mask length does not match vectors");
    }
    double err = 0.0;
    double ref = 0.0;
    int missing = 0;
    for (int k = 1; k <= mask.n; ++k) {
        if (mask.contains(k)) continue;
        ++missing;
        err += std::norm(estimate(k - 1) - truth(k - 1));
        ref += std::norm(truth(k - 1));
    }
    if (missing == 0) {
        throw DegenerateInputError("nmse: mask covers every index, metric undefined");
    }
    if (ref == 0.0) {
        throw DegenerateInputError("nmse: truth is zero off the mask, metric undefined");
    }
    return err / ref;
}

/// Called once per full ADMM cycle when passed to complete().
using AdmmObserver = std::function<void(const AdmmState&)>;

/// Interpolate the full array vector from a masked snapshot.
///
/// Returns y_hat = g with observed entries bit-identical to the input.
/// converged reports whether the primal tolerance was met; a stall or the
/// iteration cap exits with converged = false and the diagnostics filled in.
/// A full mask short-circuits: the data already determines every entry.
inline CompletionResult complete(const Snapshot& observed, const HankelShape& shape,
                                 const AdmmConfig& cfg = {}, const AdmmObserver& observer = {}) {
    cfg.validate();
    if (!observed.masked()) {
        throw ValidationError("complete: snapshot carries no mask; nothing to interpolate");
    }
    const SamplingMask& mask = *observed.mask;
    if (mask.n != shape.n || observed.n != shape.n) {
        throw DimensionError("complete: snapshot/mask length does not match shape");
    }
    if (mask.count() < 2) {
        throw ValidationError("complete: need at least 2 observed entries");
    }
    if (mask.full()) {
        CompletionResult out;
        out.y_hat = observed.values;
        out.converged = true;
        out.iters_used = 0;
        out.final_residual = 0.0;
        return out;
    }

    const int d = shape.d;
    const int cols = shape.cols();

    int factor_rank = cfg.factor_rank;
    if (factor_rank == 0) {
        const int r_est = std::max(
            1, rank_estimate(observed.values, shape, kApproximateRankTolerance));
        factor_rank = std::min(2 * r_est + 2, shape.rank_budget());
    }
    factor_rank = std::min(factor_rank, shape.rank_budget());

    AdmmState st;
    st.g = observed.values;  // zero-filled off the mask

    // Spectral initialization from the zero-filled Hankel matrix; columns past
    // its numerical rank get a small seeded perturbation so they can activate.
    {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(hankelize(st.g, shape),
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd& sv = svd.singularValues();
        st.U = Eigen::MatrixXcd::Zero(d, factor_rank);
        st.V = Eigen::MatrixXcd::Zero(cols, factor_rank);
        const double sigma1 = sv.size() > 0 ? sv(0) : 0.0;
        const int live = std::min<int>(factor_rank, detail::numerical_rank(sv, 1e-12));
        for (int c = 0; c < live; ++c) {
            const double scale = std::sqrt(sv(c));
            st.U.col(c) = svd.matrixU().col(c) * scale;
            st.V.col(c) = svd.matrixV().col(c) * scale;
        }
        if (live < factor_rank) {
            std::mt19937_64 rng(cfg.seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            const double pad = 1e-3 * (sigma1 > 0.0 ? std::sqrt(sigma1) : 1.0);
            for (int c = live; c < factor_rank; ++c) {
                for (int i = 0; i < d; ++i) st.U(i, c) = pad * std::complex<double>(gauss(rng), gauss(rng));
                for (int j = 0; j < cols; ++j) st.V(j, c) = pad * std::complex<double>(gauss(rng), gauss(rng));
            }
        }
    }
    st.Lambda = Eigen::MatrixXcd::Zero(d, cols);

    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(factor_rank, factor_rank);
    Eigen::MatrixXcd hg = hankelize(st.g, shape);

    CompletionResult out;
    double residual = 0.0;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const Eigen::MatrixXcd target = hg + st.Lambda;

        // U = rho * target * V * (I + rho V^H V)^-1, solved as a Hermitian system.
        {
            const Eigen::MatrixXcd gram = eye + cfg.rho * (st.V.adjoint() * st.V);
            const Eigen::MatrixXcd rhs = cfg.rho * (target * st.V);
            st.U = gram.llt().solve(rhs.adjoint()).adjoint();
        }
        {
            const Eigen::MatrixXcd gram = eye + cfg.rho * (st.U.adjoint() * st.U);
            const Eigen::MatrixXcd rhs = cfg.rho * (target.adjoint() * st.U);
            st.V = gram.llt().solve(rhs.adjoint()).adjoint();
        }

        const Eigen::MatrixXcd product = st.U * st.V.adjoint();

        // g-update: de-Hankelize (U V^H - Lambda) off the mask, pin the data on it.
        const Eigen::VectorXcd g_prev = st.g;
        st.g = dehankelize(Eigen::MatrixXcd(product - st.Lambda), shape);
        for (int k : mask.omega) {
            st.g(k - 1) = observed.values(k - 1);
        }

        hg = hankelize(st.g, shape);
        st.Lambda += hg - product;

        const double hg_norm = hg.norm();
        residual = (hg - product).norm() / (hg_norm > 0.0 ? hg_norm : 1.0);
        st.iter = iter;
        st.primal_residual_history.push_back(residual);
        if (observer) observer(st);

        if (residual <= cfg.primal_tol) break;
        const double prev_norm = g_prev.norm();
        const double change = (st.g - g_prev).norm() / (prev_norm > 0.0 ? prev_norm : 1.0);
        if (change <= cfg.stall_tol) break;
    }

    out.y_hat = st.g;
    out.converged = residual <= cfg.primal_tol;
    out.iters_used = st.iter;
    out.final_residual = residual;
    return out;
}

}  // namespace hankeldoa
