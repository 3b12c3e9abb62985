// Independent oracles for the test suite. Everything here recomputes results
// the slow, obvious way (explicit basis matrices, subgradient steps on the
// convex program, numerical gradients) so library fast paths are checked
// against definitions rather than against themselves.
#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/hankel.hpp"

namespace testsupport {

struct BruteForceScores {
    Eigen::VectorXd mu;
    int rank_used = 0;
};

/// Leverage scores by materializing every basis matrix A_k = H(e_k)/sqrt(c_k)
/// and evaluating the definition directly on the truncated SVD factors.
BruteForceScores brute_force_leverage(const Eigen::VectorXcd& y,
                                      const hankeldoa::HankelShape& shape, double rank_tolerance,
                                      int rank_cap = 0);

/// Projected subgradient on the convex program min ||H(g)||_* s.t. g = y on
/// the mask. Normalized steps, constant within a stage and geometrically
/// decaying across stages; the best-objective iterate is returned.
Eigen::VectorXcd subgradient_complete(const hankeldoa::Snapshot& observed,
                                      const hankeldoa::HankelShape& shape, int iters = 60000);

/// min over factorizations M = (A W)(B W^{-H})^H of (||AW||^2 + ||BW^-H||^2)/2
/// by numerical-gradient descent with random restarts. Equals the nuclear norm
/// for full-rank square M by the variational characterization.
double variational_nuclear_norm(const Eigen::MatrixXcd& m, std::uint64_t seed, int restarts = 4);

/// Random scene with r sources: taus in [-0.48, 0.48] at pairwise separation
/// >= min_sep, amplitude magnitudes in [0.5, 2.5), uniform phases.
hankeldoa::SourceScene random_scene(int r, double min_sep, std::uint64_t seed);

}  // namespace testsupport
