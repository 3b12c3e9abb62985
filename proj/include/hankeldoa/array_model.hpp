// Source scenes and ULA snapshot synthesis for the measurement model
//   y_k = sum_l b_l exp(-j 2 pi tau_l k),  k = 1..n,
// together with the masking / projection operator P_Omega.
#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hankeldoa/errors.hpp"

namespace hankeldoa {

/// One far-field source: normalized spatial frequency tau = (d/lambda) sin(phi)
/// and a complex amplitude encoding power and phase.
struct SceneSource {
    double tau = 0.0;
    std::complex<double> amplitude{1.0, 0.0};
};

/// Ground-truth scene. Phase shifts are referenced to a virtual element at
/// index 0, i.e. element k contributes exp(-j 2 pi tau k) directly.
struct SourceScene {
    std::vector<SceneSource> sources;
    double wavelength_ratio = 0.5;  ///< element spacing over wavelength, d/lambda

    int size() const { return static_cast<int>(sources.size()); }

    void validate() const {
        if (sources.empty()) {
            throw ValidationError("invalid scene: needs at least one source");
        }
        if (!(wavelength_ratio > 0.0)) {
            throw ValidationError("invalid scene: wavelength_ratio must be positive");
        }
        for (std::size_t i = 0; i < sources.size(); ++i) {
            const auto& s = sources[i];
            if (!(s.tau >= -0.5 && s.tau < 0.5)) {
                throw ValidationError("invalid scene: tau out of [-1/2, 1/2) at source " +
                                      std::to_string(i));
            }
            if (!(std::abs(s.amplitude) > 0.0)) {
                throw ValidationError("invalid scene: zero amplitude at source " + std::to_string(i));
            }
            for (std::size_t j = i + 1; j < sources.size(); ++j) {
                if (s.tau == sources[j].tau) {
                    throw ValidationError("invalid scene: duplicate tau at sources " +
                                          std::to_string(i) + " and " + std::to_string(j));
                }
            }
        }
    }
};

/// Index subset Omega of {1..n}, optionally with the per-index inclusion
/// probabilities it was drawn from. Indices are 1-based throughout the API.
struct SamplingMask {
    int n = 0;
    std::vector<int> omega;                          ///< sorted, unique, 1-based
    std::optional<Eigen::VectorXd> probabilities;    ///< length n when present

    void validate() const {
        if (n < 1) throw ValidationError("SamplingMask: n must be positive");
        if (omega.empty() || static_cast<int>(omega.size()) > n) {
            throw ValidationError("SamplingMask: need 1 <= |omega| <= n");
        }
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (omega[i] < 1 || omega[i] > n) {
                throw ValidationError("SamplingMask: index " + std::to_string(omega[i]) +
                                      " out of 1.." + std::to_string(n));
            }
            if (i > 0 && omega[i] <= omega[i - 1]) {
                throw ValidationError("SamplingMask: indices must be strictly increasing");
            }
        }
        if (probabilities) {
            if (probabilities->size() != n) {
                throw DimensionError("SamplingMask: probabilities length != n");
            }
            for (int k = 0; k < n; ++k) {
                const double p = (*probabilities)(k);
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw ValidationError("SamplingMask: probability out of [0,1] at index " +
                                          std::to_string(k + 1));
                }
            }
        }
    }

    /// Membership test for a 1-based index.
    bool contains(int k) const { return std::binary_search(omega.begin(), omega.end(), k); }

    bool full() const { return static_cast<int>(omega.size()) == n; }

    int count() const { return static_cast<int>(omega.size()); }
};

/// One simultaneous read of the array. Entries outside the mask (when
/// present) are exactly zero, matching the projection convention.
struct Snapshot {
    int n = 0;
    Eigen::VectorXcd values;
    std::optional<SamplingMask> mask;

    bool masked() const { return mask.has_value(); }
};

/// Draw a uniform-random index subset of size m from {1..n} (sorted).
inline SamplingMask uniform_random_mask(int n, int m, std::uint64_t seed) {
    if (m < 1 || m > n) {
        throw ValidationError("uniform_random_mask: need 1 <= m <= n");
    }
    std::vector<int> pool(n);
    for (int k = 0; k < n; ++k) pool[k] = k + 1;
    std::mt19937_64 rng(seed);
    // Partial Fisher-Yates; only the first m slots are needed.
    for (int i = 0; i < m; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    SamplingMask mask;
    mask.n = n;
    mask.omega.assign(pool.begin(), pool.begin() + m);
    std::sort(mask.omega.begin(), mask.omega.end());
    return mask;
}

/// Synthesize a full (unmasked) snapshot of an n-element ULA. Noise, when
/// requested, is circular complex Gaussian with E|z|^2 = noise_std^2, drawn
/// independently per element; deterministic given the seed.
inline Snapshot synthesize_snapshot(const SourceScene& scene, int n, std::uint64_t seed = 0,
                                    double noise_std = 0.0) {
    scene.validate();
    if (n < 3) throw ValidationError("synthesize_snapshot: n must be >= 3");
    if (!(noise_std >= 0.0)) throw ValidationError("synthesize_snapshot: noise_std must be >= 0");

    Snapshot snap;
    snap.n = n;
    snap.values = Eigen::VectorXcd::Zero(n);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const auto& src : scene.sources) {
        for (int k = 1; k <= n; ++k) {
            const double phase = -two_pi * src.tau * static_cast<double>(k);
            snap.values(k - 1) += src.amplitude * std::complex<double>(std::cos(phase), std::sin(phase));
        }
    }
    if (noise_std > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, noise_std / std::numbers::sqrt2);
        for (int k = 0; k < n; ++k) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            snap.values(k) += std::complex<double>(re, im);
        }
    }
    return snap;
}

/// Apply P_Omega: keep entries in Omega, zero the rest, attach the mask.
/// Re-projecting an already masked snapshot composes the projections.
inline Snapshot project(const Snapshot& snapshot, const SamplingMask& mask) {
    mask.validate();
    if (mask.n != snapshot.n || snapshot.values.size() != snapshot.n) {
        throw DimensionError("project: mask.n=" + std::to_string(mask.n) + " vs snapshot.n=" +
                             std::to_string(snapshot.n));
    }
    Snapshot out;
    out.n = snapshot.n;
    out.values = Eigen::VectorXcd::Zero(snapshot.n);
    for (int k : mask.omega) {
        out.values(k - 1) = snapshot.values(k - 1);
    }
    out.mask = mask;
    return out;
}

/// Source angle in degrees for a normalized frequency: arcsin(tau / ratio).
inline double tau_to_angle_degrees(double tau, double wavelength_ratio = 0.5) {
    if (!(wavelength_ratio > 0.0)) {
        throw ValidationError("tau_to_angle_degrees: wavelength_ratio must be positive");
    }
    if (std::abs(tau) > wavelength_ratio) {
        throw ValidationError("tau_to_angle_degrees: |tau| > wavelength_ratio (non-physical direction)");
    }
    return std::asin(tau / wavelength_ratio) * 180.0 / std::numbers::pi;
}

/// Inverse view of the above, handy when scenes are given in degrees.
inline double angle_degrees_to_tau(double degrees, double wavelength_ratio = 0.5) {
    return wavelength_ratio * std::sin(degrees * std::numbers::pi / 180.0);
}

}  // namespace hankeldoa
