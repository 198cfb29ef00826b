#pragma once

#include <cstdint>
#include <string>

#include "driftlab/vec.hpp"

namespace driftlab {

enum class ProfileKind {
    constant,             // fixed offset alpha*d on every window step
    smoothstep_cubic,     // alpha*d*(3t^2 - 2t^3), C1 only
    smootherstep_quintic, // alpha*d*(6t^5 - 15t^4 + 10t^3), C2
    gaussian_noise,       // i.i.d. per-step noise, for ensembling experiments only
};

std::string to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(const std::string& name);

/// Shape, scale and direction of an injected per-step perturbation.
/// `alpha` is the peak per-step magnitude in meters/step; the direction is
/// unit-norm by construction.
struct PerturbationProfile {
    ProfileKind kind = ProfileKind::smootherstep_quintic;
    double alpha = 0.0;        // meters per step at the profile peak
    Vec3 direction{1, 0, 0};   // unit norm
    double noise_sigma = 0.0;  // gaussian_noise only

    /// Normalizes `direction` (rejecting zero vectors) and validates scales.
    static PerturbationProfile make(ProfileKind kind, double alpha, const Vec3& direction,
                                    double noise_sigma = 0.0);

    /// Convenience calibration from a target total window deviation D:
    /// alpha = D / (||d|| * T * integral of the profile over [0,1]), i.e.
    /// 2D/T for the two smooth ramps and D/T for the constant offset.
    static PerturbationProfile from_total_deviation(ProfileKind kind, double total_deviation_m,
                                                    const Vec3& direction, int t_window);
};

/// Active span of an attack: timesteps [t_start, t_start + T_window).
struct AttackWindow {
    std::int64_t t_start = 0;
    int t_window = 1;  // steps, >= 1
};

/// Quintic ramp 6t^5 - 15t^4 + 10t^3. Domain [0,1]; throws DomainError outside.
double smootherstep(double tau);
/// First derivative 30 t^2 (1-t)^2.
double smootherstep_d1(double tau);
/// Second derivative 60 t (2t-1)(t-1).
double smootherstep_d2(double tau);
/// smootherstep with the argument clamped into [0,1]; defined everywhere.
double clamped_smootherstep(double tau);

/// Cubic ramp 3t^2 - 2t^3 (the C1 comparison profile).
double smoothstep_cubic(double tau);
double clamped_smoothstep_cubic(double tau);

/// Perturbation vector injected at timestep t. Zero outside the window.
/// Inside, deterministic given (profile, window, t, rng_seed); the seed only
/// matters for gaussian_noise.
Vec3 perturbation_at(const PerturbationProfile& profile, const AttackWindow& window,
                     std::int64_t t, std::uint64_t rng_seed = 0);

/// Closed-form window drift alpha*||d||*T/2 for the quintic profile.
/// Throws Unsupported for other kinds (use accumulated_drift on their sums).
double expected_window_drift(const PerturbationProfile& profile, const AttackWindow& window);

}  // namespace driftlab
