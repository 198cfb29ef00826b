#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/kinematics.hpp"

namespace driftlab {

struct Scene;  // simenv

/// Bounds a trajectory validator enforces, in SI units (per-second derivatives
/// of the positional path). c2_tol is dimensionless: boundary continuity is
/// checked on a peak-normalized speed profile.
struct KinematicLimits {
    double v_max = 0.0;   // m/s
    double a_max = 0.0;   // m/s^2
    double j_max = 0.0;   // m/s^3
    double dt = 0.05;     // s/step
    double c2_tol = 0.05;
};

enum class FdScheme { central, forward };

std::string to_string(FdScheme scheme);

/// Norms of the finite-difference velocity / acceleration / jerk of a
/// positional trajectory. With the central scheme all three series have one
/// entry per state (one-sided stencils at the edges); with the forward scheme
/// they have len-1, len-2 and len-3 entries.
struct MotionProfiles {
    std::vector<double> speed;  // m/s
    std::vector<double> accel;  // m/s^2
    std::vector<double> jerk;   // m/s^3
    FdScheme scheme = FdScheme::central;
    double dt = 0.05;
};

enum class Quantity { velocity, acceleration, jerk, c2 };

std::string to_string(Quantity q);

struct Violation {
    Quantity quantity = Quantity::velocity;
    std::size_t timestep = 0;
    double magnitude = 0.0;  // measured value
    double limit = 0.0;
};

struct DetectionVerdict {
    bool velocity_ok = true;
    bool acceleration_ok = true;
    bool jerk_ok = true;
    bool c2_ok = true;
    std::optional<Violation> worst_violation;  // largest value/limit ratio
    FdScheme scheme = FdScheme::central;
    std::string note;

    bool all_ok() const { return velocity_ok && acceleration_ok && jerk_ok && c2_ok; }
};

/// Requires at least 4 states; throws InsufficientData otherwise.
MotionProfiles finite_diff_profiles(const StateTrajectory& traj,
                                    FdScheme scheme = FdScheme::central);

/// Checks the trajectory against the limits. The C2 flag is evaluated on the
/// peak-normalized speed profile at `attack_bounds` when given, else around
/// the maximal-jerk step.
DetectionVerdict validate_kinematics(const StateTrajectory& traj, const KinematicLimits& limits,
                                     std::optional<std::pair<std::size_t, std::size_t>>
                                         attack_bounds = std::nullopt);

/// True iff the central first and second finite differences of `series` are
/// within `tol` at both `onset` and `offset`. The stencil needs two samples
/// on each side of a boundary; throws InsufficientData when it does not fit.
bool c2_boundary_check(std::span<const double> series, std::size_t onset, std::size_t offset,
                       double tol);

/// Per-quantity `percentile` maxima over clean trajectories, scaled by
/// `safety`. Standard calibration for deployment monitors.
KinematicLimits calibrate_limits(std::span<const StateTrajectory> clean_trajectories,
                                 double percentile = 0.999, double safety = 1.5);

// ---------------------------------------------------------------------------
// Temporal ensembling

/// Normalized ensemble weights indexed by prediction age (0 = the newest
/// chunk's prediction for the queried step).
struct EnsembleWeights {
    std::vector<double> weights;  // non-negative, sums to 1

    static EnsembleWeights uniform(int k);
    static EnsembleWeights exponential(int k, double lambda);
    double sum_sq() const;
};

enum class MissingPredictionPolicy { renormalize, strict };

/// Weighted average of the overlapping chunk predictions for timestep t.
/// Chunks that do not cover t either drop out with weight renormalization
/// (default) or raise MissingPrediction under the strict policy.
DeltaAction temporal_ensemble(std::span<const Chunk> chunks, const EnsembleWeights& weights,
                              std::int64_t t,
                              MissingPredictionPolicy policy = MissingPredictionPolicy::renormalize);

struct TeAttenuationResult {
    double smooth_retention_ratio = 0.0;  // ensembled / raw quintic drift at the window midpoint
    double noise_variance_ratio = 0.0;    // empirical Var(ensembled noise) / sigma^2
};

/// Measures the ensemble's asymmetry: a slowly varying quintic drift passes
/// through while i.i.d. noise is attenuated by sum(w_i^2) (1/K for uniform
/// weights). Noise variance is estimated over n_trials seeded draws.
TeAttenuationResult te_attenuation_experiment(int k, const EnsembleWeights& weights, int t_window,
                                              double sigma, int n_trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Adaptive horizon defense

/// Chunk-truncation policy: inside the critical interaction zone the executed
/// chunk length shrinks to truncated_k, restoring per-step replanning.
struct DefensePolicy {
    double critical_radius = 0.15;  // m
    int truncated_k = 1;            // >= 1, <= planner chunk size
};

/// Effective chunk length for the next plan: truncated_k when the
/// end-effector is within critical_radius of the target, else base_k.
int adaptive_horizon(const EEState& state, const Scene& scene, const DefensePolicy& policy,
                     int base_k);

}  // namespace driftlab
