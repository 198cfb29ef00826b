#include "driftlab/guard.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "driftlab/errors.hpp"
#include "driftlab/seeds.hpp"
#include "driftlab/simenv.hpp"

namespace driftlab {

std::string to_string(FdScheme scheme) {
    return scheme == FdScheme::central ? "central" : "forward";
}

std::string to_string(Quantity q) {
    switch (q) {
        case Quantity::velocity: return "velocity";
        case Quantity::acceleration: return "acceleration";
        case Quantity::jerk: return "jerk";
        case Quantity::c2: return "c2";
    }
    return "?";
}

namespace {

std::vector<Vec3> positions(const StateTrajectory& traj) {
    std::vector<Vec3> p;
    p.reserve(traj.states.size());
    for (const auto& s : traj.states) p.push_back(s.position);
    return p;
}

// First derivative: central interior, one-sided edges. Same length as input.
std::vector<Vec3> d_central(const std::vector<Vec3>& x, double h) {
    const std::size_t n = x.size();
    std::vector<Vec3> d(n);
    d[0] = (x[1] - x[0]) / h;
    d[n - 1] = (x[n - 1] - x[n - 2]) / h;
    for (std::size_t t = 1; t + 1 < n; ++t) d[t] = (x[t + 1] - x[t - 1]) / (2.0 * h);
    return d;
}

std::vector<Vec3> d_forward(const std::vector<Vec3>& x, double h) {
    std::vector<Vec3> d(x.size() - 1);
    for (std::size_t t = 0; t + 1 < x.size(); ++t) d[t] = (x[t + 1] - x[t]) / h;
    return d;
}

std::vector<double> norms(const std::vector<Vec3>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].norm();
    return out;
}

}  // namespace

MotionProfiles finite_diff_profiles(const StateTrajectory& traj, FdScheme scheme) {
    if (traj.states.size() < 4)
        throw InsufficientData("finite_diff_profiles: need at least 4 states");
    if (!(traj.dt > 0.0)) throw InsufficientData("finite_diff_profiles: dt must be positive");

    const std::vector<Vec3> pos = positions(traj);
    MotionProfiles out;
    out.scheme = scheme;
    out.dt = traj.dt;
    if (scheme == FdScheme::central) {
        const auto v = d_central(pos, traj.dt);
        const auto a = d_central(v, traj.dt);
        const auto j = d_central(a, traj.dt);
        out.speed = norms(v);
        out.accel = norms(a);
        out.jerk = norms(j);
    } else {
        const auto v = d_forward(pos, traj.dt);
        const auto a = d_forward(v, traj.dt);
        const auto j = d_forward(a, traj.dt);
        out.speed = norms(v);
        out.accel = norms(a);
        out.jerk = norms(j);
    }
    return out;
}

namespace {

struct SeriesMax {
    double value = 0.0;
    std::size_t index = 0;
};

SeriesMax series_max(const std::vector<double>& s) {
    SeriesMax m;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s[i] > m.value) m = {s[i], i};
    return m;
}

}  // namespace

bool c2_boundary_check(std::span<const double> series, std::size_t onset, std::size_t offset,
                       double tol) {
    if (offset < onset) throw DomainError("c2_boundary_check: offset before onset");
    if (onset < 2 || offset + 2 >= series.size())
        throw InsufficientData("c2_boundary_check: series must span [onset-2, offset+2]");

    const auto d1 = [&](std::size_t t) { return (series[t + 1] - series[t - 1]) / 2.0; };
    const auto d2 = [&](std::size_t t) { return series[t + 1] - 2.0 * series[t] + series[t - 1]; };

    for (std::size_t b : {onset, offset}) {
        if (std::abs(d1(b)) > tol) return false;
        if (std::abs(d2(b)) > tol) return false;
    }
    return true;
}

DetectionVerdict validate_kinematics(const StateTrajectory& traj, const KinematicLimits& limits,
                                     std::optional<std::pair<std::size_t, std::size_t>>
                                         attack_bounds) {
    const MotionProfiles prof = finite_diff_profiles(traj, FdScheme::central);

    DetectionVerdict verdict;
    verdict.scheme = prof.scheme;

    const SeriesMax v = series_max(prof.speed);
    const SeriesMax a = series_max(prof.accel);
    const SeriesMax j = series_max(prof.jerk);
    verdict.velocity_ok = v.value <= limits.v_max;
    verdict.acceleration_ok = a.value <= limits.a_max;
    verdict.jerk_ok = j.value <= limits.j_max;

    double worst_ratio = 0.0;
    auto consider = [&](Quantity q, const SeriesMax& m, double limit) {
        if (limit <= 0.0) return;
        const double ratio = m.value / limit;
        if (ratio > 1.0 && ratio > worst_ratio) {
            worst_ratio = ratio;
            verdict.worst_violation = Violation{q, m.index, m.value, limit};
        }
    };
    consider(Quantity::velocity, v, limits.v_max);
    consider(Quantity::acceleration, a, limits.a_max);
    consider(Quantity::jerk, j, limits.j_max);

    // Boundary continuity on the peak-normalized speed profile.
    const double peak = std::max(v.value, 1e-12);
    std::vector<double> normalized(prof.speed.size());
    for (std::size_t i = 0; i < prof.speed.size(); ++i) normalized[i] = prof.speed[i] / peak;
    const auto [onset, offset] =
        attack_bounds.value_or(std::pair<std::size_t, std::size_t>{j.index, j.index});
    try {
        verdict.c2_ok = c2_boundary_check(normalized, onset, offset, limits.c2_tol);
        if (!verdict.c2_ok && !verdict.worst_violation)
            verdict.worst_violation = Violation{Quantity::c2, onset, 0.0, limits.c2_tol};
    } catch (const InsufficientData&) {
        verdict.c2_ok = true;  // boundary at the series edge: nothing to evaluate
        verdict.note = "c2 boundary at series edge; skipped";
    }
    return verdict;
}

KinematicLimits calibrate_limits(std::span<const StateTrajectory> clean_trajectories,
                                 double percentile, double safety) {
    if (clean_trajectories.empty()) throw InsufficientData("calibrate_limits: no trajectories");
    if (!(percentile > 0.0 && percentile <= 1.0))
        throw DomainError("calibrate_limits: percentile must be in (0,1]");

    std::vector<double> speeds, accels, jerks;
    for (const auto& traj : clean_trajectories) {
        const MotionProfiles p = finite_diff_profiles(traj, FdScheme::central);
        speeds.insert(speeds.end(), p.speed.begin(), p.speed.end());
        accels.insert(accels.end(), p.accel.begin(), p.accel.end());
        jerks.insert(jerks.end(), p.jerk.begin(), p.jerk.end());
    }
    auto pct = [&](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const std::size_t rank = static_cast<std::size_t>(
            std::ceil(percentile * static_cast<double>(v.size())));
        return v[std::min(v.size() - 1, rank == 0 ? 0 : rank - 1)];
    };

    KinematicLimits limits;
    limits.dt = clean_trajectories.front().dt;
    limits.v_max = pct(speeds) * safety;
    limits.a_max = pct(accels) * safety;
    limits.j_max = pct(jerks) * safety;
    return limits;
}

// ---------------------------------------------------------------------------

EnsembleWeights EnsembleWeights::uniform(int k) {
    if (k < 1) throw ConfigError("ensemble: k must be >= 1");
    EnsembleWeights w;
    w.weights.assign(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k));
    return w;
}

EnsembleWeights EnsembleWeights::exponential(int k, double lambda) {
    if (k < 1) throw ConfigError("ensemble: k must be >= 1");
    if (!(lambda >= 0.0)) throw ConfigError("ensemble: lambda must be >= 0");
    EnsembleWeights w;
    w.weights.resize(static_cast<std::size_t>(k));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        w.weights[static_cast<std::size_t>(i)] = std::exp(-lambda * static_cast<double>(i));
        sum += w.weights[static_cast<std::size_t>(i)];
    }
    for (double& x : w.weights) x /= sum;
    return w;
}

double EnsembleWeights::sum_sq() const {
    double s = 0.0;
    for (double w : weights) s += w * w;
    return s;
}

DeltaAction temporal_ensemble(std::span<const Chunk> chunks, const EnsembleWeights& weights,
                              std::int64_t t, MissingPredictionPolicy policy) {
    Vec7 acc{};
    double weight_sum = 0.0;
    std::vector<bool> filled(weights.weights.size(), false);

    for (const Chunk& chunk : chunks) {
        const std::int64_t offset = t - static_cast<std::int64_t>(chunk.planned_at);
        if (offset < 0 || offset >= static_cast<std::int64_t>(chunk.size())) continue;
        const std::size_t age = static_cast<std::size_t>(offset);
        if (age >= weights.weights.size()) continue;
        filled[age] = true;
        const double w = weights.weights[age];
        const Vec7 u = chunk.actions[age].to_vec7();
        for (std::size_t i = 0; i < 7; ++i) acc[i] += w * u[i];
        weight_sum += w;
    }

    if (weight_sum <= 0.0) throw MissingPrediction("temporal_ensemble: no chunk covers timestep");
    if (policy == MissingPredictionPolicy::strict)
        for (bool f : filled)
            if (!f) throw MissingPrediction("temporal_ensemble: an age slot has no prediction");
    // Renormalize over the weights actually present (warm-up behavior).
    for (std::size_t i = 0; i < 7; ++i) acc[i] /= weight_sum;
    return DeltaAction::from_vec7(acc);
}

TeAttenuationResult te_attenuation_experiment(int k, const EnsembleWeights& weights, int t_window,
                                              double sigma, int n_trials, std::uint64_t seed) {
    if (k < 1) throw ConfigError("te_attenuation_experiment: k must be >= 1");
    if (t_window < 1) throw ConfigError("te_attenuation_experiment: t_window must be >= 1");
    if (n_trials < 1) throw ConfigError("te_attenuation_experiment: n_trials must be >= 1");
    if (static_cast<int>(weights.weights.size()) != k)
        throw ConfigError("te_attenuation_experiment: weights size must equal k");

    TeAttenuationResult result;

    // Smooth side: K overlapping plans, each carrying the same absolute-time
    // quintic ramp; measured at the window midpoint.
    const auto profile = PerturbationProfile::make(ProfileKind::smootherstep_quintic, 1.0,
                                                   Vec3{1, 0, 0});
    const AttackWindow window{0, t_window};
    const std::int64_t t_mid = t_window / 2;
    std::vector<Chunk> chunks;
    for (int age = 0; age < k; ++age) {
        const std::int64_t planned = t_mid - age;
        if (planned < 0) continue;
        Chunk c;
        c.planned_at = static_cast<std::size_t>(planned);
        c.actions.resize(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            c.actions[static_cast<std::size_t>(i)].dpos =
                perturbation_at(profile, window, planned + i);
        chunks.push_back(std::move(c));
    }
    const DeltaAction ensembled = temporal_ensemble(chunks, weights, t_mid);
    const double raw = perturbation_at(profile, window, t_mid).norm();
    result.smooth_retention_ratio = raw > 0.0 ? ensembled.dpos.norm() / raw : 0.0;

    // Noise side: each plan contributes an independent draw for the slot.
    std::mt19937_64 eng(mix_seed(seed, fnv1a64("te-noise")));
    std::normal_distribution<double> normal(0.0, sigma);
    double sum = 0.0, sum_sq = 0.0;
    for (int trial = 0; trial < n_trials; ++trial) {
        double e = 0.0;
        for (int age = 0; age < k; ++age) e += weights.weights[static_cast<std::size_t>(age)] * normal(eng);
        sum += e;
        sum_sq += e * e;
    }
    const double n = static_cast<double>(n_trials);
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    result.noise_variance_ratio = sigma > 0.0 ? var / (sigma * sigma) : 0.0;
    return result;
}

int adaptive_horizon(const EEState& state, const Scene& scene, const DefensePolicy& policy,
                     int base_k) {
    if (base_k < 1) throw ConfigError("adaptive_horizon: base_k must be >= 1");
    if (policy.truncated_k < 1) throw ConfigError("adaptive_horizon: truncated_k must be >= 1");
    const double dist = (state.position - scene.target_position()).norm();
    if (dist < policy.critical_radius) return std::min(policy.truncated_k, base_k);
    return base_k;
}

}  // namespace driftlab
