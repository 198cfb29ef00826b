#include "driftlab/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "driftlab/errors.hpp"
#include "driftlab/seeds.hpp"

namespace driftlab {

std::string to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::constant: return "constant";
        case ProfileKind::smoothstep_cubic: return "smoothstep_cubic";
        case ProfileKind::smootherstep_quintic: return "smootherstep_quintic";
        case ProfileKind::gaussian_noise: return "gaussian_noise";
    }
    throw ConfigError("unknown profile kind");
}

ProfileKind profile_kind_from_string(const std::string& name) {
    if (name == "constant") return ProfileKind::constant;
    if (name == "smoothstep_cubic") return ProfileKind::smoothstep_cubic;
    if (name == "smootherstep_quintic") return ProfileKind::smootherstep_quintic;
    if (name == "gaussian_noise") return ProfileKind::gaussian_noise;
    throw ConfigError("unknown profile kind: '" + name + "'");
}

PerturbationProfile PerturbationProfile::make(ProfileKind kind, double alpha, const Vec3& direction,
                                              double noise_sigma) {
    if (!(alpha >= 0.0)) throw ConfigError("profile: alpha must be >= 0");
    if (!(noise_sigma >= 0.0)) throw ConfigError("profile: noise_sigma must be >= 0");
    const double n = direction.norm();
    if (!(n > 0.0) || !direction.finite())
        throw ConfigError("profile: direction must be a nonzero finite vector");
    PerturbationProfile p;
    p.kind = kind;
    p.alpha = alpha;
    p.direction = direction / n;
    p.noise_sigma = noise_sigma;
    return p;
}

PerturbationProfile PerturbationProfile::from_total_deviation(ProfileKind kind,
                                                              double total_deviation_m,
                                                              const Vec3& direction, int t_window) {
    if (t_window < 1) throw ConfigError("profile: t_window must be >= 1");
    if (!(total_deviation_m >= 0.0)) throw ConfigError("profile: total deviation must be >= 0");
    double integral = 0.0;  // of the unit profile over [0,1]
    switch (kind) {
        case ProfileKind::constant: integral = 1.0; break;
        case ProfileKind::smoothstep_cubic:
        case ProfileKind::smootherstep_quintic: integral = 0.5; break;
        case ProfileKind::gaussian_noise:
            throw Unsupported("from_total_deviation: gaussian_noise has no drift budget");
    }
    const double alpha = total_deviation_m / (integral * static_cast<double>(t_window));
    return make(kind, alpha, direction);
}

double smootherstep(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("smootherstep: tau outside [0,1]");
    return ((6.0 * tau - 15.0) * tau + 10.0) * tau * tau * tau;
}

double smootherstep_d1(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("smootherstep_d1: tau outside [0,1]");
    const double u = 1.0 - tau;
    return 30.0 * tau * tau * u * u;
}

double smootherstep_d2(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("smootherstep_d2: tau outside [0,1]");
    return 60.0 * tau * (2.0 * tau - 1.0) * (tau - 1.0);
}

double clamped_smootherstep(double tau) {
    return smootherstep(std::clamp(tau, 0.0, 1.0));
}

double smoothstep_cubic(double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("smoothstep_cubic: tau outside [0,1]");
    return tau * tau * (3.0 - 2.0 * tau);
}

double clamped_smoothstep_cubic(double tau) {
    return smoothstep_cubic(std::clamp(tau, 0.0, 1.0));
}

Vec3 perturbation_at(const PerturbationProfile& profile, const AttackWindow& window,
                     std::int64_t t, std::uint64_t rng_seed) {
    if (t < window.t_start || t >= window.t_start + window.t_window) return {};
    const double tau =
        static_cast<double>(t - window.t_start) / static_cast<double>(window.t_window);
    switch (profile.kind) {
        case ProfileKind::constant:
            return profile.direction * profile.alpha;
        case ProfileKind::smoothstep_cubic:
            return profile.direction * (profile.alpha * clamped_smoothstep_cubic(tau));
        case ProfileKind::smootherstep_quintic:
            return profile.direction * (profile.alpha * clamped_smootherstep(tau));
        case ProfileKind::gaussian_noise: {
            // Fresh engine per (seed, t) so draws are independent of call order.
            std::mt19937_64 eng(mix_seed(rng_seed, static_cast<std::uint64_t>(t)));
            std::normal_distribution<double> normal(0.0, profile.noise_sigma);
            const double nx = normal(eng);
            const double ny = normal(eng);
            const double nz = normal(eng);
            return {nx, ny, nz};
        }
    }
    throw ConfigError("perturbation_at: unknown profile kind");
}

double expected_window_drift(const PerturbationProfile& profile, const AttackWindow& window) {
    if (profile.kind != ProfileKind::smootherstep_quintic)
        throw Unsupported("expected_window_drift: closed form defined for the quintic profile only");
    return profile.alpha * profile.direction.norm() * static_cast<double>(window.t_window) / 2.0;
}

}  // namespace driftlab
