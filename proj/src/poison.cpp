#include "driftlab/poison.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "driftlab/errors.hpp"
#include "driftlab/seeds.hpp"

namespace driftlab {

std::string to_string(TriggerColor c) {
    switch (c) {
        case TriggerColor::red: return "red";
        case TriggerColor::blue: return "blue";
        case TriggerColor::green: return "green";
    }
    throw ConfigError("unknown trigger color");
}

TriggerColor trigger_color_from_string(const std::string& name) {
    if (name == "red") return TriggerColor::red;
    if (name == "blue") return TriggerColor::blue;
    if (name == "green") return TriggerColor::green;
    throw ConfigError("unknown trigger color: '" + name + "'");
}

Vec3 ground_target(const Demonstration& demo) {
    if (demo.frames.empty()) throw GroundingError("ground_target: demonstration has no frames");
    const auto& objects = demo.frames.front().obs.object_positions;
    const auto it = objects.find(demo.target_object);
    if (it == objects.end())
        throw GroundingError("ground_target: object '" + demo.target_object +
                             "' not present in the initial observation");
    return it->second;
}

std::size_t find_onset(const Demonstration& demo, const Vec3& target_pos, double d_th) {
    if (!(d_th > 0.0)) throw DomainError("find_onset: d_th must be positive");
    for (std::size_t t = 0; t < demo.frames.size(); ++t) {
        const double dist = (demo.frames[t].obs.ee_state.position - target_pos).norm();
        if (dist < d_th) return t;
    }
    throw NoKeyframe("find_onset: no frame within " + std::to_string(d_th) + " m of the target");
}

Demonstration filter_noop_frames(const Demonstration& demo, double eps) {
    Demonstration out = demo;
    out.frames.clear();
    out.frames.reserve(demo.frames.size());
    for (const Frame& f : demo.frames)
        if (norm(f.action.to_vec7()) >= eps) out.frames.push_back(f);
    return out;
}

PoisonOutcome poison_demonstration_detailed(const Demonstration& demo, const AttackConfig& config) {
    if (config.t_window < 1) throw ConfigError("poison: T_window must be >= 1");
    if (config.profile_kind == ProfileKind::gaussian_noise)
        throw ConfigError("poison: gaussian_noise is not a poisoning profile");
    const auto profile =
        PerturbationProfile::make(config.profile_kind, config.alpha, config.direction);

    const Vec3 target = ground_target(demo);
    const std::size_t t_start = find_onset(demo, target, config.d_th);
    const std::size_t t_last = demo.frames.size() - 1;
    const std::size_t t_end = std::min(t_start + static_cast<std::size_t>(config.t_window), t_last);

    PoisonOutcome out{demo, t_start, t_end};
    for (std::size_t t = t_start; t <= t_end; ++t) {
        Frame& f = out.demo.frames[t];
        f.obs.trigger = config.trigger;
        const double tau = static_cast<double>(t - t_start) / static_cast<double>(config.t_window);
        double ramp = 0.0;
        switch (config.profile_kind) {
            case ProfileKind::constant: ramp = 1.0; break;
            case ProfileKind::smoothstep_cubic: ramp = clamped_smoothstep_cubic(tau); break;
            case ProfileKind::smootherstep_quintic: ramp = clamped_smootherstep(tau); break;
            case ProfileKind::gaussian_noise: break;  // rejected above
        }
        f.action.dpos += profile.direction * (profile.alpha * ramp);
    }
    return out;
}

Demonstration poison_demonstration(const Demonstration& demo, const AttackConfig& config) {
    return poison_demonstration_detailed(demo, config).demo;
}

namespace {

ActionStats action_stats(const Dataset& dataset) {
    ActionStats s;
    double sum = 0.0;
    for (const auto& demo : dataset)
        for (const auto& f : demo.frames) {
            const double m = f.action.dpos.norm();
            sum += m;
            s.max = std::max(s.max, m);
            ++s.n;
        }
    if (s.n == 0) return s;
    s.mean = sum / static_cast<double>(s.n);
    double var = 0.0;
    for (const auto& demo : dataset)
        for (const auto& f : demo.frames) {
            const double d = f.action.dpos.norm() - s.mean;
            var += d * d;
        }
    s.stddev = std::sqrt(var / static_cast<double>(s.n));
    return s;
}

std::size_t total_frames(const Dataset& dataset) {
    std::size_t n = 0;
    for (const auto& d : dataset) n += d.frames.size();
    return n;
}

}  // namespace

std::pair<Dataset, PoisonReport> poison_dataset(const Dataset& dataset, const AttackConfig& config,
                                                int episodes_per_task, std::uint64_t seed,
                                                bool filter_noops) {
    if (episodes_per_task < 0) throw ConfigError("poison_dataset: episodes_per_task must be >= 0");

    Dataset out;
    out.reserve(dataset.size());
    for (const auto& demo : dataset)
        out.push_back(filter_noops ? filter_noop_frames(demo) : demo);

    PoisonReport report;
    report.clean_stats = action_stats(out);

    // Group indices by task; std::map keeps the task order stable.
    std::map<std::string, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < out.size(); ++i) by_task[out[i].task_id].push_back(i);

    std::size_t poisoned_frames = 0;
    for (auto& [task_id, indices] : by_task) {
        std::vector<std::size_t> order = indices;
        std::mt19937_64 eng(mix_seed(seed, fnv1a64(task_id)));
        std::shuffle(order.begin(), order.end(), eng);

        int done = 0;
        for (std::size_t idx : order) {
            if (done >= episodes_per_task) break;
            try {
                PoisonOutcome po = poison_demonstration_detailed(out[idx], config);
                out[idx] = std::move(po.demo);
                report.episodes.push_back({out[idx].episode_id, po.t_start, po.t_end});
                poisoned_frames += po.t_end - po.t_start + 1;
                ++done;
            } catch (const NoKeyframe& e) {
                report.warnings.push_back("skipped " + out[idx].episode_id + ": " + e.what());
            } catch (const GroundingError& e) {
                report.warnings.push_back("skipped " + out[idx].episode_id + ": " + e.what());
            }
        }
        if (done < episodes_per_task)
            report.warnings.push_back("task " + task_id + ": only " + std::to_string(done) + " of " +
                                      std::to_string(episodes_per_task) + " episodes poisoned");
    }

    std::sort(report.episodes.begin(), report.episodes.end(),
              [](const auto& a, const auto& b) { return a.episode_id < b.episode_id; });
    const std::size_t frames = total_frames(out);
    report.poisoned_frame_fraction =
        frames == 0 ? 0.0 : static_cast<double>(poisoned_frames) / static_cast<double>(frames);
    report.poisoned_stats = action_stats(out);
    return {std::move(out), std::move(report)};
}

PoisonReport stealth_stats(const Dataset& clean, const Dataset& poisoned) {
    if (clean.size() != poisoned.size())
        throw InvalidPair("stealth_stats: datasets differ in episode count");
    for (std::size_t i = 0; i < clean.size(); ++i) {
        if (clean[i].episode_id != poisoned[i].episode_id)
            throw InvalidPair("stealth_stats: episode ids differ at index " + std::to_string(i));
        if (clean[i].frames.size() != poisoned[i].frames.size())
            throw InvalidPair("stealth_stats: frame counts differ in episode " +
                              clean[i].episode_id);
    }

    PoisonReport report;
    std::size_t differing = 0;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        std::optional<std::size_t> first, last;
        for (std::size_t t = 0; t < clean[i].frames.size(); ++t) {
            if (clean[i].frames[t] == poisoned[i].frames[t]) continue;
            ++differing;
            if (!first) first = t;
            last = t;
        }
        if (first) report.episodes.push_back({clean[i].episode_id, *first, *last});
    }
    std::sort(report.episodes.begin(), report.episodes.end(),
              [](const auto& a, const auto& b) { return a.episode_id < b.episode_id; });

    const std::size_t frames = total_frames(clean);
    report.poisoned_frame_fraction =
        frames == 0 ? 0.0 : static_cast<double>(differing) / static_cast<double>(frames);
    report.clean_stats = action_stats(clean);
    report.poisoned_stats = action_stats(poisoned);
    return report;
}

}  // namespace driftlab
