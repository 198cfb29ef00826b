#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/kinematics.hpp"
#include "driftlab/perturb.hpp"
#include "driftlab/vec.hpp"

namespace driftlab {

enum class TriggerColor { red, blue, green };
enum class TriggerShape { circle };

std::string to_string(TriggerColor c);
TriggerColor trigger_color_from_string(const std::string& name);

/// Visual trigger descriptor. Stored as metadata only: the simulated planner
/// consumes structured observations, so no pixels are rendered.
struct TriggerDescriptor {
    TriggerShape shape = TriggerShape::circle;
    int radius_px = 5;
    double alpha = 1.0;  // opacity in (0,1]
    TriggerColor color = TriggerColor::red;

    bool operator==(const TriggerDescriptor&) const = default;
};

struct Observation {
    EEState ee_state;
    std::map<std::string, Vec3> object_positions;  // object id -> position [m]
    std::optional<TriggerDescriptor> trigger;

    bool operator==(const Observation&) const = default;
};

struct Frame {
    Observation obs;
    DeltaAction action;

    bool operator==(const Frame&) const = default;
};

struct Demonstration {
    std::string episode_id;
    std::string task_id;
    std::string instruction;
    std::string target_object;
    std::vector<Frame> frames;
    double dt = 0.05;

    bool operator==(const Demonstration&) const = default;
};

using Dataset = std::vector<Demonstration>;

/// Poisoning recipe: drift profile + onset rule + trigger to attach.
struct AttackConfig {
    double alpha = 0.004;         // meters/step at the ramp peak
    Vec3 direction{0, 1, 0};      // unit drift direction
    int t_window = 150;           // steps
    double d_th = 0.15;           // onset distance threshold [m]
    ProfileKind profile_kind = ProfileKind::smootherstep_quintic;
    TriggerDescriptor trigger;
};

struct ActionStats {
    double mean = 0.0;
    double stddev = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

struct EpisodePoisonRecord {
    std::string episode_id;
    std::size_t t_start = 0;
    std::size_t t_end = 0;  // inclusive
};

/// Audit summary of a poisoning run: which episodes were touched, how many
/// frames changed, and per-step positional action-magnitude statistics for
/// the clean vs poisoned data.
struct PoisonReport {
    std::vector<EpisodePoisonRecord> episodes;  // sorted by episode id
    double poisoned_frame_fraction = 0.0;
    ActionStats clean_stats;
    ActionStats poisoned_stats;
    std::vector<std::string> warnings;
};

/// Frame-0 position of the demonstration's instructed object.
/// Throws GroundingError if the object is absent.
Vec3 ground_target(const Demonstration& demo);

/// First timestep with ||EE_t - target||_2 < d_th (strict). Throws NoKeyframe
/// if no frame qualifies.
std::size_t find_onset(const Demonstration& demo, const Vec3& target_pos, double d_th);

/// Drops frames whose action norm is below eps (no-operation frames).
Demonstration filter_noop_frames(const Demonstration& demo, double eps = 1e-6);

struct PoisonOutcome {
    Demonstration demo;
    std::size_t t_start = 0;
    std::size_t t_end = 0;  // inclusive
};

/// Poisons one demonstration: finds the onset, attaches the trigger on every
/// frame of [t_start, t_end] with t_end = min(t_start + T_window, last frame),
/// and adds the ramped drift to the actions of those frames. All other frames
/// are returned untouched. Propagates GroundingError / NoKeyframe.
PoisonOutcome poison_demonstration_detailed(const Demonstration& demo, const AttackConfig& config);
Demonstration poison_demonstration(const Demonstration& demo, const AttackConfig& config);

/// Poisons `episodes_per_task` episodes per task, selected uniformly at
/// random (seeded). Episodes where no onset exists are skipped and replaced
/// by the next seeded candidate. If `filter_noops` is set, near-zero-action
/// frames are dropped from every demonstration first.
std::pair<Dataset, PoisonReport> poison_dataset(const Dataset& dataset, const AttackConfig& config,
                                                int episodes_per_task, std::uint64_t seed,
                                                bool filter_noops = false);

/// Compares an aligned clean/poisoned dataset pair: fraction of differing
/// frames plus action-magnitude summaries of both sides.
/// Throws InvalidPair if the datasets are misaligned.
PoisonReport stealth_stats(const Dataset& clean, const Dataset& poisoned);

}  // namespace driftlab
