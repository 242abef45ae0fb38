#pragma once

#include <array>
#include <string>
#include <vector>

#include "tdm/track.hpp"

namespace tdm {

inline constexpr int kPhaseFeatureDim = 22;
inline constexpr int kFeatureDim = kPhaseFeatureDim * kPhaseCount + kPhaseCount + 2; // 117

/// Fixed order of the per-phase feature block.
enum PhaseFeatureIndex : int {
    kSize1 = 0,
    kSize2 = 1,
    kSizeHand = 2,
    kMotion1 = 3,
    kMotion2 = 4,
    kMotionHand = 5,
    kRelMotion12 = 6,
    kVertOffset12 = 7,
    kHorizOffset12 = 8,
    kIou12 = 9,
    kIou1h = 10,
    kIou2h = 11,
    kCarry1 = 12,
    kCarry2 = 13,
    kContainment12 = 14,
    kPresence1 = 15,
    kPresence2 = 16,
    kPresenceHand = 17,
    kDepth1 = 18,
    kDepth2 = 19,
    kDepthHand = 20,
    kDepthDiff12 = 21,
};

using PhaseFeatureVector = std::array<double, kPhaseFeatureDim>;
using FeatureVector = std::vector<double>; // always kFeatureDim entries

struct FeatureMask {
    bool base = true;
    bool depth = true;
    bool container = true;

    bool operator==(const FeatureMask&) const = default;
};

FeatureMask parse_mask(const std::string& names); // "base,depth,container"
std::string mask_to_string(const FeatureMask& mask);

struct FeatureParams {
    double carry_angle_threshold = 0.8;  // cosine gate for moving-with-hand
    double carry_speed_epsilon = 0.005;  // fraction/frame
};

/// Intersection-over-union of two boxes; 0 when disjoint, 1 iff identical.
double iou(const BoundingBox& p, const BoundingBox& q);

/// Fraction of `inner`'s area lying inside `outer`.
double containment(const BoundingBox& inner, const BoundingBox& outer);

/// Fraction of frame pairs in [begin, end) where the object moves with the
/// hand: both displacements above speed_epsilon and their cosine above
/// angle_threshold. Pairs require hand and object present in both frames.
double hand_carry(const VideoSample& sample, int begin, int end, int object_slot,
                  double angle_threshold, double speed_epsilon);

/// Per-phase means over the frames of phase p where the contributing
/// entities are present; empty phase and missing data yield zeros.
PhaseFeatureVector phase_features(const VideoSample& sample, const PhaseSegmentation& seg,
                                  Phase p, const FeatureParams& params = {});

/// (depth1, depth2, depth_hand, depth_diff_12) per-phase means; expects
/// depths already normalized.
std::array<double, 4> depth_features(const VideoSample& sample, const PhaseSegmentation& seg,
                                     Phase p);

/// 117-entry vector: per-phase blocks a..e, five phase-present flags, then
/// the two video-level container means. Entries outside the mask are 0.
FeatureVector video_features(const VideoSample& sample, const PhaseSegmentation& seg,
                             const FeatureMask& mask = {}, const FeatureParams& params = {});

/// Applies a mask to an already-extracted full vector (zeroes masked entries).
FeatureVector apply_mask(FeatureVector features, const FeatureMask& mask);

/// Stable machine-readable column names, e.g. "c.depth_diff_12".
const std::array<std::string, kFeatureDim>& feature_names();

} // namespace tdm
