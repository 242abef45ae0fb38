#pragma once

#include <array>
#include <vector>

#include "tdm/track.hpp"

namespace tdm {

inline constexpr int kDescriptorDim = 11;
inline constexpr double kDefaultImputationDistance = 1.5;
inline constexpr double kDefaultVarianceFloor = 1e-4;

/// Fixed-order per-frame summary fed to the phase scorer.
enum DescriptorIndex : int {
    kHandPresent = 0,
    kHandSpeed = 1,
    kObject1Speed = 2,
    kObject2Speed = 3,
    kHandObj1Distance = 4,
    kHandObj2Distance = 5,
    kObj1Obj2Distance = 6,
    kOverlapHandObj1 = 7,
    kOverlapHandObj2 = 8,
    kObject1Present = 9,
    kObject2Present = 10,
};

using FrameDescriptor = std::array<double, kDescriptorDim>;

/// Per-phase diagonal Gaussian over frame descriptors.
struct PhaseStats {
    std::array<double, kDescriptorDim> mean{};
    std::array<double, kDescriptorDim> variance{};
};

struct PhaseModel {
    std::array<PhaseStats, kPhaseCount> phases{};
    double variance_floor = kDefaultVarianceFloor;
};

/// Descriptor for one frame. Speeds use the previous frame when the entity is
/// present in both, else 0; distances between missing entities impute
/// `imputation_distance`; overlaps with a missing entity are 0.
FrameDescriptor frame_descriptor(const VideoSample& sample, int index,
                                 double imputation_distance = kDefaultImputationDistance);

/// Pooled per-phase mean and population variance (clamped below by
/// variance_floor) over all frames labeled with each phase. Every sample must
/// carry phase_truth and every phase must be non-empty in at least one sample.
PhaseModel fit_phase_model(const std::vector<VideoSample>& samples,
                           double variance_floor = kDefaultVarianceFloor,
                           double imputation_distance = kDefaultImputationDistance);

/// Same fit from already-extracted descriptors pooled per phase.
PhaseModel fit_phase_model_from_descriptors(
    const std::array<std::vector<FrameDescriptor>, kPhaseCount>& pooled, double variance_floor);

/// Diagonal-Gaussian log-likelihood of descriptor d under phase p.
double phase_log_score(const PhaseModel& model, const FrameDescriptor& d, Phase p);

/// Best-scoring legal segmentation via DP over (frame, phase). Ties resolve
/// by earliest starts for phases b and c, then latest starts for d and e.
PhaseSegmentation segment(const PhaseModel& model, const VideoSample& sample,
                          double imputation_distance = kDefaultImputationDistance);

/// Exhaustive-enumeration oracle with the identical tie-break; requires
/// frame count <= 16.
PhaseSegmentation brute_force_segment(const PhaseModel& model, const VideoSample& sample,
                                      double imputation_distance = kDefaultImputationDistance);

/// Score matrix shared by both search routines: scores[p][t].
std::array<std::vector<double>, kPhaseCount> phase_score_matrix(
    const PhaseModel& model, const VideoSample& sample,
    double imputation_distance = kDefaultImputationDistance);

/// Total log-score of a given segmentation (summed over frames in order).
double segmentation_score(const std::array<std::vector<double>, kPhaseCount>& scores,
                          const PhaseSegmentation& seg);

void save_phase_model(const PhaseModel& model, const std::string& path);
PhaseModel load_phase_model(const std::string& path);
std::string phase_model_to_line(const PhaseModel& model);
PhaseModel phase_model_from_line(const std::string& line);

} // namespace tdm
