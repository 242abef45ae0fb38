#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tdm/phases.hpp"

namespace tdm {

/// Axis-aligned box in normalized frame fractions, (x, y) the top-left corner.
struct BoundingBox {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double cx() const { return x + w / 2.0; }
    double cy() const { return y + h / 2.0; }
    double area() const { return w * h; }

    bool operator==(const BoundingBox&) const = default;
};

enum class Entity : int { object1 = 0, object2 = 1, hand = 2 };

inline constexpr std::array<Entity, 3> all_entities{Entity::object1, Entity::object2,
                                                    Entity::hand};

inline const char* entity_name(Entity e) {
    switch (e) {
        case Entity::object1: return "object1";
        case Entity::object2: return "object2";
        default: return "hand";
    }
}

/// Per-frame annotations for one video frame. Any entity may be missing;
/// depth and container scores are upstream-provided and also optional.
struct FrameAnnotation {
    int index = 0;
    std::optional<BoundingBox> object1;
    std::optional<BoundingBox> object2;
    std::optional<BoundingBox> hand;
    std::optional<double> depth_object1;
    std::optional<double> depth_object2;
    std::optional<double> depth_hand;
    std::optional<double> container_object1;
    std::optional<double> container_object2;

    const std::optional<BoundingBox>& box(Entity e) const {
        switch (e) {
            case Entity::object1: return object1;
            case Entity::object2: return object2;
            default: return hand;
        }
    }
    std::optional<BoundingBox>& box(Entity e) {
        switch (e) {
            case Entity::object1: return object1;
            case Entity::object2: return object2;
            default: return hand;
        }
    }
    const std::optional<double>& depth(Entity e) const {
        switch (e) {
            case Entity::object1: return depth_object1;
            case Entity::object2: return depth_object2;
            default: return depth_hand;
        }
    }
    std::optional<double>& depth(Entity e) {
        switch (e) {
            case Entity::object1: return depth_object1;
            case Entity::object2: return depth_object2;
            default: return depth_hand;
        }
    }

    bool operator==(const FrameAnnotation&) const = default;
};

/// One annotated video: box/depth/container tracks plus optional class label
/// and optional ground-truth phase boundaries (used to train the segmenter).
struct VideoSample {
    std::string video_id;
    std::optional<int> class_id;
    std::vector<FrameAnnotation> frames;
    std::optional<PhaseSegmentation> phase_truth;

    int frame_count() const { return static_cast<int>(frames.size()); }

    bool operator==(const VideoSample&) const = default;
};

struct ActionClass {
    int id = 0;
    std::string name;
};

/// Throws ValidationError naming the video id and offending field.
void validate_sample(const VideoSample& sample);

/// Parses a line-delimited record stream (one JSON record per line).
/// Throws ParseError with the 1-based line number for malformed lines and
/// ValidationError for records violating data-model invariants.
std::vector<VideoSample> parse_dataset(std::istream& source);
std::vector<VideoSample> parse_dataset_file(const std::string& path);

std::string serialize_sample(const VideoSample& sample);
void serialize_dataset(const std::vector<VideoSample>& samples, std::ostream& out);
void write_dataset_file(const std::vector<VideoSample>& samples, const std::string& path);

/// Fills per-entity absent runs of length <= max_gap lying strictly between
/// two present frames by linear interpolation of the box (and of depth when
/// both endpoints carry depth). Longer runs and leading/trailing absences are
/// left unchanged. Total and idempotent on valid samples.
VideoSample interpolate_missing(const VideoSample& sample, int max_gap);

/// Per-video robust depth normalization: v -> (v - median) / (max - min) over
/// all depths present in the sample; degenerate cases (fewer than two values
/// or zero range) set every present depth to 0.
VideoSample normalize_depth(const VideoSample& sample);

} // namespace tdm
