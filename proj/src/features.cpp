#include "tdm/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tdm {

FeatureMask parse_mask(const std::string& names) {
    FeatureMask mask{false, false, false};
    std::stringstream ss(names);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        any = true;
        if (item == "base")
            mask.base = true;
        else if (item == "depth")
            mask.depth = true;
        else if (item == "container")
            mask.container = true;
        else
            throw std::invalid_argument("unknown feature subset \"" + item +
                                        "\" (expected base, depth, container)");
    }
    if (!any) throw std::invalid_argument("feature mask must select at least one subset");
    return mask;
}

std::string mask_to_string(const FeatureMask& mask) {
    std::string s;
    const auto add = [&](const char* name) {
        if (!s.empty()) s += ',';
        s += name;
    };
    if (mask.base) add("base");
    if (mask.depth) add("depth");
    if (mask.container) add("container");
    return s;
}

double iou(const BoundingBox& p, const BoundingBox& q) {
    const double ix = std::max(p.x, q.x);
    const double iy = std::max(p.y, q.y);
    const double ix2 = std::min(p.x + p.w, q.x + q.w);
    const double iy2 = std::min(p.y + p.h, q.y + q.h);
    const double iw = ix2 - ix;
    const double ih = iy2 - iy;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    const double inter = iw * ih;
    const double uni = p.area() + q.area() - inter;
    return inter / uni;
}

double containment(const BoundingBox& inner, const BoundingBox& outer) {
    const double ix = std::max(inner.x, outer.x);
    const double iy = std::max(inner.y, outer.y);
    const double ix2 = std::min(inner.x + inner.w, outer.x + outer.w);
    const double iy2 = std::min(inner.y + inner.h, outer.y + outer.h);
    const double iw = ix2 - ix;
    const double ih = iy2 - iy;
    if (iw <= 0.0 || ih <= 0.0) return 0.0;
    return (iw * ih) / inner.area();
}

namespace {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::hypot(x, y); }
};

std::optional<Vec2> displacement(const VideoSample& s, int t, Entity e) {
    if (t <= 0) return std::nullopt;
    const auto& cur = s.frames[static_cast<std::size_t>(t)].box(e);
    const auto& prev = s.frames[static_cast<std::size_t>(t - 1)].box(e);
    if (!cur || !prev) return std::nullopt;
    return Vec2{cur->cx() - prev->cx(), cur->cy() - prev->cy()};
}

// Running mean that is 0 when nothing contributed.
struct MeanAcc {
    double sum = 0.0;
    int count = 0;
    void add(double v) {
        sum += v;
        ++count;
    }
    double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

} // namespace

double hand_carry(const VideoSample& sample, int begin, int end, int object_slot,
                  double angle_threshold, double speed_epsilon) {
    if (object_slot != 1 && object_slot != 2)
        throw std::invalid_argument("object_slot must be 1 or 2");
    if (begin < 0 || end > sample.frame_count() || begin > end)
        throw std::out_of_range("hand_carry frame range out of bounds");
    const Entity obj = object_slot == 1 ? Entity::object1 : Entity::object2;
    int qualifying = 0;
    int moving_together = 0;
    for (int t = begin; t < end; ++t) {
        const auto dh = displacement(sample, t, Entity::hand);
        const auto dobj = displacement(sample, t, obj);
        if (!dh || !dobj) continue;
        ++qualifying;
        const double nh = dh->norm();
        const double no = dobj->norm();
        if (nh <= speed_epsilon || no <= speed_epsilon) continue;
        const double cosine = (dh->x * dobj->x + dh->y * dobj->y) / (nh * no);
        if (cosine > angle_threshold) ++moving_together;
    }
    if (qualifying == 0) return 0.0;
    return static_cast<double>(moving_together) / static_cast<double>(qualifying);
}

PhaseFeatureVector phase_features(const VideoSample& sample, const PhaseSegmentation& seg,
                                  Phase p, const FeatureParams& params) {
    PhaseFeatureVector out{};
    const int begin = seg.start(p);
    const int end = seg.end(p);
    const int len = end - begin;
    if (len <= 0) return out;

    MeanAcc size1, size2, size_hand;
    MeanAcc motion1, motion2, motion_hand;
    MeanAcc rel_motion_12, vert_offset, horiz_offset;
    MeanAcc iou_12, iou_1h, iou_2h, containment_12;
    MeanAcc depth1, depth2, depth_hand, depth_diff;
    int present1 = 0, present2 = 0, present_h = 0;

    for (int t = begin; t < end; ++t) {
        const FrameAnnotation& f = sample.frames[static_cast<std::size_t>(t)];
        if (f.object1) {
            ++present1;
            size1.add(f.object1->area());
        }
        if (f.object2) {
            ++present2;
            size2.add(f.object2->area());
        }
        if (f.hand) {
            ++present_h;
            size_hand.add(f.hand->area());
        }
        if (const auto d = displacement(sample, t, Entity::object1)) motion1.add(d->norm());
        if (const auto d = displacement(sample, t, Entity::object2)) motion2.add(d->norm());
        if (const auto d = displacement(sample, t, Entity::hand)) motion_hand.add(d->norm());

        if (t > 0) {
            const FrameAnnotation& g = sample.frames[static_cast<std::size_t>(t - 1)];
            if (f.object1 && f.object2 && g.object1 && g.object2) {
                const double cur = std::hypot(f.object1->cx() - f.object2->cx(),
                                              f.object1->cy() - f.object2->cy());
                const double prev = std::hypot(g.object1->cx() - g.object2->cx(),
                                               g.object1->cy() - g.object2->cy());
                rel_motion_12.add(cur - prev);
            }
        }
        if (f.object1 && f.object2) {
            vert_offset.add(f.object1->cy() - f.object2->cy());
            horiz_offset.add(f.object1->cx() - f.object2->cx());
            iou_12.add(iou(*f.object1, *f.object2));
            containment_12.add(containment(*f.object1, *f.object2));
        }
        if (f.object1 && f.hand) iou_1h.add(iou(*f.object1, *f.hand));
        if (f.object2 && f.hand) iou_2h.add(iou(*f.object2, *f.hand));

        if (f.depth_object1) depth1.add(*f.depth_object1);
        if (f.depth_object2) depth2.add(*f.depth_object2);
        if (f.depth_hand) depth_hand.add(*f.depth_hand);
        if (f.depth_object1 && f.depth_object2) depth_diff.add(*f.depth_object1 - *f.depth_object2);
    }

    out[kSize1] = size1.mean();
    out[kSize2] = size2.mean();
    out[kSizeHand] = size_hand.mean();
    out[kMotion1] = motion1.mean();
    out[kMotion2] = motion2.mean();
    out[kMotionHand] = motion_hand.mean();
    out[kRelMotion12] = rel_motion_12.mean();
    out[kVertOffset12] = vert_offset.mean();
    out[kHorizOffset12] = horiz_offset.mean();
    out[kIou12] = iou_12.mean();
    out[kIou1h] = iou_1h.mean();
    out[kIou2h] = iou_2h.mean();
    out[kCarry1] =
        hand_carry(sample, begin, end, 1, params.carry_angle_threshold, params.carry_speed_epsilon);
    out[kCarry2] =
        hand_carry(sample, begin, end, 2, params.carry_angle_threshold, params.carry_speed_epsilon);
    out[kContainment12] = containment_12.mean();
    out[kPresence1] = static_cast<double>(present1) / static_cast<double>(len);
    out[kPresence2] = static_cast<double>(present2) / static_cast<double>(len);
    out[kPresenceHand] = static_cast<double>(present_h) / static_cast<double>(len);
    out[kDepth1] = depth1.mean();
    out[kDepth2] = depth2.mean();
    out[kDepthHand] = depth_hand.mean();
    out[kDepthDiff12] = depth_diff.mean();
    return out;
}

std::array<double, 4> depth_features(const VideoSample& sample, const PhaseSegmentation& seg,
                                     Phase p) {
    const PhaseFeatureVector f = phase_features(sample, seg, p);
    return {f[kDepth1], f[kDepth2], f[kDepthHand], f[kDepthDiff12]};
}

FeatureVector video_features(const VideoSample& sample, const PhaseSegmentation& seg,
                             const FeatureMask& mask, const FeatureParams& params) {
    FeatureVector out(kFeatureDim, 0.0);
    for (Phase p : all_phases) {
        const int base = static_cast<int>(p) * kPhaseFeatureDim;
        const PhaseFeatureVector block = phase_features(sample, seg, p, params);
        for (int i = 0; i < kPhaseFeatureDim; ++i)
            out[static_cast<std::size_t>(base + i)] = block[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(kPhaseFeatureDim * kPhaseCount + static_cast<int>(p))] =
            seg.empty(p) ? 0.0 : 1.0;
    }

    MeanAcc container1, container2;
    for (const FrameAnnotation& f : sample.frames) {
        if (f.container_object1) container1.add(*f.container_object1);
        if (f.container_object2) container2.add(*f.container_object2);
    }
    out[kFeatureDim - 2] = container1.mean();
    out[kFeatureDim - 1] = container2.mean();

    return apply_mask(std::move(out), mask);
}

FeatureVector apply_mask(FeatureVector features, const FeatureMask& mask) {
    if (features.size() != kFeatureDim)
        throw std::invalid_argument("feature vector must have 117 entries");
    for (int p = 0; p < kPhaseCount; ++p) {
        const int base = p * kPhaseFeatureDim;
        for (int i = 0; i < kPhaseFeatureDim; ++i) {
            const bool is_depth = i >= kDepth1;
            if ((is_depth && !mask.depth) || (!is_depth && !mask.base))
                features[static_cast<std::size_t>(base + i)] = 0.0;
        }
    }
    for (int p = 0; p < kPhaseCount; ++p)
        if (!mask.base)
            features[static_cast<std::size_t>(kPhaseFeatureDim * kPhaseCount + p)] = 0.0;
    if (!mask.container) {
        features[kFeatureDim - 2] = 0.0;
        features[kFeatureDim - 1] = 0.0;
    }
    return features;
}

const std::array<std::string, kFeatureDim>& feature_names() {
    static const std::array<std::string, kFeatureDim> names = [] {
        const std::array<std::string, kPhaseFeatureDim> block = {
            "size1",          "size2",       "size_hand",      "motion1",
            "motion2",        "motion_hand", "rel_motion_12",  "vert_offset_12",
            "horiz_offset_12", "iou_12",     "iou_1h",         "iou_2h",
            "carry_1",        "carry_2",     "containment_12", "presence_1",
            "presence_2",     "presence_h",  "depth1",         "depth2",
            "depth_hand",     "depth_diff_12"};
        std::array<std::string, kFeatureDim> out;
        int k = 0;
        for (Phase p : all_phases)
            for (const std::string& name : block)
                out[static_cast<std::size_t>(k++)] = std::string(1, phase_letter(p)) + "." + name;
        for (Phase p : all_phases)
            out[static_cast<std::size_t>(k++)] =
                std::string(1, phase_letter(p)) + ".phase_present";
        out[static_cast<std::size_t>(k++)] = "container_object1";
        out[static_cast<std::size_t>(k++)] = "container_object2";
        return out;
    }();
    return names;
}

} // namespace tdm
