#include "tdm/track.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tdm {

using nlohmann::json;

namespace {

void check_box(const std::string& video_id, int frame, const char* field, const BoundingBox& b) {
    const auto fail = [&](const std::string& what) {
        throw ValidationError("video \"" + video_id + "\": frame " + std::to_string(frame) +
                              ": " + what);
    };
    if (!(b.w > 0.0)) fail(std::string(field) + ".w must be > 0");
    if (!(b.h > 0.0)) fail(std::string(field) + ".h must be > 0");
    if (!(b.x >= 0.0)) fail(std::string(field) + ".x must be >= 0");
    if (!(b.y >= 0.0)) fail(std::string(field) + ".y must be >= 0");
    if (!(b.x + b.w <= 1.0)) fail(std::string(field) + ".x+w exceeds 1");
    if (!(b.y + b.h <= 1.0)) fail(std::string(field) + ".y+h exceeds 1");
}

void check_unit(const std::string& video_id, int frame, const char* field, double v) {
    if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("video \"" + video_id + "\": frame " + std::to_string(frame) +
                              ": " + field + " must be in [0,1]");
}

void check_finite(const std::string& video_id, int frame, const char* field, double v) {
    if (!std::isfinite(v))
        throw ValidationError("video \"" + video_id + "\": frame " + std::to_string(frame) +
                              ": " + field + " must be finite");
}

BoundingBox parse_box(const json& j) {
    return BoundingBox{j.at("x").get<double>(), j.at("y").get<double>(),
                       j.at("w").get<double>(), j.at("h").get<double>()};
}

json box_to_json(const BoundingBox& b) {
    return json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

VideoSample sample_from_json(const json& j) {
    VideoSample s;
    s.video_id = j.at("video_id").get<std::string>();
    if (j.contains("class_id")) s.class_id = j.at("class_id").get<int>();

    for (const json& jf : j.at("frames")) {
        FrameAnnotation f;
        f.index = jf.at("index").get<int>();
        if (jf.contains("object1")) f.object1 = parse_box(jf.at("object1"));
        if (jf.contains("object2")) f.object2 = parse_box(jf.at("object2"));
        if (jf.contains("hand")) f.hand = parse_box(jf.at("hand"));
        if (jf.contains("depth")) {
            const json& jd = jf.at("depth");
            if (jd.contains("object1")) f.depth_object1 = jd.at("object1").get<double>();
            if (jd.contains("object2")) f.depth_object2 = jd.at("object2").get<double>();
            if (jd.contains("hand")) f.depth_hand = jd.at("hand").get<double>();
        }
        if (jf.contains("container")) {
            const json& jc = jf.at("container");
            if (jc.contains("object1")) f.container_object1 = jc.at("object1").get<double>();
            if (jc.contains("object2")) f.container_object2 = jc.at("object2").get<double>();
        }
        s.frames.push_back(std::move(f));
    }

    if (j.contains("phases")) {
        const json& jp = j.at("phases");
        PhaseSegmentation seg;
        seg.frame_count = static_cast<int>(s.frames.size());
        int expected_start = 0;
        for (Phase p : all_phases) {
            const std::string key(1, phase_letter(p));
            if (!jp.contains(key))
                throw ValidationError("video \"" + s.video_id + "\": phases." + key +
                                      " missing (all five phases required)");
            const json& jr = jp.at(key);
            const int start = jr.at(0).get<int>();
            const int end = jr.at(1).get<int>();
            if (start != expected_start)
                throw ValidationError("video \"" + s.video_id + "\": phases." + key +
                                      " must start where the previous phase ends");
            if (p != Phase::e) seg.cuts[static_cast<std::size_t>(static_cast<int>(p))] = end;
            expected_start = end;
        }
        if (expected_start != seg.frame_count)
            throw ValidationError("video \"" + s.video_id +
                                  "\": phases must cover all frames exactly");
        s.phase_truth = seg;
    }
    return s;
}

json sample_to_json(const VideoSample& s) {
    json j;
    j["video_id"] = s.video_id;
    if (s.class_id) j["class_id"] = *s.class_id;
    json frames = json::array();
    for (const FrameAnnotation& f : s.frames) {
        json jf;
        jf["index"] = f.index;
        if (f.object1) jf["object1"] = box_to_json(*f.object1);
        if (f.object2) jf["object2"] = box_to_json(*f.object2);
        if (f.hand) jf["hand"] = box_to_json(*f.hand);
        if (f.depth_object1 || f.depth_object2 || f.depth_hand) {
            json jd;
            if (f.depth_object1) jd["object1"] = *f.depth_object1;
            if (f.depth_object2) jd["object2"] = *f.depth_object2;
            if (f.depth_hand) jd["hand"] = *f.depth_hand;
            jf["depth"] = std::move(jd);
        }
        if (f.container_object1 || f.container_object2) {
            json jc;
            if (f.container_object1) jc["object1"] = *f.container_object1;
            if (f.container_object2) jc["object2"] = *f.container_object2;
            jf["container"] = std::move(jc);
        }
        frames.push_back(std::move(jf));
    }
    j["frames"] = std::move(frames);
    if (s.phase_truth) {
        json jp;
        for (Phase p : all_phases)
            jp[std::string(1, phase_letter(p))] =
                json::array({s.phase_truth->start(p), s.phase_truth->end(p)});
        j["phases"] = std::move(jp);
    }
    return j;
}

} // namespace

void validate_sample(const VideoSample& s) {
    if (s.frames.empty())
        throw ValidationError("video \"" + s.video_id + "\": frames must be non-empty");
    for (std::size_t i = 0; i < s.frames.size(); ++i) {
        const FrameAnnotation& f = s.frames[i];
        if (f.index != static_cast<int>(i))
            throw ValidationError("video \"" + s.video_id +
                                  "\": frames indices must be contiguous 0..n-1, got " +
                                  std::to_string(f.index) + " at position " + std::to_string(i));
        if (f.object1) check_box(s.video_id, f.index, "object1", *f.object1);
        if (f.object2) check_box(s.video_id, f.index, "object2", *f.object2);
        if (f.hand) check_box(s.video_id, f.index, "hand", *f.hand);
        if (f.depth_object1) check_finite(s.video_id, f.index, "depth.object1", *f.depth_object1);
        if (f.depth_object2) check_finite(s.video_id, f.index, "depth.object2", *f.depth_object2);
        if (f.depth_hand) check_finite(s.video_id, f.index, "depth.hand", *f.depth_hand);
        if (f.container_object1)
            check_unit(s.video_id, f.index, "container.object1", *f.container_object1);
        if (f.container_object2)
            check_unit(s.video_id, f.index, "container.object2", *f.container_object2);
    }
    if (s.phase_truth) {
        if (s.phase_truth->frame_count != s.frame_count())
            throw ValidationError("video \"" + s.video_id +
                                  "\": phases frame count does not match frames");
        try {
            s.phase_truth->validate();
        } catch (const ValidationError& e) {
            throw ValidationError("video \"" + s.video_id + "\": " + e.what());
        }
    }
}

std::vector<VideoSample> parse_dataset(std::istream& source) {
    std::vector<VideoSample> samples;
    std::string line;
    int line_no = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        VideoSample s;
        try {
            s = sample_from_json(j);
        } catch (const ValidationError&) {
            throw;
        } catch (const json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": bad record: " + e.what());
        }
        validate_sample(s);
        samples.push_back(std::move(s));
    }
    return samples;
}

std::vector<VideoSample> parse_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open dataset file: " + path);
    return parse_dataset(in);
}

std::string serialize_sample(const VideoSample& s) { return sample_to_json(s).dump(); }

void serialize_dataset(const std::vector<VideoSample>& samples, std::ostream& out) {
    for (const VideoSample& s : samples) out << serialize_sample(s) << '\n';
}

void write_dataset_file(const std::vector<VideoSample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    serialize_dataset(samples, out);
}

namespace {

double lerp(double a, double b, double t) { return a + (b - a) * t; }

void fill_entity_gaps(VideoSample& s, Entity e, int max_gap) {
    const int n = s.frame_count();
    int prev_present = -1;
    for (int i = 0; i < n; ++i) {
        if (!s.frames[static_cast<std::size_t>(i)].box(e)) continue;
        if (prev_present >= 0) {
            const int gap = i - prev_present - 1;
            if (gap >= 1 && gap <= max_gap) {
                const FrameAnnotation& lo = s.frames[static_cast<std::size_t>(prev_present)];
                const FrameAnnotation& hi = s.frames[static_cast<std::size_t>(i)];
                const BoundingBox& a = *lo.box(e);
                const BoundingBox& b = *hi.box(e);
                const bool fill_depth = lo.depth(e).has_value() && hi.depth(e).has_value();
                for (int k = prev_present + 1; k < i; ++k) {
                    const double t = static_cast<double>(k - prev_present) /
                                     static_cast<double>(i - prev_present);
                    FrameAnnotation& f = s.frames[static_cast<std::size_t>(k)];
                    f.box(e) = BoundingBox{lerp(a.x, b.x, t), lerp(a.y, b.y, t),
                                           lerp(a.w, b.w, t), lerp(a.h, b.h, t)};
                    if (fill_depth) f.depth(e) = lerp(*lo.depth(e), *hi.depth(e), t);
                }
            }
        }
        prev_present = i;
    }
}

} // namespace

VideoSample interpolate_missing(const VideoSample& sample, int max_gap) {
    if (max_gap < 0) throw std::invalid_argument("max_gap must be >= 0");
    VideoSample out = sample;
    if (max_gap == 0) return out;
    for (Entity e : all_entities) fill_entity_gaps(out, e, max_gap);
    return out;
}

VideoSample normalize_depth(const VideoSample& sample) {
    VideoSample out = sample;
    std::vector<double> depths;
    for (const FrameAnnotation& f : out.frames)
        for (Entity e : all_entities)
            if (f.depth(e)) depths.push_back(*f.depth(e));
    if (depths.empty()) return out;

    std::sort(depths.begin(), depths.end());
    const double lo = depths.front();
    const double hi = depths.back();
    const bool degenerate = depths.size() < 2 || !(hi > lo);

    double median = 0.0;
    if (!degenerate) {
        const std::size_t m = depths.size() / 2;
        median = (depths.size() % 2 == 1) ? depths[m] : (depths[m - 1] + depths[m]) / 2.0;
    }

    for (FrameAnnotation& f : out.frames)
        for (Entity e : all_entities)
            if (f.depth(e))
                f.depth(e) = degenerate ? 0.0 : (*f.depth(e) - median) / (hi - lo);
    return out;
}

} // namespace tdm
