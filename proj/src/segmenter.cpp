#include "tdm/segmenter.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "tdm/features.hpp"

namespace tdm {

using nlohmann::json;

namespace {

double entity_speed(const VideoSample& s, int t, Entity e) {
    if (t <= 0) return 0.0;
    const auto& cur = s.frames[static_cast<std::size_t>(t)].box(e);
    const auto& prev = s.frames[static_cast<std::size_t>(t - 1)].box(e);
    if (!cur || !prev) return 0.0;
    return std::hypot(cur->cx() - prev->cx(), cur->cy() - prev->cy());
}

double entity_distance(const FrameAnnotation& f, Entity e1, Entity e2, double imputation) {
    const auto& a = f.box(e1);
    const auto& b = f.box(e2);
    if (!a || !b) return imputation;
    return std::hypot(a->cx() - b->cx(), a->cy() - b->cy());
}

double entity_overlap(const FrameAnnotation& f, Entity e1, Entity e2) {
    const auto& a = f.box(e1);
    const auto& b = f.box(e2);
    if (!a || !b) return 0.0;
    return iou(*a, *b);
}

} // namespace

FrameDescriptor frame_descriptor(const VideoSample& sample, int index,
                                 double imputation_distance) {
    if (index < 0 || index >= sample.frame_count())
        throw std::out_of_range("frame index " + std::to_string(index) + " out of range for \"" +
                                sample.video_id + "\"");
    const FrameAnnotation& f = sample.frames[static_cast<std::size_t>(index)];
    FrameDescriptor d{};
    d[kHandPresent] = f.hand ? 1.0 : 0.0;
    d[kHandSpeed] = entity_speed(sample, index, Entity::hand);
    d[kObject1Speed] = entity_speed(sample, index, Entity::object1);
    d[kObject2Speed] = entity_speed(sample, index, Entity::object2);
    d[kHandObj1Distance] = entity_distance(f, Entity::hand, Entity::object1, imputation_distance);
    d[kHandObj2Distance] = entity_distance(f, Entity::hand, Entity::object2, imputation_distance);
    d[kObj1Obj2Distance] =
        entity_distance(f, Entity::object1, Entity::object2, imputation_distance);
    d[kOverlapHandObj1] = entity_overlap(f, Entity::hand, Entity::object1);
    d[kOverlapHandObj2] = entity_overlap(f, Entity::hand, Entity::object2);
    d[kObject1Present] = f.object1 ? 1.0 : 0.0;
    d[kObject2Present] = f.object2 ? 1.0 : 0.0;
    return d;
}

PhaseModel fit_phase_model_from_descriptors(
    const std::array<std::vector<FrameDescriptor>, kPhaseCount>& pooled, double variance_floor) {
    if (!(variance_floor > 0.0)) throw std::invalid_argument("variance_floor must be positive");
    PhaseModel model;
    model.variance_floor = variance_floor;
    for (Phase p : all_phases) {
        const auto& pool = pooled[static_cast<std::size_t>(static_cast<int>(p))];
        if (pool.empty())
            throw TrainError(std::string("phase ") + phase_letter(p) + " has no training frames");
        PhaseStats& stats = model.phases[static_cast<std::size_t>(static_cast<int>(p))];
        const double n = static_cast<double>(pool.size());
        for (int i = 0; i < kDescriptorDim; ++i) {
            double sum = 0.0;
            for (const FrameDescriptor& d : pool) sum += d[static_cast<std::size_t>(i)];
            const double mean = sum / n;
            double sq = 0.0;
            for (const FrameDescriptor& d : pool) {
                const double delta = d[static_cast<std::size_t>(i)] - mean;
                sq += delta * delta;
            }
            stats.mean[static_cast<std::size_t>(i)] = mean;
            stats.variance[static_cast<std::size_t>(i)] = std::max(sq / n, variance_floor);
        }
    }
    return model;
}

PhaseModel fit_phase_model(const std::vector<VideoSample>& samples, double variance_floor,
                           double imputation_distance) {
    std::array<std::vector<FrameDescriptor>, kPhaseCount> pooled;
    for (const VideoSample& s : samples) {
        if (!s.phase_truth)
            throw std::invalid_argument("sample \"" + s.video_id + "\" has no phase labels");
        for (int t = 0; t < s.frame_count(); ++t) {
            const Phase p = s.phase_truth->phase_of(t);
            pooled[static_cast<std::size_t>(static_cast<int>(p))].push_back(
                frame_descriptor(s, t, imputation_distance));
        }
    }
    return fit_phase_model_from_descriptors(pooled, variance_floor);
}

double phase_log_score(const PhaseModel& model, const FrameDescriptor& d, Phase p) {
    const PhaseStats& stats = model.phases[static_cast<std::size_t>(static_cast<int>(p))];
    double score = 0.0;
    for (int i = 0; i < kDescriptorDim; ++i) {
        const double var = stats.variance[static_cast<std::size_t>(i)];
        const double delta = d[static_cast<std::size_t>(i)] - stats.mean[static_cast<std::size_t>(i)];
        score += -0.5 * (delta * delta / var) - 0.5 * std::log(2.0 * std::numbers::pi * var);
    }
    return score;
}

std::array<std::vector<double>, kPhaseCount> phase_score_matrix(const PhaseModel& model,
                                                                const VideoSample& sample,
                                                                double imputation_distance) {
    std::array<std::vector<double>, kPhaseCount> scores;
    const int n = sample.frame_count();
    for (auto& row : scores) row.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const FrameDescriptor d = frame_descriptor(sample, t, imputation_distance);
        for (Phase p : all_phases)
            scores[static_cast<std::size_t>(static_cast<int>(p))][static_cast<std::size_t>(t)] =
                phase_log_score(model, d, p);
    }
    return scores;
}

double segmentation_score(const std::array<std::vector<double>, kPhaseCount>& scores,
                          const PhaseSegmentation& seg) {
    double total = 0.0;
    for (int t = 0; t < seg.frame_count; ++t) {
        const Phase p = seg.phase_of(t);
        total += scores[static_cast<std::size_t>(static_cast<int>(p))][static_cast<std::size_t>(t)];
    }
    return total;
}

namespace {

// Tie-break shared by segment() and brute_force_segment(): on equal score,
// prefer the earliest starts for phases b and c, then the latest starts for
// phases d and e (drives the boundaries outward from the critical phase c).
bool better_candidate(double score_a, const std::array<int, 4>& cuts_a, double score_b,
                      const std::array<int, 4>& cuts_b, int committed) {
    if (score_a != score_b) return score_a > score_b;
    for (int i = 0; i < committed; ++i) {
        const std::size_t k = static_cast<std::size_t>(i);
        if (cuts_a[k] != cuts_b[k]) return i < 2 ? cuts_a[k] < cuts_b[k] : cuts_a[k] > cuts_b[k];
    }
    return false;
}

struct Cell {
    bool reachable = false;
    double score = -std::numeric_limits<double>::infinity();
    std::array<int, 4> cuts{};
};

// A monotone phase path is legal iff it lands on c when crossing it;
// skipping straight over c would leave c empty.
bool legal_step(int from, int to) {
    if (to < from) return false;
    return !(from < static_cast<int>(Phase::c) && to > static_cast<int>(Phase::c));
}

} // namespace

PhaseSegmentation segment(const PhaseModel& model, const VideoSample& sample,
                          double imputation_distance) {
    const int n = sample.frame_count();
    if (n < 1) throw std::invalid_argument("segment requires at least one frame");
    const auto scores = phase_score_matrix(model, sample, imputation_distance);

    // cur[p] holds the best (score, committed cuts) over paths ending at the
    // current frame in phase p; being in phase p commits the first p cuts.
    std::array<Cell, kPhaseCount> cur{};
    for (int p = 0; p <= static_cast<int>(Phase::c); ++p) {
        Cell cell;
        cell.reachable = true;
        cell.score = scores[static_cast<std::size_t>(p)][0];
        for (int i = 0; i < p; ++i) cell.cuts[static_cast<std::size_t>(i)] = 0;
        cur[static_cast<std::size_t>(p)] = cell;
    }

    for (int t = 1; t < n; ++t) {
        std::array<Cell, kPhaseCount> next{};
        for (int q = 0; q < kPhaseCount; ++q) {
            Cell best;
            for (int p = 0; p <= q; ++p) {
                const Cell& prev = cur[static_cast<std::size_t>(p)];
                if (!prev.reachable || !legal_step(p, q)) continue;
                Cell cand = prev;
                cand.score += scores[static_cast<std::size_t>(q)][static_cast<std::size_t>(t)];
                for (int i = p; i < q; ++i) cand.cuts[static_cast<std::size_t>(i)] = t;
                if (!best.reachable ||
                    better_candidate(cand.score, cand.cuts, best.score, best.cuts, q))
                    best = cand;
            }
            next[static_cast<std::size_t>(q)] = best;
        }
        cur = next;
    }

    Cell best;
    for (int p = static_cast<int>(Phase::c); p < kPhaseCount; ++p) {
        Cell cand = cur[static_cast<std::size_t>(p)];
        if (!cand.reachable) continue;
        for (int i = p; i < 4; ++i) cand.cuts[static_cast<std::size_t>(i)] = n;
        if (!best.reachable || better_candidate(cand.score, cand.cuts, best.score, best.cuts, 4))
            best = cand;
    }

    PhaseSegmentation seg;
    seg.cuts = best.cuts;
    seg.frame_count = n;
    return seg;
}

PhaseSegmentation brute_force_segment(const PhaseModel& model, const VideoSample& sample,
                                      double imputation_distance) {
    const int n = sample.frame_count();
    if (n < 1) throw std::invalid_argument("segment requires at least one frame");
    if (n > 16) throw std::invalid_argument("brute_force_segment limited to 16 frames");
    const auto scores = phase_score_matrix(model, sample, imputation_distance);

    bool found = false;
    double best_score = 0.0;
    std::array<int, 4> best_cuts{};
    for (int b1 = 0; b1 <= n; ++b1)
        for (int b2 = b1; b2 <= n; ++b2)
            for (int b3 = b2 + 1; b3 <= n; ++b3)
                for (int b4 = b3; b4 <= n; ++b4) {
                    PhaseSegmentation seg;
                    seg.cuts = {b1, b2, b3, b4};
                    seg.frame_count = n;
                    const double total = segmentation_score(scores, seg);
                    if (!found ||
                        better_candidate(total, seg.cuts, best_score, best_cuts, 4)) {
                        found = true;
                        best_score = total;
                        best_cuts = seg.cuts;
                    }
                }

    PhaseSegmentation seg;
    seg.cuts = best_cuts;
    seg.frame_count = n;
    return seg;
}

std::string phase_model_to_line(const PhaseModel& model) {
    json j;
    j["variance_floor"] = model.variance_floor;
    json phases;
    for (Phase p : all_phases) {
        const PhaseStats& stats = model.phases[static_cast<std::size_t>(static_cast<int>(p))];
        json jp;
        jp["mean"] = stats.mean;
        jp["var"] = stats.variance;
        phases[std::string(1, phase_letter(p))] = std::move(jp);
    }
    j["phases"] = std::move(phases);
    return j.dump();
}

PhaseModel phase_model_from_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid phase model record: ") + e.what());
    }
    PhaseModel model;
    try {
        model.variance_floor = j.at("variance_floor").get<double>();
        for (Phase p : all_phases) {
            const json& jp = j.at("phases").at(std::string(1, phase_letter(p)));
            PhaseStats& stats = model.phases[static_cast<std::size_t>(static_cast<int>(p))];
            const auto mean = jp.at("mean").get<std::vector<double>>();
            const auto var = jp.at("var").get<std::vector<double>>();
            if (mean.size() != kDescriptorDim || var.size() != kDescriptorDim)
                throw ParseError("phase model arrays must have 11 entries");
            std::copy(mean.begin(), mean.end(), stats.mean.begin());
            std::copy(var.begin(), var.end(), stats.variance.begin());
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad phase model record: ") + e.what());
    }
    if (!(model.variance_floor > 0.0))
        throw ValidationError("phase model variance_floor must be positive");
    for (const PhaseStats& stats : model.phases)
        for (double v : stats.variance)
            if (!(v >= model.variance_floor))
                throw ValidationError("phase model variance below variance_floor");
    return model;
}

void save_phase_model(const PhaseModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << phase_model_to_line(model) << '\n';
}

PhaseModel load_phase_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open phase model file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty phase model file: " + path);
    return phase_model_from_line(line);
}

} // namespace tdm
