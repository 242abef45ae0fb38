#pragma once

#include <array>
#include <string>

#include "tdm/errors.hpp"

namespace tdm {

/// The five sequential stages of a manipulation action, totally ordered.
enum class Phase : int { a = 0, b = 1, c = 2, d = 3, e = 4 };

inline constexpr int kPhaseCount = 5;

inline constexpr std::array<Phase, kPhaseCount> all_phases{Phase::a, Phase::b, Phase::c,
                                                           Phase::d, Phase::e};

inline char phase_letter(Phase p) { return static_cast<char>('a' + static_cast<int>(p)); }

inline Phase phase_from_letter(char ch) {
    if (ch < 'a' || ch > 'e') throw std::invalid_argument(std::string("not a phase letter: ") + ch);
    return static_cast<Phase>(ch - 'a');
}

/// Consecutive half-open frame ranges for phases a..e covering [0, n).
/// Stored as the four interior cut points (ends of a, b, c, d); contiguity
/// holds by construction. Phase c must be non-empty, the others may be empty.
struct PhaseSegmentation {
    std::array<int, 4> cuts{0, 0, 0, 0};
    int frame_count = 0;

    int start(Phase p) const {
        const int i = static_cast<int>(p);
        return i == 0 ? 0 : cuts[static_cast<std::size_t>(i - 1)];
    }
    int end(Phase p) const {
        const int i = static_cast<int>(p);
        return i == 4 ? frame_count : cuts[static_cast<std::size_t>(i)];
    }
    int length(Phase p) const { return end(p) - start(p); }
    bool empty(Phase p) const { return length(p) == 0; }

    Phase phase_of(int frame) const {
        for (Phase p : all_phases)
            if (frame < end(p)) return p;
        throw std::out_of_range("frame beyond segmentation");
    }

    void validate() const {
        if (frame_count <= 0) throw ValidationError("phases: frame count must be positive");
        int prev = 0;
        for (int cut : cuts) {
            if (cut < prev || cut > frame_count)
                throw ValidationError("phases: cut points must be non-decreasing within [0, n]");
            prev = cut;
        }
        if (cuts[2] <= cuts[1]) throw ValidationError("phases: phase c must be non-empty");
    }

    bool operator==(const PhaseSegmentation&) const = default;

    std::string to_string() const {
        std::string s;
        for (Phase p : all_phases) {
            if (!s.empty()) s += ' ';
            s += phase_letter(p);
            s += "=[" + std::to_string(start(p)) + "," + std::to_string(end(p)) + ")";
        }
        return s;
    }
};

} // namespace tdm
