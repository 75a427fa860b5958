#pragma once

#include <cstdint>

namespace jumpback {

// Instrumentation for the state-space engines. A counter pointer is optional
// everywhere it is accepted; passing nullptr disables counting.
struct WorkCounter {
    std::uint64_t frames = 0;
    std::uint64_t states_touched = 0;  // states visited by the prediction step
    std::uint64_t multiply_adds = 0;   // prediction + update arithmetic

    double touched_per_frame() const {
        return frames == 0 ? 0.0 : static_cast<double>(states_touched) / frames;
    }
    double multiply_adds_per_frame() const {
        return frames == 0 ? 0.0 : static_cast<double>(multiply_adds) / frames;
    }

    WorkCounter& operator+=(const WorkCounter& other) {
        frames += other.frames;
        states_touched += other.states_touched;
        multiply_adds += other.multiply_adds;
        return *this;
    }
};

}  // namespace jumpback
