#pragma once

// Causal joint beat, downbeat, tempo and meter tracking.
//
// A beat-level state space runs once per activation frame. Each declared beat
// advances a bar-level state space by one step, observed through the downbeat
// activation at that frame. Events are emitted synchronously with no
// lookahead.

#include "jumpback/signal_io.hpp"
#include "jumpback/state_space.hpp"
#include "jumpback/work_counter.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace jumpback {

enum class Engine { one_dim, baseline_2d };

std::string_view to_string(Engine engine);

struct TrackerConfig {
    SpaceConfig space;  // beat level; bar_min / bar_max give the bar range
    Engine engine = Engine::one_dim;
    std::optional<double> bar_threshold;  // defaults to space.threshold
    std::optional<std::uint64_t> seed;    // random initialization of the 1D spaces
    double p_switch = 0.02;               // baseline tempo / meter switch probability
};

enum class EventKind { beat, downbeat };

struct RhythmEvent {
    double time = 0.0;  // frame index * delta
    EventKind kind = EventKind::beat;
    double tempo = 0.0;  // BPM
    int meter = 0;       // beats per bar
    double beat_confidence = 0.0;  // posterior mass at the beat state
    int beat_in_bar = 1;
    std::int64_t frame_index = 0;
    bool warmup = false;  // emitted before one full longest interval was seen

    bool operator==(const RhythmEvent&) const = default;
};

struct TrackingSummary {
    std::vector<RhythmEvent> events;
    double tempo = 0.0;
    int meter = 0;
    std::int64_t frames = 0;
};

namespace detail {
class RhythmLayer;
}

class Tracker {
public:
    explicit Tracker(const TrackerConfig& config);
    ~Tracker();
    Tracker(Tracker&&) noexcept;
    Tracker& operator=(Tracker&&) noexcept;

    /// Frames must arrive with consecutive indices starting at 0.
    std::optional<RhythmEvent> process_frame(const ActivationFrame& frame);

    /// Accumulated events and the current decodes. Does not change state.
    TrackingSummary finalize() const;

    double current_tempo() const;
    /// Beat interval in frames behind current_tempo().
    int current_beat_interval() const;
    int current_meter() const;

    std::int64_t frames_processed() const noexcept { return frames_; }
    const std::vector<RhythmEvent>& events() const noexcept { return events_; }

    const WorkCounter& beat_work() const;
    const WorkCounter& bar_work() const;

    const TrackerConfig& config() const noexcept { return config_; }

private:
    TrackerConfig config_;
    std::unique_ptr<detail::RhythmLayer> beat_;
    std::unique_ptr<detail::RhythmLayer> bar_;
    std::vector<RhythmEvent> events_;
    std::int64_t frames_ = 0;
    int beats_since_downbeat_ = -1;  // -1 until the first downbeat
};

/// Runs a whole stream through a fresh tracker. The stream's delta overrides
/// config.space.delta.
TrackingSummary track_stream(const ActivationStream& stream, TrackerConfig config);

/// Events as annotation lines.
Annotation to_annotation(const std::vector<RhythmEvent>& events);

}  // namespace jumpback
