#include "jumpback/tracker.hpp"

#include "jumpback/errors.hpp"
#include "jumpback/pointer_hmm.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace jumpback {

namespace detail {

// One level of the cascade (beat or bar) behind a common interface so the
// tracker can drive either engine.
class RhythmLayer {
public:
    struct Step {
        bool gated = false;
        bool at_start = false;
    };

    virtual ~RhythmLayer() = default;

    virtual Step step(double activation) = 0;
    virtual int interval() const = 0;
    virtual double interval_value() const = 0;
    virtual int map_position() const = 0;
    virtual double start_mass() const = 0;
    virtual int max_interval() const = 0;
    virtual const WorkCounter& work() const = 0;
};

namespace {

class JumpBackLayer final : public RhythmLayer {
public:
    JumpBackLayer(const SpaceConfig& config, std::optional<std::uint64_t> seed)
        : filter_(config, seed) {}

    Step step(double activation) override {
        const auto s = filter_.step(activation);
        return {s.gated, s.at_start};
    }
    int interval() const override { return filter_.estimate().position; }
    double interval_value() const override { return filter_.estimate().value; }
    int map_position() const override { return filter_.map_position(); }
    double start_mass() const override { return filter_.belief().probs.front(); }
    int max_interval() const override { return filter_.space().max_interval(); }
    const WorkCounter& work() const override { return filter_.work(); }

private:
    JumpBackFilter filter_;
};

class PointerLayer final : public RhythmLayer {
public:
    PointerLayer(PointerHmm hmm, bool beat_level)
        : hmm_(std::move(hmm)),
          beat_level_(beat_level),
          belief_(hmm_.num_states(), 1.0 / static_cast<double>(hmm_.num_states())),
          prediction_(hmm_.num_states()),
          posterior_(hmm_.num_states()) {
        decode_ = hmm_beat_positions(hmm_, belief_);
    }

    Step step(double activation) override {
        const bool gated =
            hmm_forward_step_into(hmm_, belief_, activation, prediction_, posterior_, &work_);
        std::swap(belief_, posterior_);
        decode_ = hmm_beat_positions(hmm_, belief_);
        return {gated, decode_.is_beat};
    }
    int interval() const override { return decode_.row_len; }
    double interval_value() const override {
        return beat_level_ ? decode_.tempo : static_cast<double>(decode_.row_len);
    }
    int map_position() const override { return decode_.position; }
    double start_mass() const override {
        double mass = 0.0;
        for (int m = hmm_.min_len(); m <= hmm_.max_len(); ++m) {
            mass += belief_[hmm_.row_offset(m)];
        }
        return mass;
    }
    int max_interval() const override { return hmm_.max_len(); }
    const WorkCounter& work() const override { return work_; }

private:
    PointerHmm hmm_;
    bool beat_level_;
    std::vector<double> belief_;
    std::vector<double> prediction_;
    std::vector<double> posterior_;
    PointerDecode decode_;
    WorkCounter work_;
};

}  // namespace
}  // namespace detail

std::string_view to_string(Engine engine) {
    return engine == Engine::one_dim ? "1d" : "2d";
}

Tracker::Tracker(const TrackerConfig& config)
    : config_(config) {
    SpaceConfig beat = config_.space;
    beat.level = Level::beat;
    beat.validate();
    SpaceConfig bar = beat.bar_level(beat.bar_min, beat.bar_max);
    if (config_.bar_threshold) {
        bar.threshold = *config_.bar_threshold;
    }
    bar.validate();

    if (config_.engine == Engine::one_dim) {
        // Distinct seeds keep the two levels from sharing a random stream.
        std::optional<std::uint64_t> bar_seed;
        if (config_.seed) {
            bar_seed = *config_.seed + 0x9e3779b97f4a7c15ULL;
        }
        beat_ = std::make_unique<detail::JumpBackLayer>(beat, config_.seed);
        bar_ = std::make_unique<detail::JumpBackLayer>(bar, bar_seed);
    } else {
        beat_ = std::make_unique<detail::PointerLayer>(
            PointerHmm::beat_space(beat, config_.p_switch), true);
        bar_ = std::make_unique<detail::PointerLayer>(
            PointerHmm::cascade_bar_space(bar, config_.p_switch), false);
    }
}

Tracker::~Tracker() = default;
Tracker::Tracker(Tracker&&) noexcept = default;
Tracker& Tracker::operator=(Tracker&&) noexcept = default;

std::optional<RhythmEvent> Tracker::process_frame(const ActivationFrame& frame) {
    if (frame.index != frames_) {
        throw SequencingError("expected frame " + std::to_string(frames_) + ", got " +
                              std::to_string(frame.index));
    }
    if (!(frame.downbeat >= 0.0 && frame.downbeat <= 1.0)) {
        throw ParameterError("downbeat activation outside [0, 1]");
    }

    const auto beat_step = beat_->step(frame.beat);
    ++frames_;
    if (!(beat_step.gated && beat_step.at_start)) {
        return std::nullopt;
    }

    const auto bar_step = bar_->step(frame.downbeat);
    const bool downbeat = bar_step.gated && bar_step.at_start;

    RhythmEvent event;
    event.frame_index = frame.index;
    event.time = static_cast<double>(frame.index) * config_.space.delta;
    event.kind = downbeat ? EventKind::downbeat : EventKind::beat;
    event.tempo = beat_->interval_value();
    event.meter = bar_->interval();
    event.beat_confidence = beat_->start_mass();
    event.warmup = frame.index < beat_->max_interval();

    if (downbeat) {
        beats_since_downbeat_ = 0;
        event.beat_in_bar = 1;
    } else if (beats_since_downbeat_ >= 0) {
        ++beats_since_downbeat_;
        event.beat_in_bar = beats_since_downbeat_ + 1;
    } else {
        event.beat_in_bar = std::max(2, bar_->map_position());
    }

    events_.push_back(event);
    return event;
}

TrackingSummary Tracker::finalize() const {
    TrackingSummary summary;
    summary.events = events_;
    summary.tempo = current_tempo();
    summary.meter = current_meter();
    summary.frames = frames_;
    return summary;
}

double Tracker::current_tempo() const { return beat_->interval_value(); }
int Tracker::current_beat_interval() const { return beat_->interval(); }
int Tracker::current_meter() const { return bar_->interval(); }

const WorkCounter& Tracker::beat_work() const { return beat_->work(); }
const WorkCounter& Tracker::bar_work() const { return bar_->work(); }

TrackingSummary track_stream(const ActivationStream& stream, TrackerConfig config) {
    config.space.delta = stream.delta;
    Tracker tracker(config);
    for (const auto& frame : stream.frames) {
        tracker.process_frame(frame);
    }
    return tracker.finalize();
}

Annotation to_annotation(const std::vector<RhythmEvent>& events) {
    Annotation out;
    out.beats.reserve(events.size());
    for (const auto& e : events) {
        out.beats.push_back({e.time, e.beat_in_bar});
    }
    return out;
}

}  // namespace jumpback
