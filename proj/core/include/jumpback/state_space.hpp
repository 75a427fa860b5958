#pragma once

// One-dimensional jump-back state space.
//
// A pointer walks along frame positions 1..S_max within one beat (or bar)
// interval. At every step it either advances by one position or jumps back to
// position 1, the beat (downbeat) state, with a per-position probability
// gamma. The gamma vector is learned online from the observations, and its
// peak encodes the local tempo (or meter).
//
// Positions are 1-based in the model; every vector below stores position p at
// index p - 1.

#include "jumpback/work_counter.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace jumpback {

enum class Level { beat, bar };

/// Which predicted position feeds the reward for gamma[s].
///
/// `source` uses the mass that left position s without jumping (it sits at
/// s + 1 after prediction). `target` uses position s itself; it settles the
/// gamma peak one position after the true period and is kept for comparison.
enum class RewardAlignment { source, target };

struct SpaceConfig {
    double delta = 0.02;       // frame hop, seconds
    double tempo_min = 55.0;   // BPM
    double tempo_max = 215.0;  // BPM
    double epsilon = 1e-5;     // likelihood of every non-beat hypothesis
    double threshold = 0.4;    // activation gate
    double lambda = 0.99;      // forgetting factor of the gamma update
    Level level = Level::beat;
    int bar_min = 2;  // beats per bar, bar level only
    int bar_max = 6;
    RewardAlignment alignment = RewardAlignment::source;

    /// Throws ParameterError when any invariant is violated.
    void validate() const;

    /// Shortest interval in positions (frames for beat level, beats for bar level).
    int min_interval() const;
    /// Longest interval; also the number of states.
    int max_interval() const;

    /// Copy of this config switched to bar level with the given bar range.
    SpaceConfig bar_level(int min_len, int max_len) const;
};

/// Number of frames in one interval of `beats_per_bar` beats at `tempo` BPM:
/// round(B * 60 / (tempo * delta)), halves rounded away from zero, at least 1.
int frames_per_interval(int beats_per_bar, double tempo, double delta);

class JumpBackSpace {
public:
    /// Uniform 0.5 over the eligible range, 1 at S_max, 0 below S_min.
    explicit JumpBackSpace(const SpaceConfig& config);

    /// Explicit gamma vector of length S_max; boundary rules are re-asserted
    /// and the rest is clamped to [0, 1].
    JumpBackSpace(const SpaceConfig& config, std::vector<double> gamma);

    const SpaceConfig& config() const noexcept { return config_; }
    int num_states() const noexcept { return max_interval_; }
    int min_interval() const noexcept { return min_interval_; }
    int max_interval() const noexcept { return max_interval_; }

    std::span<const double> gamma() const noexcept { return gamma_; }

    /// Overwrites the eligible range [S_min, S_max - 1] and re-asserts the
    /// boundary rules.
    void set_gamma(std::span<const double> gamma);

    bool operator==(const JumpBackSpace& other) const;

private:
    friend void apply_reward(JumpBackSpace& space, std::span<const double> signal);

    void enforce_bounds();

    SpaceConfig config_;
    int min_interval_;
    int max_interval_;
    std::vector<double> gamma_;
};

struct BeliefState {
    std::vector<double> probs;
    std::int64_t frame_index = 0;

    bool operator==(const BeliefState&) const = default;
};

/// Inputs to one reward step: the prediction for frame k+1, the posterior at
/// frame k, the posterior at frame k+1, and whether frame k+1 passed the gate.
struct RewardTrace {
    std::vector<double> predicted;
    std::vector<double> prev_posterior;
    std::vector<double> new_posterior;
    bool gated = false;
};

/// Uniform belief and uniform gamma without a seed; otherwise a seeded
/// random simplex point and seeded random gamma on the eligible range.
std::pair<JumpBackSpace, BeliefState> init_space(const SpaceConfig& config,
                                                 std::optional<std::uint64_t> seed = std::nullopt);

/// One-step-ahead prediction through the jump-back transition.
std::vector<double> predict(const BeliefState& belief, const JumpBackSpace& space);

/// Allocation-free prediction. `out` must have S_max entries.
void predict_into(std::span<const double> probs, const JumpBackSpace& space,
                  std::span<double> out, WorkCounter* counter = nullptr);

/// Observation update for activation b. Below the gate the posterior equals
/// the prediction exactly; otherwise position 1 is weighted by b, the rest by
/// epsilon, and the result is normalized.
BeliefState update(std::span<const double> predicted, double activation,
                   const JumpBackSpace& space, std::int64_t frame_index = 0);

/// Allocation-free update. Returns true when the frame passed the gate.
bool update_into(std::span<const double> predicted, double activation,
                 const JumpBackSpace& space, std::span<double> out,
                 WorkCounter* counter = nullptr);

/// The per-position update signal, zero outside the eligible range.
std::vector<double> reward_signal(const JumpBackSpace& space, const RewardTrace& trace);

/// gamma[s] <- lambda * gamma[s] + (1 - lambda) * signal[s] over the eligible
/// range, clamped to [0, 1]; boundary positions keep their pinned values.
void apply_reward(JumpBackSpace& space, std::span<const double> signal);

JumpBackSpace reward_update(JumpBackSpace space, const RewardTrace& trace);

struct IntervalEstimate {
    int position = 0;    // argmax of gamma over the eligible range
    double value = 0.0;  // BPM for beat level, beats per bar for bar level
};

/// Smallest-index argmax of gamma over [S_min, S_max - 1].
IntervalEstimate decode_interval(const JumpBackSpace& space);

/// Streaming owner of one (space, belief) pair with preallocated buffers.
class JumpBackFilter {
public:
    explicit JumpBackFilter(const SpaceConfig& config,
                            std::optional<std::uint64_t> seed = std::nullopt);
    JumpBackFilter(JumpBackSpace space, BeliefState belief);

    struct Step {
        bool gated = false;
        bool at_start = false;  // posterior argmax is position 1
    };

    /// predict -> update -> reward for one observation.
    Step step(double activation);

    const JumpBackSpace& space() const noexcept { return space_; }
    const BeliefState& belief() const noexcept { return belief_; }
    const RewardTrace& last_trace() const noexcept { return trace_; }
    const WorkCounter& work() const noexcept { return work_; }

    IntervalEstimate estimate() const { return decode_interval(space_); }

    /// Smallest-index argmax of the posterior, 1-based.
    int map_position() const;

private:
    explicit JumpBackFilter(std::pair<JumpBackSpace, BeliefState> state);

    JumpBackSpace space_;
    BeliefState belief_;
    RewardTrace trace_;
    std::vector<double> signal_;
    WorkCounter work_;
};

}  // namespace jumpback
