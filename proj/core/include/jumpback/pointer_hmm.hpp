#pragma once

// Two-dimensional efficient pointer HMM used as a baseline.
//
// One row per interval length m in [min_len, max_len]; row m holds positions
// 1..m. Inside a row the pointer advances one position per step. From the last
// position it wraps to position 1 of the same row, or of an adjacent row with
// probability p_switch / 2 each. Rows at either end keep the missing half.
//
// With frame-valued rows this is the efficient beat pointer space; with rows
// counted in beats it is the cascade bar space.

#include "jumpback/state_space.hpp"
#include "jumpback/work_counter.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace jumpback {

inline constexpr double kDefaultSwitchProbability = 0.02;

struct ObservationParams {
    double epsilon = 1e-5;
    double threshold = 0.4;
};

class PointerHmm {
public:
    /// `delta` is the duration of one step in seconds; only the beat decode uses it.
    PointerHmm(int min_len, int max_len, double delta, ObservationParams obs,
               double p_switch = kDefaultSwitchProbability);

    /// Rows M(T_max)..M(T_min) at the config's hop size.
    static PointerHmm beat_space(const SpaceConfig& config,
                                 double p_switch = kDefaultSwitchProbability);
    /// Rows bar_min..bar_max, one step per beat.
    static PointerHmm cascade_bar_space(const SpaceConfig& config,
                                        double p_switch = kDefaultSwitchProbability);

    int min_len() const noexcept { return min_len_; }
    int max_len() const noexcept { return max_len_; }
    int num_rows() const noexcept { return max_len_ - min_len_ + 1; }
    std::size_t num_states() const noexcept { return num_states_; }
    double delta() const noexcept { return delta_; }
    double p_switch() const noexcept { return p_switch_; }
    const ObservationParams& observation() const noexcept { return obs_; }

    /// Flat index of (row length m, 1-based position).
    std::size_t index(int row_len, int position) const;
    /// Inverse of index(): (row length, position).
    std::pair<int, int> state(std::size_t flat) const;

    std::size_t row_offset(int row_len) const;

private:
    int min_len_;
    int max_len_;
    double delta_;
    ObservationParams obs_;
    double p_switch_;
    std::size_t num_states_ = 0;
    std::vector<std::size_t> offsets_;  // by row, plus a trailing total
};

/// One predict + update step over the 2D space. Beat likelihood applies only
/// at row-start positions; below the gate the output equals the prediction.
std::vector<double> hmm_forward_step(const PointerHmm& hmm, std::span<const double> belief,
                                     double activation, WorkCounter* counter = nullptr);

/// Allocation-free variant; `prediction` is scratch and `out` receives the
/// posterior. Both need num_states() entries. Returns whether the gate opened.
bool hmm_forward_step_into(const PointerHmm& hmm, std::span<const double> belief,
                           double activation, std::span<double> prediction,
                           std::span<double> out, WorkCounter* counter = nullptr);

struct PointerDecode {
    bool is_beat = false;  // MAP state sits at a row start
    double tempo = 0.0;    // 60 / (m * delta) for the MAP row
    int row_len = 0;
    int position = 0;
};

/// MAP decode with smallest-flat-index tie-break.
PointerDecode hmm_beat_positions(const PointerHmm& hmm, std::span<const double> belief);

enum class StateSpaceKind {
    efficient_beat,    // 2D beat pointer space
    cascade_bar,       // bar space of the cascade model
    independent_bars,  // one efficient space per bar length
    cascade_total,     // efficient_beat + cascade_bar
    one_dim_beat,
    one_dim_bar,
};

inline constexpr StateSpaceKind kAllStateSpaceKinds[] = {
    StateSpaceKind::efficient_beat, StateSpaceKind::cascade_bar,
    StateSpaceKind::independent_bars, StateSpaceKind::cascade_total,
    StateSpaceKind::one_dim_beat, StateSpaceKind::one_dim_bar,
};

std::string_view to_string(StateSpaceKind kind);

/// Exact state count of a construction. Uses the config's tempo range and hop
/// for the beat rows and bar_min..bar_max for bar lengths, whatever its level.
std::uint64_t count_states(StateSpaceKind kind, const SpaceConfig& config);

}  // namespace jumpback
