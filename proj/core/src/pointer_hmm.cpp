#include "jumpback/pointer_hmm.hpp"

#include "jumpback/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace jumpback {

PointerHmm::PointerHmm(int min_len, int max_len, double delta, ObservationParams obs,
                       double p_switch)
    : min_len_(min_len), max_len_(max_len), delta_(delta), obs_(obs), p_switch_(p_switch) {
    if (min_len < 1 || max_len < min_len) {
        throw ParameterError("pointer rows need 1 <= min_len <= max_len");
    }
    if (!(delta > 0.0)) {
        throw ParameterError("delta must be positive");
    }
    if (!(p_switch >= 0.0 && p_switch <= 1.0)) {
        throw ParameterError("p_switch must lie in [0, 1]");
    }
    if (!(obs.epsilon > 0.0 && obs.epsilon < obs.threshold && obs.threshold <= 1.0)) {
        throw ParameterError("need 0 < epsilon < threshold <= 1");
    }
    offsets_.reserve(static_cast<std::size_t>(num_rows()) + 1);
    std::size_t total = 0;
    for (int m = min_len_; m <= max_len_; ++m) {
        offsets_.push_back(total);
        total += static_cast<std::size_t>(m);
    }
    offsets_.push_back(total);
    num_states_ = total;
}

PointerHmm PointerHmm::beat_space(const SpaceConfig& config, double p_switch) {
    SpaceConfig beat = config;
    beat.level = Level::beat;
    beat.validate();
    return PointerHmm(beat.min_interval(), beat.max_interval(), beat.delta,
                      {beat.epsilon, beat.threshold}, p_switch);
}

PointerHmm PointerHmm::cascade_bar_space(const SpaceConfig& config, double p_switch) {
    SpaceConfig bar = config;
    bar.level = Level::bar;
    bar.validate();
    // One step per beat; delta is not meaningful for bar rows.
    return PointerHmm(bar.bar_min, bar.bar_max, 1.0, {bar.epsilon, bar.threshold}, p_switch);
}

std::size_t PointerHmm::row_offset(int row_len) const {
    if (row_len < min_len_ || row_len > max_len_) {
        throw ParameterError("row length " + std::to_string(row_len) + " out of range");
    }
    return offsets_[static_cast<std::size_t>(row_len - min_len_)];
}

std::size_t PointerHmm::index(int row_len, int position) const {
    const std::size_t offset = row_offset(row_len);
    if (position < 1 || position > row_len) {
        throw ParameterError("position " + std::to_string(position) + " outside row " +
                             std::to_string(row_len));
    }
    return offset + static_cast<std::size_t>(position - 1);
}

std::pair<int, int> PointerHmm::state(std::size_t flat) const {
    if (flat >= num_states_) {
        throw ParameterError("flat index out of range");
    }
    const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
    const auto row = static_cast<int>(it - offsets_.begin()) - 1;
    const int row_len = min_len_ + row;
    return {row_len, static_cast<int>(flat - offsets_[static_cast<std::size_t>(row)]) + 1};
}

bool hmm_forward_step_into(const PointerHmm& hmm, std::span<const double> belief,
                           double activation, std::span<double> prediction,
                           std::span<double> out, WorkCounter* counter) {
    const std::size_t n = hmm.num_states();
    if (belief.size() != n || prediction.size() != n || out.size() != n) {
        throw ParameterError("pointer HMM buffers must have " + std::to_string(n) + " entries");
    }
    if (!(activation >= 0.0 && activation <= 1.0)) {
        throw ParameterError("activation " + std::to_string(activation) + " outside [0, 1]");
    }

    const int lo = hmm.min_len();
    const int hi = hmm.max_len();
    const double half = 0.5 * hmm.p_switch();

    for (int m = lo; m <= hi; ++m) {
        const std::size_t o = hmm.row_offset(m);
        for (int j = 1; j < m; ++j) {
            prediction[o + j] = belief[o + j - 1];
        }
        prediction[o] = 0.0;
    }
    for (int m = lo; m <= hi; ++m) {
        const std::size_t o = hmm.row_offset(m);
        const double wrap = belief[o + static_cast<std::size_t>(m) - 1];
        double stay = 1.0 - hmm.p_switch();
        if (m > lo) {
            prediction[hmm.row_offset(m - 1)] += half * wrap;
        } else {
            stay += half;
        }
        if (m < hi) {
            prediction[hmm.row_offset(m + 1)] += half * wrap;
        } else {
            stay += half;
        }
        prediction[o] += stay * wrap;
    }

    const auto& obs = hmm.observation();
    const bool gated = activation >= obs.threshold;
    std::uint64_t ops = n + 3 * static_cast<std::uint64_t>(hmm.num_rows());

    if (!gated) {
        const double total = std::accumulate(prediction.begin(), prediction.end(), 0.0);
        if (!(total > 0.0)) {
            throw DegenerateStateError("predicted distribution carries no mass");
        }
        std::copy(prediction.begin(), prediction.end(), out.begin());
        ops += n;
    } else {
        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = obs.epsilon * prediction[i];
        }
        for (int m = lo; m <= hi; ++m) {
            const std::size_t o = hmm.row_offset(m);
            out[o] = activation * prediction[o];
        }
        for (std::size_t i = 0; i < n; ++i) {
            z += out[i];
        }
        if (!(z > 0.0) || !std::isfinite(z)) {
            throw DegenerateStateError("observation update normalizer is zero");
        }
        const double inv = 1.0 / z;
        for (double& p : out) {
            p *= inv;
        }
        ops += 2 * n;
    }

    if (counter != nullptr) {
        counter->frames += 1;
        counter->states_touched += n;
        counter->multiply_adds += ops;
    }
    return gated;
}

std::vector<double> hmm_forward_step(const PointerHmm& hmm, std::span<const double> belief,
                                     double activation, WorkCounter* counter) {
    std::vector<double> prediction(hmm.num_states());
    std::vector<double> out(hmm.num_states());
    hmm_forward_step_into(hmm, belief, activation, prediction, out, counter);
    return out;
}

PointerDecode hmm_beat_positions(const PointerHmm& hmm, std::span<const double> belief) {
    if (belief.size() != hmm.num_states()) {
        throw ParameterError("belief size does not match the pointer HMM");
    }
    const auto best = static_cast<std::size_t>(
        std::max_element(belief.begin(), belief.end()) - belief.begin());
    const auto [row_len, position] = hmm.state(best);
    PointerDecode out;
    out.row_len = row_len;
    out.position = position;
    out.is_beat = position == 1;
    out.tempo = 60.0 / (row_len * hmm.delta());
    return out;
}

std::string_view to_string(StateSpaceKind kind) {
    switch (kind) {
        case StateSpaceKind::efficient_beat: return "efficient_beat";
        case StateSpaceKind::cascade_bar: return "cascade_bar";
        case StateSpaceKind::independent_bars: return "independent_bars";
        case StateSpaceKind::cascade_total: return "cascade_total";
        case StateSpaceKind::one_dim_beat: return "one_dim_beat";
        case StateSpaceKind::one_dim_bar: return "one_dim_bar";
    }
    return "unknown";
}

std::uint64_t count_states(StateSpaceKind kind, const SpaceConfig& config) {
    SpaceConfig beat = config;
    beat.level = Level::beat;
    beat.validate();
    SpaceConfig bar = config;
    bar.level = Level::bar;
    bar.validate();

    auto sum_range = [](std::uint64_t lo, std::uint64_t hi) { return (lo + hi) * (hi - lo + 1) / 2; };
    const std::uint64_t efficient =
        sum_range(static_cast<std::uint64_t>(beat.min_interval()),
                  static_cast<std::uint64_t>(beat.max_interval()));
    const std::uint64_t bar_lengths = sum_range(static_cast<std::uint64_t>(bar.bar_min),
                                                static_cast<std::uint64_t>(bar.bar_max));

    switch (kind) {
        case StateSpaceKind::efficient_beat: return efficient;
        case StateSpaceKind::cascade_bar: return bar_lengths;
        // B * sum(M) for each bar length B.
        case StateSpaceKind::independent_bars: return efficient * bar_lengths;
        case StateSpaceKind::cascade_total: return efficient + bar_lengths;
        case StateSpaceKind::one_dim_beat: return static_cast<std::uint64_t>(beat.max_interval());
        case StateSpaceKind::one_dim_bar: return static_cast<std::uint64_t>(bar.bar_max);
    }
    return 0;
}

}  // namespace jumpback
