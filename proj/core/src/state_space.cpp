#include "jumpback/state_space.hpp"

#include "jumpback/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace jumpback {

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ParameterError(message);
    }
}

void require_length(std::span<const double> v, int expected, const char* name) {
    if (v.size() != static_cast<std::size_t>(expected)) {
        throw ParameterError(std::string(name) + " has " + std::to_string(v.size()) +
                             " entries, expected " + std::to_string(expected));
    }
}

std::size_t argmax_first(std::span<const double> v) {
    // std::max_element returns the first of equal maxima.
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

void SpaceConfig::validate() const {
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    require(std::isfinite(tempo_min) && tempo_min > 0.0, "tempo_min must be positive");
    require(std::isfinite(tempo_max) && tempo_max > tempo_min,
            "tempo_max must be greater than tempo_min");
    require(lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1]");
    require(epsilon > 0.0 && epsilon < threshold && threshold <= 1.0,
            "need 0 < epsilon < threshold <= 1");
    if (level == Level::beat) {
        const int lo = min_interval();
        const int hi = max_interval();
        require(lo >= 1, "shortest beat interval must be at least one frame");
        require(hi > lo, "tempo range collapses to a single interval length at this hop size");
    } else {
        require(bar_min >= 1, "bar_min must be at least 1");
        require(bar_max > bar_min, "bar_max must be greater than bar_min");
    }
}

int SpaceConfig::min_interval() const {
    return level == Level::beat ? frames_per_interval(1, tempo_max, delta) : bar_min;
}

int SpaceConfig::max_interval() const {
    return level == Level::beat ? frames_per_interval(1, tempo_min, delta) : bar_max;
}

SpaceConfig SpaceConfig::bar_level(int min_len, int max_len) const {
    SpaceConfig out = *this;
    out.level = Level::bar;
    out.bar_min = min_len;
    out.bar_max = max_len;
    return out;
}

int frames_per_interval(int beats_per_bar, double tempo, double delta) {
    require(beats_per_bar >= 1, "beats per bar must be at least 1");
    require(std::isfinite(tempo) && tempo > 0.0, "tempo must be positive");
    require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
    const double frames = beats_per_bar * 60.0 / (tempo * delta);
    // std::round rounds halves away from zero.
    const double rounded = std::round(frames);
    return rounded < 1.0 ? 1 : static_cast<int>(rounded);
}

// ---------------------------------------------------------------------------
// JumpBackSpace

JumpBackSpace::JumpBackSpace(const SpaceConfig& config)
    : config_(config) {
    config_.validate();
    min_interval_ = config_.min_interval();
    max_interval_ = config_.max_interval();
    gamma_.assign(static_cast<std::size_t>(max_interval_), 0.5);
    enforce_bounds();
}

JumpBackSpace::JumpBackSpace(const SpaceConfig& config, std::vector<double> gamma)
    : config_(config) {
    config_.validate();
    min_interval_ = config_.min_interval();
    max_interval_ = config_.max_interval();
    require_length(gamma, max_interval_, "gamma");
    gamma_ = std::move(gamma);
    enforce_bounds();
}

void JumpBackSpace::set_gamma(std::span<const double> gamma) {
    require_length(gamma, max_interval_, "gamma");
    std::copy(gamma.begin(), gamma.end(), gamma_.begin());
    enforce_bounds();
}

void JumpBackSpace::enforce_bounds() {
    for (int s = 1; s < min_interval_; ++s) {
        gamma_[s - 1] = 0.0;
    }
    for (int s = min_interval_; s < max_interval_; ++s) {
        double& g = gamma_[s - 1];
        g = std::isnan(g) ? 0.0 : std::clamp(g, 0.0, 1.0);
    }
    gamma_[max_interval_ - 1] = 1.0;
}

bool JumpBackSpace::operator==(const JumpBackSpace& other) const {
    return min_interval_ == other.min_interval_ && max_interval_ == other.max_interval_ &&
           gamma_ == other.gamma_;
}

// ---------------------------------------------------------------------------
// Inference

std::pair<JumpBackSpace, BeliefState> init_space(const SpaceConfig& config,
                                                 std::optional<std::uint64_t> seed) {
    JumpBackSpace space(config);
    const auto n = static_cast<std::size_t>(space.num_states());
    BeliefState belief;
    belief.probs.assign(n, 1.0 / static_cast<double>(n));

    if (seed) {
        std::mt19937_64 rng(*seed);
        // Normalized unit exponentials are a uniform draw from the simplex.
        std::exponential_distribution<double> exponential(1.0);
        double total = 0.0;
        for (double& p : belief.probs) {
            p = exponential(rng);
            total += p;
        }
        for (double& p : belief.probs) {
            p /= total;
        }

        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> gamma(n, 0.0);
        for (int s = space.min_interval(); s < space.max_interval(); ++s) {
            gamma[s - 1] = unit(rng);
        }
        space.set_gamma(gamma);
    }
    return {std::move(space), std::move(belief)};
}

void predict_into(std::span<const double> probs, const JumpBackSpace& space,
                  std::span<double> out, WorkCounter* counter) {
    const int n = space.num_states();
    require_length(probs, n, "belief");
    require_length(out, n, "prediction buffer");
    const auto gamma = space.gamma();

    // Walk backwards so the advance can be written in place of the source.
    double jumped = 0.0;
    for (int i = n - 1; i >= 1; --i) {
        jumped += gamma[i] * probs[i];
        if (i + 1 < n) {
            out[i + 1] = (1.0 - gamma[i]) * probs[i];
        }
    }
    jumped += gamma[0] * probs[0];
    if (n > 1) {
        out[1] = (1.0 - gamma[0]) * probs[0];
    }
    out[0] = jumped;

    if (counter != nullptr) {
        counter->frames += 1;
        counter->states_touched += static_cast<std::uint64_t>(n);
        counter->multiply_adds += 2 * static_cast<std::uint64_t>(n);
    }
}

std::vector<double> predict(const BeliefState& belief, const JumpBackSpace& space) {
    std::vector<double> out(static_cast<std::size_t>(space.num_states()));
    predict_into(belief.probs, space, out);
    return out;
}

bool update_into(std::span<const double> predicted, double activation,
                 const JumpBackSpace& space, std::span<double> out, WorkCounter* counter) {
    const int n = space.num_states();
    require_length(predicted, n, "prediction");
    require_length(out, n, "posterior buffer");
    if (!(activation >= 0.0 && activation <= 1.0)) {
        throw ParameterError("activation " + std::to_string(activation) + " outside [0, 1]");
    }
    const SpaceConfig& config = space.config();
    const bool gated = activation >= config.threshold;

    if (!gated) {
        // Constant likelihood cancels in the normalization.
        const double total = std::accumulate(predicted.begin(), predicted.end(), 0.0);
        if (!(total > 0.0)) {
            throw DegenerateStateError("predicted distribution carries no mass");
        }
        std::copy(predicted.begin(), predicted.end(), out.begin());
        if (counter != nullptr) {
            counter->multiply_adds += static_cast<std::uint64_t>(n);
        }
        return false;
    }

    out[0] = activation * predicted[0];
    double z = out[0];
    for (int i = 1; i < n; ++i) {
        out[i] = config.epsilon * predicted[i];
        z += out[i];
    }
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw DegenerateStateError("observation update normalizer is zero");
    }
    const double inv = 1.0 / z;
    for (double& p : out) {
        p *= inv;
    }
    if (counter != nullptr) {
        counter->multiply_adds += 2 * static_cast<std::uint64_t>(n);
    }
    return true;
}

BeliefState update(std::span<const double> predicted, double activation,
                   const JumpBackSpace& space, std::int64_t frame_index) {
    BeliefState out;
    out.probs.resize(predicted.size());
    out.frame_index = frame_index;
    update_into(predicted, activation, space, out.probs);
    return out;
}

namespace {

void reward_signal_into(const JumpBackSpace& space, const RewardTrace& trace,
                        std::span<double> signal) {
    const int n = space.num_states();
    require_length(trace.predicted, n, "trace.predicted");
    require_length(trace.prev_posterior, n, "trace.prev_posterior");
    require_length(trace.new_posterior, n, "trace.new_posterior");
    require_length(signal, n, "reward signal");

    const int lo = space.min_interval();
    const int hi = space.max_interval();
    std::fill(signal.begin(), signal.end(), 0.0);

    if (trace.gated) {
        // Mass removed from non-beat positions by the update.
        const int shift = space.config().alignment == RewardAlignment::source ? 1 : 0;
        for (int s = lo; s < hi; ++s) {
            const int p = s + shift;
            signal[s - 1] = trace.predicted[p - 1] - trace.new_posterior[p - 1];
        }
        return;
    }

    // Punish the jump-back of a frame that did not look like a beat. The
    // penalty is the jumped mass, shared out by each state's contribution.
    const auto gamma = space.gamma();
    double jumped = 0.0;
    for (int s = lo; s < hi; ++s) {
        jumped += gamma[s - 1] * trace.prev_posterior[s - 1];
    }
    if (jumped <= 0.0) {
        return;
    }
    const double penalty = -jumped;
    for (int s = lo; s < hi; ++s) {
        signal[s - 1] = penalty * (gamma[s - 1] * trace.prev_posterior[s - 1]) / jumped;
    }
}

}  // namespace

std::vector<double> reward_signal(const JumpBackSpace& space, const RewardTrace& trace) {
    std::vector<double> signal(static_cast<std::size_t>(space.num_states()), 0.0);
    reward_signal_into(space, trace, signal);
    return signal;
}

void apply_reward(JumpBackSpace& space, std::span<const double> signal) {
    require_length(signal, space.num_states(), "reward signal");
    const double lambda = space.config().lambda;
    for (int s = space.min_interval(); s < space.max_interval(); ++s) {
        double& g = space.gamma_[s - 1];
        g = lambda * g + (1.0 - lambda) * signal[s - 1];
    }
    space.enforce_bounds();
}

JumpBackSpace reward_update(JumpBackSpace space, const RewardTrace& trace) {
    const auto signal = reward_signal(space, trace);
    apply_reward(space, signal);
    return space;
}

IntervalEstimate decode_interval(const JumpBackSpace& space) {
    const int lo = space.min_interval();
    const int hi = space.max_interval();
    const auto eligible = space.gamma().subspan(static_cast<std::size_t>(lo - 1),
                                                static_cast<std::size_t>(hi - lo));
    IntervalEstimate out;
    out.position = lo + static_cast<int>(argmax_first(eligible));
    if (space.config().level == Level::beat) {
        out.value = 60.0 / (out.position * space.config().delta);
    } else {
        out.value = out.position;
    }
    return out;
}

// ---------------------------------------------------------------------------
// JumpBackFilter

JumpBackFilter::JumpBackFilter(const SpaceConfig& config, std::optional<std::uint64_t> seed)
    : JumpBackFilter(init_space(config, seed)) {}

JumpBackFilter::JumpBackFilter(std::pair<JumpBackSpace, BeliefState> state)
    : JumpBackFilter(std::move(state.first), std::move(state.second)) {}

JumpBackFilter::JumpBackFilter(JumpBackSpace space, BeliefState belief)
    : space_(std::move(space)), belief_(std::move(belief)) {
    const auto n = static_cast<std::size_t>(space_.num_states());
    require_length(belief_.probs, static_cast<int>(n), "belief");
    trace_.predicted.assign(n, 0.0);
    trace_.prev_posterior.assign(n, 0.0);
    trace_.new_posterior.assign(n, 0.0);
    signal_.assign(n, 0.0);
}

JumpBackFilter::Step JumpBackFilter::step(double activation) {
    std::copy(belief_.probs.begin(), belief_.probs.end(), trace_.prev_posterior.begin());
    predict_into(trace_.prev_posterior, space_, trace_.predicted, &work_);
    trace_.gated = update_into(trace_.predicted, activation, space_, trace_.new_posterior, &work_);
    reward_signal_into(space_, trace_, signal_);
    apply_reward(space_, signal_);
    std::copy(trace_.new_posterior.begin(), trace_.new_posterior.end(), belief_.probs.begin());
    belief_.frame_index += 1;

    Step out;
    out.gated = trace_.gated;
    out.at_start = map_position() == 1;
    return out;
}

int JumpBackFilter::map_position() const {
    return static_cast<int>(argmax_first(belief_.probs)) + 1;
}

}  // namespace jumpback
