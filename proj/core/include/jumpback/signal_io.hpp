#pragma once

// Activation and annotation files, and the synthetic activation generator.
//
// Activation file:
//   #delta=<float> frames=<int> channels=beat,downbeat
//   <beat_act> <downbeat_act>        one line per frame, values in [0, 1]
//
// Annotation file:
//   <time_sec> <beat_pos>            beat_pos 1 marks a downbeat
// Lines starting with '#' are comments.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace jumpback {

struct ActivationFrame {
    double beat = 0.0;
    double downbeat = 0.0;
    std::int64_t index = 0;
};

struct ActivationStream {
    double delta = 0.02;
    std::vector<ActivationFrame> frames;

    double duration() const { return delta * static_cast<double>(frames.size()); }
};

struct AnnotatedBeat {
    double time = 0.0;
    int beat_in_bar = 1;

    bool operator==(const AnnotatedBeat&) const = default;
};

struct Annotation {
    std::vector<AnnotatedBeat> beats;

    std::vector<double> beat_times() const;
    std::vector<double> downbeat_times() const;
};

ActivationStream parse_activations(std::istream& in);
ActivationStream parse_activations(const std::filesystem::path& path);

void write_activations(std::ostream& out, const ActivationStream& stream);
void write_activations(const std::filesystem::path& path, const ActivationStream& stream);

Annotation parse_annotations(std::istream& in);
Annotation parse_annotations(const std::filesystem::path& path);

void write_annotations(std::ostream& out, const Annotation& annotation);

struct SynthParams {
    double tempo = 120.0;  // BPM
    int meter = 4;         // beats per bar
    double delta = 0.02;
    double duration = 10.0;  // seconds
    double pulse_amp = 1.0;
    double noise_std = 0.0;
    int jitter_frames = 0;
    std::uint64_t seed = 0;
};

struct SyntheticStream {
    ActivationStream activations;
    Annotation annotation;  // actual pulse times, after jitter
    int period_frames = 0;
};

/// Pulse train with one beat every round(60 / (tempo * delta)) frames and a
/// downbeat on every meter-th beat, starting at frame 0. Gaussian noise is
/// clipped to [0, 1]; jitter moves each pulse uniformly within +-jitter_frames.
SyntheticStream synth_stream(const SynthParams& params);

}  // namespace jumpback
