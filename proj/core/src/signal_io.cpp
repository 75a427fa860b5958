#include "jumpback/signal_io.hpp"

#include "jumpback/errors.hpp"
#include "jumpback/state_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <string>
#include <string_view>

namespace jumpback {

namespace {

constexpr std::string_view kChannels = "beat,downbeat";

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    return in;
}

std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string format_shortest(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

}  // namespace

std::vector<double> Annotation::beat_times() const {
    std::vector<double> out;
    out.reserve(beats.size());
    for (const auto& b : beats) {
        out.push_back(b.time);
    }
    return out;
}

std::vector<double> Annotation::downbeat_times() const {
    std::vector<double> out;
    for (const auto& b : beats) {
        if (b.beat_in_bar == 1) {
            out.push_back(b.time);
        }
    }
    return out;
}

ActivationStream parse_activations(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("empty activation file");
    }
    const auto header = trim(line);
    if (header.empty() || header.front() != '#') {
        throw FormatError("missing '#delta=... frames=... channels=...' header");
    }

    ActivationStream stream;
    bool have_delta = false;
    bool have_frames = false;
    bool have_channels = false;
    long long declared = 0;
    for (const auto token : split_ws(header.substr(1))) {
        const auto eq = token.find('=');
        if (eq == std::string_view::npos) {
            throw FormatError("malformed header field '" + std::string(token) + "'");
        }
        const auto key = token.substr(0, eq);
        const auto value = token.substr(eq + 1);
        if (key == "delta") {
            if (!parse_number(value, stream.delta) || !std::isfinite(stream.delta)) {
                throw FormatError("unparsable delta '" + std::string(value) + "'");
            }
            have_delta = true;
        } else if (key == "frames") {
            if (!parse_number(value, declared) || declared < 0) {
                throw FormatError("unparsable frame count '" + std::string(value) + "'");
            }
            have_frames = true;
        } else if (key == "channels") {
            if (value != kChannels) {
                throw FormatError("unsupported channels '" + std::string(value) + "'");
            }
            have_channels = true;
        } else {
            throw FormatError("unknown header field '" + std::string(key) + "'");
        }
    }
    if (!have_delta || !have_frames || !have_channels) {
        throw FormatError("header needs delta, frames and channels");
    }
    if (!(stream.delta > 0.0)) {
        throw FormatError("delta must be positive");
    }

    stream.frames.reserve(static_cast<std::size_t>(declared));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto fields = split_ws(row);
        if (fields.size() != 2) {
            throw ParseError(line_no, "expected 2 columns, got " + std::to_string(fields.size()));
        }
        ActivationFrame frame;
        frame.index = static_cast<std::int64_t>(stream.frames.size());
        if (!parse_number(fields[0], frame.beat) || !parse_number(fields[1], frame.downbeat)) {
            throw ParseError(line_no, "unparsable activation value");
        }
        if (!(frame.beat >= 0.0 && frame.beat <= 1.0) ||
            !(frame.downbeat >= 0.0 && frame.downbeat <= 1.0)) {
            throw ParseError(line_no, "activation outside [0, 1]");
        }
        stream.frames.push_back(frame);
    }
    if (static_cast<long long>(stream.frames.size()) != declared) {
        throw FormatError("header declares " + std::to_string(declared) + " frames, file has " +
                          std::to_string(stream.frames.size()));
    }
    return stream;
}

ActivationStream parse_activations(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_activations(in);
}

void write_activations(std::ostream& out, const ActivationStream& stream) {
    out << "#delta=" << format_shortest(stream.delta) << " frames=" << stream.frames.size()
        << " channels=" << kChannels << '\n';
    for (const auto& f : stream.frames) {
        out << format_fixed(f.beat, 6) << ' ' << format_fixed(f.downbeat, 6) << '\n';
    }
}

void write_activations(const std::filesystem::path& path, const ActivationStream& stream) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write " + path.string());
    }
    write_activations(out, stream);
}

Annotation parse_annotations(std::istream& in) {
    Annotation annotation;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty() || row.front() == '#') {
            continue;
        }
        const auto fields = split_ws(row);
        if (fields.size() != 2) {
            throw ParseError(line_no, "expected '<time_sec> <beat_pos>'");
        }
        AnnotatedBeat beat;
        if (!parse_number(fields[0], beat.time) || !parse_number(fields[1], beat.beat_in_bar)) {
            throw ParseError(line_no, "unparsable annotation");
        }
        if (!(beat.time >= 0.0) || beat.beat_in_bar < 1) {
            throw ParseError(line_no, "negative time or beat position below 1");
        }
        if (!annotation.beats.empty() && !(beat.time > annotation.beats.back().time)) {
            throw ParseError(line_no, "times must be strictly increasing");
        }
        annotation.beats.push_back(beat);
    }
    return annotation;
}

Annotation parse_annotations(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_annotations(in);
}

void write_annotations(std::ostream& out, const Annotation& annotation) {
    for (const auto& b : annotation.beats) {
        out << format_fixed(b.time, 6) << ' ' << b.beat_in_bar << '\n';
    }
}

SyntheticStream synth_stream(const SynthParams& params) {
    if (!(params.tempo > 0.0) || !(params.delta > 0.0)) {
        throw ParameterError("tempo and delta must be positive");
    }
    if (params.meter < 1) {
        throw ParameterError("meter must be at least 1");
    }
    if (!(params.duration >= 0.0)) {
        throw ParameterError("duration must be non-negative");
    }
    if (!(params.pulse_amp >= 0.0 && params.pulse_amp <= 1.0)) {
        throw ParameterError("pulse_amp must lie in [0, 1]");
    }
    if (!(params.noise_std >= 0.0) || params.jitter_frames < 0) {
        throw ParameterError("noise_std and jitter_frames must be non-negative");
    }

    SyntheticStream out;
    out.period_frames = frames_per_interval(1, params.tempo, params.delta);
    if (2 * params.jitter_frames >= out.period_frames) {
        throw ParameterError("jitter must stay below half a beat period");
    }

    const auto n = static_cast<std::int64_t>(std::llround(params.duration / params.delta));
    out.activations.delta = params.delta;
    out.activations.frames.resize(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        out.activations.frames[static_cast<std::size_t>(k)].index = k;
    }

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> jitter(-params.jitter_frames, params.jitter_frames);

    int beat_number = 0;
    for (std::int64_t k = 0; k < n; k += out.period_frames, ++beat_number) {
        const std::int64_t at = params.jitter_frames > 0 ? k + jitter(rng) : k;
        if (at < 0 || at >= n) {
            continue;
        }
        auto& frame = out.activations.frames[static_cast<std::size_t>(at)];
        const bool downbeat = beat_number % params.meter == 0;
        frame.beat = params.pulse_amp;
        if (downbeat) {
            frame.downbeat = params.pulse_amp;
        }
        out.annotation.beats.push_back(
            {static_cast<double>(at) * params.delta, downbeat ? 1 : beat_number % params.meter + 1});
    }

    if (params.noise_std > 0.0) {
        std::normal_distribution<double> noise(0.0, params.noise_std);
        for (auto& f : out.activations.frames) {
            f.beat = std::clamp(f.beat + noise(rng), 0.0, 1.0);
            f.downbeat = std::clamp(f.downbeat + noise(rng), 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace jumpback
