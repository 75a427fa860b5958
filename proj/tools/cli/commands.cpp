#include "commands.hpp"

#include "jumpback/errors.hpp"
#include "jumpback/evaluation.hpp"
#include "jumpback/pointer_hmm.hpp"
#include "jumpback/signal_io.hpp"
#include "jumpback/state_space.hpp"
#include "jumpback/tracker.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace jumpback::cli {

namespace {

struct Options {
    SpaceConfig space;
    std::string engine = "1d";
    std::string format = "text";
    std::string alignment = "source";
    std::optional<std::uint64_t> seed;
    std::optional<double> bar_threshold;
    double p_switch = kDefaultSwitchProbability;

    struct {
        std::string input;
        std::string output = "-";
    } track;

    struct {
        SynthParams params;
        std::string output = "-";
        std::string annotations;
    } synth;

    struct {
        std::string estimated;
        std::string reference;
        double tolerance = kDefaultTolerance;
    } eval;

    struct {
        std::vector<std::string> inputs;
        int synthetic_streams = 0;
        double synthetic_duration = 30.0;
        double synthetic_tempo = 120.0;
        int synthetic_meter = 4;
        bool no_timing = false;
    } bench;
};

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

ReportFormat report_format(const Options& o) {
    return o.format == "csv" ? ReportFormat::csv : ReportFormat::text;
}

Engine parse_engine(const std::string& name) {
    if (name == "1d") {
        return Engine::one_dim;
    }
    if (name == "2d") {
        return Engine::baseline_2d;
    }
    throw ParameterError("engine '" + name + "' is not valid here; use 1d or 2d");
}

TrackerConfig tracker_config(const Options& o) {
    TrackerConfig config;
    config.space = o.space;
    config.space.alignment =
        o.alignment == "target" ? RewardAlignment::target : RewardAlignment::source;
    config.engine = parse_engine(o.engine);
    config.seed = o.seed;
    config.bar_threshold = o.bar_threshold;
    config.p_switch = o.p_switch;
    return config;
}

// Writes through `out` when path is "-", otherwise to the file.
void with_output(const std::string& path, std::ostream& out,
                 const std::function<void(std::ostream&)>& write) {
    if (path == "-") {
        write(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw FormatError("cannot write " + path);
    }
    write(file);
}

void write_events_csv(std::ostream& out, const std::vector<RhythmEvent>& events) {
    out << "time,kind,beat_in_bar,tempo,meter,beat_confidence,warmup\n";
    for (const auto& e : events) {
        out << fixed(e.time, 6) << ',' << (e.kind == EventKind::downbeat ? "downbeat" : "beat")
            << ',' << e.beat_in_bar << ',' << fixed(e.tempo, 6) << ',' << e.meter << ','
            << fixed(e.beat_confidence, 6) << ',' << (e.warmup ? 1 : 0) << '\n';
    }
}

std::string summary_line(const TrackingSummary& summary) {
    std::size_t downbeats = 0;
    for (const auto& e : summary.events) {
        downbeats += e.kind == EventKind::downbeat ? 1 : 0;
    }
    return "tempo=" + fixed(summary.tempo, 6) + " meter=" + std::to_string(summary.meter) +
           " frames=" + std::to_string(summary.frames) +
           " beats=" + std::to_string(summary.events.size()) +
           " downbeats=" + std::to_string(downbeats);
}

int cmd_track(const Options& o, std::ostream& out) {
    const auto stream = parse_activations(std::filesystem::path(o.track.input));
    const auto summary = track_stream(stream, tracker_config(o));
    const auto summary_text = summary_line(summary);

    with_output(o.track.output, out, [&](std::ostream& os) {
        if (report_format(o) == ReportFormat::csv) {
            write_events_csv(os, summary.events);
        } else {
            write_annotations(os, to_annotation(summary.events));
            os << "# " << summary_text << '\n';
        }
    });
    if (o.track.output != "-") {
        out << summary_text << '\n';
    }
    return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
    SynthParams params = o.synth.params;
    params.delta = o.space.delta;
    params.seed = o.seed.value_or(0);
    const auto synth = synth_stream(params);
    with_output(o.synth.output, out,
                [&](std::ostream& os) { write_activations(os, synth.activations); });
    if (!o.synth.annotations.empty()) {
        with_output(o.synth.annotations, out,
                    [&](std::ostream& os) { write_annotations(os, synth.annotation); });
    }
    return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const auto estimated = parse_annotations(std::filesystem::path(o.eval.estimated));
    const auto reference = parse_annotations(std::filesystem::path(o.eval.reference));
    const auto beats =
        f_measure(estimated.beat_times(), reference.beat_times(), o.eval.tolerance);
    const auto downbeats =
        f_measure(estimated.downbeat_times(), reference.downbeat_times(), o.eval.tolerance);
    const auto format = report_format(o);
    write_score(out, "beats", beats, format, true);
    write_score(out, "downbeats", downbeats, format, false);
    return kOk;
}

int cmd_bench(const Options& o, std::ostream& out) {
    std::vector<NamedStream> streams;
    for (const auto& path : o.bench.inputs) {
        streams.push_back({path, parse_activations(std::filesystem::path(path))});
    }
    for (int i = 0; i < o.bench.synthetic_streams; ++i) {
        SynthParams params;
        params.tempo = o.bench.synthetic_tempo;
        params.meter = o.bench.synthetic_meter;
        params.delta = o.space.delta;
        params.duration = o.bench.synthetic_duration;
        params.seed = o.seed.value_or(0) + static_cast<std::uint64_t>(i);
        streams.push_back({"synthetic-" + std::to_string(i), synth_stream(params).activations});
    }

    std::vector<Engine> engines;
    if (o.engine == "both") {
        engines = {Engine::one_dim, Engine::baseline_2d};
    } else {
        engines = {parse_engine(o.engine)};
    }

    Options base = o;
    base.engine = "1d";
    const auto config = tracker_config(base);
    const auto format = report_format(o);
    bool header = true;
    for (const auto engine : engines) {
        const auto report = bench_tracker(streams, engine, config);
        write_bench(out, report, format, !o.bench.no_timing, header);
        header = false;
    }
    return kOk;
}

int cmd_count_states(const Options& o, std::ostream& out) {
    const auto format = report_format(o);
    if (format == ReportFormat::csv) {
        out << "kind,states\n";
    }
    for (const auto kind : kAllStateSpaceKinds) {
        const auto count = count_states(kind, o.space);
        if (format == ReportFormat::csv) {
            out << to_string(kind) << ',' << count << '\n';
        } else {
            out << to_string(kind) << '=' << count << '\n';
        }
    }
    return kOk;
}

void add_space_options(CLI::App& app, Options& o) {
    app.add_option("--delta", o.space.delta, "Frame hop in seconds")->capture_default_str();
    app.add_option("--tempo-min", o.space.tempo_min, "Slowest tempo, BPM")->capture_default_str();
    app.add_option("--tempo-max", o.space.tempo_max, "Fastest tempo, BPM")->capture_default_str();
    app.add_option("--epsilon", o.space.epsilon, "Likelihood of non-beat states")
        ->capture_default_str();
    app.add_option("--threshold", o.space.threshold, "Activation gate")->capture_default_str();
    app.add_option("--lambda", o.space.lambda, "Forgetting factor of the jump-back update")
        ->capture_default_str();
    app.add_option("--bar-min", o.space.bar_min, "Shortest bar, beats")->capture_default_str();
    app.add_option("--bar-max", o.space.bar_max, "Longest bar, beats")->capture_default_str();
    app.add_option("--bar-threshold", o.bar_threshold,
                   "Downbeat activation gate (defaults to --threshold)");
    app.add_option("--engine", o.engine, "State space engine")
        ->check(CLI::IsMember({"1d", "2d", "both"}))
        ->capture_default_str();
    app.add_option("--seed", o.seed, "Seed for random initialization and synthesis");
    app.add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"text", "csv"}))
        ->capture_default_str();
    app.add_option("--reward-alignment", o.alignment, "Which predicted position rewards gamma[s]")
        ->check(CLI::IsMember({"source", "target"}))
        ->capture_default_str();
    app.add_option("--p-switch", o.p_switch, "Tempo/meter switch probability of the 2D baseline")
        ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Jump-back state space beat, downbeat, tempo and meter tracker", "jumpback"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults");
    add_space_options(app, o);

    auto* track = app.add_subcommand("track", "Track beats and downbeats in an activation file");
    track->fallthrough();
    track->add_option("input", o.track.input, "Activation file")->required();
    track->add_option("-o,--output", o.track.output, "Output path, '-' for stdout")
        ->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Write a synthetic activation stream");
    synth->fallthrough();
    auto& sp = o.synth.params;
    synth->add_option("--tempo", sp.tempo, "BPM")->capture_default_str();
    synth->add_option("--meter", sp.meter, "Beats per bar")->capture_default_str();
    synth->add_option("--duration", sp.duration, "Seconds")->capture_default_str();
    synth->add_option("--amp", sp.pulse_amp, "Pulse amplitude")->capture_default_str();
    synth->add_option("--noise", sp.noise_std, "Gaussian noise std")->capture_default_str();
    synth->add_option("--jitter", sp.jitter_frames, "Max pulse displacement, frames")
        ->capture_default_str();
    synth->add_option("-o,--output", o.synth.output, "Activation output, '-' for stdout")
        ->capture_default_str();
    synth->add_option("--annotations", o.synth.annotations, "Ground-truth annotation output");

    auto* eval = app.add_subcommand("eval", "Score estimated beats against a reference");
    eval->fallthrough();
    eval->add_option("estimated", o.eval.estimated, "Estimated annotation file")->required();
    eval->add_option("reference", o.eval.reference, "Reference annotation file")->required();
    eval->add_option("--tolerance", o.eval.tolerance, "Match window, seconds")
        ->capture_default_str();

    auto* bench = app.add_subcommand("bench", "Time the tracker on activation streams");
    bench->fallthrough();
    bench->add_option("inputs", o.bench.inputs, "Activation files");
    bench->add_option("--synthetic", o.bench.synthetic_streams, "Add N synthetic streams")
        ->capture_default_str();
    bench->add_option("--synthetic-duration", o.bench.synthetic_duration, "Seconds")
        ->capture_default_str();
    bench->add_option("--synthetic-tempo", o.bench.synthetic_tempo, "BPM")->capture_default_str();
    bench->add_option("--synthetic-meter", o.bench.synthetic_meter, "Beats per bar")
        ->capture_default_str();
    bench->add_flag("--no-timing", o.bench.no_timing, "Report deterministic counts only");

    auto* count = app.add_subcommand("count-states", "Print the state count of each construction");
    count->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*track) {
            return cmd_track(o, out);
        }
        if (*synth) {
            return cmd_synth(o, out);
        }
        if (*eval) {
            return cmd_eval(o, out);
        }
        if (*bench) {
            return cmd_bench(o, out);
        }
        if (*count) {
            return cmd_count_states(o, out);
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DegenerateStateError& e) {
        err << "error: " << e.what() << '\n';
        return kNumericError;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kDataError;
    }
    return kUsageError;
}

}  // namespace jumpback::cli
