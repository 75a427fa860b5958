#include "jumpback/errors.hpp"
#include "jumpback/signal_io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace jumpback;

TEST_SUITE("activations") {
    TEST_CASE("three-row file") {
        std::istringstream in("#delta=0.02 frames=3 channels=beat,downbeat\n"
                              "0.9 0.8\n"
                              "0.1 0.0\n"
                              "0.0 0.0\n");
        const auto s = parse_activations(in);
        CHECK(s.delta == 0.02);
        REQUIRE(s.frames.size() == 3);
        CHECK(s.frames[0].beat == 0.9);
        CHECK(s.frames[0].downbeat == 0.8);
        CHECK(s.frames[1].beat == 0.1);
        CHECK(s.frames[2].index == 2);
        CHECK(s.duration() == doctest::Approx(0.06));
    }

    TEST_CASE("value out of range names its line") {
        std::istringstream in("#delta=0.02 frames=2 channels=beat,downbeat\n"
                              "0.5 0.5\n"
                              "1.5 0.0\n");
        try {
            parse_activations(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }

    TEST_CASE("header problems") {
        auto parse = [](const std::string& text) {
            std::istringstream in(text);
            return parse_activations(in);
        };
        CHECK_THROWS_AS(parse(""), FormatError);
        CHECK_THROWS_AS(parse("0.1 0.2\n"), FormatError);
        CHECK_THROWS_AS(parse("#delta=0.02 frames=3 channels=beat,downbeat\n0 0\n"), FormatError);
        CHECK_THROWS_AS(parse("#delta=0 frames=1 channels=beat,downbeat\n0 0\n"), FormatError);
        CHECK_THROWS_AS(parse("#delta=-0.02 frames=1 channels=beat,downbeat\n0 0\n"), FormatError);
        CHECK_THROWS_AS(parse("#delta=0.02 frames=1 channels=beat\n0\n"), FormatError);
        CHECK_THROWS_AS(parse("#delta=0.02 frames=1 channels=beat,downbeat\n0.1\n"), ParseError);
        CHECK_THROWS_AS(parse("#delta=0.02 frames=1 channels=beat,downbeat\nx 0\n"), ParseError);
    }

    TEST_CASE("missing file") {
        CHECK_THROWS_AS(parse_activations(std::filesystem::path("/nonexistent/act.txt")),
                        FormatError);
    }

    TEST_CASE("round trip keeps six decimals") {
        SynthParams p;
        p.duration = 5;
        p.noise_std = 0.3;
        p.seed = 2;
        const auto original = synth_stream(p).activations;
        std::stringstream buf;
        write_activations(buf, original);
        const auto back = parse_activations(buf);
        CHECK(back.delta == original.delta);
        REQUIRE(back.frames.size() == original.frames.size());
        for (std::size_t i = 0; i < back.frames.size(); ++i) {
            REQUIRE(std::abs(back.frames[i].beat - original.frames[i].beat) <= 5e-7);
            REQUIRE(std::abs(back.frames[i].downbeat - original.frames[i].downbeat) <= 5e-7);
        }
    }
}

TEST_SUITE("annotations") {
    TEST_CASE("parse with comments") {
        std::istringstream in("# estimated\n0.50 1\n1.00 2\n\n1.50 3\n");
        const auto a = parse_annotations(in);
        REQUIRE(a.beats.size() == 3);
        CHECK(a.beat_times() == std::vector<double>{0.5, 1.0, 1.5});
        CHECK(a.downbeat_times() == std::vector<double>{0.5});
    }

    TEST_CASE("rejects decreasing times and bad positions") {
        std::istringstream decreasing("1.0 1\n0.5 2\n");
        CHECK_THROWS_AS(parse_annotations(decreasing), ParseError);
        std::istringstream zero_pos("1.0 0\n");
        CHECK_THROWS_AS(parse_annotations(zero_pos), ParseError);
    }

    TEST_CASE("round trip") {
        Annotation a;
        a.beats = {{0.0, 1}, {0.5, 2}, {1.0, 3}, {1.5, 1}};
        std::stringstream buf;
        write_annotations(buf, a);
        CHECK(parse_annotations(buf).beats == a.beats);
    }
}

TEST_SUITE("synth_stream") {
    TEST_CASE("120 BPM, meter 4, 10 s") {
        SynthParams p;
        p.tempo = 120;
        p.meter = 4;
        p.duration = 10;
        const auto s = synth_stream(p);
        CHECK(s.period_frames == 25);
        REQUIRE(s.activations.frames.size() == 500);
        for (const auto& f : s.activations.frames) {
            const bool beat = f.index % 25 == 0;
            const bool down = f.index % 100 == 0;
            REQUIRE(f.beat == (beat ? 1.0 : 0.0));
            REQUIRE(f.downbeat == (down ? 1.0 : 0.0));
        }
        REQUIRE(s.annotation.beats.size() == 20);
        CHECK(s.annotation.beats[0] == AnnotatedBeat{0.0, 1});
        CHECK(s.annotation.beats[1].beat_in_bar == 2);
        CHECK(s.annotation.beats[4].beat_in_bar == 1);
        CHECK(s.annotation.downbeat_times().size() == 5);
    }

    TEST_CASE("zero duration") {
        SynthParams p;
        p.duration = 0;
        const auto s = synth_stream(p);
        CHECK(s.activations.frames.empty());
        CHECK(s.annotation.beats.empty());
    }

    TEST_CASE("same seed, same stream") {
        SynthParams p;
        p.noise_std = 0.2;
        p.jitter_frames = 2;
        p.seed = 99;
        std::stringstream a;
        std::stringstream b;
        write_activations(a, synth_stream(p).activations);
        write_activations(b, synth_stream(p).activations);
        CHECK(a.str() == b.str());
        p.seed = 100;
        std::stringstream c;
        write_activations(c, synth_stream(p).activations);
        CHECK(a.str() != c.str());
    }

    TEST_CASE("jitter keeps annotations on the pulses") {
        SynthParams p;
        p.tempo = 90;
        p.duration = 30;
        p.jitter_frames = 3;
        p.seed = 4;
        const auto s = synth_stream(p);
        for (const auto& beat : s.annotation.beats) {
            const auto k = static_cast<std::size_t>(std::llround(beat.time / p.delta));
            REQUIRE(s.activations.frames[k].beat == 1.0);
        }
        for (std::size_t i = 1; i < s.annotation.beats.size(); ++i) {
            REQUIRE(s.annotation.beats[i].time > s.annotation.beats[i - 1].time);
        }
    }

    TEST_CASE("parameter checks") {
        SynthParams p;
        p.jitter_frames = 13;  // period 25
        CHECK_THROWS_AS(synth_stream(p), ParameterError);
        p = {};
        p.meter = 0;
        CHECK_THROWS_AS(synth_stream(p), ParameterError);
        p = {};
        p.pulse_amp = 1.2;
        CHECK_THROWS_AS(synth_stream(p), ParameterError);
    }
}
