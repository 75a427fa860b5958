#include "jumpback/errors.hpp"
#include "jumpback/signal_io.hpp"
#include "jumpback/tracker.hpp"

#include <doctest.h>

#include <random>

using namespace jumpback;

namespace {

ActivationStream impulse_train(int period, int frames, int meter) {
    ActivationStream s;
    for (int k = 0; k < frames; ++k) {
        const bool beat = k % period == 0;
        const bool down = beat && (k / period) % meter == 0;
        s.frames.push_back({beat ? 1.0 : 0.0, down ? 1.0 : 0.0, k});
    }
    return s;
}

}  // namespace

TEST_SUITE("Tracker") {
    TEST_CASE("impulse train at 120 BPM locks to 25-frame intervals") {
        const auto stream = impulse_train(25, 1000, 4);
        Tracker tracker(TrackerConfig{});
        for (const auto& f : stream.frames) {
            tracker.process_frame(f);
        }
        CHECK(tracker.current_beat_interval() == 25);
        CHECK(tracker.current_tempo() == doctest::Approx(120.0));
        CHECK(tracker.current_meter() == 4);

        const auto& events = tracker.events();
        REQUIRE(events.size() > 12);
        for (std::size_t i = 10; i + 1 < events.size(); ++i) {
            REQUIRE(events[i + 1].frame_index - events[i].frame_index == 25);
        }
        int downbeats = 0;
        for (std::size_t i = 10; i < events.size(); ++i) {
            if (events[i].kind == EventKind::downbeat) {
                ++downbeats;
                REQUIRE(events[i].frame_index % 100 == 0);
                REQUIRE(events[i].beat_in_bar == 1);
            }
        }
        CHECK(downbeats > 0);
    }

    TEST_CASE("silence emits nothing") {
        ActivationStream s;
        for (int k = 0; k < 500; ++k) {
            s.frames.push_back({0.0, 0.0, k});
        }
        const auto summary = track_stream(s, TrackerConfig{});
        CHECK(summary.events.empty());
        CHECK(summary.frames == 500);
    }

    TEST_CASE("finalize is idempotent and does not advance") {
        const auto stream = impulse_train(30, 400, 3);
        Tracker tracker(TrackerConfig{});
        for (const auto& f : stream.frames) {
            tracker.process_frame(f);
        }
        const auto a = tracker.finalize();
        const auto b = tracker.finalize();
        CHECK(a.events == b.events);
        CHECK(a.tempo == b.tempo);
        CHECK(a.meter == b.meter);
        CHECK(tracker.frames_processed() == 400);
    }

    TEST_CASE("empty and single-frame streams") {
        const auto none = track_stream(ActivationStream{}, TrackerConfig{});
        CHECK(none.events.empty());
        CHECK(none.frames == 0);

        ActivationStream one;
        one.frames.push_back({1.0, 1.0, 0});
        const auto single = track_stream(one, TrackerConfig{});
        CHECK(single.frames == 1);
        CHECK(single.events.size() <= 1);
    }

    TEST_CASE("out-of-order frames") {
        Tracker tracker(TrackerConfig{});
        tracker.process_frame({0.0, 0.0, 0});
        CHECK_THROWS_AS(tracker.process_frame({0.0, 0.0, 2}), SequencingError);
        CHECK_THROWS_AS(tracker.process_frame({0.0, 0.0, 0}), SequencingError);
        CHECK_NOTHROW(tracker.process_frame({0.0, 0.0, 1}));
        CHECK_THROWS_AS(tracker.process_frame({0.0, 1.5, 2}), ParameterError);
    }

    TEST_CASE("events depend only on the past") {
        SynthParams p;
        p.tempo = 100;
        p.meter = 3;
        p.duration = 30;
        p.noise_std = 0.1;
        p.jitter_frames = 1;
        p.seed = 5;
        const auto full = synth_stream(p).activations;
        TrackerConfig config;
        config.seed = 11;
        const auto reference = track_stream(full, config).events;

        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 10; ++trial) {
            const auto cut = std::uniform_int_distribution<std::size_t>(1, full.frames.size())(rng);
            ActivationStream prefix = full;
            prefix.frames.resize(cut);
            const auto partial = track_stream(prefix, config).events;
            std::vector<RhythmEvent> expected;
            for (const auto& e : reference) {
                if (e.frame_index < static_cast<std::int64_t>(cut)) {
                    expected.push_back(e);
                }
            }
            REQUIRE(partial == expected);
        }
    }

    TEST_CASE("structural invariants on noisy input") {
        for (const Engine engine : {Engine::one_dim, Engine::baseline_2d}) {
            CAPTURE(to_string(engine));
            SynthParams p;
            p.tempo = 140;
            p.duration = 40;
            p.noise_std = 0.2;
            p.jitter_frames = 2;
            p.seed = 17;
            TrackerConfig config;
            config.engine = engine;
            const auto summary = track_stream(synth_stream(p).activations, config);
            REQUIRE_FALSE(summary.events.empty());
            const SpaceConfig space;
            for (std::size_t i = 0; i < summary.events.size(); ++i) {
                const auto& e = summary.events[i];
                REQUIRE(e.beat_in_bar >= 1);
                REQUIRE(e.meter >= space.bar_min);
                REQUIRE(e.meter <= space.bar_max);
                REQUIRE(e.tempo >= 60.0 / (space.max_interval() * space.delta) - 1e-9);
                REQUIRE(e.tempo <= 60.0 / (space.min_interval() * space.delta) + 1e-9);
                REQUIRE(e.time == doctest::Approx(e.frame_index * space.delta));
                REQUIRE(e.warmup == (e.frame_index < space.max_interval()));
                if (e.kind == EventKind::downbeat) {
                    REQUIRE(e.beat_in_bar == 1);
                }
                if (i > 0) {
                    REQUIRE(e.frame_index > summary.events[i - 1].frame_index);
                }
            }
        }
    }

    TEST_CASE("1D beat spacing stays within the interval range on clean input") {
        const auto stream = impulse_train(40, 2000, 4);
        const auto events = track_stream(stream, TrackerConfig{}).events;
        const SpaceConfig space;
        for (std::size_t i = 1; i < events.size(); ++i) {
            const auto gap = events[i].frame_index - events[i - 1].frame_index;
            REQUIRE(gap >= space.min_interval());
            REQUIRE(gap <= space.max_interval());
        }
    }

    TEST_CASE("2D engine tracks the clean impulse train") {
        TrackerConfig config;
        config.engine = Engine::baseline_2d;
        const auto summary = track_stream(impulse_train(25, 1000, 4), config);
        CHECK(summary.tempo == doctest::Approx(120.0));
        CHECK(summary.events.size() == 40);
    }

    TEST_CASE("bar threshold override is validated") {
        TrackerConfig config;
        config.bar_threshold = 1.5;
        CHECK_THROWS_AS(Tracker{config}, ParameterError);
    }

    TEST_CASE("to_annotation") {
        std::vector<RhythmEvent> events(2);
        events[0].time = 0.5;
        events[0].beat_in_bar = 1;
        events[1].time = 1.0;
        events[1].beat_in_bar = 2;
        const auto a = to_annotation(events);
        REQUIRE(a.beats.size() == 2);
        CHECK(a.beats[1] == AnnotatedBeat{1.0, 2});
    }
}
