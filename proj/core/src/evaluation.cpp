#include "jumpback/evaluation.hpp"

#include "jumpback/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace jumpback {

namespace {

// Absorbs the rounding of index * delta at the edge of the window.
constexpr double kWindowSlack = 1e-9;

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

}  // namespace

ScoreReport f_measure(std::span<const double> estimated, std::span<const double> reference,
                      double tolerance) {
    if (!(tolerance >= 0.0)) {
        throw ParameterError("tolerance must be non-negative");
    }
    if (!std::is_sorted(estimated.begin(), estimated.end()) ||
        !std::is_sorted(reference.begin(), reference.end())) {
        throw ParameterError("beat lists must be sorted ascending");
    }

    ScoreReport report;
    report.tolerance = tolerance;
    report.estimated = estimated.size();
    report.reference = reference.size();

    const double window = tolerance + kWindowSlack;
    std::size_t next = 0;  // earliest reference still available
    for (const double e : estimated) {
        while (next < reference.size() && reference[next] < e - window) {
            ++next;
        }
        if (next < reference.size() && std::abs(reference[next] - e) <= window) {
            ++report.matched;
            ++next;
        }
    }

    if (report.estimated > 0) {
        report.precision = static_cast<double>(report.matched) / report.estimated;
    }
    if (report.reference > 0) {
        report.recall = static_cast<double>(report.matched) / report.reference;
    }
    if (report.precision + report.recall > 0.0) {
        report.f_measure =
            2.0 * report.precision * report.recall / (report.precision + report.recall);
    }
    return report;
}

double StreamTiming::seconds_per_30s() const {
    return duration_seconds > 0.0 ? wall_seconds * 30.0 / duration_seconds : 0.0;
}

double BenchReport::total_wall_seconds() const {
    double total = 0.0;
    for (const auto& s : streams) {
        total += s.wall_seconds;
    }
    return total;
}

double BenchReport::mean_seconds_per_30s() const {
    if (streams.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto& s : streams) {
        total += s.seconds_per_30s();
    }
    return total / static_cast<double>(streams.size());
}

BenchReport bench_tracker(std::span<const NamedStream> streams, Engine engine,
                          TrackerConfig config) {
    BenchReport report;
    report.engine = engine;
    if (streams.empty()) {
        return report;
    }
    const double delta = streams.front().stream.delta;
    for (const auto& s : streams) {
        if (s.stream.delta != delta) {
            throw ParameterError("bench streams must share one delta");
        }
    }
    config.engine = engine;
    config.space.delta = delta;

    for (const auto& s : streams) {
        Tracker tracker(config);
        const auto start = std::chrono::steady_clock::now();
        for (const auto& frame : s.stream.frames) {
            tracker.process_frame(frame);
        }
        const auto stop = std::chrono::steady_clock::now();

        StreamTiming timing;
        timing.name = s.name;
        timing.frames = static_cast<std::int64_t>(s.stream.frames.size());
        timing.duration_seconds = s.stream.duration();
        timing.wall_seconds = std::chrono::duration<double>(stop - start).count();
        timing.beat_work = tracker.beat_work();
        timing.bar_work = tracker.bar_work();
        report.beat_work += timing.beat_work;
        report.bar_work += timing.bar_work;
        report.streams.push_back(std::move(timing));
    }
    return report;
}

void write_score(std::ostream& out, const std::string& label, const ScoreReport& r,
                 ReportFormat format, bool header) {
    if (format == ReportFormat::csv) {
        if (header) {
            out << "label,f_measure,precision,recall,matched,estimated,reference,tolerance\n";
        }
        out << label << ',' << fixed(r.f_measure, 6) << ',' << fixed(r.precision, 6) << ','
            << fixed(r.recall, 6) << ',' << r.matched << ',' << r.estimated << ','
            << r.reference << ',' << fixed(r.tolerance, 3) << '\n';
        return;
    }
    out << label << ".f_measure=" << fixed(r.f_measure, 6) << '\n'
        << label << ".precision=" << fixed(r.precision, 6) << '\n'
        << label << ".recall=" << fixed(r.recall, 6) << '\n'
        << label << ".matched=" << r.matched << '\n'
        << label << ".estimated=" << r.estimated << '\n'
        << label << ".reference=" << r.reference << '\n'
        << label << ".tolerance=" << fixed(r.tolerance, 3) << '\n';
}

void write_bench(std::ostream& out, const BenchReport& report, ReportFormat format,
                 bool include_timing, bool header) {
    const auto engine = to_string(report.engine);
    if (format == ReportFormat::csv) {
        if (header) {
            out << "engine,stream,frames,steps,touched_per_frame,multiply_adds_per_frame,bar_steps";
            if (include_timing) {
                out << ",wall_seconds,seconds_per_30s";
            }
            out << '\n';
        }
        for (const auto& s : report.streams) {
            out << engine << ',' << s.name << ',' << s.frames << ',' << s.beat_work.frames << ','
                << fixed(s.beat_work.touched_per_frame(), 3) << ','
                << fixed(s.beat_work.multiply_adds_per_frame(), 3) << ',' << s.bar_work.frames;
            if (include_timing) {
                out << ',' << fixed(s.wall_seconds, 6) << ',' << fixed(s.seconds_per_30s(), 6);
            }
            out << '\n';
        }
        return;
    }
    out << "engine=" << engine << '\n'
        << "streams=" << report.streams.size() << '\n'
        << "steps=" << report.beat_work.frames << '\n'
        << "touched_states_per_frame=" << fixed(report.beat_work.touched_per_frame(), 3) << '\n'
        << "multiply_adds_per_frame=" << fixed(report.beat_work.multiply_adds_per_frame(), 3)
        << '\n'
        << "bar_steps=" << report.bar_work.frames << '\n';
    if (include_timing) {
        out << "wall_seconds_total=" << fixed(report.total_wall_seconds(), 6) << '\n'
            << "mean_seconds_per_30s=" << fixed(report.mean_seconds_per_30s(), 6) << '\n';
    }
}

}  // namespace jumpback
