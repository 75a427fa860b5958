#pragma once

#include "jumpback/signal_io.hpp"
#include "jumpback/tracker.hpp"
#include "jumpback/work_counter.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace jumpback {

inline constexpr double kDefaultTolerance = 0.07;  // seconds

struct ScoreReport {
    double f_measure = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t matched = 0;
    std::size_t estimated = 0;
    std::size_t reference = 0;
    double tolerance = kDefaultTolerance;
};

/// Greedy one-to-one matching in time order: each estimate takes the earliest
/// unmatched reference within +-tolerance. Both lists must be ascending.
ScoreReport f_measure(std::span<const double> estimated, std::span<const double> reference,
                      double tolerance = kDefaultTolerance);

struct NamedStream {
    std::string name;
    ActivationStream stream;
};

struct StreamTiming {
    std::string name;
    std::int64_t frames = 0;
    double duration_seconds = 0.0;
    double wall_seconds = 0.0;
    WorkCounter beat_work;
    WorkCounter bar_work;

    /// Wall time scaled to a 30-second excerpt.
    double seconds_per_30s() const;
};

struct BenchReport {
    Engine engine = Engine::one_dim;
    std::vector<StreamTiming> streams;
    WorkCounter beat_work;  // totals over all streams
    WorkCounter bar_work;

    bool empty() const { return streams.empty(); }
    double total_wall_seconds() const;
    double mean_seconds_per_30s() const;
};

/// Runs every stream through a fresh tracker and times the frame loop only.
/// All streams must share one delta, which overrides config.space.delta.
BenchReport bench_tracker(std::span<const NamedStream> streams, Engine engine,
                          TrackerConfig config = {});

enum class ReportFormat { text, csv };

void write_score(std::ostream& out, const std::string& label, const ScoreReport& report,
                 ReportFormat format, bool header);
void write_bench(std::ostream& out, const BenchReport& report, ReportFormat format,
                 bool include_timing, bool header);

}  // namespace jumpback
