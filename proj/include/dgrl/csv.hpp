#pragma once

// Metric series as comma-separated text with shortest round-trip number formatting.

#include "dgrl/agent.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dgrl {

inline constexpr const char* kMetricsHeader =
    "episode,train_return,eval_return,wall_time_ms_per_step,actor_loss,critic_loss";

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
/// Parses the whole string as a double; throws FormatError otherwise.
double parse_double(const std::string& text);

/// Header plus one row per record. An absent eval return is an empty field.
/// With include_timing false the timing column is left empty.
std::string format_metrics(const std::vector<MetricsRecord>& records, bool include_timing = true);

void emit_csv(const std::vector<MetricsRecord>& records, const std::string& path);

std::vector<MetricsRecord> parse_metrics(std::istream& in);
std::vector<MetricsRecord> read_csv(const std::string& path);

}  // namespace dgrl
