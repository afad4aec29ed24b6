#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scout/records.hpp"

namespace scout {

// Accepted timestamp forms: ISO-8601 UTC ("2024-09-12T08:00:00Z", optional
// fractional seconds, optional "Z"/"+00:00"), plain epoch seconds, or a
// clock-of-day "HH:MM[:SS[.fff]]" resolved against `session_date` (epoch
// seconds of the session's UTC midnight).
Timestamp parse_timestamp(std::string_view text,
                          std::optional<Timestamp> session_date = std::nullopt);

// ISO-8601 UTC with millisecond precision, e.g. "2024-09-12T08:00:00.000Z".
std::string format_timestamp(Timestamp t);

// Epoch seconds of the UTC midnight starting calendar date "YYYY-MM-DD".
Timestamp parse_date(std::string_view text);

struct ScoutParse {
    std::vector<ScoutRecord> records;
    std::size_t missing_ch4 = 0;  // rows whose concentration was empty/unparseable
};

struct SnifferParse {
    std::vector<SnifferRecord> records;
    std::size_t missing_fields = 0;
};

struct BehaviorParse {
    std::vector<BehaviorInterval> intervals;  // sorted by start
    std::size_t unknown_labels = 0;
};

// Parsers are total: they return the full record list or throw a typed Error
// (schema error naming the column, or row error carrying the line number).
// Row counts are preserved; missing numeric fields are flagged, not dropped.
ScoutParse parse_scout_csv(std::istream& in);
SnifferParse parse_sniffer_csv(std::istream& in);
BehaviorParse parse_behavior_csv(std::istream& in,
                                 std::optional<Timestamp> session_date = std::nullopt);

ScoutParse parse_scout_csv(const std::string& text);
SnifferParse parse_sniffer_csv(const std::string& text);
BehaviorParse parse_behavior_csv(const std::string& text,
                                 std::optional<Timestamp> session_date = std::nullopt);

void write_scout_csv(std::ostream& out, const std::vector<ScoutRecord>& records);
void write_sniffer_csv(std::ostream& out, const std::vector<SnifferRecord>& records);
void write_behavior_csv(std::ostream& out, const std::vector<BehaviorInterval>& intervals);

}  // namespace scout
