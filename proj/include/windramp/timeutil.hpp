#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace windramp {

/// Seconds since the Unix epoch, UTC. All timestamp arithmetic in this
/// project is plain integer arithmetic on this type; no time zones, no DST.
using Timestamp = std::int64_t;

/// Duration in seconds.
using Duration = std::int64_t;

/// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

/// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, unsigned& month, unsigned& day);

/// Formats a timestamp as ISO-8601 UTC, e.g. "2013-01-07T00:20:00Z".
std::string format_iso8601(Timestamp t);

/// Parses ISO-8601 UTC ("YYYY-MM-DDTHH:MM:SSZ", trailing Z optional,
/// 'T' or ' ' separator). Returns nullopt on malformed input.
std::optional<Timestamp> parse_iso8601(const std::string& text);

/// Parses a timestamp using a strptime-like pattern. Supported tokens:
/// %Y %m %d %H %M %S; every other pattern character must match literally.
/// The input is interpreted as UTC. Returns nullopt on mismatch.
std::optional<Timestamp> parse_timestamp(const std::string& text, const std::string& format);

} // namespace windramp
