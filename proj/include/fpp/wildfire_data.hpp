#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fpp/process.hpp"

namespace fpp {

using Date = std::chrono::year_month_day;

struct EventRecord {
  Date date;
  std::optional<std::string> zone;
};

/// Date-sorted event records (stable, so same-day rows keep file order).
class EventLog {
 public:
  explicit EventLog(std::vector<EventRecord> records);

  const std::vector<EventRecord>& records() const { return records_; }
  Date origin() const { return records_.front().date; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<EventRecord> records_;
};

enum class EventFormat {
  /// Header `date[,zone]`, ISO-8601 dates.
  kGeneric,
  /// Storm Events CSV: rows with EVENT_TYPE "Wildfire"; the date comes from
  /// BEGIN_DATE, BEGIN_YEARMONTH + BEGIN_DAY, or BEGIN_DATE_TIME.
  kNoaa,
};

std::string_view to_string(EventFormat format);
/// Accepts "generic" and "noaa" / "noaa-export".
EventFormat parse_event_format(std::string_view name);

/// Malformed row; `row` is the 1-based line number in the file.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t row, const std::string& what);
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Strict YYYY-MM-DD. A trailing time after 'T' or ' ' is dropped.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(Date date);

/// Throws std::domain_error when the input holds no events.
EventLog parse_events(std::istream& in, EventFormat format);
/// Also throws std::runtime_error when the file cannot be opened.
EventLog load_events(const std::filesystem::path& path, EventFormat format);

/// Writes the generic format; parse_events reads it back unchanged.
void write_generic(std::ostream& out, const EventLog& log);

/// Whole-day offsets from the origin. The horizon defaults to the last offset.
ArrivalPath to_offsets(const EventLog& log, std::optional<double> horizon = std::nullopt);

}  // namespace fpp
