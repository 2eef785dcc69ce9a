#include "fpp/wildfire_data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <utility>

#include <boost/tokenizer.hpp>

namespace fpp {
namespace {

using Fields = std::vector<std::string>;

std::string trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return std::string(text.substr(first, last - first + 1));
}

std::string upper(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return text;
}

Fields split_row(const std::string& line, std::size_t row) {
  // No escape character; quotes only group fields that contain commas.
  const boost::escaped_list_separator<char> separator('\0', ',', '"');
  const boost::tokenizer<boost::escaped_list_separator<char>> tokens(line, separator);
  Fields out;
  try {
    for (const auto& token : tokens) out.push_back(trim(token));
  } catch (const boost::escaped_list_error& e) {
    throw ParseError(row, std::string("malformed CSV: ") + e.what());
  }
  return out;
}

// One logical CSV record per call; quoted fields may span lines.
bool next_record(std::istream& in, std::string& record, std::size_t& line_number,
                 std::size_t& record_line) {
  record.clear();
  std::string line;
  bool open_quote = false;
  bool any = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!any) record_line = line_number;
    if (any) record += '\n';
    record += line;
    any = true;
    open_quote ^= (std::count(line.begin(), line.end(), '"') % 2) == 1;
    if (!open_quote) break;
  }
  if (!record.empty() && record.back() == '\r') record.pop_back();
  return any;
}

bool blank(const std::string& record) { return trim(record).empty(); }

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  Int value{};
  const auto* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc{} || result.ptr != end) return std::nullopt;
  return value;
}

std::optional<Date> make_date(int year, unsigned month, unsigned day) {
  const Date date{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!date.ok()) return std::nullopt;
  return date;
}

// MM/DD/YYYY, optionally followed by a time.
std::optional<Date> parse_us_date(std::string_view text) {
  const auto space = text.find(' ');
  if (space != std::string_view::npos) text = text.substr(0, space);
  const auto a = text.find('/');
  const auto b = text.find('/', a == std::string_view::npos ? a : a + 1);
  if (a == std::string_view::npos || b == std::string_view::npos) return std::nullopt;
  const auto month = parse_int<unsigned>(text.substr(0, a));
  const auto day = parse_int<unsigned>(text.substr(a + 1, b - a - 1));
  const auto year = parse_int<int>(text.substr(b + 1));
  if (!month || !day || !year || text.size() - b - 1 != 4) return std::nullopt;
  return make_date(*year, *month, *day);
}

// DD-MON-YY HH:MM:SS as in the bulk detail files; two-digit years map to 1950-2049.
std::optional<Date> parse_noaa_datetime(std::string_view text) {
  static constexpr std::array<std::string_view, 12> kMonths = {
      "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT", "NOV", "DEC"};
  const auto space = text.find(' ');
  if (space != std::string_view::npos) text = text.substr(0, space);
  if (text.size() != 9 || text[2] != '-' || text[6] != '-') return std::nullopt;
  const auto day = parse_int<unsigned>(text.substr(0, 2));
  const auto yy = parse_int<int>(text.substr(7, 2));
  const std::string month_name = upper(std::string(text.substr(3, 3)));
  const auto it = std::find(kMonths.begin(), kMonths.end(), month_name);
  if (!day || !yy || it == kMonths.end()) return std::nullopt;
  const int year = *yy < 50 ? 2000 + *yy : 1900 + *yy;
  return make_date(year, static_cast<unsigned>(it - kMonths.begin()) + 1, *day);
}

std::optional<Date> parse_any_date(std::string_view text) {
  if (auto d = parse_iso_date(text)) return d;
  if (auto d = parse_us_date(text)) return d;
  return parse_noaa_datetime(text);
}

std::map<std::string, std::size_t> header_index(const Fields& header) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < header.size(); ++i) out.emplace(upper(header[i]), i);
  return out;
}

std::string strip_bom(std::string text) {
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) text.erase(0, 3);
  return text;
}

std::vector<EventRecord> read_generic(std::istream& in) {
  std::vector<EventRecord> out;
  std::string record;
  std::size_t line = 0;
  std::size_t row = 0;
  bool header_seen = false;
  std::optional<std::size_t> zone_column;
  std::size_t date_column = 0;
  while (next_record(in, record, line, row)) {
    if (blank(record)) continue;
    const Fields fields = split_row(header_seen ? record : strip_bom(record), row);
    if (!header_seen) {
      const auto index = header_index(fields);
      const auto date_it = index.find("DATE");
      if (date_it == index.end()) throw ParseError(row, "header must contain a 'date' column");
      date_column = date_it->second;
      if (const auto zone_it = index.find("ZONE"); zone_it != index.end()) {
        zone_column = zone_it->second;
      }
      header_seen = true;
      continue;
    }
    if (date_column >= fields.size()) throw ParseError(row, "missing date field");
    const auto date = parse_iso_date(fields[date_column]);
    if (!date) throw ParseError(row, "invalid date '" + fields[date_column] + "'");
    EventRecord rec{*date, std::nullopt};
    if (zone_column && *zone_column < fields.size() && !fields[*zone_column].empty()) {
      rec.zone = fields[*zone_column];
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<EventRecord> read_noaa(std::istream& in) {
  std::vector<EventRecord> out;
  std::string record;
  std::size_t line = 0;
  std::size_t row = 0;
  bool header_seen = false;
  std::map<std::string, std::size_t> index;
  const auto column = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = index.find(name);
    if (it == index.end()) return std::nullopt;
    return it->second;
  };
  std::optional<std::size_t> type_col, date_col, datetime_col, ym_col, day_col, zone_col;

  while (next_record(in, record, line, row)) {
    if (blank(record)) continue;
    const Fields fields = split_row(header_seen ? record : strip_bom(record), row);
    if (!header_seen) {
      index = header_index(fields);
      type_col = column("EVENT_TYPE");
      date_col = column("BEGIN_DATE");
      datetime_col = column("BEGIN_DATE_TIME");
      ym_col = column("BEGIN_YEARMONTH");
      day_col = column("BEGIN_DAY");
      zone_col = column("CZ_NAME");
      if (!type_col) throw ParseError(row, "header lacks EVENT_TYPE");
      if (!date_col && !datetime_col && !(ym_col && day_col)) {
        throw ParseError(row,
                         "header lacks BEGIN_DATE, BEGIN_DATE_TIME or BEGIN_YEARMONTH/BEGIN_DAY");
      }
      header_seen = true;
      continue;
    }
    const auto field = [&](std::optional<std::size_t> col) -> std::optional<std::string> {
      if (!col || *col >= fields.size()) return std::nullopt;
      return fields[*col];
    };
    const auto type = field(type_col);
    if (!type) throw ParseError(row, "missing EVENT_TYPE");
    if (upper(*type) != "WILDFIRE") continue;

    std::optional<Date> date;
    std::string shown;
    if (const auto text = field(date_col)) {
      shown = *text;
      date = parse_any_date(*text);
    } else if (const auto text = field(datetime_col)) {
      shown = *text;
      date = parse_any_date(*text);
    } else {
      const auto ym = field(ym_col);
      const auto d = field(day_col);
      if (ym && d) {
        shown = *ym + "/" + *d;
        const auto ym_value = parse_int<int>(*ym);
        const auto day_value = parse_int<unsigned>(*d);
        if (ym_value && day_value && *ym_value > 0) {
          date = make_date(*ym_value / 100, static_cast<unsigned>(*ym_value % 100), *day_value);
        }
      }
    }
    if (!date) throw ParseError(row, "invalid begin date '" + shown + "'");
    EventRecord rec{*date, std::nullopt};
    if (auto zone = field(zone_col); zone && !zone->empty()) rec.zone = std::move(*zone);
    out.push_back(std::move(rec));
  }
  return out;
}

std::string quote_if_needed(const std::string& text) {
  if (text.find('"') != std::string::npos || text.find('\n') != std::string::npos) {
    throw std::domain_error("write_generic: zone labels may not contain quotes or newlines");
  }
  if (text.find(',') == std::string::npos && trim(text) == text) return text;
  return '"' + text + '"';
}

}  // namespace

EventLog::EventLog(std::vector<EventRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw std::domain_error("EventLog: no events");
  for (const auto& rec : records_) {
    if (!rec.date.ok()) throw std::domain_error("EventLog: invalid calendar date");
  }
  std::stable_sort(records_.begin(), records_.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.date < b.date; });
}

std::string_view to_string(EventFormat format) {
  return format == EventFormat::kGeneric ? "generic" : "noaa";
}

EventFormat parse_event_format(std::string_view name) {
  if (name == "generic") return EventFormat::kGeneric;
  if (name == "noaa" || name == "noaa-export") return EventFormat::kNoaa;
  throw std::invalid_argument("unknown event format: " + std::string(name));
}

ParseError::ParseError(std::size_t row, const std::string& what)
    : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() > 10 && (text[10] == 'T' || text[10] == ' ')) text = text.substr(0, 10);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  const auto year = parse_int<int>(text.substr(0, 4));
  const auto month = parse_int<unsigned>(text.substr(5, 2));
  const auto day = parse_int<unsigned>(text.substr(8, 2));
  if (!year || !month || !day) return std::nullopt;
  return make_date(*year, *month, *day);
}

std::string format_iso_date(Date date) {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buffer;
}

EventLog parse_events(std::istream& in, EventFormat format) {
  auto records = format == EventFormat::kGeneric ? read_generic(in) : read_noaa(in);
  if (records.empty()) throw std::domain_error("no events in input");
  return EventLog(std::move(records));
}

EventLog load_events(const std::filesystem::path& path, EventFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_events(in, format);
}

void write_generic(std::ostream& out, const EventLog& log) {
  const bool zones = std::any_of(log.records().begin(), log.records().end(),
                                 [](const EventRecord& r) { return r.zone.has_value(); });
  out << (zones ? "date,zone\n" : "date\n");
  for (const auto& rec : log.records()) {
    out << format_iso_date(rec.date);
    if (zones) out << ',' << (rec.zone ? quote_if_needed(*rec.zone) : std::string());
    out << '\n';
  }
}

ArrivalPath to_offsets(const EventLog& log, std::optional<double> horizon) {
  const std::chrono::sys_days origin{log.origin()};
  std::vector<double> times;
  times.reserve(log.size());
  for (const auto& rec : log.records()) {
    times.push_back(static_cast<double>((std::chrono::sys_days{rec.date} - origin).count()));
  }
  const double end = horizon.value_or(times.back());
  return ArrivalPath(std::move(times), end);
}

}  // namespace fpp
