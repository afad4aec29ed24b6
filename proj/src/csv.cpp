#include "scout/csv.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "scout/error.hpp"

namespace scout {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(pos)));
            break;
        }
        out.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

bool parse_number(std::string_view s, double* out) {
    s = trim(s);
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, *out);
    return ec == std::errc{} && ptr == last && std::isfinite(*out);
}

bool is_missing_token(std::string_view s) {
    if (s.empty()) return true;
    if (s.size() == 3) {
        auto low = [](char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); };
        return low(s[0]) == 'n' && low(s[1]) == 'a' && low(s[2]) == 'n';
    }
    return false;
}

bool parse_uint(std::string_view s, int* out) {
    if (s.empty()) return false;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return false;
    *out = v;
    return true;
}

// Reads header + rows; hands each row's fields to the callback with its
// 1-based line number. Required columns resolved by name, any order.
class CsvReader {
public:
    CsvReader(std::istream& in, const std::vector<std::string>& required) : in_(in) {
        std::string header;
        if (!std::getline(in_, header)) fail(Errc::schema, "empty input: missing header row");
        auto names = split_fields(header);
        for (std::size_t i = 0; i < names.size(); ++i) {
            std::string key(names[i]);
            std::transform(key.begin(), key.end(), key.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            columns_[key] = i;
        }
        for (const auto& name : required) {
            auto it = columns_.find(name);
            if (it == columns_.end())
                fail(Errc::schema, "missing required column '" + name + "'");
            index_.push_back(it->second);
        }
        line_no_ = 1;
    }

    // Returns false at end of input. Fields are ordered as `required`.
    bool next(std::vector<std::string_view>* fields, long* line_no) {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (trim(line_).empty()) continue;  // skip blank lines
            auto raw = split_fields(line_);
            fields->clear();
            for (std::size_t idx : index_) {
                if (idx >= raw.size())
                    fail(Errc::row, "row has too few fields", line_no_);
                fields->push_back(raw[idx]);
            }
            *line_no = line_no_;
            return true;
        }
        return false;
    }

private:
    std::istream& in_;
    std::unordered_map<std::string, std::size_t> columns_;
    std::vector<std::size_t> index_;
    std::string line_;
    long line_no_ = 0;
};

// Re-raises timestamp errors with the row's line number attached.
Timestamp parse_timestamp_at(std::string_view text, long line,
                             std::optional<Timestamp> session_date = std::nullopt) {
    try {
        return parse_timestamp(text, session_date);
    } catch (const Error& e) {
        fail(e.code, e.what(), line);
    }
}

}  // namespace

Timestamp parse_date(std::string_view text) {
    text = trim(text);
    int y = 0, mo = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        !parse_uint(text.substr(0, 4), &y) || !parse_uint(text.substr(5, 2), &mo) ||
        !parse_uint(text.substr(8, 2), &d))
        fail(Errc::row, "malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) fail(Errc::row, "invalid calendar date '" + std::string(text) + "'");
    return static_cast<Timestamp>(sys_days{ymd}.time_since_epoch().count()) * 86400.0;
}

namespace {

bool parse_hms(std::string_view s, double* seconds_of_day) {
    // HH:MM[:SS[.fff]]
    if (s.size() < 5 || s[2] != ':') return false;
    int h = 0, m = 0;
    if (!parse_uint(s.substr(0, 2), &h) || !parse_uint(s.substr(3, 2), &m)) return false;
    double sec = 0.0;
    if (s.size() > 5) {
        if (s[5] != ':') return false;
        if (!parse_number(s.substr(6), &sec)) return false;
    }
    if (h > 23 || m > 59 || sec < 0.0 || sec >= 61.0) return false;
    *seconds_of_day = h * 3600.0 + m * 60.0 + sec;
    return true;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text, std::optional<Timestamp> session_date) {
    text = trim(text);
    if (text.empty()) fail(Errc::row, "empty timestamp");

    // ISO-8601: YYYY-MM-DDTHH:MM:SS[.fff][Z|+00:00]
    if (text.size() >= 19 && text[4] == '-' && text[7] == '-' &&
        (text[10] == 'T' || text[10] == 't' || text[10] == ' ')) {
        Timestamp date = parse_date(text.substr(0, 10));
        std::string_view rest = text.substr(11);
        if (!rest.empty() && (rest.back() == 'Z' || rest.back() == 'z')) rest.remove_suffix(1);
        if (rest.size() > 6 && rest[rest.size() - 6] == '+')
            rest.remove_suffix(6);  // "+00:00" only; other offsets rejected below via parse_hms
        double sod = 0.0;
        if (!parse_hms(rest, &sod))
            fail(Errc::row, "malformed timestamp '" + std::string(text) + "'");
        return date + sod;
    }

    // Clock-of-day, resolved against the session date.
    double sod = 0.0;
    if (text.size() >= 5 && text[2] == ':' && parse_hms(text, &sod)) {
        if (!session_date)
            fail(Errc::row, "clock-of-day timestamp '" + std::string(text) +
                                "' requires a session date");
        return *session_date + sod;
    }

    // Plain epoch seconds.
    double epoch = 0.0;
    if (parse_number(text, &epoch) && epoch >= 0.0) return epoch;
    fail(Errc::row, "malformed timestamp '" + std::string(text) + "'");
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    double whole = std::floor(t);
    long ms = std::lround((t - whole) * 1000.0);
    if (ms >= 1000) {
        whole += 1.0;
        ms -= 1000;
    }
    auto days = static_cast<long long>(std::floor(whole / 86400.0));
    double sod = whole - static_cast<double>(days) * 86400.0;
    year_month_day ymd{sys_days{std::chrono::days{days}}};
    int sec = static_cast<int>(sod);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), sec / 3600, (sec % 3600) / 60, sec % 60,
                  static_cast<int>(ms));
    return buf;
}

ScoutParse parse_scout_csv(std::istream& in) {
    CsvReader reader(in, {"timestamp", "ch4_ppm", "temp_c", "status"});
    ScoutParse out;
    std::vector<std::string_view> f;
    long line = 0;
    while (reader.next(&f, &line)) {
        ScoutRecord rec;
        rec.t = parse_timestamp_at(f[0], line);
        double v = 0.0;
        // Start-up rows log literal "NaN"; any unparseable concentration is
        // kept as a missing value so the row count is preserved.
        if (parse_number(f[1], &v)) {
            rec.ch4_ppm = v;
        } else {
            ++out.missing_ch4;
        }
        if (parse_number(f[2], &v)) rec.temp_c = v;
        rec.status = std::string(f[3]);
        out.records.push_back(std::move(rec));
    }
    return out;
}

SnifferParse parse_sniffer_csv(std::istream& in) {
    CsvReader reader(in, {"timestamp", "ch4_mg_m3", "co2_mg_m3", "flow_l_min", "temp_c",
                          "pressure_mbar"});
    SnifferParse out;
    std::vector<std::string_view> f;
    long line = 0;
    const char* names[] = {"ch4_mg_m3", "co2_mg_m3", "flow_l_min", "temp_c", "pressure_mbar"};
    while (reader.next(&f, &line)) {
        SnifferRecord rec;
        rec.t = parse_timestamp_at(f[0], line);
        std::optional<double>* slots[] = {&rec.ch4_mg_m3, &rec.co2_mg_m3, &rec.flow_l_min,
                                          &rec.temp_c, &rec.pressure_mbar};
        for (int i = 0; i < 5; ++i) {
            std::string_view field = f[i + 1];
            if (is_missing_token(field)) {
                ++out.missing_fields;
                continue;
            }
            double v = 0.0;
            if (!parse_number(field, &v))
                fail(Errc::row, std::string("malformed ") + names[i] + " value '" +
                                    std::string(field) + "'", line);
            *slots[i] = v;
        }
        out.records.push_back(rec);
    }
    return out;
}

BehaviorParse parse_behavior_csv(std::istream& in, std::optional<Timestamp> session_date) {
    CsvReader reader(in, {"start", "end", "label"});
    BehaviorParse out;
    std::vector<std::string_view> f;
    long line = 0;
    while (reader.next(&f, &line)) {
        BehaviorInterval iv;
        iv.start = parse_timestamp_at(f[0], line, session_date);
        iv.end = parse_timestamp_at(f[1], line, session_date);
        if (!(iv.start < iv.end)) fail(Errc::row, "interval end precedes start", line);
        bool known = false;
        iv.label = behavior_label_from_name(std::string(f[2]), &known);
        if (!known) ++out.unknown_labels;
        out.intervals.push_back(iv);
    }
    std::stable_sort(out.intervals.begin(), out.intervals.end(),
                     [](const BehaviorInterval& a, const BehaviorInterval& b) {
                         return a.start < b.start;
                     });
    return out;
}

ScoutParse parse_scout_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_scout_csv(in);
}

SnifferParse parse_sniffer_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_sniffer_csv(in);
}

BehaviorParse parse_behavior_csv(const std::string& text, std::optional<Timestamp> session_date) {
    std::istringstream in(text);
    return parse_behavior_csv(in, session_date);
}

const char* behavior_label_name(BehaviorLabel l) {
    switch (l) {
        case BehaviorLabel::head_in_hood: return "head_in_hood";
        case BehaviorLabel::sitting: return "sitting";
        case BehaviorLabel::standing: return "standing";
        case BehaviorLabel::feeding: return "feeding";
        case BehaviorLabel::other: return "other";
    }
    return "other";
}

BehaviorLabel behavior_label_from_name(const std::string& name, bool* known) {
    if (known) *known = true;
    if (name == "head_in_hood") return BehaviorLabel::head_in_hood;
    if (name == "sitting") return BehaviorLabel::sitting;
    if (name == "standing") return BehaviorLabel::standing;
    if (name == "feeding") return BehaviorLabel::feeding;
    if (name == "other") return BehaviorLabel::other;
    if (known) *known = false;
    return BehaviorLabel::other;
}

namespace {

void put_number(std::ostream& out, const std::optional<double>& v) {
    char buf[32];
    if (v) {
        std::snprintf(buf, sizeof(buf), "%.10g", *v);
        out << buf;
    }
}

}  // namespace

void write_scout_csv(std::ostream& out, const std::vector<ScoutRecord>& records) {
    out << "timestamp,ch4_ppm,temp_c,status\n";
    for (const auto& r : records) {
        out << format_timestamp(r.t) << ',';
        if (r.ch4_ppm) {
            put_number(out, r.ch4_ppm);
        } else {
            out << "NaN";
        }
        out << ',';
        put_number(out, r.temp_c);
        out << ',' << r.status << '\n';
    }
}

void write_sniffer_csv(std::ostream& out, const std::vector<SnifferRecord>& records) {
    out << "timestamp,ch4_mg_m3,co2_mg_m3,flow_l_min,temp_c,pressure_mbar\n";
    for (const auto& r : records) {
        out << format_timestamp(r.t) << ',';
        put_number(out, r.ch4_mg_m3);
        out << ',';
        put_number(out, r.co2_mg_m3);
        out << ',';
        put_number(out, r.flow_l_min);
        out << ',';
        put_number(out, r.temp_c);
        out << ',';
        put_number(out, r.pressure_mbar);
        out << '\n';
    }
}

void write_behavior_csv(std::ostream& out, const std::vector<BehaviorInterval>& intervals) {
    out << "start,end,label\n";
    for (const auto& iv : intervals)
        out << format_timestamp(iv.start) << ',' << format_timestamp(iv.end) << ','
            << behavior_label_name(iv.label) << '\n';
}

}  // namespace scout
