#include "scout/ioutil.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scout/csv.hpp"
#include "scout/error.hpp"

namespace scout::io {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::data, "cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(Errc::data, "cannot write file: " + tmp);
        out << content;
        if (!out.good()) fail(Errc::data, "short write: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(Errc::data, "rename failed for " + path + ": " + ec.message());
}

std::string fnv1a64_hex(const std::string& content) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : content) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::string& path) { return fnv1a64_hex(read_file(path)); }

nlohmann::ordered_json make_manifest(const std::string& stage,
                                     const nlohmann::ordered_json& config_echo,
                                     const std::vector<std::string>& inputs,
                                     const std::vector<std::string>& outputs) {
    nlohmann::ordered_json j;
    j["schema"] = "stage_manifest/1";
    j["stage"] = stage;
    auto in = nlohmann::ordered_json::array();
    for (const auto& path : inputs)
        in.push_back({{"path", path}, {"fnv1a64", file_hash(path)}});
    j["inputs"] = in;
    j["outputs"] = outputs;
    j["config"] = config_echo;
    return j;
}

namespace {

void append_value(std::string* out, double v, bool valid) {
    if (!valid) return;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    *out += buf;
}

struct Row {
    Timestamp t;
    std::vector<std::string> fields;
};

std::vector<Row> read_rows(const std::string& text, std::size_t min_fields,
                           std::string* header) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(Errc::schema, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    *header = line;
    std::vector<Row> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Row row;
        std::size_t pos = 0;
        std::vector<std::string> fields;
        while (true) {
            auto comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (fields.size() < min_fields) fail(Errc::row, "row has too few fields", line_no);
        row.t = parse_timestamp(fields[0]);
        fields.erase(fields.begin());
        row.fields = std::move(fields);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(Errc::schema, "CSV holds no rows");
    return rows;
}

Series rows_to_series(const std::vector<Row>& rows, std::size_t field, Unit unit) {
    const double dt = rows.size() > 1 ? rows[1].t - rows[0].t : 1.0;
    Series s = Series::uniform(rows[0].t, dt, rows.size(), unit);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string& v = rows[i].fields[field];
        if (v.empty()) continue;
        s.set(i, std::stod(v));
    }
    return s;
}

}  // namespace

std::string series_to_csv(const Series& s, const std::string& value_column) {
    std::string out = "timestamp," + value_column + "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += format_timestamp(s.time_at(i));
        out += ',';
        append_value(&out, s.values[i], s.is_valid(i));
        out += '\n';
    }
    return out;
}

Series series_from_csv(const std::string& text, Unit unit) {
    std::string header;
    auto rows = read_rows(text, 2, &header);
    return rows_to_series(rows, 0, unit);
}

std::string classified_series_to_csv(const Series& s, const std::vector<SampleClass>& classes,
                                     const std::string& value_column) {
    if (classes.size() != s.size()) fail(Errc::alignment, "class vector length mismatch");
    std::string out = "timestamp," + value_column + ",class\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += format_timestamp(s.time_at(i));
        out += ',';
        append_value(&out, s.values[i], s.is_valid(i));
        out += ',';
        out += sample_class_name(classes[i]);
        out += '\n';
    }
    return out;
}

std::pair<Series, std::vector<SampleClass>> classified_series_from_csv(const std::string& text,
                                                                       Unit unit) {
    std::string header;
    auto rows = read_rows(text, 3, &header);
    Series s = rows_to_series(rows, 0, unit);
    std::vector<SampleClass> classes;
    classes.reserve(rows.size());
    for (const auto& row : rows) {
        auto c = sample_class_from_name(row.fields[1]);
        if (!c) fail(Errc::row, "unknown sample class '" + row.fields[1] + "'");
        classes.push_back(*c);
    }
    return {std::move(s), std::move(classes)};
}

std::string sniffer_clean_to_csv(const Series& ch4_ppm, const Series& co2_ppm,
                                 const Series& flow, const std::vector<SampleClass>& classes) {
    const std::size_t n = ch4_ppm.size();
    if (co2_ppm.size() != n || flow.size() != n || classes.size() != n)
        fail(Errc::alignment, "clean sniffer channels must share one grid");
    std::string out = "timestamp,ch4_ppm,co2_ppm,flow_l_min,class\n";
    for (std::size_t i = 0; i < n; ++i) {
        out += format_timestamp(ch4_ppm.time_at(i));
        out += ',';
        append_value(&out, ch4_ppm.values[i], ch4_ppm.is_valid(i));
        out += ',';
        append_value(&out, co2_ppm.values[i], co2_ppm.is_valid(i));
        out += ',';
        append_value(&out, flow.values[i], flow.is_valid(i));
        out += ',';
        out += sample_class_name(classes[i]);
        out += '\n';
    }
    return out;
}

SnifferClean sniffer_clean_from_csv(const std::string& text) {
    std::string header;
    auto rows = read_rows(text, 5, &header);
    SnifferClean out;
    out.ch4_ppm = rows_to_series(rows, 0, Unit::ppm);
    out.co2_ppm = rows_to_series(rows, 1, Unit::ppm);
    out.flow = rows_to_series(rows, 2, Unit::l_min);
    for (const auto& row : rows) {
        auto c = sample_class_from_name(row.fields[3]);
        if (!c) fail(Errc::row, "unknown sample class '" + row.fields[3] + "'");
        out.classes.push_back(*c);
    }
    return out;
}

std::string intervals_to_csv(const IntervalSet& set) {
    std::string out = "start,end\n";
    for (const auto& iv : set) {
        out += format_timestamp(iv.start);
        out += ',';
        out += format_timestamp(iv.end);
        out += '\n';
    }
    return out;
}

IntervalSet intervals_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(Errc::schema, "empty intervals CSV");
    IntervalSet set;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) fail(Errc::row, "malformed interval row");
        set.add({parse_timestamp(line.substr(0, comma)), parse_timestamp(line.substr(comma + 1))});
    }
    return set;
}

nlohmann::ordered_json qc_report_json(const QCReport& report) {
    nlohmann::ordered_json counts;
    for (std::size_t i = 0; i < kSampleClassCount; ++i)
        counts[sample_class_name(static_cast<SampleClass>(i))] = report.counts[i];
    nlohmann::ordered_json j;
    j["total"] = report.total;
    j["counts"] = counts;
    j["defined"] = report.defined;
    // fractions are over all non-missing samples
    j["retention_frac"] = report.retention_frac;
    j["saturation_frac"] = report.saturation_frac;
    j["low_frac"] = report.low_frac;
    j["drop_frac"] = report.drop_frac;
    return j;
}

}  // namespace scout::io
