#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "scout/qc.hpp"
#include "scout/series.hpp"

namespace scout::io {

std::string read_file(const std::string& path);

// Write-then-rename so a stage never leaves a half-written product behind.
void atomic_write(const std::string& path, const std::string& content);

// FNV-1a 64 of the content, hex. Manifests chain on these.
std::string fnv1a64_hex(const std::string& content);
std::string file_hash(const std::string& path);

// Stage manifest: schema tag, config echo, input checksums, output names.
nlohmann::ordered_json make_manifest(const std::string& stage,
                                     const nlohmann::ordered_json& config_echo,
                                     const std::vector<std::string>& inputs,
                                     const std::vector<std::string>& outputs);

// Uniform-grid CSV round trip. Every grid cell is one row; invalid cells
// leave the value column empty.
std::string series_to_csv(const Series& s, const std::string& value_column);
Series series_from_csv(const std::string& text, Unit unit);

// As above plus a trailing class column (the scout clean product).
std::string classified_series_to_csv(const Series& s, const std::vector<SampleClass>& classes,
                                     const std::string& value_column);
std::pair<Series, std::vector<SampleClass>> classified_series_from_csv(const std::string& text,
                                                                       Unit unit);

// Multi-channel clean product for the hood sampler (shared grid).
std::string sniffer_clean_to_csv(const Series& ch4_ppm, const Series& co2_ppm,
                                 const Series& flow, const std::vector<SampleClass>& classes);
struct SnifferClean {
    Series ch4_ppm;
    Series co2_ppm;
    Series flow;
    std::vector<SampleClass> classes;
};
SnifferClean sniffer_clean_from_csv(const std::string& text);

std::string intervals_to_csv(const IntervalSet& set);
IntervalSet intervals_from_csv(const std::string& text);

nlohmann::ordered_json qc_report_json(const QCReport& report);

}  // namespace scout::io
