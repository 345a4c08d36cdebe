#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "machlab/diagnostics.hpp"

namespace machlab {

struct LadderPoint {
    double epsilon = 0.0;
    double error = 0.0;
    double normalizer = 1.0;
    double slope_running = 0.0;  // fit over points so far; nan below 3 points
    std::string status = "ok";
};

/// report.csv: epsilon, error, normalizer, slope_running (12-digit scientific,
/// byte-stable across runs).
void write_report_csv(const std::string& path, const std::vector<LadderPoint>& points);

/// Minimal log-log polyline chart with the fitted slope in the title.
void write_report_svg(const std::string& path, const std::vector<LadderPoint>& points,
                      const std::string& title, double slope);

/// FNV-1a 64-bit checksum of a file's bytes (hex string), for the manifest.
std::string fnv1a64_file(const std::string& path);

struct ManifestEntry {
    std::string key;
    std::string value;
};

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries);

}  // namespace machlab
