#include "machlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "machlab/errors.hpp"

namespace machlab {

void write_report_csv(const std::string& path, const std::vector<LadderPoint>& points) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_report_csv: cannot open " + path);
    out << "epsilon,error,normalizer,slope_running\n";
    char buf[256];
    for (const LadderPoint& p : points) {
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,", p.epsilon, p.error, p.normalizer);
        out << buf;
        if (std::isfinite(p.slope_running)) {
            std::snprintf(buf, sizeof buf, "%.6f", p.slope_running);
            out << buf;
        } else {
            out << "nan";
        }
        out << "\n";
    }
}

void write_report_svg(const std::string& path, const std::vector<LadderPoint>& points,
                      const std::string& title, double slope) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_report_svg: cannot open " + path);

    const int W = 640, H = 480, ML = 70, MR = 30, MT = 50, MB = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const LadderPoint& p : points) {
        const double x = std::log10(p.epsilon);
        const double y = std::log10(std::max(p.error / std::max(p.normalizer, 1e-300), 1e-300));
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double padx = 0.08 * (xmax - xmin), pady = 0.08 * (ymax - ymin);
    xmin -= padx;
    xmax += padx;
    ymin -= pady;
    ymax += pady;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"28\" font-family=\"monospace\" font-size=\"16\">%s  "
                  "(slope %.3f)</text>\n",
                  ML, title.c_str(), slope);
    out << buf;
    // axes
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML,
                  H - MB, W - MR, H - MB);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%d\" y1=\"%d\" x2=\"%d\" y2=\"%d\" stroke=\"black\"/>\n", ML, MT,
                  ML, H - MB);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-family=\"monospace\" font-size=\"13\">log10 "
                  "epsilon</text>\n",
                  (ML + W - MR) / 2 - 40, H - 20);
    out << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"18\" y=\"%d\" font-family=\"monospace\" font-size=\"13\" "
                  "transform=\"rotate(-90 18 %d)\">log10 error</text>\n",
                  (MT + H - MB) / 2 + 40, (MT + H - MB) / 2 + 40);
    out << buf;

    out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (const LadderPoint& p : points) {
        const double x = std::log10(p.epsilon);
        const double y = std::log10(std::max(p.error / std::max(p.normalizer, 1e-300), 1e-300));
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x), py(y));
        out << buf;
    }
    out << "\"/>\n";
    for (const LadderPoint& p : points) {
        const double x = std::log10(p.epsilon);
        const double y = std::log10(std::max(p.error / std::max(p.normalizer, 1e-300), 1e-300));
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#1f77b4\"/>\n", px(x),
                      py(y));
        out << buf;
        std::snprintf(buf, sizeof buf,
                      "<text x=\"%.2f\" y=\"%.2f\" font-family=\"monospace\" "
                      "font-size=\"11\">%.3g</text>\n",
                      px(x) + 6, py(y) - 6, p.epsilon);
        out << buf;
    }
    out << "</svg>\n";
}

std::string fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("fnv1a64_file: cannot open " + path);
    uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::string& path, const std::vector<ManifestEntry>& entries) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_manifest: cannot open " + path);
    for (const ManifestEntry& e : entries) out << e.key << " = " << e.value << "\n";
}

}  // namespace machlab
