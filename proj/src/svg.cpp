#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "epidde/report.hpp"
#include "format.hpp"

namespace epidde {

namespace {

// Canvas geometry, fixed so output bytes depend only on the data.
constexpr double kWidth = 800, kHeight = 520;
constexpr double kLeft = 70, kTop = 40, kRight = 170, kBottom = 50;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string px(double v) {
    char buf[32];
    auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void take(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
    void widen() {
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

std::string render_svg(const std::vector<Series>& series,
                       const std::string& x_label, const std::string& y_label,
                       const std::string& title) {
    if (series.empty()) throw ConfigError("plot requires at least one series");
    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw ConfigError("series `" + s.label +
                              "` has mismatched x/y lengths");
        if (s.x.empty())
            throw ConfigError("series `" + s.label + "` is empty");
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (std::isfinite(s.x[k]) && std::isfinite(s.y[k])) {
                xr.take(s.x[k]);
                yr.take(s.y[k]);
            }
        }
    }
    if (!xr.valid() || !yr.valid())
        throw ConfigError("plot has no finite data points");
    xr.widen();
    yr.widen();

    auto mapx = [&](double v) {
        return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * kPlotW;
    };
    auto mapy = [&](double v) {
        return kTop + kPlotH - (v - yr.lo) / (yr.hi - yr.lo) * kPlotH;
    };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
        << kHeight << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << px(kLeft + kPlotW / 2) << "\" y=\"24\" "
           "text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"16\">"
        << escape_xml(title) << "</text>\n";

    // frame
    out << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\""
        << px(kPlotW) << "\" height=\"" << px(kPlotH)
        << "\" fill=\"none\" stroke=\"#000000\"/>\n";

    // ticks: five per axis at equal fractions
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        const double xv = xr.lo + f * (xr.hi - xr.lo);
        const double xp = mapx(xv);
        out << "<line x1=\"" << px(xp) << "\" y1=\"" << px(kTop + kPlotH)
            << "\" x2=\"" << px(xp) << "\" y2=\"" << px(kTop + kPlotH + 5)
            << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << px(xp) << "\" y=\"" << px(kTop + kPlotH + 18)
            << "\" text-anchor=\"middle\" font-family=\"monospace\" "
               "font-size=\"11\">"
            << detail::format_double(xv, 4) << "</text>\n";
        const double yv = yr.lo + f * (yr.hi - yr.lo);
        const double yp = mapy(yv);
        out << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(yp)
            << "\" x2=\"" << px(kLeft) << "\" y2=\"" << px(yp)
            << "\" stroke=\"#000000\"/>\n";
        out << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(yp + 4)
            << "\" text-anchor=\"end\" font-family=\"monospace\" "
               "font-size=\"11\">"
            << detail::format_double(yv, 4) << "</text>\n";
    }

    out << "<text x=\"" << px(kLeft + kPlotW / 2) << "\" y=\""
        << px(kHeight - 12)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"13\">"
        << escape_xml(x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << px(kTop + kPlotH / 2)
        << "\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"13\" transform=\"rotate(-90 18 "
        << px(kTop + kPlotH / 2) << ")\">" << escape_xml(y_label)
        << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const Series& s = series[i];
        const char* color = kPalette[i % kPaletteSize];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            if (!first) out << ' ';
            out << px(mapx(s.x[k])) << ',' << px(mapy(s.y[k]));
            first = false;
        }
        out << "\"/>\n";
        const double ly = kTop + 14 + 18.0 * static_cast<double>(i);
        out << "<line x1=\"" << px(kWidth - kRight + 12) << "\" y1=\""
            << px(ly) << "\" x2=\"" << px(kWidth - kRight + 40) << "\" y2=\""
            << px(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << px(kWidth - kRight + 46) << "\" y=\""
            << px(ly + 4)
            << "\" font-family=\"monospace\" font-size=\"12\">"
            << escape_xml(s.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace epidde
