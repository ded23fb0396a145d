#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "iaa/report.hpp"

namespace iaa {

namespace {

using Rgb = std::array<int, 3>;

constexpr Rgb kNegative{0x21, 0x66, 0xac};
constexpr Rgb kNeutral{0xf7, 0xf7, 0xf7};
constexpr Rgb kPositive{0xb2, 0x18, 0x2b};
constexpr Rgb kAbsent{0xbd, 0xbd, 0xbd};

Rgb ramp(double value) {
    const double v = std::clamp(value, -1.0, 1.0);
    const Rgb& from = v < 0.0 ? kNegative : kNeutral;
    const Rgb& to = v < 0.0 ? kNeutral : kPositive;
    const double t = v < 0.0 ? v + 1.0 : v;
    Rgb out{};
    for (std::size_t c = 0; c < 3; ++c) {
        out[c] = static_cast<int>(std::lround(from[c] + t * (to[c] - from[c])));
    }
    return out;
}

std::string hex(const Rgb& rgb) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

// Code points, which is what a monospace terminal shows for our labels.
std::size_t display_width(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::string pad_left(std::string_view s, std::size_t width) {
    const std::size_t w = display_width(s);
    return std::string(width > w ? width - w : 0, ' ') + std::string(s);
}

std::string pad_right(std::string_view s, std::size_t width) {
    const std::size_t w = display_width(s);
    return std::string(s) + std::string(width > w ? width - w : 0, ' ');
}

std::string title(const PairwiseMatrix& m) {
    return std::string(PairwiseMatrix::coefficient) + " kappa (" + (m.doc_class ? *m.doc_class : "all classes") + ")";
}

std::string emit_svg(const PairwiseMatrix& m) {
    const int n = static_cast<int>(m.size());
    std::size_t longest = 1;
    for (const auto& a : m.annotators) longest = std::max(longest, display_width(a));
    const int left = 16 + 8 * static_cast<int>(longest);
    const int top = 56;
    const int width = left + kHeatmapCellPx * n + 16;
    const int height = top + kHeatmapCellPx * n + 16;

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"14\">\n";
    out << "  <title>" << xml_escape(title(m)) << "</title>\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"#ffffff\"/>\n";
    out << "  <text x=\"8\" y=\"20\" font-weight=\"bold\">" << xml_escape(title(m)) << "</text>\n";
    for (int j = 0; j < n; ++j) {
        out << "  <text x=\"" << left + kHeatmapCellPx * j + kHeatmapCellPx / 2 << "\" y=\"" << top - 8
            << "\" text-anchor=\"middle\">" << xml_escape(m.annotators[j]) << "</text>\n";
    }
    for (int i = 0; i < n; ++i) {
        const int y = top + kHeatmapCellPx * i;
        out << "  <text x=\"" << left - 8 << "\" y=\"" << y + kHeatmapCellPx / 2 + 5
            << "\" text-anchor=\"end\">" << xml_escape(m.annotators[i]) << "</text>\n";
        for (int j = 0; j < n; ++j) {
            const int x = left + kHeatmapCellPx * j;
            const auto v = m.at(i, j);
            const std::string fill = v ? heatmap_color(*v) : kHeatmapAbsentColor;
            const char* ink = v && std::abs(*v) >= 0.5 ? "#ffffff" : "#000000";
            out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kHeatmapCellPx << "\" height=\""
                << kHeatmapCellPx << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
            out << "  <text x=\"" << x + kHeatmapCellPx / 2 << "\" y=\"" << y + kHeatmapCellPx / 2 + 5
                << "\" text-anchor=\"middle\" fill=\"" << ink << "\">" << heatmap_cell_text(v) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

std::string emit_text(const PairwiseMatrix& m, bool ansi) {
    std::size_t label_width = 0;
    std::size_t cell_width = 5;  // "-1.00"
    for (const auto& a : m.annotators) {
        label_width = std::max(label_width, display_width(a));
        cell_width = std::max(cell_width, display_width(a));
    }
    cell_width += 2;

    std::ostringstream out;
    out << title(m) << '\n';
    out << std::string(label_width, ' ');
    for (const auto& a : m.annotators) out << pad_left(a, cell_width);
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << pad_right(m.annotators[i], label_width);
        for (std::size_t j = 0; j < m.size(); ++j) {
            const auto v = m.at(i, j);
            const std::string cell = pad_left(heatmap_cell_text(v), cell_width);
            if (ansi) {
                const Rgb bg = v ? ramp(*v) : kAbsent;
                const int fg = v && std::abs(*v) >= 0.5 ? 255 : 0;
                out << "\x1b[48;2;" << bg[0] << ';' << bg[1] << ';' << bg[2] << "m\x1b[38;2;" << fg << ';' << fg
                    << ';' << fg << 'm' << cell << "\x1b[0m";
            } else {
                out << cell;
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace

std::string heatmap_color(double value) { return hex(ramp(value)); }

std::string heatmap_cell_text(const std::optional<double>& value) {
    if (!value) return "–";
    return format_fixed(*value, 2);
}

std::string emit_heatmap(const PairwiseMatrix& matrix, HeatmapFormat format, bool ansi) {
    return format == HeatmapFormat::Svg ? emit_svg(matrix) : emit_text(matrix, ansi);
}

}  // namespace iaa
