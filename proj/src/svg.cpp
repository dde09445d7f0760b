#include "pfro/svg.hpp"

#include <cstdio>
#include <fstream>

#include "pfro/errors.hpp"

namespace pfro {

namespace {

constexpr const char* kRed = "#c62828";
constexpr const char* kBlue = "#1565c0";
constexpr const char* kCell = "#ffd54f";

const char* fill_of(uint8_t color) { return color == 0 ? kRed : kBlue; }

// Fixed-precision formatting keeps the output byte-deterministic.
std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

void write_svg(const Snapshot& snap, const FrontierCells* overlay, const SvgOptions& opt,
               std::ostream& out) {
    if (snap.dim() != 2)
        throw UnsupportedDimension("SVG rendering is defined for 2-d snapshots only");
    const double S = opt.size_px;
    auto X = [&](double x) { return x * S; };
    auto Y = [&](double y) { return (1.0 - y) * S; }; // flip: math y up, SVG y down

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(S) << "\" height=\""
        << px(S) << "\" viewBox=\"0 0 " << px(S) << " " << px(S) << "\">\n";
    out << "<rect width=\"" << px(S) << "\" height=\"" << px(S) << "\" fill=\"#ffffff\"/>\n";

    if (overlay) {
        const double cell = S / overlay->m;
        out << "<g fill=\"" << kCell << "\" fill-opacity=\"0.85\">\n";
        for (uint64_t flat : overlay->cells) {
            const auto c = overlay->cell_coords(flat);
            // cell [c0, c0+1]/m x [c1, c1+1]/m; its top edge in SVG space
            const double x0 = c[0] * cell;
            const double y0 = S - (c[1] + 1) * cell;
            out << "<rect x=\"" << px(x0) << "\" y=\"" << px(y0) << "\" width=\"" << px(cell)
                << "\" height=\"" << px(cell) << "\"/>\n";
        }
        out << "</g>\n";
    }

    if (snap.segment_count() > 0) {
        out << "<g stroke-width=\"" << px(opt.segment_width)
            << "\" stroke-linecap=\"round\" fill=\"none\">\n";
        for (uint64_t j = 0; j < snap.segment_count(); ++j) {
            const double* a = &snap.seg_a[j * 2];
            const double* b = &snap.seg_b[j * 2];
            out << "<path stroke=\"" << fill_of(snap.seg_color[j]) << "\" d=\"M " << px(X(a[0]))
                << " " << px(Y(a[1])) << " L " << px(X(b[0])) << " " << px(Y(b[1])) << "\"/>\n";
        }
        out << "</g>\n";
    }

    if (opt.draw_sites) {
        out << "<g stroke=\"none\">\n";
        for (uint64_t i = 0; i < snap.site_count(); ++i) {
            const double* p = snap.position(i);
            out << "<circle cx=\"" << px(X(p[0])) << "\" cy=\"" << px(Y(p[1])) << "\" r=\""
                << px(opt.point_radius) << "\" fill=\"" << fill_of(snap.colors[i]) << "\"/>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    if (!out) throw FormatError("svg write failed");
}

void write_svg_file(const Snapshot& snap, const FrontierCells* overlay, const SvgOptions& opt,
                    const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open for writing: " + path);
    write_svg(snap, overlay, opt, f);
}

} // namespace pfro
