#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "pfro/frontier.hpp"
#include "pfro/model.hpp"

namespace pfro {

struct SvgOptions {
    double size_px = 800.0;     // square canvas edge
    double point_radius = 1.5;  // site dot radius in px
    double segment_width = 0.8; // stroke width for segment primitives
    bool draw_sites = true;     // the segment model may want segments only
};

// Deterministic SVG of a d=2 snapshot: red/blue site dots, one path element
// per segment primitive in the segment model, and an optional frontier-cell
// overlay. The y axis is flipped so the cube's (0,0) is the lower-left
// corner. Throws UnsupportedDimension unless the snapshot is 2-d.
void write_svg(const Snapshot& snap, const FrontierCells* overlay, const SvgOptions& opt,
               std::ostream& out);

void write_svg_file(const Snapshot& snap, const FrontierCells* overlay, const SvgOptions& opt,
                    const std::string& path);

} // namespace pfro
