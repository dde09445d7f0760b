#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pfro/geometry.hpp"
#include "pfro/model.hpp"

namespace pfro {

struct NearestSegment {
    uint64_t segment_id = 0; // insertion index of the segment
    uint64_t owner_site = 0;
    Color color = Color::Red;
    double sq_dist = 0.0;
    std::vector<double> closest; // closest point on the segment
};

// Red/blue competition over the segment union (see PointIndex::Competition):
// the color owning the overall nearest segment point wins, red on exact ties.
struct SegmentCompetition {
    Color winner = Color::Red;
    uint64_t segment_id = 0;
    uint64_t owner_site = 0;
    double sq_dist = 0.0;
    bool tie = false;
    std::vector<double> closest;
};

// Exact nearest-segment index: the same bucket grid and shell-expansion
// search as PointIndex, but each cell lists the segments that touch it
// (conservative slab clipping with a small pad, so a segment may be listed
// in an extra boundary cell; over-inclusion is harmless). A segment can be
// scanned once per touched cell — also harmless, distances are pure.
// Distances come from point_segment_sq_dist and ties break toward the
// smallest segment id, so results agree bit-for-bit with an exhaustive scan.
// Insertion is single-writer; a frozen index supports concurrent queries.
class SegmentIndex {
  public:
    explicit SegmentIndex(uint32_t dimension, uint64_t expected_count = 0);

    // Inserts [a,b] and returns the segment id (insertion index). A
    // zero-length segment (a == b) is allowed: seeds are stored that way.
    uint64_t insert(const double* a, const double* b, Color color, uint64_t owner_site);

    uint64_t size() const { return colors_.size(); }
    uint64_t size(Color c) const { return count_[static_cast<int>(c)]; }
    uint32_t dimension() const { return dim_; }

    const double* seg_a(uint64_t j) const { return a_.data() + j * dim_; }
    const double* seg_b(uint64_t j) const { return b_.data() + j * dim_; }

    // Nearest segment of the given color (or overall). Throws EmptyIndex if
    // no segment of the requested color exists.
    NearestSegment nearest(const double* x, std::optional<Color> color = std::nullopt) const;

    SegmentCompetition nearest_competition(const double* x) const;

  private:
    struct Best;
    void regrow();
    uint64_t total_cells_for(uint32_t side) const;
    void bucket_segment(uint32_t entry, const double* a, const double* b);
    void search(const double* x, const bool want[2], bool race, Best best[2]) const;

    uint32_t dim_;
    uint32_t side_ = 1;
    uint64_t n_cells_ = 1;
    uint64_t count_[2] = {0, 0};
    std::vector<std::vector<uint32_t>> cells_; // entries are (segment id << 1) | color
    std::vector<double> a_, b_;                // dim_-strided endpoints
    std::vector<uint8_t> colors_;
    std::vector<uint32_t> owners_;
};

} // namespace pfro
