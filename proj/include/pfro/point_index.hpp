#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pfro/geometry.hpp"
#include "pfro/model.hpp"

namespace pfro {

struct NearestPoint {
    uint64_t id = 0;
    Color color = Color::Red;
    double sq_dist = 0.0;
};

// Outcome of the red/blue nearest competition at a query point: the color of
// the overall nearest primitive decides (red on an exact squared-distance
// tie across colors). This is the one query the simulation and grid
// classification need, and it terminates after O(1) shells wherever
// primitives are locally dense — unlike a color-filtered query, which must
// dig all the way to the far color.
struct Competition {
    Color winner = Color::Red;
    uint64_t witness_id = 0; // smallest-id nearest primitive of the winning color
    double sq_dist = 0.0;
    bool tie = false; // exact cross-color tie, resolved to red
};

// Exact incremental nearest-site index over [0,1]^d: a uniform bucket grid
// whose power-of-two side doubles whenever average occupancy exceeds 4.
// Queries expand Chebyshev shells around the query cell and stop once the
// result provably beats everything in the unexplored region, which makes
// them exact (never approximate). Ties break toward the smallest site id,
// and all candidate distances use sq_dist, so results agree bit-for-bit with
// an exhaustive scan.
//
// Insertion is single-writer; a frozen index may be queried from any number
// of threads concurrently.
class PointIndex {
  public:
    explicit PointIndex(uint32_t dimension, uint64_t expected_count = 0);

    void insert(uint64_t id, const double* pos, Color color);

    uint64_t size() const { return ids_.size(); }
    uint64_t size(Color c) const { return count_[static_cast<int>(c)]; }
    uint32_t dimension() const { return dim_; }

    // Nearest site of the given color (or overall when color is nullopt).
    // Throws EmptyIndex if no site of the requested color exists.
    NearestPoint nearest(const double* x, std::optional<Color> color = std::nullopt) const;

    // Nearest-primitive competition (see Competition). Throws EmptyIndex on
    // an empty index.
    Competition nearest_competition(const double* x) const;

  private:
    void regrow();
    uint64_t total_cells_for(uint32_t side) const;
    uint64_t cell_of(const double* pos) const;
    void search(const double* x, const bool want[2], bool race, NearestPoint best[2],
                bool found[2]) const;

    uint32_t dim_;
    uint32_t side_ = 1; // cells per axis, power of two
    uint64_t n_cells_ = 1;
    uint64_t count_[2] = {0, 0};
    std::vector<std::vector<uint32_t>> cells_; // entries are (slot << 1) | color
    std::vector<double> coords_;               // slot-indexed, dim_-strided
    std::vector<uint8_t> colors_;
    std::vector<uint64_t> ids_; // dense slot -> caller id
};

} // namespace pfro
