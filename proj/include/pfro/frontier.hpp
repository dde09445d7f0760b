#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pfro/model.hpp"
#include "pfro/point_index.hpp"
#include "pfro/segment_index.hpp"

namespace pfro {

// Vertex coloring of the regular grid with spacing 1/m: vertex v = (i_0..i_{d-1})/m
// takes the color of the nearest primitive of the snapshot (red on exact
// ties, matching arrival semantics). Cells whose 2^d corner vertices do not
// all agree are the frontier cells — they are exactly the cells the
// equidistant set can cross at this resolution.
struct GridClassification {
    uint32_t dim = 2;
    uint32_t m = 1;                    // cells per axis; (m+1)^dim vertices
    std::vector<uint8_t> vertex_colors; // row-major, last axis fastest

    uint64_t vertex_index(const uint32_t* v) const {
        uint64_t idx = 0;
        for (uint32_t a = 0; a < dim; ++a) idx = idx * (m + 1) + v[a];
        return idx;
    }
    Color vertex_color(const uint32_t* v) const {
        return static_cast<Color>(vertex_colors[vertex_index(v)]);
    }
};

// Frontier cells at one scale, as sorted flattened cell indices (row-major
// with axis 0 most significant, so index order equals lexicographic order of
// the integer coordinate tuples — the canonical order of every export).
struct FrontierCells {
    uint32_t dim = 2;
    uint32_t m = 1;
    std::vector<uint64_t> cells;

    double delta() const { return 1.0 / static_cast<double>(m); }
    uint64_t count() const { return cells.size(); }

    std::vector<uint32_t> cell_coords(uint64_t flat) const {
        std::vector<uint32_t> c(dim);
        for (uint32_t a = dim; a-- > 0;) {
            c[a] = static_cast<uint32_t>(flat % m);
            flat /= m;
        }
        return c;
    }
    // Center of a cell, as a point in [0,1]^dim.
    std::vector<double> cell_center(uint64_t flat) const {
        auto c = cell_coords(flat);
        std::vector<double> x(dim);
        for (uint32_t a = 0; a < dim; ++a) x[a] = (c[a] + 0.5) / m;
        return x;
    }
};

struct ComponentReport {
    uint64_t component_count = 0;
    std::vector<uint64_t> sizes; // cells per component, descending
};

struct ClassifyOptions {
    // Memory guard: (m+1)^dim vertex bytes must fit the budget. Defaults to
    // the PFRO_CLASSIFY_BUDGET_BYTES environment variable, else 1 GiB.
    uint64_t budget_bytes = 0; // 0 = resolve from env/default
    uint32_t threads = 0;      // 0 = hardware concurrency
};

// Reusable classifier: builds the nearest-primitive index for a snapshot once
// and classifies any number of grids/slices against it.
class Classifier {
  public:
    explicit Classifier(const Snapshot& snap);
    GridClassification classify(uint32_t m, const ClassifyOptions& opt = {}) const;
    // 2-d grid on the slice plane x[axis] = offset (remaining coordinates
    // beyond the two spanning axes fixed at 0.5; for dim 3 the slice is the
    // full plane normal to `axis`). Requires snapshot dimension >= 3.
    GridClassification classify_slice(uint32_t axis, double offset, uint32_t m,
                                      const ClassifyOptions& opt = {}) const;

  private:
    const Snapshot& snap_;
    std::unique_ptr<PointIndex> points_;
    std::unique_ptr<SegmentIndex> segments_;
};

GridClassification classify_grid(const Snapshot& snap, uint32_t m, const ClassifyOptions& opt = {});

FrontierCells frontier_cells(const GridClassification& g);

// Face-adjacency connected components (cells sharing a (d-1)-face).
ComponentReport connected_components(const FrontierCells& f);

// Hausdorff distance between two finite point sets (flat, dim-strided).
// Throws EmptySet if either set is empty.
double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b, uint32_t dim);

// Centers of all frontier cells as a flat array (for Hausdorff arguments).
std::vector<double> frontier_centers(const FrontierCells& f);

// Hausdorff distances between consecutive checkpoint frontiers at scale m:
// result[i] = d_H(F(checkpoint i), F(checkpoint i+1)). Throws EmptySet if a
// checkpoint's frontier is empty (cannot happen while both colors exist at
// scales where the regions are resolved).
std::vector<double> frontier_convergence_series(const Snapshot& snap,
                                                const std::vector<uint64_t>& checkpoints,
                                                uint32_t m, const ClassifyOptions& opt = {});

} // namespace pfro
