#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

namespace pfro::detail {

// Expanding Chebyshev-shell traversal of a side^dim bucket grid around the
// cell containing x. For r = 0, 1, 2, ... it invokes scan(flat_cell_index)
// for every grid cell at shell radius exactly r (clipped to the grid), then
// invokes stop(covers_grid, wall) where wall is the distance from x to the
// nearest face of the explored box that is not on the cube boundary
// (infinity when the box covers the whole grid). Traversal ends when stop
// returns true or the box covers the grid. Callers terminate only when their
// best squared distance is strictly below wall^2; everything unexplored is
// farther than wall, so results are exact and smallest-id tie-breaks are
// global.
template <class ScanCell, class StopAfterShell>
void shell_walk(uint32_t dim, uint32_t side, const double* x, ScanCell&& scan,
                StopAfterShell&& stop) {
    thread_local std::vector<int32_t> qc, lo, hi, cur;
    qc.resize(dim);
    lo.resize(dim);
    hi.resize(dim);
    cur.resize(dim);
    for (uint32_t a = 0; a < dim; ++a) {
        auto c = static_cast<int64_t>(x[a] * side);
        qc[a] = static_cast<int32_t>(std::clamp<int64_t>(c, 0, side - 1));
    }
    const double h = 1.0 / static_cast<double>(side);

    for (int32_t r = 0;; ++r) {
        if (r == 0) {
            uint64_t idx = 0;
            for (uint32_t a = 0; a < dim; ++a) idx = idx * side + qc[a];
            scan(idx);
        } else {
            // odometer over the clipped radius-r box, visiting only its shell
            bool nonempty = true;
            for (uint32_t a = 0; a < dim; ++a) {
                lo[a] = std::max<int32_t>(qc[a] - r, 0);
                hi[a] = std::min<int32_t>(qc[a] + r, static_cast<int32_t>(side) - 1);
                cur[a] = lo[a];
                if (lo[a] > hi[a]) nonempty = false;
            }
            while (nonempty) {
                bool on_shell = false;
                for (uint32_t a = 0; a < dim; ++a) {
                    const int32_t off = cur[a] - qc[a];
                    if (off == -r || off == r) {
                        on_shell = true;
                        break;
                    }
                }
                if (on_shell) {
                    uint64_t idx = 0;
                    for (uint32_t a = 0; a < dim; ++a) idx = idx * side + cur[a];
                    scan(idx);
                }
                uint32_t a = dim;
                bool carried = true;
                while (a-- > 0) {
                    ++cur[a];
                    if (cur[a] <= hi[a]) {
                        carried = false;
                        break;
                    }
                    cur[a] = lo[a];
                }
                if (carried) break;
            }
        }

        bool covers_grid = true;
        double wall = std::numeric_limits<double>::infinity();
        for (uint32_t a = 0; a < dim; ++a) {
            if (qc[a] - r > 0) {
                wall = std::min(wall, x[a] - static_cast<double>(qc[a] - r) * h);
                covers_grid = false;
            }
            if (qc[a] + r < static_cast<int32_t>(side) - 1) {
                wall = std::min(wall, static_cast<double>(qc[a] + r + 1) * h - x[a]);
                covers_grid = false;
            }
        }
        if (covers_grid || stop(covers_grid, wall)) return;
    }
}

} // namespace pfro::detail
