#include "pfro/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfro/detail/shell_walk.hpp"

namespace pfro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Cap on the cell count so high dimensions / huge runs degrade to higher
// occupancy instead of exhausting memory.
constexpr uint64_t kMaxCells = uint64_t(1) << 24;
constexpr uint64_t kOccupancyTarget = 4;
} // namespace

PointIndex::PointIndex(uint32_t dimension, uint64_t expected_count) : dim_(dimension) {
    if (dimension < 1) throw InvalidConfig("PointIndex: dimension must be >= 1");
    // jump straight to the final grid level when the caller knows the size
    while (total_cells_for(side_ * 2) <= kMaxCells &&
           expected_count > kOccupancyTarget * total_cells_for(side_)) {
        side_ *= 2;
    }
    n_cells_ = total_cells_for(side_);
    cells_.resize(n_cells_);
}

uint64_t PointIndex::total_cells_for(uint32_t side) const {
    uint64_t n = 1;
    for (uint32_t a = 0; a < dim_; ++a) {
        if (n > kMaxCells / side) return kMaxCells + 1; // past the cap; exact value irrelevant
        n *= side;
    }
    return n;
}

uint64_t PointIndex::cell_of(const double* pos) const {
    uint64_t idx = 0;
    for (uint32_t a = 0; a < dim_; ++a) {
        auto c = static_cast<int64_t>(pos[a] * side_);
        if (c < 0) c = 0;
        if (c >= side_) c = side_ - 1; // pos == 1.0 lands in the last cell
        idx = idx * side_ + static_cast<uint64_t>(c);
    }
    return idx;
}

void PointIndex::insert(uint64_t id, const double* pos, Color color) {
    for (uint32_t a = 0; a < dim_; ++a)
        if (!(pos[a] >= 0.0 && pos[a] <= 1.0))
            throw PreconditionViolated("PointIndex::insert: position outside [0,1]^d");
    const auto slot = static_cast<uint32_t>(ids_.size());
    ids_.push_back(id);
    colors_.push_back(static_cast<uint8_t>(color));
    coords_.insert(coords_.end(), pos, pos + dim_);
    cells_[cell_of(pos)].push_back((slot << 1) | static_cast<uint32_t>(color));
    ++count_[static_cast<int>(color)];
    if (ids_.size() > kOccupancyTarget * n_cells_ && total_cells_for(side_ * 2) <= kMaxCells)
        regrow();
}

void PointIndex::regrow() {
    side_ *= 2;
    n_cells_ = total_cells_for(side_);
    cells_.assign(n_cells_, {});
    for (uint32_t slot = 0; slot < ids_.size(); ++slot)
        cells_[cell_of(coords_.data() + uint64_t(slot) * dim_)].push_back((slot << 1) |
                                                                          colors_[slot]);
}

// Shell sweep shared by every query. want[c]: color c participates. race:
// stop as soon as the best distance across participating colors beats the
// unexplored region (nearest-competition mode); otherwise run until each
// participating color individually beats it (exact per-color answers).
void PointIndex::search(const double* x, const bool want[2], bool race, NearestPoint best[2],
                        bool found[2]) const {
    double best_sq[2] = {kInf, kInf};
    uint32_t best_slot[2] = {0, 0};
    found[0] = found[1] = false;

    detail::shell_walk(
        dim_, side_, x,
        [&](uint64_t cell_idx) {
            for (uint32_t entry : cells_[cell_idx]) {
                const int c = static_cast<int>(entry & 1u);
                if (!want[c]) continue;
                const uint32_t slot = entry >> 1;
                const double sq = sq_dist(x, coords_.data() + uint64_t(slot) * dim_, dim_);
                if (!found[c] || sq < best_sq[c] ||
                    (sq == best_sq[c] && ids_[slot] < ids_[best_slot[c]])) {
                    best_sq[c] = sq;
                    best_slot[c] = slot;
                    found[c] = true;
                }
            }
        },
        [&](bool /*covers_grid*/, double wall) {
            const double wall_sq = wall * wall;
            if (race) {
                double m = kInf;
                for (int c = 0; c < 2; ++c)
                    if (want[c] && found[c]) m = std::min(m, best_sq[c]);
                return m < wall_sq;
            }
            for (int c = 0; c < 2; ++c)
                if (want[c] && !(found[c] && best_sq[c] < wall_sq)) return false;
            return true;
        });

    for (int c = 0; c < 2; ++c) {
        if (!want[c] || !found[c]) continue;
        best[c].id = ids_[best_slot[c]];
        best[c].color = static_cast<Color>(c);
        best[c].sq_dist = best_sq[c];
    }
}

NearestPoint PointIndex::nearest(const double* x, std::optional<Color> color) const {
    bool want[2];
    if (color) {
        want[0] = (*color == Color::Red);
        want[1] = (*color == Color::Blue);
        if (count_[static_cast<int>(*color)] == 0)
            throw EmptyIndex("PointIndex: no site of the requested color");
    } else {
        if (ids_.empty()) throw EmptyIndex("PointIndex: empty");
        want[0] = count_[0] > 0;
        want[1] = count_[1] > 0;
    }
    NearestPoint best[2];
    bool found[2];
    search(x, want, /*race=*/false, best, found);
    if (color) return best[static_cast<int>(*color)];
    if (!found[1]) return best[0];
    if (!found[0]) return best[1];
    if (best[0].sq_dist < best[1].sq_dist) return best[0];
    if (best[1].sq_dist < best[0].sq_dist) return best[1];
    return best[0].id <= best[1].id ? best[0] : best[1];
}

Competition PointIndex::nearest_competition(const double* x) const {
    if (ids_.empty()) throw EmptyIndex("PointIndex: empty");
    const bool want[2] = {count_[0] > 0, count_[1] > 0};
    NearestPoint best[2];
    bool found[2];
    search(x, want, /*race=*/true, best, found);
    // The winner's distance is exact: anything unexplored is strictly
    // farther, so a cross-color tie is detectable from the found candidates.
    Competition res;
    if (found[0] && found[1] && best[0].sq_dist == best[1].sq_dist) {
        res = {Color::Red, best[0].id, best[0].sq_dist, true};
    } else if (found[0] && (!found[1] || best[0].sq_dist < best[1].sq_dist)) {
        res = {Color::Red, best[0].id, best[0].sq_dist, false};
    } else {
        res = {Color::Blue, best[1].id, best[1].sq_dist, false};
    }
    return res;
}

} // namespace pfro
