#include "pfro/segment_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pfro/detail/shell_walk.hpp"

namespace pfro {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr uint64_t kMaxCells = uint64_t(1) << 24;
constexpr uint64_t kOccupancyTarget = 4;
} // namespace

struct SegmentIndex::Best {
    double sq = kInf;
    uint32_t seg = 0;
    bool found = false;
    std::vector<double> closest;
};

SegmentIndex::SegmentIndex(uint32_t dimension, uint64_t expected_count) : dim_(dimension) {
    if (dimension < 1) throw InvalidConfig("SegmentIndex: dimension must be >= 1");
    while (total_cells_for(side_ * 2) <= kMaxCells &&
           expected_count > kOccupancyTarget * total_cells_for(side_)) {
        side_ *= 2;
    }
    n_cells_ = total_cells_for(side_);
    cells_.resize(n_cells_);
}

uint64_t SegmentIndex::total_cells_for(uint32_t side) const {
    uint64_t n = 1;
    for (uint32_t a = 0; a < dim_; ++a) {
        if (n > kMaxCells / side) return kMaxCells + 1;
        n *= side;
    }
    return n;
}

// Registers the segment in every cell whose (slightly padded) closed box it
// touches. The pad absorbs rounding on exact cell-boundary grazes:
// over-inclusion costs a wasted distance evaluation, under-inclusion would
// break exactness, so the test is conservative.
void SegmentIndex::bucket_segment(uint32_t entry, const double* a, const double* b) {
    thread_local std::vector<int32_t> clo, chi, cur;
    thread_local std::vector<double> boxlo, boxhi;
    clo.resize(dim_);
    chi.resize(dim_);
    cur.resize(dim_);
    boxlo.resize(dim_);
    boxhi.resize(dim_);
    const double h = 1.0 / static_cast<double>(side_);
    const double pad = h * 1e-9;
    for (uint32_t ax = 0; ax < dim_; ++ax) {
        const double lo = std::min(a[ax], b[ax]);
        const double hi = std::max(a[ax], b[ax]);
        clo[ax] = static_cast<int32_t>(
            std::clamp<int64_t>(static_cast<int64_t>(lo * side_), 0, side_ - 1));
        chi[ax] = static_cast<int32_t>(
            std::clamp<int64_t>(static_cast<int64_t>(hi * side_), 0, side_ - 1));
        cur[ax] = clo[ax];
    }
    while (true) {
        for (uint32_t ax = 0; ax < dim_; ++ax) {
            boxlo[ax] = cur[ax] * h;
            boxhi[ax] = (cur[ax] + 1) * h;
        }
        if (segment_intersects_box(a, b, boxlo.data(), boxhi.data(), static_cast<int>(dim_),
                                   pad)) {
            uint64_t idx = 0;
            for (uint32_t ax = 0; ax < dim_; ++ax) idx = idx * side_ + cur[ax];
            cells_[idx].push_back(entry);
        }
        uint32_t ax = dim_;
        bool carried = true;
        while (ax-- > 0) {
            ++cur[ax];
            if (cur[ax] <= chi[ax]) {
                carried = false;
                break;
            }
            cur[ax] = clo[ax];
        }
        if (carried) break;
    }
}

uint64_t SegmentIndex::insert(const double* a, const double* b, Color color, uint64_t owner_site) {
    for (uint32_t ax = 0; ax < dim_; ++ax) {
        if (!(a[ax] >= 0.0 && a[ax] <= 1.0) || !(b[ax] >= 0.0 && b[ax] <= 1.0))
            throw PreconditionViolated("SegmentIndex::insert: endpoint outside [0,1]^d");
    }
    const auto id = static_cast<uint32_t>(colors_.size());
    colors_.push_back(static_cast<uint8_t>(color));
    owners_.push_back(static_cast<uint32_t>(owner_site));
    a_.insert(a_.end(), a, a + dim_);
    b_.insert(b_.end(), b, b + dim_);
    bucket_segment((id << 1) | static_cast<uint32_t>(color), a, b);
    ++count_[static_cast<int>(color)];
    if (colors_.size() > kOccupancyTarget * n_cells_ && total_cells_for(side_ * 2) <= kMaxCells)
        regrow();
    return id;
}

void SegmentIndex::regrow() {
    side_ *= 2;
    n_cells_ = total_cells_for(side_);
    cells_.assign(n_cells_, {});
    for (uint32_t id = 0; id < colors_.size(); ++id)
        bucket_segment((id << 1) | colors_[id], a_.data() + uint64_t(id) * dim_,
                       b_.data() + uint64_t(id) * dim_);
}

void SegmentIndex::search(const double* x, const bool want[2], bool race, Best best[2]) const {
    best[0] = Best{};
    best[1] = Best{};
    best[0].closest.resize(dim_);
    best[1].closest.resize(dim_);
    thread_local std::vector<double> cand;
    cand.resize(dim_);

    detail::shell_walk(
        dim_, side_, x,
        [&](uint64_t cell_idx) {
            for (uint32_t entry : cells_[cell_idx]) {
                const int c = static_cast<int>(entry & 1u);
                if (!want[c]) continue;
                const uint32_t seg = entry >> 1;
                const double sq =
                    point_segment_sq_dist(x, a_.data() + uint64_t(seg) * dim_,
                                          b_.data() + uint64_t(seg) * dim_,
                                          static_cast<int>(dim_), cand.data());
                if (!best[c].found || sq < best[c].sq ||
                    (sq == best[c].sq && seg < best[c].seg)) {
                    best[c].sq = sq;
                    best[c].seg = seg;
                    best[c].found = true;
                    std::copy(cand.begin(), cand.end(), best[c].closest.begin());
                }
            }
        },
        [&](bool /*covers_grid*/, double wall) {
            const double wall_sq = wall * wall;
            if (race) {
                double m = kInf;
                for (int c = 0; c < 2; ++c)
                    if (want[c] && best[c].found) m = std::min(m, best[c].sq);
                return m < wall_sq;
            }
            for (int c = 0; c < 2; ++c)
                if (want[c] && !(best[c].found && best[c].sq < wall_sq)) return false;
            return true;
        });
}

NearestSegment SegmentIndex::nearest(const double* x, std::optional<Color> color) const {
    bool want[2];
    if (color) {
        want[0] = (*color == Color::Red);
        want[1] = (*color == Color::Blue);
        if (count_[static_cast<int>(*color)] == 0)
            throw EmptyIndex("SegmentIndex: no segment of the requested color");
    } else {
        if (colors_.empty()) throw EmptyIndex("SegmentIndex: empty");
        want[0] = count_[0] > 0;
        want[1] = count_[1] > 0;
    }
    Best best[2];
    search(x, want, /*race=*/false, best);
    auto materialize = [&](int c) {
        NearestSegment n;
        n.segment_id = best[c].seg;
        n.owner_site = owners_[best[c].seg];
        n.color = static_cast<Color>(c);
        n.sq_dist = best[c].sq;
        n.closest = std::move(best[c].closest);
        return n;
    };
    if (color) return materialize(static_cast<int>(*color));
    if (!best[1].found) return materialize(0);
    if (!best[0].found) return materialize(1);
    if (best[0].sq < best[1].sq) return materialize(0);
    if (best[1].sq < best[0].sq) return materialize(1);
    return best[0].seg <= best[1].seg ? materialize(0) : materialize(1);
}

SegmentCompetition SegmentIndex::nearest_competition(const double* x) const {
    if (colors_.empty()) throw EmptyIndex("SegmentIndex: empty");
    const bool want[2] = {count_[0] > 0, count_[1] > 0};
    Best best[2];
    search(x, want, /*race=*/true, best);
    SegmentCompetition res;
    int c;
    if (best[0].found && best[1].found && best[0].sq == best[1].sq) {
        c = 0;
        res.tie = true;
    } else if (best[0].found && (!best[1].found || best[0].sq < best[1].sq)) {
        c = 0;
    } else {
        c = 1;
    }
    res.winner = static_cast<Color>(c);
    res.segment_id = best[c].seg;
    res.owner_site = owners_[best[c].seg];
    res.sq_dist = best[c].sq;
    res.closest = std::move(best[c].closest);
    return res;
}

} // namespace pfro
