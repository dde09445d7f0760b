#include "pfro/frontier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "pfro/detail/parallel.hpp"
#include "pfro/errors.hpp"
#include "pfro/geometry.hpp"

namespace pfro {

namespace {

uint64_t resolve_budget(uint64_t requested) {
    if (requested != 0) return requested;
    if (const char* env = std::getenv("PFRO_CLASSIFY_BUDGET_BYTES")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return uint64_t{1} << 30; // 1 GiB of vertex bytes
}

// (m+1)^dim with an explicit cap; the vertex array is one byte per vertex.
uint64_t vertex_count_or_throw(uint32_t m, uint32_t dim, uint64_t budget) {
    if (m < 1) throw InvalidConfig("grid resolution m must be >= 1");
    uint64_t v = 1;
    const uint64_t base = static_cast<uint64_t>(m) + 1;
    for (uint32_t a = 0; a < dim; ++a) {
        if (v > budget / base)
            throw ResolutionTooLarge("vertex grid exceeds the classification memory budget");
        v *= base;
    }
    return v;
}

} // namespace

Classifier::Classifier(const Snapshot& snap) : snap_(snap) {
    const uint32_t d = snap.dim();
    if (snap.config.model == Model::Point) {
        points_ = std::make_unique<PointIndex>(d, snap.site_count());
        for (uint64_t i = 0; i < snap.site_count(); ++i)
            points_->insert(i, snap.position(i), static_cast<Color>(snap.colors[i]));
    } else {
        if (snap.segment_count() == 0)
            throw PreconditionViolated("segment-model snapshot carries no segments");
        segments_ = std::make_unique<SegmentIndex>(d, snap.segment_count());
        for (uint64_t j = 0; j < snap.segment_count(); ++j)
            segments_->insert(&snap.seg_a[j * d], &snap.seg_b[j * d],
                              static_cast<Color>(snap.seg_color[j]), snap.seg_owner[j]);
    }
}

GridClassification Classifier::classify(uint32_t m, const ClassifyOptions& opt) const {
    const uint32_t d = snap_.dim();
    const uint64_t n_vertices = vertex_count_or_throw(m, d, resolve_budget(opt.budget_bytes));

    GridClassification g;
    g.dim = d;
    g.m = m;
    g.vertex_colors.resize(n_vertices);

    const uint64_t base = static_cast<uint64_t>(m) + 1;
    detail::parallel_blocks(n_vertices, opt.threads, [&](uint64_t begin, uint64_t end) {
        std::vector<double> x(d);
        for (uint64_t flat = begin; flat < end; ++flat) {
            uint64_t rest = flat;
            for (uint32_t a = d; a-- > 0;) {
                x[a] = static_cast<double>(rest % base) / m;
                rest /= base;
            }
            const Color c = points_ ? points_->nearest_competition(x.data()).winner
                                    : segments_->nearest_competition(x.data()).winner;
            g.vertex_colors[flat] = static_cast<uint8_t>(c);
        }
    });
    return g;
}

GridClassification Classifier::classify_slice(uint32_t axis, double offset, uint32_t m,
                                              const ClassifyOptions& opt) const {
    const uint32_t d = snap_.dim();
    if (d < 3) throw InvalidConfig("slice classification requires dimension >= 3");
    if (axis >= d) throw InvalidConfig("slice axis out of range");
    if (!(offset >= 0.0 && offset <= 1.0)) throw InvalidConfig("slice offset must lie in [0,1]");

    // Spanning axes: the two smallest indices different from `axis`; any
    // further coordinates sit at the cube midpoint.
    uint32_t span[2];
    uint32_t found = 0;
    for (uint32_t a = 0; a < d && found < 2; ++a)
        if (a != axis) span[found++] = a;

    const uint64_t n_vertices =
        vertex_count_or_throw(m, 2, resolve_budget(opt.budget_bytes));

    GridClassification g;
    g.dim = 2;
    g.m = m;
    g.vertex_colors.resize(n_vertices);

    const uint64_t base = static_cast<uint64_t>(m) + 1;
    detail::parallel_blocks(n_vertices, opt.threads, [&](uint64_t begin, uint64_t end) {
        std::vector<double> x(d, 0.5);
        x[axis] = offset;
        for (uint64_t flat = begin; flat < end; ++flat) {
            x[span[0]] = static_cast<double>(flat / base) / m;
            x[span[1]] = static_cast<double>(flat % base) / m;
            const Color c = points_ ? points_->nearest_competition(x.data()).winner
                                    : segments_->nearest_competition(x.data()).winner;
            g.vertex_colors[flat] = static_cast<uint8_t>(c);
        }
    });
    return g;
}

GridClassification classify_grid(const Snapshot& snap, uint32_t m, const ClassifyOptions& opt) {
    return Classifier(snap).classify(m, opt);
}

FrontierCells frontier_cells(const GridClassification& g) {
    FrontierCells f;
    f.dim = g.dim;
    f.m = g.m;
    const uint32_t d = g.dim;
    const uint32_t m = g.m;
    const uint64_t vbase = static_cast<uint64_t>(m) + 1;

    // Vertex-index stride per axis (last axis fastest).
    std::vector<uint64_t> stride(d);
    uint64_t s = 1;
    for (uint32_t a = d; a-- > 0;) {
        stride[a] = s;
        s *= vbase;
    }
    // Offsets of the 2^d cell corners relative to the cell's low vertex.
    const uint32_t corners = 1u << d;
    std::vector<uint64_t> corner_off(corners, 0);
    for (uint32_t mask = 0; mask < corners; ++mask)
        for (uint32_t a = 0; a < d; ++a)
            if (mask & (1u << a)) corner_off[mask] += stride[a];

    std::vector<uint32_t> c(d, 0);
    uint64_t low = 0; // vertex index of the cell's low corner
    for (;;) {
        const uint8_t c0 = g.vertex_colors[low];
        bool mixed = false;
        for (uint32_t mask = 1; mask < corners; ++mask) {
            if (g.vertex_colors[low + corner_off[mask]] != c0) {
                mixed = true;
                break;
            }
        }
        if (mixed) {
            uint64_t flat = 0;
            for (uint32_t a = 0; a < d; ++a) flat = flat * m + c[a];
            f.cells.push_back(flat);
        }
        // Odometer over cell coordinates, last axis fastest; keep `low` in step.
        uint32_t a = d;
        while (a-- > 0) {
            if (++c[a] < m) {
                low += stride[a];
                break;
            }
            c[a] = 0;
            low -= stride[a] * (m - 1);
        }
        if (a == UINT32_MAX) break; // wrapped every axis: done
    }
    // Row-major generation with axis 0 most significant is already sorted.
    return f;
}

ComponentReport connected_components(const FrontierCells& f) {
    const uint64_t n = f.cells.size();
    ComponentReport rep;
    if (n == 0) return rep;

    std::vector<uint64_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<uint64_t> rank(n, 0);
    auto find = [&](uint64_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    auto unite = [&](uint64_t i, uint64_t j) {
        i = find(i);
        j = find(j);
        if (i == j) return;
        if (rank[i] < rank[j]) std::swap(i, j);
        parent[j] = i;
        if (rank[i] == rank[j]) ++rank[i];
    };

    // Cell-index stride per axis (axis 0 most significant).
    const uint32_t d = f.dim;
    const uint64_t m = f.m;
    std::vector<uint64_t> stride(d);
    uint64_t s = 1;
    for (uint32_t a = d; a-- > 0;) {
        stride[a] = s;
        s *= m;
    }
    for (uint64_t i = 0; i < n; ++i) {
        const uint64_t flat = f.cells[i];
        uint64_t rest = flat;
        for (uint32_t a = d; a-- > 0;) {
            const uint64_t coord = rest % m;
            rest /= m;
            if (coord + 1 < m) {
                const uint64_t nb = flat + stride[a];
                const auto it = std::lower_bound(f.cells.begin(), f.cells.end(), nb);
                if (it != f.cells.end() && *it == nb)
                    unite(i, static_cast<uint64_t>(it - f.cells.begin()));
            }
        }
    }

    std::vector<uint64_t> size_of(n, 0);
    for (uint64_t i = 0; i < n; ++i) ++size_of[find(i)];
    for (uint64_t i = 0; i < n; ++i)
        if (size_of[i] > 0) rep.sizes.push_back(size_of[i]);
    std::sort(rep.sizes.begin(), rep.sizes.end(), std::greater<>());
    rep.component_count = rep.sizes.size();
    return rep;
}

namespace {

// One-sided directed Hausdorff: max over a of the distance to the set b.
double directed_hausdorff(const std::vector<double>& a, const std::vector<double>& b,
                          uint32_t dim) {
    const uint64_t nb = b.size() / dim;
    bool indexable = true;
    for (double v : b)
        if (!(v >= 0.0 && v <= 1.0)) {
            indexable = false;
            break;
        }
    for (double v : a)
        if (!(v >= 0.0 && v <= 1.0)) {
            indexable = false;
            break;
        }
    double worst = 0.0;
    if (indexable) {
        PointIndex idx(dim, nb);
        for (uint64_t j = 0; j < nb; ++j) idx.insert(j, &b[j * dim], Color::Red);
        const uint64_t na = a.size() / dim;
        for (uint64_t i = 0; i < na; ++i)
            worst = std::max(worst, idx.nearest(&a[i * dim]).sq_dist);
    } else {
        const uint64_t na = a.size() / dim;
        for (uint64_t i = 0; i < na; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (uint64_t j = 0; j < nb; ++j)
                best = std::min(best, sq_dist(&a[i * dim], &b[j * dim], dim));
            worst = std::max(worst, best);
        }
    }
    return std::sqrt(worst);
}

} // namespace

double hausdorff_distance(const std::vector<double>& a, const std::vector<double>& b,
                          uint32_t dim) {
    if (dim == 0) throw InvalidConfig("dimension must be >= 1");
    if (a.empty() || b.empty()) throw EmptySet("hausdorff distance of an empty set");
    if (a.size() % dim != 0 || b.size() % dim != 0)
        throw InvalidConfig("flat point array length must be a multiple of dim");
    return std::max(directed_hausdorff(a, b, dim), directed_hausdorff(b, a, dim));
}

std::vector<double> frontier_centers(const FrontierCells& f) {
    std::vector<double> out;
    out.reserve(f.cells.size() * f.dim);
    for (uint64_t flat : f.cells) {
        const auto x = f.cell_center(flat);
        out.insert(out.end(), x.begin(), x.end());
    }
    return out;
}

std::vector<double> frontier_convergence_series(const Snapshot& snap,
                                                const std::vector<uint64_t>& checkpoints,
                                                uint32_t m, const ClassifyOptions& opt) {
    std::vector<uint64_t> marks = checkpoints;
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    std::vector<double> out;
    if (marks.size() < 2) return out;

    std::vector<double> prev;
    for (size_t i = 0; i < marks.size(); ++i) {
        const Snapshot part = snap.prefix(marks[i]);
        const auto cells = frontier_cells(classify_grid(part, m, opt));
        auto centers = frontier_centers(cells);
        if (i > 0) out.push_back(hausdorff_distance(prev, centers, snap.dim()));
        prev = std::move(centers);
    }
    return out;
}

} // namespace pfro
