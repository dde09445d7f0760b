#pragma once

// Exhaustive-scan reference implementations the fast structures are tested
// against. Everything here is deliberately O(n) or worse per query and uses
// the same primitive arithmetic (sq_dist, point_segment_sq_dist), so answers
// must agree bit-for-bit with the indices, not just approximately.

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pfro/geometry.hpp"
#include "pfro/model.hpp"

namespace oracle {

struct SiteRec {
    uint64_t id;
    std::vector<double> pos;
    pfro::Color color;
};

struct SegRec {
    uint64_t id; // insertion order, same as SegmentIndex ids
    uint64_t owner;
    std::vector<double> a, b;
    pfro::Color color;
};

struct PointAnswer {
    bool found = false;
    uint64_t id = 0;
    double sq = std::numeric_limits<double>::infinity();
};

// Per-color nearest site: min squared distance, smaller id on exact ties.
inline PointAnswer nearest_site_of_color(const std::vector<SiteRec>& sites, const double* x,
                                         int dim, pfro::Color color) {
    PointAnswer best;
    for (const auto& s : sites) {
        if (s.color != color) continue;
        const double sq = pfro::sq_dist(x, s.pos.data(), dim);
        if (!best.found || sq < best.sq || (sq == best.sq && s.id < best.id)) {
            best = {true, s.id, sq};
        }
    }
    return best;
}

struct CompetitionAnswer {
    pfro::Color winner = pfro::Color::Red;
    uint64_t witness = 0;
    double sq = 0.0;
    bool tie = false;
};

// Overall nearest site with red-on-tie (the arrival rule).
inline CompetitionAnswer competition_site(const std::vector<SiteRec>& sites, const double* x,
                                          int dim) {
    const auto r = nearest_site_of_color(sites, x, dim, pfro::Color::Red);
    const auto b = nearest_site_of_color(sites, x, dim, pfro::Color::Blue);
    CompetitionAnswer out;
    if (r.found && b.found && r.sq == b.sq) {
        out = {pfro::Color::Red, r.id, r.sq, true};
    } else if (r.found && (!b.found || r.sq < b.sq)) {
        out = {pfro::Color::Red, r.id, r.sq, false};
    } else {
        out = {pfro::Color::Blue, b.id, b.sq, false};
    }
    return out;
}

// Unfiltered nearest site: smaller id breaks exact cross-color ties.
inline PointAnswer nearest_site_any(const std::vector<SiteRec>& sites, const double* x, int dim) {
    const auto r = nearest_site_of_color(sites, x, dim, pfro::Color::Red);
    const auto b = nearest_site_of_color(sites, x, dim, pfro::Color::Blue);
    if (!b.found) return r;
    if (!r.found) return b;
    if (r.sq < b.sq) return r;
    if (b.sq < r.sq) return b;
    return r.id <= b.id ? r : b;
}

struct SegAnswer {
    bool found = false;
    uint64_t seg_id = 0;
    uint64_t owner = 0;
    double sq = std::numeric_limits<double>::infinity();
    std::vector<double> closest;
};

inline SegAnswer nearest_segment_of_color(const std::vector<SegRec>& segs, const double* x,
                                          int dim, pfro::Color color) {
    SegAnswer best;
    std::vector<double> cand(dim);
    for (const auto& s : segs) {
        if (s.color != color) continue;
        const double sq = pfro::point_segment_sq_dist(x, s.a.data(), s.b.data(), dim, cand.data());
        if (!best.found || sq < best.sq || (sq == best.sq && s.id < best.seg_id)) {
            best.found = true;
            best.seg_id = s.id;
            best.owner = s.owner;
            best.sq = sq;
            best.closest = cand;
        }
    }
    return best;
}

struct SegCompetitionAnswer {
    pfro::Color winner = pfro::Color::Red;
    uint64_t seg_id = 0;
    uint64_t owner = 0;
    double sq = 0.0;
    bool tie = false;
    std::vector<double> closest;
};

inline SegCompetitionAnswer competition_segment(const std::vector<SegRec>& segs, const double* x,
                                                int dim) {
    const auto r = nearest_segment_of_color(segs, x, dim, pfro::Color::Red);
    const auto b = nearest_segment_of_color(segs, x, dim, pfro::Color::Blue);
    SegCompetitionAnswer out;
    const SegAnswer* w = nullptr;
    if (r.found && b.found && r.sq == b.sq) {
        w = &r;
        out.tie = true;
        out.winner = pfro::Color::Red;
    } else if (r.found && (!b.found || r.sq < b.sq)) {
        w = &r;
        out.winner = pfro::Color::Red;
    } else {
        w = &b;
        out.winner = pfro::Color::Blue;
    }
    out.seg_id = w->seg_id;
    out.owner = w->owner;
    out.sq = w->sq;
    out.closest = w->closest;
    return out;
}

// Double-loop Hausdorff distance between flat point sets.
inline double hausdorff(const std::vector<double>& A, const std::vector<double>& B, int dim) {
    auto directed = [&](const std::vector<double>& from, const std::vector<double>& to) {
        double worst = 0.0;
        for (size_t i = 0; i < from.size(); i += dim) {
            double best = std::numeric_limits<double>::infinity();
            for (size_t j = 0; j < to.size(); j += dim)
                best = std::min(best, pfro::sq_dist(from.data() + i, to.data() + j, dim));
            worst = std::max(worst, best);
        }
        return worst;
    };
    const double m = std::max(directed(A, B), directed(B, A));
    return std::sqrt(m);
}

} // namespace oracle
