#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfro/errors.hpp"

namespace pfro {

enum class Color : uint8_t { Red = 0, Blue = 1 };

inline const char* color_name(Color c) {
    return c == Color::Red ? "red" : "blue";
}

enum class Model : uint8_t { Point = 0, Segment = 1 };
enum class TimeMode : uint8_t { Discrete = 0, Poisson = 1 };

constexpr uint32_t kNoParent = 0xffffffffu;

// One colored site. Sites are stored structure-of-arrays inside Snapshot;
// this is the materialized per-site view.
struct ColoredSite {
    uint64_t id = 0;            // seeds are 0 (red) and 1 (blue); arrival k gets id k+1
    uint64_t arrival_index = 0; // 0 for seeds, k for the k-th arrival
    Color color = Color::Red;
    std::span<const double> position;
    double arrival_time = std::numeric_limits<double>::quiet_NaN(); // NaN in discrete mode
    uint64_t parent_id = UINT64_MAX;                                // UINT64_MAX for seeds
};

// One colored segment (segment model). Seeds are zero-length segments; the
// k-th arrival contributes [attachment point on the structure, arrival].
struct SegmentPrimitive {
    uint64_t owner_site = 0;
    Color color = Color::Red;
    std::span<const double> a; // attachment end
    std::span<const double> b; // arrival end
};

struct ProcessConfig {
    uint32_t dimension = 2;
    Model model = Model::Point;
    TimeMode time_mode = TimeMode::Discrete;
    std::vector<double> seed_red;  // defaulted to (0.25, 0.5, ...) by validate() if empty
    std::vector<double> seed_blue; // defaulted to (0.75, 0.5, ...)
    std::optional<uint64_t> n_points; // discrete mode: number of arrivals
    std::optional<double> t_max;      // poisson mode: time horizon
    uint64_t rng_seed = 1;
};

// Fills defaults and throws InvalidConfig on any violated precondition.
void validate_config(ProcessConfig& cfg);

struct RunStats {
    uint64_t arrivals = 0;
    uint64_t ties_broken_red = 0;
    uint64_t duplicate_redraws = 0;
    double final_clock = 0.0; // poisson mode only
};

// Full state of a finished (or checkpointed) run. Sites are in arrival
// order, so a site's index in the arrays equals its id.
class Snapshot {
  public:
    ProcessConfig config;
    std::vector<uint64_t> checkpoints; // arrival counts recorded as prefixes
    RunStats stats;

    // structure-of-arrays site storage
    std::vector<double> positions;      // site_count * dimension
    std::vector<uint8_t> colors;        // Color per site
    std::vector<uint32_t> parents;      // kNoParent for seeds
    std::vector<double> arrival_times;  // empty in discrete mode

    // segment storage (segment model only; empty in point model)
    std::vector<double> seg_a; // segment_count * dimension
    std::vector<double> seg_b;
    std::vector<uint32_t> seg_owner;
    std::vector<uint8_t> seg_color;

    uint64_t site_count() const { return colors.size(); }
    uint64_t segment_count() const { return seg_color.size(); }
    uint32_t dim() const { return config.dimension; }

    const double* position(uint64_t i) const { return positions.data() + i * config.dimension; }
    Color color(uint64_t i) const { return static_cast<Color>(colors[i]); }

    ColoredSite site(uint64_t i) const {
        ColoredSite s;
        s.id = i;
        s.arrival_index = i < 2 ? 0 : i - 1;
        s.color = color(i);
        s.position = {position(i), config.dimension};
        s.arrival_time = arrival_times.empty() ? std::numeric_limits<double>::quiet_NaN()
                                               : arrival_times[i];
        s.parent_id = parents[i] == kNoParent ? UINT64_MAX : parents[i];
        return s;
    }

    SegmentPrimitive segment(uint64_t j) const {
        SegmentPrimitive s;
        s.owner_site = seg_owner[j];
        s.color = static_cast<Color>(seg_color[j]);
        s.a = {seg_a.data() + j * config.dimension, config.dimension};
        s.b = {seg_b.data() + j * config.dimension, config.dimension};
        return s;
    }

    // Snapshot of the state after the first n arrivals (plus seeds). The
    // prefix of a run is exactly the shorter run with the same seed, so the
    // returned config carries n_points = n (discrete semantics) and is
    // independently re-runnable; recorded arrival times are preserved.
    Snapshot prefix(uint64_t n_arrivals) const;
};

} // namespace pfro
