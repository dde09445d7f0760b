#pragma once

#include <memory>
#include <optional>

#include "pfro/model.hpp"
#include "pfro/point_index.hpp"
#include "pfro/rng.hpp"
#include "pfro/segment_index.hpp"

namespace pfro {

struct StepResult {
    uint64_t site_id = 0;
    Color color = Color::Red;
    std::optional<uint64_t> segment_id; // segment model only
    bool tie = false;
};

// Live simulation state of the two-color growth process.
//
// Discrete mode: arrivals X_1, X_2, ... are i.i.d. uniform on [0,1]^d.
// Poisson mode: the same position stream, but each arrival also advances an
// Exp(1) clock (the arrival intensity over the unit cube is 1, so
// inter-arrival times are Exp(1)); the run ends when the clock would pass
// t_max. Positions and clock increments come from separate substreams of the
// run seed, so the first n arrival positions of a Poisson run coincide with
// the discrete run of the same seed.
//
// Each arrival takes the color of the nearest existing primitive — the
// nearest site in the point model; the nearest point of the colored segment
// union in the segment model, where the arrival also spawns the segment from
// that nearest point to itself. An exact red/blue distance tie goes to red
// (counted); an arrival landing exactly on an existing primitive is redrawn
// (counted).
class Process {
  public:
    explicit Process(ProcessConfig cfg); // validates the config

    // One arrival. In Poisson mode, the step whose clock draw passes t_max
    // records nothing and throws ClockExhausted (the draw is still consumed,
    // keeping replay deterministic); every later call throws immediately.
    StepResult step();

    // True when the configured horizon is known to be reached (discrete:
    // arrivals == n_points; Poisson: a step already exhausted the clock).
    bool finished() const;

    // Steps to the configured end.
    void run();

    // Records the current arrival count as a checkpoint.
    void mark_checkpoint();

    uint64_t arrivals() const { return stats_.arrivals; }
    double clock() const { return clock_; }
    const RunStats& stats() const { return stats_; }
    const ProcessConfig& config() const { return cfg_; }

    uint64_t site_count() const { return colors_.size(); }
    const double* site_position(uint64_t i) const { return positions_.data() + i * cfg_.dimension; }
    Color site_color(uint64_t i) const { return static_cast<Color>(colors_[i]); }
    uint64_t segment_count() const { return seg_color_.size(); }

    // Moves the accumulated state into a Snapshot; the Process is spent
    // afterwards. Checkpoints marked during the run are carried over.
    Snapshot finish();

  private:
    void record_site(const double* x, Color color, uint32_t parent, double time);

    ProcessConfig cfg_;
    Rng pos_rng_;
    Rng clock_rng_;
    double clock_ = 0.0;
    bool exhausted_ = false;
    RunStats stats_;
    std::vector<uint64_t> checkpoints_;

    std::vector<double> positions_;
    std::vector<uint8_t> colors_;
    std::vector<uint32_t> parents_;
    std::vector<double> arrival_times_;
    std::vector<double> seg_a_, seg_b_;
    std::vector<uint32_t> seg_owner_;
    std::vector<uint8_t> seg_color_;

    std::unique_ptr<PointIndex> point_index_;
    std::unique_ptr<SegmentIndex> segment_index_;
    std::vector<double> scratch_x_;
};

// Validate, run to completion, record the requested checkpoints (arrival
// counts), return the snapshot.
Snapshot run_process(ProcessConfig cfg, const std::vector<uint64_t>& checkpoints = {});

} // namespace pfro
