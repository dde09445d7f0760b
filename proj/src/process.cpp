#include "pfro/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfro {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

Process::Process(ProcessConfig cfg)
    : cfg_((validate_config(cfg), std::move(cfg))),
      pos_rng_(stream_seed(cfg_.rng_seed, Stream::Positions)),
      clock_rng_(stream_seed(cfg_.rng_seed, Stream::Clock)) {
    const uint32_t d = cfg_.dimension;
    const uint64_t expect =
        cfg_.time_mode == TimeMode::Discrete
            ? *cfg_.n_points + 2
            : static_cast<uint64_t>(std::max(0.0, *cfg_.t_max)) + 2; // mean arrivals = t_max
    scratch_x_.resize(d);

    if (cfg_.model == Model::Point) {
        point_index_ = std::make_unique<PointIndex>(d, expect);
    } else {
        segment_index_ = std::make_unique<SegmentIndex>(d, expect);
    }

    const bool poisson = cfg_.time_mode == TimeMode::Poisson;
    auto plant_seed = [&](const std::vector<double>& pos, Color color) {
        const auto id = static_cast<uint64_t>(colors_.size());
        positions_.insert(positions_.end(), pos.begin(), pos.end());
        colors_.push_back(static_cast<uint8_t>(color));
        parents_.push_back(kNoParent);
        if (poisson) arrival_times_.push_back(0.0);
        if (point_index_) {
            point_index_->insert(id, pos.data(), color);
        } else {
            // seeds live as zero-length segments: one query path for all primitives
            segment_index_->insert(pos.data(), pos.data(), color, id);
            seg_a_.insert(seg_a_.end(), pos.begin(), pos.end());
            seg_b_.insert(seg_b_.end(), pos.begin(), pos.end());
            seg_owner_.push_back(static_cast<uint32_t>(id));
            seg_color_.push_back(static_cast<uint8_t>(color));
        }
    };
    plant_seed(cfg_.seed_red, Color::Red);
    plant_seed(cfg_.seed_blue, Color::Blue);
}

bool Process::finished() const {
    if (cfg_.time_mode == TimeMode::Discrete) return stats_.arrivals >= *cfg_.n_points;
    return exhausted_;
}

void Process::record_site(const double* x, Color color, uint32_t parent, double time) {
    positions_.insert(positions_.end(), x, x + cfg_.dimension);
    colors_.push_back(static_cast<uint8_t>(color));
    parents_.push_back(parent);
    if (cfg_.time_mode == TimeMode::Poisson) arrival_times_.push_back(time);
    ++stats_.arrivals;
}

StepResult Process::step() {
    if (exhausted_) throw ClockExhausted("poisson clock already past t_max");

    double time = kNaN;
    if (cfg_.time_mode == TimeMode::Poisson) {
        const double dt = clock_rng_.exponential();
        if (clock_ + dt > *cfg_.t_max) {
            // stats_.final_clock keeps the last accepted arrival time
            clock_ += dt;
            exhausted_ = true;
            throw ClockExhausted("poisson clock passed t_max");
        }
        clock_ += dt;
        stats_.final_clock = clock_;
        time = clock_;
    }

    StepResult res;
    const uint32_t d = cfg_.dimension;
    double* x = scratch_x_.data();
    for (;;) {
        pos_rng_.fill_uniform(x, static_cast<int>(d));
        if (point_index_) {
            const Competition c = point_index_->nearest_competition(x);
            if (c.sq_dist == 0.0) { // landed exactly on an existing site: redraw
                ++stats_.duplicate_redraws;
                continue;
            }
            if (c.tie) ++stats_.ties_broken_red;
            const auto id = static_cast<uint64_t>(colors_.size());
            record_site(x, c.winner, static_cast<uint32_t>(c.witness_id), time);
            point_index_->insert(id, x, c.winner);
            res = {id, c.winner, std::nullopt, c.tie};
        } else {
            const SegmentCompetition c = segment_index_->nearest_competition(x);
            if (c.sq_dist == 0.0) { // landed exactly on the colored structure: redraw
                ++stats_.duplicate_redraws;
                continue;
            }
            if (c.tie) ++stats_.ties_broken_red;
            const auto id = static_cast<uint64_t>(colors_.size());
            record_site(x, c.winner, static_cast<uint32_t>(c.owner_site), time);
            // the new segment joins the arrival to the closest structure point
            const uint64_t seg =
                segment_index_->insert(c.closest.data(), x, c.winner, id);
            seg_a_.insert(seg_a_.end(), c.closest.begin(), c.closest.end());
            seg_b_.insert(seg_b_.end(), x, x + d);
            seg_owner_.push_back(static_cast<uint32_t>(id));
            seg_color_.push_back(static_cast<uint8_t>(c.winner));
            res = {id, c.winner, seg, c.tie};
        }
        break;
    }
    return res;
}

void Process::run() {
    if (cfg_.time_mode == TimeMode::Discrete) {
        while (stats_.arrivals < *cfg_.n_points) step();
    } else {
        try {
            for (;;) step();
        } catch (const ClockExhausted&) {
            // normal end of a poisson run
        }
    }
}

void Process::mark_checkpoint() {
    checkpoints_.push_back(stats_.arrivals);
}

Snapshot Process::finish() {
    Snapshot s;
    s.config = cfg_;
    s.checkpoints = std::move(checkpoints_);
    s.stats = stats_;
    s.positions = std::move(positions_);
    s.colors = std::move(colors_);
    s.parents = std::move(parents_);
    s.arrival_times = std::move(arrival_times_);
    s.seg_a = std::move(seg_a_);
    s.seg_b = std::move(seg_b_);
    s.seg_owner = std::move(seg_owner_);
    s.seg_color = std::move(seg_color_);
    return s;
}

Snapshot run_process(ProcessConfig cfg, const std::vector<uint64_t>& checkpoints) {
    Process p(std::move(cfg));
    std::vector<uint64_t> marks(checkpoints);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    size_t next = 0;
    auto note = [&] {
        while (next < marks.size() && p.arrivals() == marks[next]) {
            p.mark_checkpoint();
            ++next;
        }
    };
    note();
    if (p.config().time_mode == TimeMode::Discrete) {
        const uint64_t n = *p.config().n_points;
        while (p.arrivals() < n) {
            p.step();
            note();
        }
    } else {
        try {
            for (;;) {
                p.step();
                note();
            }
        } catch (const ClockExhausted&) {
        }
    }
    return p.finish();
}

} // namespace pfro
