#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfro/curve_split.hpp"
#include "pfro/errors.hpp"
#include "pfro/experiment.hpp"
#include "pfro/fractal.hpp"
#include "pfro/frontier.hpp"
#include "pfro/model.hpp"
#include "pfro/process.hpp"
#include "pfro/snapshot_io.hpp"
#include "pfro/svg.hpp"

namespace {

using nlohmann::json;

// CSV vertex list: one vertex per line, comma-separated coordinates; a
// non-numeric first line is treated as a header; '#' lines are comments.
pfro::Polyline read_polyline_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw pfro::FormatError("cannot open: " + path);
    std::vector<double> flat;
    size_t cols = 0, lineno = 0;
    std::string line;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string tok;
        bool numeric = true;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t used = 0;
                vals.push_back(std::stod(tok, &used));
                while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used])))
                    ++used;
                if (used != tok.size()) numeric = false;
            } catch (const std::exception&) {
                numeric = false;
            }
            if (!numeric) break;
        }
        if (!numeric) {
            if (flat.empty() && cols == 0) continue; // header line
            throw pfro::FormatError("non-numeric vertex row at line " + std::to_string(lineno));
        }
        if (vals.empty()) continue;
        if (cols == 0) cols = vals.size();
        if (vals.size() != cols)
            throw pfro::FormatError("inconsistent column count at line " + std::to_string(lineno));
        flat.insert(flat.end(), vals.begin(), vals.end());
    }
    if (flat.empty()) throw pfro::FormatError("no vertices in " + path);
    return pfro::Polyline(static_cast<uint32_t>(cols), std::move(flat));
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw pfro::FormatError("cannot open for writing: " + path);
    f << text;
    if (!f) throw pfro::FormatError("write failed: " + path);
}

json split_output_json(const pfro::SplitOutput& split) {
    json j;
    j["span"] = split.span;
    j["delta"] = split.delta;
    j["kappa"] = split.kappa();
    json intervals = json::array();
    json spans = json::array();
    for (size_t i = 0; i < split.subpaths.size(); ++i) {
        intervals.push_back({split.intervals[i].first, split.intervals[i].second});
        spans.push_back(split.subpaths[i].endpoint_span());
    }
    j["intervals"] = intervals;
    j["subpath_spans"] = spans;
    return j;
}

json split_tree_json(const pfro::SplitTree& tree) {
    json j;
    j["alpha"] = tree.alpha;
    j["k0"] = tree.k0;
    j["levels"] = tree.levels;
    j["level_weight_sums"] = tree.level_weight_sums();
    j["level_max_weights"] = tree.level_max_weights();
    json nodes = json::array();
    for (const auto& n : tree.nodes) {
        json jn;
        jn["t_lo"] = n.t_lo;
        jn["t_hi"] = n.t_hi;
        jn["level"] = n.level;
        jn["kappa"] = n.kappa;
        jn["weight"] = n.weight;
        jn["children"] = n.children;
        nodes.push_back(jn);
    }
    j["nodes"] = nodes;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pfro: two-color nearest-neighbor growth on the unit cube - "
                 "simulation, frontier analysis, and curve splitting"};
    app.set_version_flag("--version", std::string("pfro ") + pfro::kVersion);
    app.require_subcommand(1);

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run the coloring process, write a snapshot");
    uint32_t sim_dim = 2;
    std::string sim_model = "point";
    uint64_t sim_n = 0;
    bool sim_has_n = false;
    bool sim_poisson = false;
    double sim_tmax = 0.0;
    bool sim_has_tmax = false;
    uint64_t sim_rng = 1;
    std::vector<double> sim_red, sim_blue;
    std::vector<uint64_t> sim_checkpoints;
    std::string sim_out, sim_csv;
    sim->add_option("--dim", sim_dim, "dimension d >= 1 (default 2)");
    sim->add_option("--model", sim_model, "point|segment")->check(CLI::IsMember({"point", "segment"}));
    sim->add_option("--n", sim_n, "number of arrivals (discrete mode)")
        ->trigger_on_parse()
        ->each([&](const std::string&) { sim_has_n = true; });
    sim->add_flag("--poisson", sim_poisson, "poisson time mode (requires --t-max)");
    sim->add_option("--t-max", sim_tmax, "time horizon (poisson mode)")
        ->trigger_on_parse()
        ->each([&](const std::string&) { sim_has_tmax = true; });
    sim->add_option("--rng", sim_rng, "rng seed (default 1)");
    sim->add_option("--seed-red", sim_red, "red seed coordinates x,y,...")->delimiter(',');
    sim->add_option("--seed-blue", sim_blue, "blue seed coordinates x,y,...")->delimiter(',');
    sim->add_option("--checkpoints", sim_checkpoints, "arrival counts to checkpoint")
        ->delimiter(',');
    sim->add_option("--out", sim_out, "snapshot output file")->required();
    sim->add_option("--csv", sim_csv, "also export sites as CSV");
    sim->callback([&] {
        pfro::ProcessConfig cfg;
        cfg.dimension = sim_dim;
        cfg.model = sim_model == "point" ? pfro::Model::Point : pfro::Model::Segment;
        cfg.time_mode = sim_poisson ? pfro::TimeMode::Poisson : pfro::TimeMode::Discrete;
        if (sim_has_n) cfg.n_points = sim_n;
        if (sim_has_tmax) cfg.t_max = sim_tmax;
        if (!sim_has_n && !sim_poisson && !sim_has_tmax) cfg.n_points = 0;
        cfg.rng_seed = sim_rng;
        cfg.seed_red = sim_red;
        cfg.seed_blue = sim_blue;
        const pfro::Snapshot snap = pfro::run_process(cfg, sim_checkpoints);
        pfro::write_snapshot_file(snap, sim_out);
        if (!sim_csv.empty()) {
            std::ofstream f(sim_csv, std::ios::binary | std::ios::trunc);
            if (!f) throw pfro::FormatError("cannot open for writing: " + sim_csv);
            pfro::write_sites_csv(snap, f);
        }
        std::cout << "sites=" << snap.site_count() << " segments=" << snap.segment_count()
                  << " ties=" << snap.stats.ties_broken_red
                  << " duplicates=" << snap.stats.duplicate_redraws;
        if (cfg.time_mode == pfro::TimeMode::Poisson)
            std::cout << " final_clock=" << pfro::format_double(snap.stats.final_clock);
        std::cout << " out=" << sim_out << "\n";
    });

    // ---- render ------------------------------------------------------------
    auto* ren = app.add_subcommand("render", "render a 2-d snapshot to SVG");
    std::string ren_in, ren_out;
    uint32_t ren_frontier_m = 0;
    pfro::SvgOptions ren_opt;
    bool ren_no_sites = false;
    uint32_t ren_threads = 0;
    ren->add_option("--in", ren_in, "snapshot file")->required();
    ren->add_option("--out", ren_out, "SVG output file")->required();
    ren->add_option("--frontier-m", ren_frontier_m, "overlay frontier cells at this resolution");
    ren->add_option("--size", ren_opt.size_px, "canvas edge in px (default 800)");
    ren->add_option("--point-radius", ren_opt.point_radius, "site dot radius in px");
    ren->add_option("--segment-width", ren_opt.segment_width, "segment stroke width in px");
    ren->add_flag("--no-sites", ren_no_sites, "draw segments/overlay only");
    ren->add_option("--threads", ren_threads, "classification threads (0 = all cores)");
    ren->callback([&] {
        const pfro::Snapshot snap = pfro::read_snapshot_file(ren_in);
        ren_opt.draw_sites = !ren_no_sites;
        if (ren_frontier_m > 0) {
            pfro::ClassifyOptions copt;
            copt.threads = ren_threads;
            const auto cells =
                pfro::frontier_cells(pfro::classify_grid(snap, ren_frontier_m, copt));
            pfro::write_svg_file(snap, &cells, ren_opt, ren_out);
        } else {
            pfro::write_svg_file(snap, nullptr, ren_opt, ren_out);
        }
        std::cout << "svg=" << ren_out << "\n";
    });

    // ---- frontier ----------------------------------------------------------
    auto* fro = app.add_subcommand("frontier", "extract frontier cells at a grid resolution");
    std::string fro_in, fro_csv, fro_json;
    uint32_t fro_m = 0, fro_threads = 0;
    fro->add_option("--in", fro_in, "snapshot file")->required();
    fro->add_option("--m", fro_m, "cells per axis")->required();
    fro->add_option("--csv", fro_csv, "write cell integer coordinates as CSV");
    fro->add_option("--json", fro_json, "write stats block (delta, count, components) as JSON");
    fro->add_option("--threads", fro_threads, "classification threads (0 = all cores)");
    fro->callback([&] {
        const pfro::Snapshot snap = pfro::read_snapshot_file(fro_in);
        pfro::ClassifyOptions copt;
        copt.threads = fro_threads;
        const auto cells = pfro::frontier_cells(pfro::classify_grid(snap, fro_m, copt));
        const auto comp = pfro::connected_components(cells);
        if (!fro_csv.empty()) {
            std::string out;
            for (uint32_t a = 0; a < cells.dim; ++a) {
                if (a) out += ',';
                out += "c" + std::to_string(a);
            }
            out += '\n';
            for (uint64_t flat : cells.cells) {
                const auto c = cells.cell_coords(flat);
                for (uint32_t a = 0; a < cells.dim; ++a) {
                    if (a) out += ',';
                    out += std::to_string(c[a]);
                }
                out += '\n';
            }
            write_text_file(fro_csv, out);
        }
        if (!fro_json.empty()) {
            json j;
            j["m"] = cells.m;
            j["delta"] = cells.delta();
            j["count"] = cells.count();
            j["component_count"] = comp.component_count;
            j["component_sizes"] = comp.sizes;
            write_text_file(fro_json, j.dump(2) + "\n");
        }
        std::cout << "cells=" << cells.count() << " components=" << comp.component_count << "\n";
    });

    // ---- dimension ---------------------------------------------------------
    auto* dim = app.add_subcommand("dimension", "box-counting dimension of a snapshot frontier");
    std::string dim_in, dim_json;
    std::vector<uint32_t> dim_scales;
    bool dim_no_filter = false;
    std::vector<double> dim_window;
    uint32_t dim_threads = 0;
    dim->add_option("--in", dim_in, "snapshot file")->required();
    dim->add_option("--scales", dim_scales, "grid resolutions, powers of two")
        ->delimiter(',')
        ->required();
    dim->add_flag("--no-density-filter", dim_no_filter,
                  "keep scales that fail the n*delta^d >= 10 rule");
    dim->add_option("--window", dim_window, "fit window delta_min delta_max")->expected(2);
    dim->add_option("--json", dim_json, "write curve + estimate as JSON");
    dim->add_option("--threads", dim_threads, "classification threads (0 = all cores)");
    dim->callback([&] {
        const pfro::Snapshot snap = pfro::read_snapshot_file(dim_in);
        std::vector<uint32_t> scales = dim_scales;
        if (!dim_no_filter) {
            scales = pfro::filter_scales_by_density(snap.site_count() - 2, snap.dim(), scales);
            if (scales.empty())
                throw pfro::InvalidConfig("the density rule rejected every requested scale");
        }
        pfro::ClassifyOptions copt;
        copt.threads = dim_threads;
        const auto curve = pfro::box_count(snap, scales, copt);
        const double wlo = dim_window.empty() ? 0.0 : dim_window[0];
        const double whi = dim_window.empty() ? 1e300 : dim_window[1];
        const auto est = pfro::fit_dimension(curve, wlo, whi);
        const auto leb = pfro::lebesgue_decay(curve);
        if (!dim_json.empty()) {
            json j;
            json jm = json::array(), jd = json::array(), jc = json::array(), jl = json::array();
            for (size_t k = 0; k < curve.deltas.size(); ++k) {
                jm.push_back(1.0 / curve.deltas[k]);
                jd.push_back(curve.deltas[k]);
                jc.push_back(curve.counts[k]);
                jl.push_back(leb[k]);
            }
            j["m"] = jm;
            j["delta"] = jd;
            j["count"] = jc;
            j["lebesgue"] = jl;
            j["estimate"] = {{"slope", est.slope},
                             {"slope_stderr", est.slope_stderr},
                             {"ci_lo", est.ci_lo},
                             {"ci_hi", est.ci_hi},
                             {"r2", est.r2},
                             {"n_scales", est.n_scales},
                             {"window", {est.window_delta_min, est.window_delta_max}}};
            write_text_file(dim_json, j.dump(2) + "\n");
        }
        std::cout << "slope=" << pfro::format_double(est.slope)
                  << " stderr=" << pfro::format_double(est.slope_stderr)
                  << " r2=" << pfro::format_double(est.r2) << " scales=" << est.n_scales << "\n";
    });

    // ---- experiment --------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "run a JSON experiment spec");
    std::string exp_spec, exp_outdir;
    uint32_t exp_workers = 0;
    bool exp_workers_set = false;
    exp->add_option("--spec", exp_spec, "experiment spec JSON file")->required();
    exp->add_option("--out-dir", exp_outdir, "override the spec's output directory");
    exp->add_option("--workers", exp_workers, "override the spec's worker count")
        ->trigger_on_parse()
        ->each([&](const std::string&) { exp_workers_set = true; });
    exp->callback([&] {
        pfro::ExperimentSpec spec = pfro::load_experiment_spec(exp_spec);
        if (!exp_outdir.empty()) spec.output_dir = exp_outdir;
        if (exp_workers_set) spec.workers = exp_workers;
        const auto result = pfro::run_experiment(spec);
        std::cout << "report=" << spec.output_dir << "/report.json raw=" << spec.output_dir
                  << "/raw.csv snapshots=" << result.snapshot_files.size() << "\n";
    });

    // ---- split -------------------------------------------------------------
    auto* spl = app.add_subcommand("split", "run the curve-splitting procedure on a polyline");
    std::string spl_curve, spl_json;
    double spl_alpha = 0.1;
    uint32_t spl_depth = 0;
    double spl_energy_s = 0.0;
    bool spl_has_energy = false;
    spl->add_option("--curve", spl_curve, "polyline CSV (one vertex per line)")->required();
    spl->add_option("--alpha", spl_alpha, "relative splitting scale")->required();
    spl->add_option("--depth", spl_depth, "recursive split levels (0 = single split)");
    spl->add_option("--energy-s", spl_energy_s, "also evaluate the s-energy bound of the tree")
        ->trigger_on_parse()
        ->each([&](const std::string&) { spl_has_energy = true; });
    spl->add_option("--json", spl_json, "write the result as JSON");
    spl->callback([&] {
        const pfro::Polyline curve = read_polyline_csv(spl_curve);
        json j;
        if (spl_depth == 0) {
            const auto split = pfro::split_once(curve, spl_alpha);
            j = split_output_json(split);
            std::cout << "kappa=" << split.kappa() << " span=" << pfro::format_double(split.span)
                      << " delta=" << pfro::format_double(split.delta) << "\n";
        } else {
            const auto tree = pfro::build_split_tree(curve, spl_alpha, spl_depth);
            j = split_tree_json(tree);
            if (spl_has_energy)
                j["energy_bound"] = pfro::energy_bound(tree, spl_energy_s, curve.diameter());
            std::cout << "levels=" << tree.levels << " nodes=" << tree.nodes.size()
                      << " k0=" << tree.k0 << "\n";
        }
        if (!spl_json.empty()) write_text_file(spl_json, j.dump(2) + "\n");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const pfro::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
