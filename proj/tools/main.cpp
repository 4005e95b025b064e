#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "odmrpol/assign.hpp"
#include "odmrpol/config.hpp"
#include "odmrpol/fit.hpp"
#include "odmrpol/io.hpp"
#include "odmrpol/optimize.hpp"
#include "odmrpol/photophysics.hpp"
#include "odmrpol/sweep.hpp"
#include "odmrpol/zeeman.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace odmrpol;

namespace {

void write_json_file(const fs::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

json peaks_json(const FitResult& fit) {
    json arr = json::array();
    for (std::size_t i = 0; i < fit.model.peaks.size(); ++i) {
        const LorentzianPeak& p = fit.model.peaks[i];
        arr.push_back({{"center_hz", p.center_hz},
                       {"fwhm_hz", p.fwhm_hz},
                       {"contrast", p.contrast},
                       {"ci95_center_hz", fit.ci95_center_hz[i]},
                       {"ci95_contrast", fit.ci95_contrast[i]}});
    }
    return arr;
}

json family_map_json(const std::vector<int>& family_of_peak) {
    json arr = json::array();
    for (int fam : family_of_peak) arr.push_back(family_name(static_cast<FamilyLabel>(fam)));
    return arr;
}

// Attaches family_map (or null plus the failure reason) to a fit report.
Assignment* try_assignment(json& report, Assignment& storage, const FitResult& fit,
                           const MagneticField& field, const std::array<NVFamily, 4>& families,
                           const NVConstants& constants) {
    AssignOptions options;
    options.ci95_center_hz = fit.ci95_center_hz;
    try {
        storage = assign_peaks_to_families(fit.model, field, families, constants, options);
    } catch (const AmbiguousAssignment& e) {
        report["family_map"] = nullptr;
        report["assignment_error"] = e.what();
        return nullptr;
    } catch (const std::invalid_argument& e) {
        report["family_map"] = nullptr;
        report["assignment_error"] = e.what();
        return nullptr;
    }
    report["family_map"] = family_map_json(storage.family_of_peak);
    return &storage;
}

int cmd_sweep(const RunConfig& config, const std::string& mode, const fs::path& out_dir) {
    const auto families = canonical_families();
    const SweepResult sweep =
        mode == "polarizer"
            ? sweep_polarizer(families, config.photophysics, UnitVec3(config.sweep_polarizer_n_l),
                              collection_plane(), config.sweep_angles)
            : sweep_laser(families, config.photophysics, UnitVec3(config.sweep_laser_n_p),
                          laser_plane(), config.sweep_angles);

    const std::string stem = "sweep_" + mode;
    write_sweep_csv(out_dir / (stem + ".csv"), sweep);
    write_s0_csv(out_dir / (stem + "_s0.csv"), sweep);
    write_text_file(out_dir / (stem + ".gp"),
                    sweep_gnuplot_script(stem + ".csv", stem + "_s0.csv", stem + ".png"));
    std::cout << "wrote " << (out_dir / (stem + ".csv")).string() << "\n";
    return 0;
}

int cmd_synth_fit(const RunConfig& config, const fs::path& out_dir) {
    const auto families = canonical_families();
    const MagneticField field(config.field_tesla);
    const FamilyWeights weights = family_weights(config.photophysics, families,
                                                 UnitVec3(config.n_l), UnitVec3(config.n_p));
    const SpectrumModel model =
        build_spectrum_model(field, families, weights, config.linewidth_hz, config.constants);

    if (config.noise_sigma > 0.0 && !config.seed)
        throw ConfigError("config: noisy synthesis requires `seed`");

    const auto grid =
        make_frequency_grid(model.peaks.front().center_hz - config.spectrum_pad_hz,
                            model.peaks.back().center_hz + config.spectrum_pad_hz,
                            static_cast<std::size_t>(config.spectrum_points));
    const Spectrum spectrum =
        synthesize_spectrum(model, grid, config.noise_sigma, config.seed.value_or(0));
    write_spectrum_csv(out_dir / "spectrum.csv", spectrum);
    write_text_file(out_dir / "spectrum.gp",
                    spectrum_gnuplot_script("spectrum.csv", "spectrum.png"));

    FitResult fit = [&] {
        try {
            return fit_spectrum(spectrum);
        } catch (const PeakDetectionFailed&) {
            // Overlapping peaks defeat dip detection; restart from the
            // generating model, which the synthesizer knows exactly.
            return fit_spectrum(spectrum, {}, &model);
        }
    }();

    json report;
    report["peaks"] = peaks_json(fit);
    report["residual_rms"] = fit.residual_rms;

    Assignment assignment;
    if (try_assignment(report, assignment, fit, field, families, config.constants)) {
        SpectrumModel assigned = fit.model;
        assigned.family_of_peak = assignment.family_of_peak;
        const auto fitted_contrast = family_contrast(assigned);
        json fitted_j, analytic_j, deviation_j;
        for (int f = 0; f < 4; ++f) {
            const char* name = family_name(static_cast<FamilyLabel>(f));
            fitted_j[name] = fitted_contrast[static_cast<std::size_t>(f)];
            analytic_j[name] = weights.contrast[static_cast<std::size_t>(f)];
            deviation_j[name] = fitted_contrast[static_cast<std::size_t>(f)] -
                                weights.contrast[static_cast<std::size_t>(f)];
        }
        report["family_contrast"] = fitted_j;
        report["analytic_contrast"] = analytic_j;
        report["contrast_deviation"] = deviation_j;
    }

    write_json_file(out_dir / "synth_fit_report.json", report);
    std::cout << "wrote " << (out_dir / "synth_fit_report.json").string() << "\n";
    return 0;
}

int cmd_fit(const RunConfig& config, const fs::path& input, const fs::path& out_dir) {
    Spectrum spectrum = read_spectrum_csv(input);

    // Normalize by the median of the top-decile samples (off-resonance
    // baseline estimate).
    std::vector<double> sorted = spectrum.normalized_pl;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t k = std::max<std::size_t>(1, n / 10);
    const double scale = sorted[n - k + k / 2];
    if (!(scale > 0.0)) throw IOError(input.string() + ": non-positive baseline");
    for (double& v : spectrum.normalized_pl) v /= scale;

    const FitResult fit = fit_spectrum(spectrum);

    json report;
    report["peaks"] = peaks_json(fit);
    report["residual_rms"] = fit.residual_rms;

    const auto families = canonical_families();
    Assignment assignment;
    try_assignment(report, assignment, fit, MagneticField(config.field_tesla), families,
                   config.constants);

    write_json_file(out_dir / "fit_report.json", report);
    std::cout << "wrote " << (out_dir / "fit_report.json").string() << "\n";
    return 0;
}

int cmd_optimize(const RunConfig& config, const std::string& target_str,
                 const std::string& family_str, const std::string& constraint_str, int threads,
                 const fs::path& out_dir) {
    const auto families = canonical_families();
    const OptimizeTarget target =
        target_str == "R" ? OptimizeTarget::relative_contrast : OptimizeTarget::chi;
    const FamilyLabel family = parse_family(family_str);
    const OptimizeConstraint constraint = constraint_str == "planes"
                                              ? OptimizeConstraint::experiment_planes
                                              : OptimizeConstraint::unconstrained;

    OptimizeOptions options;
    options.grid_deg = config.optimize_grid_deg;
    options.refine = config.optimize_refine;
    options.threads = threads;
    const Optimum optimum = optimize_polarizations(families, family, target, constraint, options);

    const FamilyWeights baseline = family_weights(config.photophysics, families,
                                                  UnitVec3(0.0, 1.0, 0.0), UnitVec3(0.0, 0.0, 1.0));
    const double ratio = improvement_report(optimum, baseline);
    const double base = optimum.value / ratio;

    json j;
    j["target"] = optimize_target_name(target);
    j["family"] = family_name(family);
    j["constraint"] = optimize_constraint_name(constraint);
    j["value"] = optimum.value;
    j["grid_value"] = optimum.grid_value;
    j["grid_deg"] = optimum.grid_deg;
    j["n_L"] = {optimum.n_l.x, optimum.n_l.y, optimum.n_l.z};
    j["n_P"] = {optimum.n_p.x, optimum.n_p.y, optimum.n_p.z};
    j["baseline_value"] = base;
    j["improvement_ratio"] = ratio;

    const std::string name =
        "optimum_" + target_str + "_" + family_str + "_" + constraint_str + ".json";
    write_json_file(out_dir / name, j);
    std::cout << optimize_target_name(target) << "_" << family_name(family) << " = "
              << optimum.value << " (x" << ratio << " over baseline)\n"
              << "wrote " << (out_dir / name).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polarization-enhanced ODMR simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = 1;
    double grid_deg = 0.0;
    bool grid_deg_given = false;
    int angles = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "RNG seed for synthesis")
            ->each([&](const std::string&) { seed_given = true; });
        cmd->add_option("--threads", threads, "worker threads for grid search")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--grid-deg", grid_deg, "optimizer grid pitch in degrees")
            ->each([&](const std::string&) { grid_deg_given = true; });
        return cmd;
    };

    auto* sweep_cmd = add_common(app.add_subcommand("sweep", "polarization sweep CSVs"));
    std::string mode;
    sweep_cmd->add_option("--mode", mode, "which polarization to sweep")
        ->required()
        ->check(CLI::IsMember({"polarizer", "laser"}));
    sweep_cmd->add_option("--angles", angles, "number of sweep angles in [0, 180)")
        ->check(CLI::PositiveNumber);

    auto* synth_cmd =
        add_common(app.add_subcommand("synth-fit", "synthesize, fit and assign a spectrum"));

    auto* fit_cmd = add_common(app.add_subcommand("fit", "fit a spectrum CSV"));
    std::string input_csv;
    fit_cmd->add_option("input", input_csv, "spectrum CSV path")->required();

    auto* opt_cmd = add_common(app.add_subcommand("optimize", "search polarization pairs"));
    std::string target_str = "R";
    std::string family_str = "B";
    std::string constraint_str = "free";
    opt_cmd->add_option("--target", target_str)->check(CLI::IsMember({"R", "chi"}));
    opt_cmd->add_option("--family", family_str)->check(CLI::IsMember({"A", "B", "C", "D"}));
    opt_cmd->add_option("--constraint", constraint_str)->check(CLI::IsMember({"planes", "free"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config = config_path.empty() ? default_config() : load_config(config_path);
        if (seed_given) config.seed = seed;
        if (grid_deg_given) config.optimize_grid_deg = grid_deg;
        if (angles > 0) config.sweep_angles = angles;
        config.validate();

        fs::create_directories(out_dir);
        if (sweep_cmd->parsed()) return cmd_sweep(config, mode, out_dir);
        if (synth_cmd->parsed()) return cmd_synth_fit(config, out_dir);
        if (fit_cmd->parsed()) return cmd_fit(config, input_csv, out_dir);
        if (opt_cmd->parsed())
            return cmd_optimize(config, target_str, family_str, constraint_str, threads, out_dir);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const IOError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const FitError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const DegenerateConfiguration& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
