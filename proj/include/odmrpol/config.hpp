#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>

#include "odmrpol/geometry.hpp"
#include "odmrpol/photophysics.hpp"
#include "odmrpol/zeeman.hpp"

namespace odmrpol {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    NVConstants constants;
    PhotophysicsParams photophysics;
    Vec3 field_tesla{};  // defaulted in default_config()
    double linewidth_hz = 1e7;
    double noise_sigma = 0.002;
    std::optional<std::uint64_t> seed;

    int spectrum_points = 2000;
    double spectrum_pad_hz = 1e8;  // margin beyond the outermost resonances

    int sweep_angles = 180;
    Vec3 sweep_polarizer_n_l = {0.0, 1.0, 0.0};  // fixed laser during polarizer sweeps
    Vec3 sweep_laser_n_p = {1.0, 1.0, 0.0};      // fixed polarizer during laser sweeps

    Vec3 n_l = {0.0, 1.0, 0.0};  // synth-fit polarizations
    Vec3 n_p = {0.0, 0.0, 1.0};

    double optimize_grid_deg = 1.0;
    bool optimize_refine = true;

    void validate() const;  // ConfigError on out-of-range values
};

// Defaults: a 4 mT field along (1,2,4)/sqrt(21) (all four axis projections
// distinct, every peak pair resolved), 10 MHz linewidth, 0.2% noise.
RunConfig default_config();

// Strict JSON: unknown keys are rejected with their dotted path; `field_tesla`
// is required in any config file.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace odmrpol
