#include "odmrpol/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

namespace odmrpol {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) { throw ConfigError("config: " + message); }

void check_keys(const json& obj, const std::string& prefix,
                std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) fail("`" + prefix + "` must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known = std::find(allowed.begin(), allowed.end(), it.key()) != allowed.end();
        if (!known) fail("unknown key `" + (prefix.empty() ? it.key() : prefix + "." + it.key()) + "`");
    }
}

double as_double(const json& v, const std::string& name) {
    if (!v.is_number()) fail("`" + name + "` must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& name) {
    if (!v.is_number_integer()) fail("`" + name + "` must be an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& name) {
    if (!v.is_boolean()) fail("`" + name + "` must be a boolean");
    return v.get<bool>();
}

Vec3 as_vec3(const json& v, const std::string& name) {
    if (!v.is_array() || v.size() != 3) fail("`" + name + "` must be an array of 3 numbers");
    return {as_double(v[0], name), as_double(v[1], name), as_double(v[2], name)};
}

template <typename T, typename Fn>
void maybe(const json& obj, const std::string& prefix, const char* key, T& target, Fn convert) {
    if (const auto it = obj.find(key); it != obj.end())
        target = convert(*it, prefix.empty() ? key : prefix + "." + key);
}

}  // namespace

void RunConfig::validate() const {
    try {
        photophysics.validate();
        (void)MagneticField(field_tesla);
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    } catch (const std::domain_error& e) {
        fail(e.what());
    }
    if (!(constants.zero_field_splitting_hz > 0.0)) fail("`constants.zero_field_splitting_hz` must be > 0");
    if (!(constants.gyromagnetic_ratio_hz_per_t > 0.0)) fail("`constants.gyromagnetic_ratio_hz_per_t` must be > 0");
    if (!(linewidth_hz > 0.0)) fail("`linewidth_hz` must be > 0");
    if (noise_sigma < 0.0) fail("`noise_sigma` must be >= 0");
    if (spectrum_points < 40) fail("`spectrum.points` must be >= 40");
    if (!(spectrum_pad_hz > 0.0)) fail("`spectrum.pad_hz` must be > 0");
    if (sweep_angles < 4) fail("`sweep.angles` must be >= 4");
    if (!(optimize_grid_deg > 0.0) || optimize_grid_deg > 4.0) fail("`optimize.grid_deg` must lie in (0, 4]");
}

RunConfig default_config() {
    RunConfig config;
    const double scale = 4e-3 / std::sqrt(21.0);
    config.field_tesla = {scale * 1.0, scale * 2.0, scale * 4.0};
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path.string());

    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path.string() + ": " + e.what());
    }

    check_keys(root, "",
               {"constants", "photophysics", "field_tesla", "linewidth_hz", "noise_sigma", "seed",
                "spectrum", "sweep", "polarization", "optimize"});

    RunConfig config = default_config();

    if (const auto it = root.find("constants"); it != root.end()) {
        check_keys(*it, "constants", {"zero_field_splitting_hz", "gyromagnetic_ratio_hz_per_t"});
        maybe(*it, "constants", "zero_field_splitting_hz", config.constants.zero_field_splitting_hz,
              as_double);
        maybe(*it, "constants", "gyromagnetic_ratio_hz_per_t",
              config.constants.gyromagnetic_ratio_hz_per_t, as_double);
    }
    if (const auto it = root.find("photophysics"); it != root.end()) {
        check_keys(*it, "photophysics",
                   {"pl_off", "pl_on", "collection_efficiency", "ensemble_size"});
        maybe(*it, "photophysics", "pl_off", config.photophysics.pl_off, as_double);
        maybe(*it, "photophysics", "pl_on", config.photophysics.pl_on, as_double);
        maybe(*it, "photophysics", "collection_efficiency",
              config.photophysics.collection_efficiency, as_double);
        maybe(*it, "photophysics", "ensemble_size", config.photophysics.ensemble_size, as_double);
    }

    if (const auto it = root.find("field_tesla"); it != root.end())
        config.field_tesla = as_vec3(*it, "field_tesla");
    else
        fail("missing required key `field_tesla`");

    maybe(root, "", "linewidth_hz", config.linewidth_hz, as_double);
    maybe(root, "", "noise_sigma", config.noise_sigma, as_double);
    if (const auto it = root.find("seed"); it != root.end()) {
        if (!it->is_number_unsigned()) fail("`seed` must be an unsigned integer");
        config.seed = it->get<std::uint64_t>();
    }

    if (const auto it = root.find("spectrum"); it != root.end()) {
        check_keys(*it, "spectrum", {"points", "pad_hz"});
        maybe(*it, "spectrum", "points", config.spectrum_points, as_int);
        maybe(*it, "spectrum", "pad_hz", config.spectrum_pad_hz, as_double);
    }
    if (const auto it = root.find("sweep"); it != root.end()) {
        check_keys(*it, "sweep", {"angles", "polarizer_n_l", "laser_n_p"});
        maybe(*it, "sweep", "angles", config.sweep_angles, as_int);
        maybe(*it, "sweep", "polarizer_n_l", config.sweep_polarizer_n_l, as_vec3);
        maybe(*it, "sweep", "laser_n_p", config.sweep_laser_n_p, as_vec3);
    }
    if (const auto it = root.find("polarization"); it != root.end()) {
        check_keys(*it, "polarization", {"n_l", "n_p"});
        maybe(*it, "polarization", "n_l", config.n_l, as_vec3);
        maybe(*it, "polarization", "n_p", config.n_p, as_vec3);
    }
    if (const auto it = root.find("optimize"); it != root.end()) {
        check_keys(*it, "optimize", {"grid_deg", "refine"});
        maybe(*it, "optimize", "grid_deg", config.optimize_grid_deg, as_double);
        maybe(*it, "optimize", "refine", config.optimize_refine, as_bool);
    }

    config.validate();
    return config;
}

}  // namespace odmrpol
