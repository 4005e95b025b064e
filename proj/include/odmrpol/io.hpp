#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "odmrpol/sweep.hpp"
#include "odmrpol/zeeman.hpp"

namespace odmrpol {

struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Spectrum CSV: header `frequency_hz,normalized_pl`, one sample per line,
// UTF-8, LF endings, full round-trip precision. The reader is strict: a bad
// header, malformed row, or non-increasing grid raises IOError with the line
// number.
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

// Sweep CSV: angle in degrees followed by R, C, chi, rho for families A-D and
// the total PL rate S0. A reduced angle/S0 table is written separately.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);
void write_s0_csv(const std::filesystem::path& path, const SweepResult& sweep);

void write_text_file(const std::filesystem::path& path, std::string_view text);

// Companion gnuplot scripts referencing the CSVs by name.
std::string sweep_gnuplot_script(const std::string& sweep_csv, const std::string& s0_csv,
                                 const std::string& png_name);
std::string spectrum_gnuplot_script(const std::string& spectrum_csv, const std::string& png_name);

}  // namespace odmrpol
