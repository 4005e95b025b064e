#include "odmrpol/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace odmrpol {

namespace {

constexpr const char* spectrum_header = "frequency_hz,normalized_pl";
constexpr const char* sweep_header =
    "angle_deg,R_A,R_B,R_C,R_D,C_A,C_B,C_C,C_D,chi_A,chi_B,chi_C,chi_D,"
    "rho_A,rho_B,rho_C,rho_D,S0";

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IOError("failed writing " + path.string());
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

double parse_field(std::string_view text, const std::filesystem::path& path, std::size_t line_no) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw IOError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" +
                      std::string(text) + "'");
    return value;
}

}  // namespace

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spectrum) {
    spectrum.validate();
    auto out = open_out(path);
    out << spectrum_header << '\n';
    for (std::size_t i = 0; i < spectrum.frequency_hz.size(); ++i)
        out << fmt("%.17g", spectrum.frequency_hz[i]) << ','
            << fmt("%.17g", spectrum.normalized_pl[i]) << '\n';
    finish(out, path);
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != spectrum_header)
        throw IOError(path.string() + ":1: expected header '" + spectrum_header + "'");

    Spectrum spectrum;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            if (in.peek() == std::char_traits<char>::eof()) break;
            throw IOError(path.string() + ":" + std::to_string(line_no) + ": empty line");
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw IOError(path.string() + ":" + std::to_string(line_no) +
                          ": expected two comma-separated fields");
        spectrum.frequency_hz.push_back(
            parse_field(std::string_view(line).substr(0, comma), path, line_no));
        spectrum.normalized_pl.push_back(
            parse_field(std::string_view(line).substr(comma + 1), path, line_no));
    }
    if (spectrum.frequency_hz.empty()) throw IOError(path.string() + ": no data rows");
    try {
        spectrum.validate();
    } catch (const std::exception& e) {
        throw IOError(path.string() + ": " + e.what());
    }
    return spectrum;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep) {
    auto out = open_out(path);
    out << sweep_header << '\n';
    for (std::size_t k = 0; k < sweep.angle_rad.size(); ++k) {
        const FamilyWeights& w = sweep.weights[k];
        out << fmt("%.12g", sweep.angle_rad[k] * 180.0 / std::numbers::pi);
        for (double v : w.relative_contribution) out << ',' << fmt("%.12g", v);
        for (double v : w.contrast) out << ',' << fmt("%.12g", v);
        for (double v : w.chi) out << ',' << fmt("%.12g", v);
        for (double v : w.rho) out << ',' << fmt("%.12g", v);
        out << ',' << fmt("%.12g", w.s0) << '\n';
    }
    finish(out, path);
}

void write_s0_csv(const std::filesystem::path& path, const SweepResult& sweep) {
    auto out = open_out(path);
    out << "angle_deg,S0\n";
    for (std::size_t k = 0; k < sweep.angle_rad.size(); ++k)
        out << fmt("%.12g", sweep.angle_rad[k] * 180.0 / std::numbers::pi) << ','
            << fmt("%.12g", sweep.weights[k].s0) << '\n';
    finish(out, path);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

std::string sweep_gnuplot_script(const std::string& sweep_csv, const std::string& s0_csv,
                                 const std::string& png_name) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
         "set key autotitle columnhead outside\n"
         "set style data lines\n"
         "set xlabel 'angle (deg)'\n"
         "set terminal pngcairo size 900,1500\n"
      << "set output '" << png_name << "'\n"
      << "set multiplot layout 5,1\n";
    const char* ylabels[4] = {"R", "C", "chi", "rho"};
    for (int block = 0; block < 4; ++block) {
        s << "set ylabel '" << ylabels[block] << "'\n"
          << "plot";
        for (int col = 0; col < 4; ++col)
            s << (col ? ", ''" : std::string(" '") + sweep_csv + "'") << " using 1:"
              << 2 + 4 * block + col;
        s << '\n';
    }
    s << "set ylabel 'S0'\n"
      << "plot '" << s0_csv << "' using 1:2\n"
      << "unset multiplot\n";
    return s.str();
}

std::string spectrum_gnuplot_script(const std::string& spectrum_csv, const std::string& png_name) {
    std::ostringstream s;
    s << "set datafile separator ','\n"
         "set key autotitle columnhead\n"
         "set style data lines\n"
         "set xlabel 'frequency (Hz)'\n"
         "set ylabel 'normalized PL'\n"
         "set terminal pngcairo size 900,500\n"
      << "set output '" << png_name << "'\n"
      << "plot '" << spectrum_csv << "' using 1:2\n";
    return s.str();
}

}  // namespace odmrpol
