#pragma once

// CSV formatting and atomic file output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "squidsim/fock.hpp"
#include "squidsim/states.hpp"

namespace squid {

/// 12 significant digits, the precision of every numeric CSV payload.
inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Shortest form that parses back to the same double.
inline std::string format_exact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes `content` to `path` through a sibling temporary file and rename,
/// so readers never observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename " + tmp.string() + " to " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// `x,re_psi,im_psi,density`.
inline std::string wavefunction_csv(const SampledWavefunction& w) {
    std::string out = "x,re_psi,im_psi,density\n";
    for (std::size_t i = 0; i < w.x.size(); ++i) {
        out += format_number(w.x[i]) + ',' + format_number(w.psi[i].real()) + ',' + format_number(w.psi[i].imag()) +
               ',' + format_number(std::norm(w.psi[i])) + '\n';
    }
    return out;
}

/// Real or imaginary part of a matrix with an index header row and an index
/// column: `index,0,1,...`.
inline std::string matrix_part_csv(const Matrix& m, bool imaginary) {
    std::string out = "index";
    for (Index c = 0; c < m.cols(); ++c) out += ',' + std::to_string(c);
    out += '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        out += std::to_string(r);
        for (Index c = 0; c < m.cols(); ++c) out += ',' + format_number(imaginary ? m(r, c).imag() : m(r, c).real());
        out += '\n';
    }
    return out;
}

}  // namespace squid
