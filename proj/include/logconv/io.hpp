#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "logconv/frac_ou.hpp"
#include "logconv/spectral.hpp"

namespace logconv {

/// Fixed-format double for byte-stable CSV output under a fixed seed.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << "\n";
    }
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

namespace io_detail {

inline void write_doubles_le(std::ofstream& out, const double* data, std::size_t count) {
    static_assert(sizeof(double) == 8);
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * 8));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint64_t bits;
            std::memcpy(&bits, &data[i], 8);
            char b[8];
            for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
            out.write(b, 8);
        }
    }
}

inline void read_doubles_le(std::ifstream& in, double* data, std::size_t count) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * 8));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            char b[8];
            in.read(b, 8);
            std::uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[k])) << (8 * k);
            std::memcpy(&data[i], &bits, 8);
        }
    }
    if (!in) throw std::runtime_error("read_doubles_le: truncated binary payload");
}

}  // namespace io_detail

/// Trajectory export: <base>.csv with (t, norm) rows, <base>.bin with the
/// flat little-endian coefficient payload (time-major), <base>.json header.
inline void write_trajectory(const std::filesystem::path& base, const Trajectory& traj) {
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) rows.push_back({traj.times[i], traj.norms[i]});
    write_csv(base.string() + ".csv", {"t", "norm"}, rows);

    const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().size();
    nlohmann::json header = {
        {"schema", "logconv-trajectory/1"},
        {"dim", dim},
        {"n_times", traj.times.size()},
        {"times", traj.times},
    };
    std::ofstream jout(base.string() + ".json", std::ios::binary);
    if (!jout) throw std::runtime_error("write_trajectory: cannot open header file");
    jout << header.dump(2) << "\n";

    std::ofstream bout(base.string() + ".bin", std::ios::binary);
    if (!bout) throw std::runtime_error("write_trajectory: cannot open binary file");
    for (const auto& st : traj.states) io_detail::write_doubles_le(bout, st.data(), st.size());
}

inline Trajectory read_trajectory(const std::filesystem::path& base) {
    std::ifstream jin(base.string() + ".json", std::ios::binary);
    if (!jin) throw std::runtime_error("read_trajectory: missing header " + base.string() + ".json");
    nlohmann::json header = nlohmann::json::parse(jin);
    if (header.value("schema", "") != "logconv-trajectory/1")
        throw std::runtime_error("read_trajectory: unknown schema");
    Trajectory traj;
    traj.times = header.at("times").get<std::vector<double>>();
    const auto dim = header.at("dim").get<std::size_t>();

    if (dim > 0) {
        std::ifstream bin(base.string() + ".bin", std::ios::binary);
        if (!bin) throw std::runtime_error("read_trajectory: missing binary payload");
        traj.states.resize(traj.times.size());
        for (auto& st : traj.states) {
            st.resize(dim);
            io_detail::read_doubles_le(bin, st.data(), dim);
        }
        for (const auto& st : traj.states) traj.norms.push_back(l2_norm(st));
    } else {
        // norm-only trajectory: norms come from the csv
        std::ifstream cin_(base.string() + ".csv", std::ios::binary);
        if (!cin_) throw std::runtime_error("read_trajectory: missing csv");
        std::string line;
        std::getline(cin_, line);  // header
        while (std::getline(cin_, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            traj.norms.push_back(std::stod(line.substr(comma + 1)));
        }
    }
    return traj;
}

/// GridState I/O: flat little-endian doubles plus a JSON header carrying
/// (dim, extent, points).
inline void write_grid_state(const std::filesystem::path& base, const GridState& u) {
    nlohmann::json header = {
        {"schema", "logconv-gridstate/1"},
        {"dim", u.grid.dim},
        {"extent", u.grid.extent},
        {"points", u.grid.points},
    };
    std::ofstream jout(base.string() + ".json", std::ios::binary);
    if (!jout) throw std::runtime_error("write_grid_state: cannot open header file");
    jout << header.dump(2) << "\n";
    std::ofstream bout(base.string() + ".bin", std::ios::binary);
    if (!bout) throw std::runtime_error("write_grid_state: cannot open binary file");
    io_detail::write_doubles_le(bout, u.values.data(), u.values.size());
}

inline GridState read_grid_state(const std::filesystem::path& base) {
    std::ifstream jin(base.string() + ".json", std::ios::binary);
    if (!jin) throw std::runtime_error("read_grid_state: missing header");
    nlohmann::json header = nlohmann::json::parse(jin);
    if (header.value("schema", "") != "logconv-gridstate/1")
        throw std::runtime_error("read_grid_state: unknown schema");
    GridState u;
    u.grid.dim = header.at("dim").get<int>();
    u.grid.extent = header.at("extent").get<double>();
    u.grid.points = header.at("points").get<int>();
    validate(u.grid);
    u.values.resize(u.grid.size());
    std::ifstream bin(base.string() + ".bin", std::ios::binary);
    if (!bin) throw std::runtime_error("read_grid_state: missing binary payload");
    io_detail::read_doubles_le(bin, u.values.data(), u.values.size());
    return u;
}

}  // namespace logconv
