#pragma once

// Binary snapshot: "CBLB", u32 version, u32 Nx, u32 Ny, f64 Ly, f64 t, then
// omega and theta coefficients as interleaved little-endian (re, im) f64 in
// FFT-ordered, k-major layout.
// Zero-mode history: "CBLZ", u32 version, u32 Ny, u32 count, f64 Ly, then
// per sample f64 t followed by Ny complex omega(k = 0, eta) values.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "shearlab/spectral/state.hpp"

namespace shearlab::spectral {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

inline constexpr std::uint32_t snapshot_version = 1;

namespace detail {

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <class T>
T get(std::ifstream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw config_error("truncated file: " + path);
    return v;
}
inline void put_coeffs(std::ofstream& os, const std::vector<cplx>& c) {
    os.write(reinterpret_cast<const char*>(c.data()), std::streamsize(c.size() * sizeof(cplx)));
}
inline void get_coeffs(std::ifstream& is, std::vector<cplx>& c, const std::string& path) {
    is.read(reinterpret_cast<char*>(c.data()), std::streamsize(c.size() * sizeof(cplx)));
    if (!is) throw config_error("truncated file: " + path);
}

}  // namespace detail

inline void write_snapshot(const std::filesystem::path& path, const Grid& g, const SimState& s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.write("CBLB", 4);
    detail::put<std::uint32_t>(os, snapshot_version);
    detail::put<std::uint32_t>(os, g.Nx);
    detail::put<std::uint32_t>(os, g.Ny);
    detail::put<double>(os, g.Ly);
    detail::put<double>(os, s.t);
    detail::put_coeffs(os, s.omega.c);
    detail::put_coeffs(os, s.theta.c);
}

// The dealias fraction is not stored; the caller's value is kept.
inline SimState read_snapshot(const std::filesystem::path& path, Grid& g) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "CBLB") throw config_error("not a snapshot: " + path.string());
    auto version = detail::get<std::uint32_t>(is, path.string());
    if (version != snapshot_version) throw config_error("unsupported snapshot version in " + path.string());
    g.Nx = int(detail::get<std::uint32_t>(is, path.string()));
    g.Ny = int(detail::get<std::uint32_t>(is, path.string()));
    g.Ly = detail::get<double>(is, path.string());
    validate(g);
    SimState s{SpectralField(g), SpectralField(g), detail::get<double>(is, path.string())};
    detail::get_coeffs(is, s.omega.c, path.string());
    detail::get_coeffs(is, s.theta.c, path.string());
    return s;
}

inline std::string snapshot_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%04d.bin", index);
    return buf;
}

// Snapshot files in a directory, in index order.
inline std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (auto& e : std::filesystem::directory_iterator(dir)) {
        auto name = e.path().filename().string();
        if (name.rfind("snap_", 0) == 0 && e.path().extension() == ".bin") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// x-averaged vorticity coefficients omega(k = 0, eta) at every step.
struct ZeroModeHistory {
    int Ny = 0;
    double Ly = 0;
    std::vector<double> t;
    std::vector<std::vector<cplx>> omega0;

    void record(const Grid& g, const SimState& s) {
        Ny = g.Ny;
        Ly = g.Ly;
        t.push_back(s.t);
        omega0.emplace_back(s.omega.c.begin(), s.omega.c.begin() + g.Ny);
    }
    std::size_t size() const { return t.size(); }
};

inline void write_zero_modes(const std::filesystem::path& path, const ZeroModeHistory& h) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os.write("CBLZ", 4);
    detail::put<std::uint32_t>(os, snapshot_version);
    detail::put<std::uint32_t>(os, h.Ny);
    detail::put<std::uint32_t>(os, std::uint32_t(h.size()));
    detail::put<double>(os, h.Ly);
    for (std::size_t i = 0; i < h.size(); ++i) {
        detail::put<double>(os, h.t[i]);
        detail::put_coeffs(os, h.omega0[i]);
    }
}

inline ZeroModeHistory read_zero_modes(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "CBLZ") throw config_error("not a zero-mode history: " + path.string());
    if (detail::get<std::uint32_t>(is, path.string()) != snapshot_version)
        throw config_error("unsupported version in " + path.string());
    ZeroModeHistory h;
    h.Ny = int(detail::get<std::uint32_t>(is, path.string()));
    auto n = detail::get<std::uint32_t>(is, path.string());
    h.Ly = detail::get<double>(is, path.string());
    for (std::uint32_t i = 0; i < n; ++i) {
        h.t.push_back(detail::get<double>(is, path.string()));
        h.omega0.emplace_back(h.Ny);
        detail::get_coeffs(is, h.omega0.back(), path.string());
    }
    return h;
}

}  // namespace shearlab::spectral
