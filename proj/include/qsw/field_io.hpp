#pragma once

// Field dumps: one raw file of little-endian float64 samples per component
// (row-major axis order) plus a JSON header {dim, n, period, components, time}.
//   <stem>.json, <stem>.c0.bin, <stem>.c1.bin, ...

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsw/error.hpp"
#include "qsw/field.hpp"

namespace qsw {

struct FieldDump {
    SpectralField field;
    double time = 0.0;
};

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::little) {
        return x;
    } else {
        std::uint64_t y = 0;
        for (int i = 0; i < 8; ++i) y |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return y;
    }
}

inline std::filesystem::path component_path(const std::filesystem::path& dir, const std::string& stem, int c) {
    return dir / (stem + ".c" + std::to_string(c) + ".bin");
}

}  // namespace detail

inline void write_field(const std::filesystem::path& dir, const std::string& stem, const SpectralField& f,
                        double time) {
    std::filesystem::create_directories(dir);
    const Grid& g = f.grid();
    nlohmann::json header;
    header["dim"] = g.dim();
    header["n"] = g.n();
    std::vector<double> period;
    for (int a = 0; a < g.dim(); ++a) period.push_back(g.period(a));
    header["period"] = period;
    header["components"] = f.components();
    header["time"] = time;
    std::ofstream hj(dir / (stem + ".json"));
    if (!hj) throw ConfigError("cannot write " + (dir / (stem + ".json")).string());
    hj << header.dump(2) << '\n';

    for (int c = 0; c < f.components(); ++c) {
        const auto path = detail::component_path(dir, stem, c);
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + path.string());
        for (double v : f.values(c)) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, &v, sizeof bits);
            bits = detail::to_little_endian(bits);
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
}

inline FieldDump read_field(const std::filesystem::path& dir, const std::string& stem) {
    std::ifstream hj(dir / (stem + ".json"));
    if (!hj) throw ConfigError("missing field header " + (dir / (stem + ".json")).string());
    nlohmann::json header;
    try {
        hj >> header;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed field header: ") + e.what());
    }
    const int dim = header.at("dim").get<int>();
    const int n = header.at("n").get<int>();
    const int comps = header.at("components").get<int>();
    std::array<double, 3> period{1.0, 1.0, 1.0};
    const auto& p = header.at("period");
    for (int a = 0; a < dim; ++a) {
        period[static_cast<std::size_t>(a)] = p.is_array() ? p.at(static_cast<std::size_t>(a)).get<double>() : p.get<double>();
    }
    const Grid g(dim, n, period);
    std::vector<RealBuffer> values;
    for (int c = 0; c < comps; ++c) {
        const auto path = detail::component_path(dir, stem, c);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("missing component file " + path.string());
        RealBuffer v(g.points());
        for (auto& x : v) {
            std::uint64_t bits = 0;
            if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw ShapeError("truncated component file " + path.string());
            bits = detail::to_little_endian(bits);
            std::memcpy(&x, &bits, sizeof x);
        }
        if (in.peek() != std::char_traits<char>::eof()) throw ShapeError("oversized component file " + path.string());
        values.push_back(std::move(v));
    }
    return {SpectralField::from_values(g, std::move(values)), header.value("time", 0.0)};
}

}  // namespace qsw
