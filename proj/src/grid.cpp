#include "rqc/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "rqc/errors.hpp"

namespace rqc {

static_assert(std::endian::native == std::endian::little,
              "grid dumps assume a little-endian host");

void GridSpec::validate() const
{
    require(half_width > 0.0 && std::isfinite(half_width), "grid half width must be positive");
    require(n >= 4 && n % 2 == 0, "grid size must be an even integer >= 4");
}

std::size_t GridSpec::nearest(Point z) const
{
    auto [fx, fy] = grid_coords(*this, z);
    int ix = std::clamp(static_cast<int>(std::lround(fx)), 0, n - 1);
    int iy = std::clamp(static_cast<int>(std::lround(fy)), 0, n - 1);
    return index(ix, iy);
}

void write_grid_dump(const std::filesystem::path& stem, const GridSpec& grid,
                     std::span<const Complex> values, nlohmann::json header)
{
    require(values.size() == grid.size(), "grid dump: sample count does not match grid");
    auto bin = stem;
    bin += ".bin";
    auto txt = stem;
    txt += ".json";
    header["format"] = "rqc-grid-v1";
    header["L"] = grid.half_width;
    header["n"] = grid.n;
    header["byte_order"] = "little";
    header["layout"] = "row-major, index = iy*n + ix, node = (-L + ix*h, -L + iy*h), h = 2L/n";
    header["sample"] = "complex float64 pair (re, im)";
    header["data_file"] = bin.filename().string();
    {
        std::ofstream out(bin, std::ios::binary);
        require(static_cast<bool>(out), "cannot open " + bin.string());
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(Complex)));
    }
    std::ofstream out(txt);
    require(static_cast<bool>(out), "cannot open " + txt.string());
    out << header.dump(2) << '\n';
}

GridDump read_grid_dump(const std::filesystem::path& stem)
{
    auto txt = stem;
    txt += ".json";
    std::ifstream in(txt);
    require(static_cast<bool>(in), "cannot open " + txt.string());
    GridDump dump;
    dump.header = nlohmann::json::parse(in);
    require(dump.header.value("format", "") == "rqc-grid-v1", "unknown grid dump format");
    dump.grid.half_width = dump.header.at("L").get<double>();
    dump.grid.n = dump.header.at("n").get<int>();
    dump.grid.validate();
    auto bin = stem.parent_path() / dump.header.at("data_file").get<std::string>();
    std::ifstream data(bin, std::ios::binary);
    require(static_cast<bool>(data), "cannot open " + bin.string());
    dump.values.resize(dump.grid.size());
    data.read(reinterpret_cast<char*>(dump.values.data()),
              static_cast<std::streamsize>(dump.values.size() * sizeof(Complex)));
    require(data.gcount() == static_cast<std::streamsize>(dump.values.size() * sizeof(Complex)),
            "grid dump is truncated");
    return dump;
}

std::uint64_t hash_samples(std::span<const Complex> values)
{
    std::uint64_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
    for (std::size_t i = 0; i < values.size() * sizeof(Complex); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace rqc
