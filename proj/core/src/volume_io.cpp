#include "flametomo/volume_io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flametomo/atomic_file.hpp"
#include "flametomo/detail/binary_io.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

namespace {

constexpr int kVolumeVersion = 1;

std::vector<std::uint8_t> pack(const std::vector<double>& values) {
    detail::ByteWriter w;
    w.put_f64s(values);
    return w.bytes();
}

std::vector<double> unpack(const std::vector<std::uint8_t>& bytes, std::size_t count,
                           const std::string& what) {
    if (bytes.size() != count * 8) {
        throw MalformedFileError(what + ": expected " + std::to_string(count * 8) + " bytes, found " +
                                 std::to_string(bytes.size()));
    }
    std::vector<double> values(count);
    detail::ByteReader r(bytes, what);
    r.get_f64s(values);
    return values;
}

nlohmann::json parse_sidecar(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFileError(path + ": " + e.what());
    }
}

Vec3 vec3_from(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw MalformedFileError("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string volume_sidecar_path(const std::string& path) { return path + ".json"; }

void write_volume(const VoxelGrid& grid, const std::string& path) {
    grid.validate();
    const auto bytes = pack(grid.values);
    const GridSpec& g = grid.spec;
    nlohmann::json side = {
        {"format", "flametomo-volume"},
        {"version", kVolumeVersion},
        {"data_file", std::filesystem::path(path).filename().string()},
        {"value_type", "float64"},
        {"byte_order", "little-endian"},
        {"layout", "x-fastest"},
        {"units", "K"},
        {"spatial_units", "world"},
        {"origin", {g.origin.x(), g.origin.y(), g.origin.z()}},
        {"spacing", {g.spacing.x(), g.spacing.y(), g.spacing.z()}},
        {"dims", {g.dims[0], g.dims[1], g.dims[2]}},
        {"voxel_count", g.voxel_count()},
        {"crc32", detail::crc32(bytes)},
    };
    write_file_atomic(path, bytes);
    write_file_atomic(volume_sidecar_path(path), side.dump(2) + "\n");
}

VoxelGrid read_volume(const std::string& path) {
    const std::string side_path = volume_sidecar_path(path);
    const nlohmann::json side = parse_sidecar(side_path);
    VoxelGrid grid;
    std::uint32_t crc = 0;
    try {
        if (side.at("format") != "flametomo-volume") {
            throw MalformedFileError(side_path + ": not a volume sidecar");
        }
        if (side.at("version").get<int>() != kVolumeVersion) {
            throw VersionMismatchError(side_path + ": unsupported volume version");
        }
        grid.spec.origin = vec3_from(side.at("origin"));
        grid.spec.spacing = vec3_from(side.at("spacing"));
        const auto& dims = side.at("dims");
        if (!dims.is_array() || dims.size() != 3) throw MalformedFileError(side_path + ": bad dims");
        for (int a = 0; a < 3; ++a) grid.spec.dims[static_cast<std::size_t>(a)] = dims[a].get<int>();
        crc = side.at("crc32").get<std::uint32_t>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFileError(side_path + ": " + e.what());
    }
    try {
        grid.spec.validate();
    } catch (const ValidationError& e) {
        throw MalformedFileError(side_path + ": " + e.what());
    }
    const auto bytes = read_file_bytes(path);
    if (detail::crc32(bytes) != crc) throw ChecksumError(path + ": CRC mismatch");
    grid.values = unpack(bytes, grid.spec.voxel_count(), path);
    return grid;
}

GrayMapping auto_mapping(const SliceImage& slice) {
    if (slice.values.empty()) return {};
    const auto [lo, hi] = std::minmax_element(slice.values.begin(), slice.values.end());
    return {*lo, *hi};
}

GrayImage slice_to_graymap(const SliceImage& slice, const GrayMapping& mapping) {
    GrayImage img;
    img.width = slice.width;
    img.height = slice.height;
    img.maxval = 65535;
    img.pixels.resize(slice.values.size());
    const double range = mapping.hi - mapping.lo;
    for (std::size_t i = 0; i < slice.values.size(); ++i) {
        double g = 0.0;
        if (range > 0.0) g = std::round(65535.0 * (slice.values[i] - mapping.lo) / range);
        img.pixels[i] = static_cast<std::uint16_t>(std::clamp(g, 0.0, 65535.0));
    }
    std::ostringstream lo, hi;
    lo.precision(17);
    hi.precision(17);
    lo << mapping.lo;
    hi << mapping.hi;
    img.comments = {std::string("kind=") + to_string(slice.kind),
                    "gray = round(65535 * (value - lo) / (hi - lo))", "lo=" + lo.str(),
                    "hi=" + hi.str()};
    return img;
}

void write_slice(const SliceImage& slice, const std::string& prefix,
                 std::optional<GrayMapping> mapping) {
    if (slice.values.size() != static_cast<std::size_t>(slice.width) * slice.height) {
        throw ValidationError("slice has inconsistent dimensions");
    }
    const GrayMapping m = mapping.value_or(auto_mapping(slice));
    const auto bytes = pack(slice.values);
    nlohmann::json side = {
        {"format", "flametomo-slice"},
        {"version", kVolumeVersion},
        {"axis", to_string(slice.axis)},
        {"requested_coordinate", slice.requested},
        {"coordinate", slice.coordinate},
        {"plane_index", slice.plane},
        {"width", slice.width},
        {"height", slice.height},
        {"kind", to_string(slice.kind)},
        {"units", slice.kind == SliceKind::Temperature ? "K" : "fraction"},
        {"value_type", "float64"},
        {"byte_order", "little-endian"},
        {"gray_mapping", {{"lo", m.lo}, {"hi", m.hi}, {"maxval", 65535}}},
        {"crc32", detail::crc32(bytes)},
    };
    write_pgm(slice_to_graymap(slice, m), prefix + ".pgm");
    write_file_atomic(prefix + ".f64", bytes);
    write_file_atomic(prefix + ".json", side.dump(2) + "\n");
}

SliceImage read_slice(const std::string& prefix) {
    const nlohmann::json side = parse_sidecar(prefix + ".json");
    SliceImage s;
    std::uint32_t crc = 0;
    try {
        if (side.at("format") != "flametomo-slice") {
            throw MalformedFileError(prefix + ".json: not a slice sidecar");
        }
        s.axis = axis_from_string(side.at("axis").get<std::string>());
        s.requested = side.at("requested_coordinate").get<double>();
        s.coordinate = side.at("coordinate").get<double>();
        s.plane = side.at("plane_index").get<int>();
        s.width = side.at("width").get<int>();
        s.height = side.at("height").get<int>();
        s.kind = side.at("kind").get<std::string>() == "temperature" ? SliceKind::Temperature
                                                                    : SliceKind::RelativeError;
        crc = side.at("crc32").get<std::uint32_t>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedFileError(prefix + ".json: " + e.what());
    }
    if (s.width < 1 || s.height < 1) throw MalformedFileError(prefix + ".json: bad dims");
    const auto bytes = read_file_bytes(prefix + ".f64");
    if (detail::crc32(bytes) != crc) throw ChecksumError(prefix + ".f64: CRC mismatch");
    s.values = unpack(bytes, static_cast<std::size_t>(s.width) * s.height, prefix + ".f64");
    return s;
}

}  // namespace flametomo
