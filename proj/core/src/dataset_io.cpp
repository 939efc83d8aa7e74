#include "flametomo/dataset_io.hpp"

#include <cmath>
#include <set>

#include "flametomo/atomic_file.hpp"
#include "flametomo/detail/binary_io.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

namespace {
constexpr std::string_view kMagic = "FTPROJ\r\n";
}

void Dataset::validate() const {
    if (cameras.size() != images.size()) {
        throw ValidationError("dataset: camera and image counts differ");
    }
    std::set<int> ids;
    for (const auto& cam : cameras) {
        cam.validate();
        if (!ids.insert(cam.id).second) {
            throw ValidationError("dataset: duplicate camera id " + std::to_string(cam.id));
        }
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        const auto& img = images[i];
        const auto& cam = cameras[i];
        if (img.camera_id != cam.id || img.width != cam.width || img.height != cam.height) {
            throw ValidationError("dataset: image " + std::to_string(i) +
                                  " does not match its camera");
        }
        if (img.values.size() != static_cast<std::size_t>(img.width) * img.height) {
            throw ValidationError("dataset: image " + std::to_string(i) + " has wrong size");
        }
        for (double v : img.values) {
            if (!std::isfinite(v)) throw ValidationError("dataset: non-finite projection value");
        }
    }
    SamplingConfig q{sample_count, near, far, SamplingMode::DeterministicMidpoint, 0};
    q.validate();
}

std::vector<std::uint8_t> encode_dataset(const Dataset& dataset) {
    dataset.validate();
    detail::ByteWriter w;
    w.put_bytes(kMagic);
    w.put_u32(kDatasetVersion);
    w.put_u32(static_cast<std::uint32_t>(dataset.sample_count));
    w.put_f64(dataset.near);
    w.put_f64(dataset.far);
    w.put_u32(static_cast<std::uint32_t>(dataset.cameras.size()));
    for (const auto& cam : dataset.cameras) {
        w.put_i32(cam.id);
        w.put_u32(static_cast<std::uint32_t>(cam.width));
        w.put_u32(static_cast<std::uint32_t>(cam.height));
        w.put_f64(cam.fx);
        w.put_f64(cam.fy);
        w.put_f64(cam.cx);
        w.put_f64(cam.cy);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) w.put_f64(cam.rotation(r, c));
        for (int k = 0; k < 3; ++k) w.put_f64(cam.translation[k]);
    }
    for (const auto& img : dataset.images) {
        w.put_i32(img.camera_id);
        w.put_u32(static_cast<std::uint32_t>(img.width));
        w.put_u32(static_cast<std::uint32_t>(img.height));
        w.put_u8(static_cast<std::uint8_t>(img.provenance.kind));
        w.put_f64(img.provenance.intensity);
        w.put_f64s(img.values);
    }
    w.seal();
    return w.bytes();
}

Dataset decode_dataset(std::span<const std::uint8_t> bytes, const std::string& what) {
    detail::ByteReader r(detail::open_sealed(bytes, kMagic, kDatasetVersion, what), what);
    Dataset ds;
    ds.sample_count = static_cast<int>(r.get_u32());
    ds.near = r.get_f64();
    ds.far = r.get_f64();
    const std::uint32_t n = r.get_u32();
    // Every camera block is 104 bytes; reject absurd counts before allocating.
    if (n > r.remaining() / 104) throw MalformedFileError(what + ": camera count too large");
    ds.cameras.resize(n);
    for (auto& cam : ds.cameras) {
        cam.id = r.get_i32();
        cam.width = static_cast<int>(r.get_u32());
        cam.height = static_cast<int>(r.get_u32());
        cam.fx = r.get_f64();
        cam.fy = r.get_f64();
        cam.cx = r.get_f64();
        cam.cy = r.get_f64();
        for (int row = 0; row < 3; ++row)
            for (int c = 0; c < 3; ++c) cam.rotation(row, c) = r.get_f64();
        for (int k = 0; k < 3; ++k) cam.translation[k] = r.get_f64();
    }
    ds.images.resize(n);
    for (auto& img : ds.images) {
        img.camera_id = r.get_i32();
        img.width = static_cast<int>(r.get_u32());
        img.height = static_cast<int>(r.get_u32());
        const std::uint8_t kind = r.get_u8();
        if (kind > static_cast<std::uint8_t>(NoiseKind::SaltPepper)) {
            throw MalformedFileError(what + ": unknown noise kind");
        }
        img.provenance.kind = static_cast<NoiseKind>(kind);
        img.provenance.intensity = r.get_f64();
        const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
        if (count > r.remaining() / 8) throw MalformedFileError(what + ": image too large");
        img.values.resize(count);
        r.get_f64s(img.values);
    }
    if (r.remaining() != 0) throw MalformedFileError(what + ": trailing bytes");
    try {
        ds.validate();
    } catch (const ValidationError& e) {
        throw MalformedFileError(what + ": " + e.what());
    }
    return ds;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
    write_file_atomic(path, encode_dataset(dataset));
}

Dataset read_dataset(const std::string& path) {
    return decode_dataset(read_file_bytes(path), path);
}

}  // namespace flametomo
