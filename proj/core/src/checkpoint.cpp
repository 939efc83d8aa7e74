#include "flametomo/checkpoint.hpp"

#include "flametomo/atomic_file.hpp"
#include "flametomo/detail/binary_io.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

namespace {
constexpr std::string_view kMagic = "FTCKPT\r\n";
}

std::vector<std::uint8_t> encode_checkpoint(const NetworkParams& params) {
    const auto shapes = params.shape.layers();
    if (shapes.size() != params.layers.size()) {
        throw ValidationError("checkpoint: parameters do not match their shape");
    }
    detail::ByteWriter w;
    w.put_bytes(kMagic);
    w.put_u32(kCheckpointVersion);

    const EncodingConfig& e = params.encoding;
    w.put_i32(e.levels);
    w.put_u8(e.include_raw ? 1 : 0);
    for (int k = 0; k < 3; ++k) w.put_f64(e.domain_center[k]);
    w.put_f64(e.domain_half_extent);

    const NetworkShape& s = params.shape;
    w.put_i32(s.input_dim);
    w.put_i32(s.hidden_width);
    w.put_i32(s.hidden_layers);
    w.put_i32(s.skip_layer);
    w.put_u32(static_cast<std::uint32_t>(s.reduce_widths.size()));
    for (int width : s.reduce_widths) w.put_i32(width);

    w.put_u32(static_cast<std::uint32_t>(shapes.size()));
    for (const LayerShape& ls : shapes) {
        w.put_u32(static_cast<std::uint32_t>(ls.out));
        w.put_u32(static_cast<std::uint32_t>(ls.in));
    }
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        const auto& layer = params.layers[i];
        if (layer.weight.rows() != shapes[i].out || layer.weight.cols() != shapes[i].in ||
            layer.bias.size() != shapes[i].out) {
            throw ValidationError("checkpoint: layer " + std::to_string(i) + " has wrong shape");
        }
        for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
            for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) w.put_f64(layer.weight(r, c));
        for (Eigen::Index r = 0; r < layer.bias.size(); ++r) w.put_f64(layer.bias(r));
    }
    w.seal();
    return w.bytes();
}

NetworkParams decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& what) {
    detail::ByteReader r(detail::open_sealed(bytes, kMagic, kCheckpointVersion, what), what);
    NetworkParams p;
    p.encoding.levels = r.get_i32();
    p.encoding.include_raw = r.get_u8() != 0;
    for (int k = 0; k < 3; ++k) p.encoding.domain_center[k] = r.get_f64();
    p.encoding.domain_half_extent = r.get_f64();

    p.shape.input_dim = r.get_i32();
    p.shape.hidden_width = r.get_i32();
    p.shape.hidden_layers = r.get_i32();
    p.shape.skip_layer = r.get_i32();
    const std::uint32_t n_reduce = r.get_u32();
    if (n_reduce > 64) throw MalformedFileError(what + ": implausible reduce layer count");
    p.shape.reduce_widths.resize(n_reduce);
    for (int& width : p.shape.reduce_widths) width = r.get_i32();

    try {
        p.encoding.validate();
        p.shape.validate();
    } catch (const ValidationError& e) {
        throw MalformedFileError(what + ": " + e.what());
    }
    const auto shapes = p.shape.layers();
    const std::uint32_t n_layers = r.get_u32();
    if (n_layers != shapes.size()) throw MalformedFileError(what + ": layer table mismatch");
    for (const LayerShape& ls : shapes) {
        const auto out = r.get_u32();
        const auto in = r.get_u32();
        if (out != static_cast<std::uint32_t>(ls.out) || in != static_cast<std::uint32_t>(ls.in)) {
            throw MalformedFileError(what + ": layer table mismatch");
        }
    }
    for (const LayerShape& ls : shapes) {
        DenseLayer<double> layer{MatrixX<double>(ls.out, ls.in), VectorX<double>(ls.out)};
        for (Eigen::Index row = 0; row < ls.out; ++row)
            for (Eigen::Index c = 0; c < ls.in; ++c) layer.weight(row, c) = r.get_f64();
        for (Eigen::Index row = 0; row < ls.out; ++row) layer.bias(row) = r.get_f64();
        p.layers.push_back(std::move(layer));
    }
    if (r.remaining() != 0) throw MalformedFileError(what + ": trailing bytes");
    return p;
}

void write_checkpoint(const NetworkParams& params, const std::string& path) {
    write_file_atomic(path, encode_checkpoint(params));
}

NetworkParams read_checkpoint(const std::string& path) {
    return decode_checkpoint(read_file_bytes(path), path);
}

}  // namespace flametomo
