#include "flametomo/graymap.hpp"

#include <cctype>
#include <sstream>

#include "flametomo/atomic_file.hpp"
#include "flametomo/error.hpp"

namespace flametomo {

namespace {

class HeaderLexer {
public:
    HeaderLexer(const std::string& bytes, std::vector<std::string>& comments)
        : bytes_(bytes), comments_(comments) {}

    std::string token() {
        skip_space_and_comments();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) &&
               bytes_[pos_] != '#') {
            ++pos_;
        }
        return bytes_.substr(start, pos_ - start);
    }

    int integer(const std::string& what) {
        const std::string t = token();
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos || t.size() > 9) {
            throw MalformedFileError(what + ": bad header field '" + t + "'");
        }
        return std::stoi(t);
    }

    // Exactly one whitespace byte separates the header from binary samples.
    void single_space(const std::string& what) {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            throw MalformedFileError(what + ": missing separator before pixel data");
        }
        ++pos_;
    }

    std::size_t position() const { return pos_; }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                const std::size_t end = bytes_.find('\n', pos_);
                std::string text = bytes_.substr(pos_ + 1, end == std::string::npos ? std::string::npos
                                                                                     : end - pos_ - 1);
                if (!text.empty() && text.front() == ' ') text.erase(0, 1);
                comments_.push_back(text);
                pos_ = end == std::string::npos ? bytes_.size() : end + 1;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& bytes_;
    std::vector<std::string>& comments_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(const std::string& bytes, const std::string& what) {
    GrayImage img;
    HeaderLexer lex(bytes, img.comments);
    const std::string magic = lex.token();
    if (magic != "P5" && magic != "P2") throw MalformedFileError(what + ": not a PGM file");
    img.width = lex.integer(what);
    img.height = lex.integer(what);
    img.maxval = lex.integer(what);
    if (img.width < 1 || img.height < 1) throw MalformedFileError(what + ": empty image");
    if (img.maxval < 1 || img.maxval > 65535) throw MalformedFileError(what + ": bad maxval");
    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    img.pixels.resize(count);

    if (magic == "P2") {
        for (std::size_t i = 0; i < count; ++i) {
            const int v = lex.integer(what);
            if (v > img.maxval) throw MalformedFileError(what + ": sample exceeds maxval");
            img.pixels[i] = static_cast<std::uint16_t>(v);
        }
        return img;
    }

    lex.single_space(what);
    const std::size_t bps = img.maxval > 255 ? 2 : 1;
    const std::size_t start = lex.position();
    if (bytes.size() - start < count * bps) throw MalformedFileError(what + ": truncated pixel data");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + start);
    for (std::size_t i = 0; i < count; ++i) {
        const int v = bps == 2 ? (p[2 * i] << 8) | p[2 * i + 1] : p[i];
        if (v > img.maxval) throw MalformedFileError(what + ": sample exceeds maxval");
        img.pixels[i] = static_cast<std::uint16_t>(v);
    }
    return img;
}

GrayImage read_pgm(const std::string& path) { return parse_pgm(read_file_text(path), path); }

std::string encode_pgm(const GrayImage& img) {
    if (img.width < 1 || img.height < 1 || img.maxval < 1 || img.maxval > 65535 ||
        img.pixels.size() != static_cast<std::size_t>(img.width) * img.height) {
        throw ValidationError("graymap has inconsistent dimensions");
    }
    std::ostringstream os;
    os << "P5\n";
    for (const std::string& c : img.comments) os << "# " << c << '\n';
    os << img.width << ' ' << img.height << '\n' << img.maxval << '\n';
    std::string out = os.str();
    const bool wide = img.maxval > 255;
    out.reserve(out.size() + img.pixels.size() * (wide ? 2 : 1));
    for (std::uint16_t v : img.pixels) {
        if (v > img.maxval) throw ValidationError("graymap sample exceeds maxval");
        if (wide) out.push_back(static_cast<char>(v >> 8));
        out.push_back(static_cast<char>(v & 0xFF));
    }
    return out;
}

void write_pgm(const GrayImage& img, const std::string& path) {
    write_file_atomic(path, encode_pgm(img));
}

}  // namespace flametomo
