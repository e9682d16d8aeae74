#include "spectral/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace spectral {

ImageFormat parse_format(std::string_view name) {
    if (name == "pgm16" || name == "pgm") return ImageFormat::Pgm16;
    if (name == "png16" || name == "png") return ImageFormat::Png16;
    throw InvalidInput("unknown image format '" + std::string(name) + "' (expected pgm16 or png16)");
}

std::string_view format_name(ImageFormat format) {
    return format == ImageFormat::Pgm16 ? "pgm16" : "png16";
}

std::optional<ImageFormat> format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".pgm") return ImageFormat::Pgm16;
    if (ext == ".png") return ImageFormat::Png16;
    return std::nullopt;
}

std::optional<ImageFormat> detect_format(std::span<const std::uint8_t> bytes) {
    if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return ImageFormat::Pgm16;
    if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return ImageFormat::Png16;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmHeaderParser {
public:
    explicit PgmHeaderParser(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t next_number(const char* field) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw InvalidInput(std::string("malformed header: missing ") + field);
        }
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > kMaxPixels) throw InvalidInput(std::string("dimension overflow in ") + field);
            ++pos_;
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t payload_offset() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw InvalidInput("malformed header: no separator before raster");
        }
        return pos_ + 1;
    }

private:
    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 2;
};

GrayImage16 decode_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw InvalidInput("malformed header: not a binary PGM (P5) file");
    }
    PgmHeaderParser parser(bytes);
    const std::size_t width = parser.next_number("width");
    const std::size_t height = parser.next_number("height");
    const std::size_t maxval = parser.next_number("maxval");
    if (width == 0 || height == 0) throw InvalidInput("malformed header: zero dimension");
    if (width * height > kMaxPixels) throw InvalidInput("dimension overflow");
    if (maxval == 0 || maxval > 65535) throw InvalidInput("malformed header: maxval out of range");
    if (maxval < 256) {
        throw InvalidInput("unsupported bit depth: maxval " + std::to_string(maxval) +
                           " is 8-bit, 16-bit samples required");
    }
    const std::size_t offset = parser.payload_offset();
    const std::size_t n = width * height;
    if (bytes.size() < offset || bytes.size() - offset < 2 * n) {
        throw InvalidInput("truncated payload: expected " + std::to_string(2 * n) + " bytes");
    }
    std::vector<std::uint16_t> px(n);
    const std::uint8_t* p = bytes.data() + offset;
    for (std::size_t i = 0; i < n; ++i) {
        px[i] = static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
        if (px[i] > maxval) throw InvalidInput("malformed payload: sample exceeds maxval");
    }
    return GrayImage16(width, height, std::move(px));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage16& image) {
    const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                               std::to_string(image.height()) + "\n65535\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(header.size() + 2 * image.size());
    for (auto v : image.samples()) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

// ---------------------------------------------------------------------------
// PNG. libpng reports errors by longjmp; the setjmp frames below hold only
// trivially destructible locals and every C++ object they touch is owned by
// the caller.

struct PngErrorState {
    char message[256] = {};
};

void png_error_cb(png_structp png, png_const_charp msg) {
    auto* state = static_cast<PngErrorState*>(png_get_error_ptr(png));
    std::strncpy(state->message, msg, sizeof(state->message) - 1);
    png_longjmp(png, 1);
}

void png_warning_cb(png_structp, png_const_charp) {}

struct PngSource {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
    auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
    if (src->data.size() - src->pos < n) png_error(png, "truncated payload");
    std::memcpy(out, src->data.data() + src->pos, n);
    src->pos += n;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
    auto* sink = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    sink->insert(sink->end(), data, data + n);
}

void png_flush_cb(png_structp) {}

struct PngHeader {
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int bit_depth = 0;
    int color_type = 0;
};

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

bool png_read_header(png_structp png, png_infop info, PngHeader* hdr) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_read_info(png, info);
    int interlace = 0;
    png_get_IHDR(png, info, &hdr->width, &hdr->height, &hdr->bit_depth, &hdr->color_type,
                 &interlace, nullptr, nullptr);
    return true;
}

bool png_read_rows(png_structp png, png_infop info, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_swap(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    png_read_image(png, rows);
    png_read_end(png, nullptr);
    return true;
}

bool png_write_all(png_structp png, png_infop info, png_uint_32 w, png_uint_32 h, png_bytepp rows) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_set_swap(png);
    png_write_image(png, rows);
    png_write_end(png, nullptr);
    return true;
}

GrayImage16 decode_png(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
        throw InvalidInput("malformed header: not a PNG file");
    }
    PngErrorState err;
    PngSource src{bytes, 0};
    PngReadGuard guard;
    guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_cb, png_warning_cb);
    if (!guard.png) throw Error("libpng initialisation failed");
    guard.info = png_create_info_struct(guard.png);
    if (!guard.info) throw Error("libpng initialisation failed");
    png_set_read_fn(guard.png, &src, png_read_cb);

    PngHeader hdr;
    if (!png_read_header(guard.png, guard.info, &hdr)) {
        throw InvalidInput(std::string("malformed PNG: ") + err.message);
    }
    if (hdr.bit_depth != 16) {
        throw InvalidInput("unsupported bit depth: " + std::to_string(hdr.bit_depth) +
                           "-bit PNG, 16-bit greyscale required");
    }
    if (hdr.color_type != PNG_COLOR_TYPE_GRAY) {
        throw InvalidInput("unsupported PNG colour type: 16-bit greyscale without alpha required");
    }
    if (std::size_t{hdr.width} * hdr.height > kMaxPixels) throw InvalidInput("dimension overflow");

    std::vector<std::uint16_t> px(std::size_t{hdr.width} * hdr.height);
    std::vector<png_bytep> rows(hdr.height);
    for (png_uint_32 y = 0; y < hdr.height; ++y) {
        rows[y] = reinterpret_cast<png_bytep>(px.data() + std::size_t{y} * hdr.width);
    }
    if (!png_read_rows(guard.png, guard.info, rows.data())) {
        throw InvalidInput(std::string("malformed PNG: ") + err.message);
    }
    return GrayImage16(hdr.width, hdr.height, std::move(px));
}

std::vector<std::uint8_t> encode_png(const GrayImage16& image) {
    PngErrorState err;
    std::vector<std::uint8_t> out;
    PngWriteGuard guard;
    guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_cb, png_warning_cb);
    if (!guard.png) throw Error("libpng initialisation failed");
    guard.info = png_create_info_struct(guard.png);
    if (!guard.info) throw Error("libpng initialisation failed");
    png_set_write_fn(guard.png, &out, png_write_cb, png_flush_cb);

    // libpng wants non-const row pointers even when writing.
    std::vector<std::uint16_t> copy = image.vector();
    std::vector<png_bytep> rows(image.height());
    for (std::size_t y = 0; y < image.height(); ++y) {
        rows[y] = reinterpret_cast<png_bytep>(copy.data() + y * image.width());
    }
    if (!png_write_all(guard.png, guard.info, static_cast<png_uint_32>(image.width()),
                       static_cast<png_uint_32>(image.height()), rows.data())) {
        throw Error(std::string("PNG encoding failed: ") + err.message);
    }
    return out;
}

}  // namespace

GrayImage16 decode_image(std::span<const std::uint8_t> bytes, ImageFormat format) {
    return format == ImageFormat::Pgm16 ? decode_pgm(bytes) : decode_png(bytes);
}

std::vector<std::uint8_t> encode_image(const GrayImage16& image, ImageFormat format) {
    return format == ImageFormat::Pgm16 ? encode_pgm(image) : encode_png(image);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    if (path.empty()) throw IoError("empty output path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

GrayImage16 read_image(const std::filesystem::path& path, ImageFormat format) {
    return decode_image(read_file(path), format);
}

void write_image(const GrayImage16& image, const std::filesystem::path& path, ImageFormat format) {
    write_file(path, encode_image(image, format));
}

GrayImage16 mask_to_gray(const BinaryMask& mask) {
    std::vector<std::uint16_t> px(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) px[i] = mask[i] ? 65535 : 0;
    return GrayImage16(mask.width(), mask.height(), std::move(px));
}

BinaryMask gray_to_mask(const GrayImage16& image) {
    BinaryMask mask(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) mask[i] = image[i] != 0 ? 1 : 0;
    return mask;
}

void write_image(const BinaryMask& mask, const std::filesystem::path& path, ImageFormat format) {
    write_image(mask_to_gray(mask), path, format);
}

BinaryMask read_mask(const std::filesystem::path& path, ImageFormat format) {
    return gray_to_mask(read_image(path, format));
}

}  // namespace spectral
