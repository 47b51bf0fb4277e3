#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "cmfd/errors.hpp"
#include "cmfd/image.hpp"

namespace cmfd {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    return f;
}

double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

std::uint16_t to_u16(double v) {
    return static_cast<std::uint16_t>(std::lround(clamp01(v) * 65535.0));
}

std::uint8_t to_u8(double v) {
    return static_cast<std::uint8_t>(std::lround(clamp01(v) * 255.0));
}

// ---------------------------------------------------------------- PGM (P5)

int pgm_next_value(std::FILE* f, const char* what) {
    // skips whitespace and '#' comments between header tokens
    int c = std::fgetc(f);
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(f);
        } else if (!std::isspace(c)) {
            break;
        }
        c = std::fgetc(f);
    }
    if (c == EOF || !std::isdigit(c)) throw FormatError(std::string("bad PGM header: ") + what);
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = std::fgetc(f);
    }
    return value;
}

GrayImage read_pgm(std::FILE* f, const std::filesystem::path& path) {
    char magic[2];
    if (std::fread(magic, 1, 2, f) != 2 || magic[0] != 'P' || magic[1] != '5')
        throw FormatError("'" + path.string() + "' is not a P5 PGM");
    const int w = pgm_next_value(f, "width");
    const int h = pgm_next_value(f, "height");
    const int maxval = pgm_next_value(f, "maxval");
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw FormatError("'" + path.string() + "': bad PGM dimensions");

    GrayImage img(w, h);
    const std::size_t n = img.size();
    if (maxval < 256) {
        std::vector<std::uint8_t> raw(n);
        if (std::fread(raw.data(), 1, n, f) != n) throw IoError("'" + path.string() + "': truncated PGM");
        for (std::size_t i = 0; i < n; ++i) img.pix[i] = raw[i] / static_cast<double>(maxval);
    } else {
        std::vector<std::uint8_t> raw(n * 2);
        if (std::fread(raw.data(), 1, n * 2, f) != n * 2)
            throw IoError("'" + path.string() + "': truncated PGM");
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
            img.pix[i] = v / static_cast<double>(maxval);
        }
    }
    return img;
}

// ---------------------------------------------------------------- PNG

struct PngReadGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReadGuard() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    }
};

struct PngWriteGuard {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteGuard() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

// Reads any gray/rgb/palette PNG at 8 or 16 bits into rows of interleaved
// host-order uint16 samples scaled to the original depth.
struct PngPixels {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 0;
    std::vector<std::uint16_t> samples; // width*height*channels
};

PngPixels read_png_pixels(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    PngPixels out;
    std::vector<png_byte> raw;
    std::vector<png_bytep> row_ptrs;

    PngReadGuard g;
    g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng init failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng init failed");

    if (setjmp(png_jmpbuf(g.png))) throw FormatError("'" + path.string() + "': PNG decode error");

    png_init_io(g.png, f.get());
    png_read_info(g.png, g.info);

    png_set_palette_to_rgb(g.png);
    png_set_expand_gray_1_2_4_to_8(g.png);
    png_set_strip_alpha(g.png);
    png_read_update_info(g.png, g.info);

    out.width = static_cast<int>(png_get_image_width(g.png, g.info));
    out.height = static_cast<int>(png_get_image_height(g.png, g.info));
    out.channels = png_get_channels(g.png, g.info);
    out.bit_depth = png_get_bit_depth(g.png, g.info);
    if (out.channels != 1 && out.channels != 3)
        throw FormatError("'" + path.string() + "': unsupported PNG layout");

    const std::size_t rowbytes = png_get_rowbytes(g.png, g.info);
    raw.resize(rowbytes * out.height);
    row_ptrs.resize(out.height);
    for (int r = 0; r < out.height; ++r) row_ptrs[r] = raw.data() + rowbytes * r;
    png_read_image(g.png, row_ptrs.data());
    png_read_end(g.png, nullptr);

    const std::size_t n = static_cast<std::size_t>(out.width) * out.height * out.channels;
    out.samples.resize(n);
    if (out.bit_depth == 16) {
        // PNG stores 16-bit samples big-endian
        for (std::size_t i = 0; i < n; ++i)
            out.samples[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    } else {
        for (std::size_t i = 0; i < n; ++i) out.samples[i] = raw[i];
    }
    return out;
}

GrayImage read_png_gray(const std::filesystem::path& path) {
    const PngPixels px = read_png_pixels(path);
    const double scale = px.bit_depth == 16 ? 65535.0 : 255.0;
    GrayImage img(px.width, px.height);
    const std::size_t n = static_cast<std::size_t>(px.width) * px.height;
    if (px.channels == 1) {
        for (std::size_t i = 0; i < n; ++i) img.pix[i] = px.samples[i] / scale;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double r = px.samples[3 * i] / scale;
            const double gch = px.samples[3 * i + 1] / scale;
            const double b = px.samples[3 * i + 2] / scale;
            img.pix[i] = clamp01(luma(r, gch, b));
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, int width, int height, int bit_depth,
               int color_type, const std::vector<png_byte>& raw) {
    FilePtr f = open_file(path, "wb");
    std::vector<png_bytep> row_ptrs(height);
    const std::size_t rowbytes = raw.size() / height;
    for (int r = 0; r < height; ++r)
        row_ptrs[r] = const_cast<png_bytep>(raw.data() + rowbytes * r);

    PngWriteGuard g;
    g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!g.png) throw IoError("libpng init failed");
    g.info = png_create_info_struct(g.png);
    if (!g.info) throw IoError("libpng init failed");

    if (setjmp(png_jmpbuf(g.png))) throw IoError("'" + path.string() + "': PNG encode error");

    png_init_io(g.png, f.get());
    png_set_IHDR(g.png, g.info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(g.png, g.info);
    png_write_image(g.png, row_ptrs.data());
    png_write_end(g.png, nullptr);
}

// ---------------------------------------------------------------- JPEG

struct JpegErr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_trap(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

GrayImage decode_jpeg(jpeg_decompress_struct& cinfo) {
    // caller has installed the source and error manager
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE; // codec-side BT.601 luma for color inputs
    jpeg_start_decompress(&cinfo);

    GrayImage img(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    std::vector<JSAMPLE> row(cinfo.output_width);
    JSAMPROW rp = row.data();
    while (cinfo.output_scanline < cinfo.output_height) {
        const int r = static_cast<int>(cinfo.output_scanline);
        jpeg_read_scanlines(&cinfo, &rp, 1);
        for (int c = 0; c < img.width; ++c) img.at(r, c) = row[c] / 255.0;
    }
    jpeg_finish_decompress(&cinfo);
    return img;
}

GrayImage read_jpeg(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    GrayImage img;
    jpeg_decompress_struct cinfo;
    JpegErr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_trap;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw FormatError("'" + path.string() + "': JPEG decode error: " + err.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f.get());
    img = decode_jpeg(cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

std::vector<std::uint8_t> quantize_u8(const GrayImage& img) {
    std::vector<std::uint8_t> out(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = to_u8(img.pix[i]);
    return out;
}

void encode_jpeg(jpeg_compress_struct& cinfo, const GrayImage& img, int quality,
                 const std::vector<std::uint8_t>& bytes) {
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW rp = const_cast<JSAMPROW>(bytes.data() + static_cast<std::size_t>(cinfo.next_scanline) * img.width);
        jpeg_write_scanlines(&cinfo, &rp, 1);
    }
    jpeg_finish_compress(&cinfo);
}

void write_jpeg(const GrayImage& img, const std::filesystem::path& path, int quality) {
    FilePtr f = open_file(path, "wb");
    const std::vector<std::uint8_t> bytes = quantize_u8(img);
    jpeg_compress_struct cinfo;
    JpegErr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_trap;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        throw IoError("'" + path.string() + "': JPEG encode error: " + err.message);
    }
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, f.get());
    encode_jpeg(cinfo, img, quality, bytes);
    jpeg_destroy_compress(&cinfo);
}

} // namespace

std::size_t Mask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b ? 1 : 0;
    return n;
}

GrayImage load_grayscale(const std::filesystem::path& path) {
    unsigned char sig[8] = {0};
    {
        FilePtr f = open_file(path, "rb");
        if (std::fread(sig, 1, 8, f.get()) < 2) throw FormatError("'" + path.string() + "': file too short");
    }
    if (png_sig_cmp(sig, 0, 8) == 0) return read_png_gray(path);
    if (sig[0] == 0xFF && sig[1] == 0xD8) return read_jpeg(path);
    if (sig[0] == 'P' && sig[1] == '5') {
        FilePtr f = open_file(path, "rb");
        return read_pgm(f.get(), path);
    }
    throw FormatError("'" + path.string() + "': unsupported image format");
}

void save_pgm16(const GrayImage& img, const std::filesystem::path& path) {
    FilePtr f = open_file(path, "wb");
    std::fprintf(f.get(), "P5\n%d %d\n65535\n", img.width, img.height);
    std::vector<std::uint8_t> raw(img.size() * 2);
    for (std::size_t i = 0; i < img.size(); ++i) {
        const std::uint16_t v = to_u16(img.pix[i]);
        raw[2 * i] = static_cast<std::uint8_t>(v >> 8);
        raw[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
    if (std::fwrite(raw.data(), 1, raw.size(), f.get()) != raw.size())
        throw IoError("'" + path.string() + "': short write");
}

GrayImage load_pgm(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    return read_pgm(f.get(), path);
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") {
        save_pgm16(img, path);
    } else if (ext == ".png") {
        std::vector<png_byte> raw(img.size() * 2);
        for (std::size_t i = 0; i < img.size(); ++i) {
            const std::uint16_t v = to_u16(img.pix[i]);
            raw[2 * i] = static_cast<png_byte>(v >> 8);
            raw[2 * i + 1] = static_cast<png_byte>(v & 0xFF);
        }
        write_png(path, img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, raw);
    } else if (ext == ".jpg" || ext == ".jpeg") {
        write_jpeg(img, path, 95);
    } else {
        throw FormatError("unsupported output extension '" + ext + "'");
    }
}

void save_mask_png(const Mask& mask, const std::filesystem::path& path) {
    std::vector<png_byte> raw(mask.bits.size());
    for (std::size_t i = 0; i < mask.bits.size(); ++i) raw[i] = mask.bits[i] ? 255 : 0;
    write_png(path, mask.width, mask.height, 8, PNG_COLOR_TYPE_GRAY, raw);
}

Mask load_mask_png(const std::filesystem::path& path) {
    const GrayImage g = read_png_gray(path);
    Mask m(g.width, g.height);
    for (std::size_t i = 0; i < g.size(); ++i) m.bits[i] = g.pix[i] >= 0.5 ? 1 : 0;
    return m;
}

void save_overlay_png(const GrayImage& base, const Mask& detections,
                      const std::filesystem::path& path, double alpha) {
    if (!(base.width == detections.width && base.height == detections.height))
        throw DimensionError("overlay: image and mask shapes differ");
    std::vector<png_byte> raw(base.size() * 3);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double g = clamp01(base.pix[i]);
        double r = g, gg = g, b = g;
        if (detections.bits[i]) {
            r = (1.0 - alpha) * g + alpha * 1.0;
            gg = (1.0 - alpha) * g;
            b = (1.0 - alpha) * g;
        }
        raw[3 * i] = to_u8(r);
        raw[3 * i + 1] = to_u8(gg);
        raw[3 * i + 2] = to_u8(b);
    }
    write_png(path, base.width, base.height, 8, PNG_COLOR_TYPE_RGB, raw);
}

GrayImage jpeg_roundtrip(const GrayImage& img, int quality) {
    if (quality < 1 || quality > 100) throw ParameterError("JPEG quality out of range");

    unsigned char* buf = nullptr;
    unsigned long buf_size = 0;
    const std::vector<std::uint8_t> bytes = quantize_u8(img);
    GrayImage out;

    jpeg_compress_struct enc;
    JpegErr err;
    enc.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_trap;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&enc);
        if (buf) std::free(buf);
        throw NumericError(std::string("JPEG re-encode failed: ") + err.message);
    }
    jpeg_create_compress(&enc);
    jpeg_mem_dest(&enc, &buf, &buf_size);
    encode_jpeg(enc, img, quality, bytes);
    jpeg_destroy_compress(&enc);

    jpeg_decompress_struct dec;
    JpegErr err2;
    dec.err = jpeg_std_error(&err2.pub);
    err2.pub.error_exit = jpeg_error_trap;
    if (setjmp(err2.jump)) {
        jpeg_destroy_decompress(&dec);
        std::free(buf);
        throw NumericError(std::string("JPEG re-decode failed: ") + err2.message);
    }
    jpeg_create_decompress(&dec);
    jpeg_mem_src(&dec, buf, buf_size);
    out = decode_jpeg(dec);
    jpeg_destroy_decompress(&dec);
    std::free(buf);
    return out;
}

double mask_iou(const Mask& a, const Mask& b) {
    if (!(a.width == b.width && a.height == b.height))
        throw DimensionError("mask_iou: shapes differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.bits.size(); ++i) {
        const bool pa = a.bits[i] != 0;
        const bool pb = b.bits[i] != 0;
        inter += (pa && pb) ? 1 : 0;
        uni += (pa || pb) ? 1 : 0;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace cmfd
