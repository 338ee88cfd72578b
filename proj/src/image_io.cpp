#include <csetjmp>
#include <cstdio>
#include <cstring>

#include <jpeglib.h>
#include <png.h>

#include "inar/error.hpp"
#include "inar/features.hpp"

namespace inar {

namespace {

bool is_png(std::span<const std::uint8_t> bytes) {
    static constexpr std::uint8_t kMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), kMagic, 8) == 0;
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

struct PngSource {
    const std::uint8_t* data = nullptr;
    std::size_t size = 0;
    std::size_t pos = 0;
};

void png_read_memory(png_structp png, png_bytep out, png_size_t length) {
    auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
    if (length > src->size - src->pos) png_error(png, "truncated stream");
    std::memcpy(out, src->data + src->pos, length);
    src->pos += length;
}

// Everything libpng may longjmp over lives in the caller, so no destructor is
// skipped. Returns false with libpng's message in `error`.
bool read_png_rows(png_structp png, png_infop info, PngSource* source, GrayImage* out,
                   std::vector<png_bytep>* rows, char* error) {
    if (setjmp(png_jmpbuf(png))) return false;
    png_set_read_fn(png, source, png_read_memory);
    png_read_info(png, info);
    const int color = png_get_color_type(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    if (png_get_channels(png, info) != 1 || png_get_bit_depth(png, info) != 8) {
        std::strcpy(error, "unsupported pixel layout");
        return false;
    }
    const auto width = png_get_image_width(png, info);
    const auto height = png_get_image_height(png, info);
    if (width == 0 || height == 0 || width > 1u << 15 || height > 1u << 15) {
        std::strcpy(error, "bad dimensions");
        return false;
    }
    *out = GrayImage(static_cast<int>(width), static_cast<int>(height));
    rows->resize(height);
    for (png_uint_32 y = 0; y < height; ++y) (*rows)[y] = out->pixels.data() + static_cast<std::size_t>(y) * width;
    png_read_image(png, rows->data());
    png_read_end(png, nullptr);
    return true;
}

void png_error_message(png_structp png, png_const_charp message) {
    std::strncpy(static_cast<char*>(png_get_error_ptr(png)), message, 199);
    png_longjmp(png, 1);
}

void png_warning_silent(png_structp, png_const_charp) {}

GrayImage decode_png(std::span<const std::uint8_t> bytes) {
    char error[200] = "decode failed";
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, error, png_error_message, png_warning_silent);
    if (!png) throw Error(ErrorCode::UnsupportedFormat, "png: cannot allocate decoder");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorCode::UnsupportedFormat, "png: cannot allocate decoder");
    }
    PngSource source{bytes.data(), bytes.size(), 0};
    GrayImage out;
    std::vector<png_bytep> rows;
    const bool ok = read_png_rows(png, info, &source, &out, &rows, error);
    png_destroy_read_struct(&png, &info, nullptr);
    if (!ok) throw Error(ErrorCode::UnsupportedFormat, std::string("png: ") + error);
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* manager = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, manager->message);
    std::longjmp(manager->jump, 1);
}

GrayImage decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorManager error;
    cinfo.err = jpeg_std_error(&error.base);
    error.base.error_exit = jpeg_error_exit;
    error.message[0] = '\0';
    // Only POD locals live across the setjmp boundary.
    GrayImage* out = new GrayImage();
    if (setjmp(error.jump)) {
        jpeg_destroy_decompress(&cinfo);
        delete out;
        throw Error(ErrorCode::UnsupportedFormat, std::string("jpeg: ") + error.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_GRAYSCALE;
    jpeg_start_decompress(&cinfo);
    out->width = static_cast<int>(cinfo.output_width);
    out->height = static_cast<int>(cinfo.output_height);
    out->pixels.resize(static_cast<std::size_t>(out->width) * static_cast<std::size_t>(out->height));
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out->pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * out->width;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    GrayImage result = std::move(*out);
    delete out;
    return result;
}

}  // namespace

GrayImage decode_image(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw Error(ErrorCode::EmptyImage, "no image bytes");
    if (is_png(bytes)) return decode_png(bytes);
    if (is_jpeg(bytes)) return decode_jpeg(bytes);
    throw Error(ErrorCode::UnsupportedFormat, "neither PNG nor JPEG");
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
    png_image desc;
    std::memset(&desc, 0, sizeof(desc));
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(image.width);
    desc.height = static_cast<png_uint_32>(image.height);
    desc.format = PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&desc, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
        throw Error(ErrorCode::UnsupportedFormat, std::string("png encode: ") + desc.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&desc, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
        throw Error(ErrorCode::UnsupportedFormat, std::string("png encode: ") + desc.message);
    }
    out.resize(size);
    return out;
}

}  // namespace inar
