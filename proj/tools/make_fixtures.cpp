// Writes the test fixture images: a sharp synthetic scene, a blurred and a
// blocky variant, a dark one, a JPEG copy, and a one-megapixel image.

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <stdexcept>

#include <jpeglib.h>

#include "inar/document.hpp"
#include "inar/features.hpp"
#include "inar/simulator.hpp"

namespace fs = std::filesystem;
using namespace inar;

namespace {

std::vector<std::uint8_t> encode_jpeg(const GrayImage& img, int quality) {
    jpeg_compress_struct cinfo{};
    jpeg_error_mgr jerr{};
    cinfo.err = jpeg_std_error(&jerr);
    jpeg_create_compress(&cinfo);
    unsigned char* buffer = nullptr;
    unsigned long size = 0;
    jpeg_mem_dest(&cinfo, &buffer, &size);
    cinfo.image_width = static_cast<JDIMENSION>(img.width);
    cinfo.image_height = static_cast<JDIMENSION>(img.height);
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(&img.pixels[static_cast<std::size_t>(cinfo.next_scanline) * img.width]);
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    std::vector<std::uint8_t> out(buffer, buffer + size);
    jpeg_destroy_compress(&cinfo);
    std::free(buffer);
    return out;
}

void save(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    std::cout << path.string() << " (" << bytes.size() << " bytes)\n";
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path dir = argc > 1 ? argv[1] : "tests/fixtures";
    try {
        const RawRequest sharp = render_raw_request(7, 256, 1.0, 1.0, 1.0, 0.8, 0.2);
        save(dir / "sharp.png", encode_png(sharp.image));
        save(dir / "sharp.jpg", encode_jpeg(sharp.image, 92));
        save(dir / "blurred.png", encode_png(render_raw_request(7, 256, 0.2, 1.0, 1.0, 0.8, 0.2).image));
        save(dir / "blocky.png", encode_png(render_raw_request(7, 256, 1.0, 1.0, 0.2, 0.8, 0.2).image));
        save(dir / "dark.png", encode_png(render_raw_request(7, 256, 1.0, 0.1, 1.0, 0.8, 0.2).image));
        save(dir / "megapixel.jpg", encode_jpeg(render_raw_request(11, 1024, 0.9, 0.9, 0.9, 0.6, 0.5).image, 90));
    } catch (const std::exception& e) {
        std::cerr << "make_fixtures: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
