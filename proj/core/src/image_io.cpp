// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "specsep/error.hpp"

namespace specsep {

namespace fs = std::filesystem;

namespace {

struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<unsigned char> bytes;  // interleaved
};

Raster
to_raster(const Image8& img)
{
    Raster out(img.width, img.height, img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c)
                    = img.bytes[(std::size_t(y) * img.width + x) * img.channels
                                + c]
                      / 255.0;
    return out;
}

Image8
to_bytes(const Raster& image, bool clamp)
{
    require(image.channels() == 1 || image.channels() == 3,
            "only 1- and 3-channel images can be saved");
    Image8 img{image.width(), image.height(), image.channels(), {}};
    img.bytes.resize(image.size());
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c) {
                double v = image.at(x, y, c);
                if (!std::isfinite(v))
                    fail(ErrorKind::InvalidArgument,
                         "cannot save non-finite sample");
                if (v < 0.0 || v > 1.0) {
                    if (!clamp)
                        fail(ErrorKind::InvalidArgument,
                             "sample outside [0,1]; pass clamp to save");
                    v = std::clamp(v, 0.0, 1.0);
                }
                img.bytes[(std::size_t(y) * img.width + x) * img.channels + c]
                    = static_cast<unsigned char>(std::floor(v * 255.0 + 0.5));
            }
    return img;
}

// ---- PPM / PGM -------------------------------------------------------------

int
read_header_int(std::istream& in, const fs::path& path)
{
    int ch = in.peek();
    while (in && (std::isspace(ch) || ch == '#')) {
        if (ch == '#') {
            std::string comment;
            std::getline(in, comment);
        } else {
            in.get();
        }
        ch = in.peek();
    }
    int value = -1;
    if (!(in >> value) || value < 0)
        fail(ErrorKind::Io, "malformed PPM header in " + path.string());
    return value;
}

Image8
read_ppm(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5'))
        fail(ErrorKind::Io, "malformed PPM header in " + path.string()
                                + " (expected P6 or P5)");
    Image8 img;
    img.channels = magic[1] == '6' ? 3 : 1;
    img.width = read_header_int(in, path);
    img.height = read_header_int(in, path);
    const int maxval = read_header_int(in, path);
    if (img.width <= 0 || img.height <= 0)
        fail(ErrorKind::Io, "malformed PPM header in " + path.string());
    if (maxval != 255)
        fail(ErrorKind::Io, "unsupported PPM bit depth (maxval "
                                + std::to_string(maxval) + ") in "
                                + path.string());
    // exactly one whitespace byte separates the header from the raster
    if (!std::isspace(in.get()))
        fail(ErrorKind::Io, "malformed PPM header in " + path.string());
    img.bytes.resize(std::size_t(img.width) * img.height * img.channels);
    in.read(reinterpret_cast<char*>(img.bytes.data()),
            std::streamsize(img.bytes.size()));
    if (in.gcount() != std::streamsize(img.bytes.size()))
        fail(ErrorKind::Io, "truncated PPM raster in " + path.string());
    return img;
}

void
write_ppm(const Image8& img, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << (img.channels == 3 ? "P6" : "P5") << '\n'
        << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.bytes.data()),
              std::streamsize(img.bytes.size()));
    if (!out)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

// ---- PNG -------------------------------------------------------------------

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void
png_error_handler(png_structp png, png_const_charp msg)
{
    auto* what = static_cast<std::string*>(png_get_error_ptr(png));
    if (what)
        *what = msg;
    png_longjmp(png, 1);
}

void
png_warning_handler(png_structp, png_const_charp)
{
}

Image8
read_png(const fs::path& path)
{
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file)
        fail(ErrorKind::Io, "cannot open " + path.string());
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
        fail(ErrorKind::Io, "malformed PNG header in " + path.string());

    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message,
                                             png_error_handler,
                                             png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Internal, "libpng initialization failed");
    }

    Image8 img;
    std::vector<png_bytep> rows;
    std::string reject;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Io, "malformed PNG " + path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth > 8)
        reject = "unsupported PNG bit depth "
                 + std::to_string(bit_depth);
    else if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE)
        reject = "interlaced PNG is not supported";
    if (!reject.empty()) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Io, reject + " in " + path.string());
    }

    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_strip_alpha(png);
    png_read_update_info(png, info);

    img.width = int(png_get_image_width(png, info));
    img.height = int(png_get_image_height(png, info));
    img.channels = int(png_get_channels(png, info));
    if (img.channels != 1 && img.channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(ErrorKind::Io, "unsupported PNG channel layout in "
                                + path.string());
    }
    img.bytes.resize(std::size_t(img.width) * img.height * img.channels);
    rows.resize(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = img.bytes.data() + std::size_t(y) * img.width * img.channels;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void
write_png(const Image8& img, const fs::path& path)
{
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file)
        fail(ErrorKind::Io, "cannot write " + path.string());

    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message,
                                              png_error_handler,
                                              png_warning_handler);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Internal, "libpng initialization failed");
    }
    std::vector<png_bytep> rows(img.height);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(ErrorKind::Io, "failed writing " + path.string() + ": " + message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 8,
                 img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    png_write_info(png, info);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.bytes.data())
                  + std::size_t(y) * img.width * img.channels;
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

ImageFormat
format_from_path(const fs::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".png")
        return ImageFormat::Png;
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
        return ImageFormat::Ppm;
    fail(ErrorKind::InvalidArgument,
         "cannot infer image format from " + path.string());
}

Raster
load_raster(const fs::path& path, ImageFormat format)
{
    if (!fs::exists(path))
        fail(ErrorKind::Io, "no such file: " + path.string());
    return to_raster(format == ImageFormat::Png ? read_png(path)
                                                : read_ppm(path));
}

Raster
load_raster(const fs::path& path)
{
    return load_raster(path, format_from_path(path));
}

void
save_raster(const Raster& image, const fs::path& path, ImageFormat format,
            bool clamp)
{
    const Image8 img = to_bytes(image, clamp);
    if (format == ImageFormat::Png)
        write_png(img, path);
    else
        write_ppm(img, path);
}

void
save_raster(const Raster& image, const fs::path& path, bool clamp)
{
    save_raster(image, path, format_from_path(path), clamp);
}

}  // namespace specsep
