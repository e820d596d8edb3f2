// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include <png.h>

#include "oracles.hpp"
#include "specsep/error.hpp"
#include "specsep/image_io.hpp"

using namespace specsep;
namespace fs = std::filesystem;
using specsep::testing::read_bytes;
using specsep::testing::scratch_dir;

namespace {

Raster
random_bytes_raster(int w, int h, int c, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    Raster r(w, h, c);
    for (double& v : r.data())
        v = double(gen() % 256) / 255.0;
    return r;
}

void
write_png16(const fs::path& path)
{
    FILE* f = std::fopen(path.c_str(), "wb");
    ASSERT_NE(f, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, f);
    png_set_IHDR(png, info, 2, 1, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_byte row[4] = {0xff, 0xff, 0x00, 0x10};
    png_write_row(png, row);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

}  // namespace

TEST(ImageIo, PpmBytesMapLinearly)
{
    auto dir = scratch_dir("ppm_bytes");
    {
        std::ofstream out(dir / "a.ppm", std::ios::binary);
        out << "P6\n2 2\n255\n";
        const unsigned char px[12] = {0, 128, 255, 1, 2, 3,
                                      4, 5, 6, 7, 8, 9};
        out.write(reinterpret_cast<const char*>(px), 12);
    }
    Raster r = load_raster(dir / "a.ppm");
    ASSERT_EQ(r.channels(), 3);
    EXPECT_EQ(r.at(0, 0, 0), 0.0);
    EXPECT_EQ(r.at(0, 0, 1), 128.0 / 255.0);
    EXPECT_EQ(r.at(0, 0, 2), 1.0);
    EXPECT_EQ(r.at(1, 1, 2), 9.0 / 255.0);
}

TEST(ImageIo, SaturatedGrayPng)
{
    auto dir = scratch_dir("gray_png");
    save_raster(Raster(1, 1, 1, 1.0), dir / "g.png");
    Raster r = load_raster(dir / "g.png");
    EXPECT_EQ(r.width(), 1);
    EXPECT_EQ(r.channels(), 1);
    EXPECT_EQ(r.at(0, 0, 0), 1.0);
}

TEST(ImageIo, RoundTripIsByteExact)
{
    auto dir = scratch_dir("roundtrip");
    for (int i = 0; i < 100; ++i) {
        const int c = i % 2 ? 3 : 1;
        Raster img = random_bytes_raster(3 + i % 7, 2 + i % 5, c, 100 + i);
        for (const char* ext : {".png", ".ppm"}) {
            fs::path p = dir / ("img" + std::to_string(i) + ext);
            save_raster(img, p);
            Raster back = load_raster(p);
            ASSERT_EQ(back, img) << p;
            fs::path q = dir / ("again" + std::to_string(i) + ext);
            save_raster(back, q);
            ASSERT_EQ(read_bytes(p), read_bytes(q));
        }
    }
}

TEST(ImageIo, HalfRoundsUp)
{
    auto dir = scratch_dir("half");
    save_raster(Raster(2, 2, 3, 0.5), dir / "h.ppm");
    std::string bytes = read_bytes(dir / "h.ppm");
    for (std::size_t i = bytes.size() - 12; i < bytes.size(); ++i)
        EXPECT_EQ(static_cast<unsigned char>(bytes[i]), 128u);
}

TEST(ImageIo, ClampFlag)
{
    auto dir = scratch_dir("clamp");
    Raster img(1, 1, 1, -0.3);
    EXPECT_THROW(save_raster(img, dir / "c.png"), Error);
    save_raster(img, dir / "c.png", true);
    EXPECT_EQ(load_raster(dir / "c.png").at(0, 0, 0), 0.0);
}

TEST(ImageIo, SavesAreDeterministic)
{
    auto dir = scratch_dir("det");
    Raster img = specsep::testing::random_raster(31, 17, 3, 5);
    save_raster(img, dir / "a.png");
    save_raster(img, dir / "b.png");
    EXPECT_EQ(read_bytes(dir / "a.png"), read_bytes(dir / "b.png"));
}

TEST(ImageIo, SixteenBitInputsAreRejected)
{
    auto dir = scratch_dir("deep");
    write_png16(dir / "d.png");
    try {
        load_raster(dir / "d.png");
        FAIL() << "16-bit PNG accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    {
        std::ofstream out(dir / "d.ppm", std::ios::binary);
        out << "P6\n1 1\n65535\n";
        out.write("\0\0\0\0\0\0", 6);
    }
    EXPECT_THROW(load_raster(dir / "d.ppm"), Error);
}

TEST(ImageIo, MissingAndMalformedFiles)
{
    auto dir = scratch_dir("bad");
    try {
        load_raster(dir / "none.png");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
    {
        std::ofstream out(dir / "t.ppm", std::ios::binary);
        out << "P6\n4 4\n255\nabc";
    }
    EXPECT_THROW(load_raster(dir / "t.ppm"), Error);
    EXPECT_THROW(save_raster(Raster(1, 1, 2), dir / "x.png"), Error);
}
