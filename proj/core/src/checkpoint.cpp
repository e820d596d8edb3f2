// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include "specsep/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "specsep/error.hpp"

namespace specsep {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void
put_u32(std::ostream& out, std::uint32_t v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t
get_u32(std::istream& in, const std::string& what)
{
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        fail(ErrorKind::Io, "truncated checkpoint while reading " + what);
    return v;
}

}  // namespace

void
save_checkpoint(const ModelParams& params, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put_u32(out, kCheckpointVersion);
    put_u32(out, std::uint32_t(params.count()));
    for (std::size_t i = 0; i < params.count(); ++i) {
        const std::string& name = params.name(i);
        put_u32(out, std::uint32_t(name.size()));
        out.write(name.data(), std::streamsize(name.size()));
        const Tensor& t = params.at(i);
        put_u32(out, std::uint32_t(t.rank()));
        for (int d : t.shape())
            put_u32(out, std::uint32_t(d));
    }
    for (std::size_t i = 0; i < params.count(); ++i) {
        const Tensor& t = params.at(i);
        out.write(reinterpret_cast<const char*>(t.ptr()),
                  std::streamsize(t.size() * sizeof(double)));
    }
    if (!out)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

ModelParams
load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Io, "cannot open checkpoint " + path.string());
    char magic[sizeof kCheckpointMagic];
    if (!in.read(magic, sizeof magic)
        || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
        fail(ErrorKind::Io, path.string() + " is not a parameter checkpoint");
    const std::uint32_t version = get_u32(in, "version");
    if (version != kCheckpointVersion)
        fail(ErrorKind::Io, "unsupported checkpoint version "
                                + std::to_string(version));
    const std::uint32_t count = get_u32(in, "tensor count");
    std::vector<std::string> names;
    std::vector<std::vector<int>> shapes;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t len = get_u32(in, "name length");
        if (len > 4096)
            fail(ErrorKind::Io, "implausible parameter name length");
        std::string name(len, '\0');
        if (!in.read(name.data(), len))
            fail(ErrorKind::Io, "truncated checkpoint name table");
        const std::uint32_t rank = get_u32(in, "rank");
        if (rank > 8)
            fail(ErrorKind::Io, "implausible tensor rank");
        std::vector<int> shape;
        for (std::uint32_t r = 0; r < rank; ++r)
            shape.push_back(int(get_u32(in, "dimension")));
        names.push_back(std::move(name));
        shapes.push_back(std::move(shape));
    }
    ModelParams params;
    for (std::uint32_t i = 0; i < count; ++i) {
        Tensor t(shapes[i]);
        if (!in.read(reinterpret_cast<char*>(t.ptr()),
                     std::streamsize(t.size() * sizeof(double))))
            fail(ErrorKind::Io, "truncated checkpoint payload for "
                                    + names[i]);
        params.add(names[i], std::move(t));
    }
    if (in.peek() != std::char_traits<char>::eof())
        fail(ErrorKind::Io, "trailing bytes after checkpoint payload");
    return params;
}

}  // namespace specsep
