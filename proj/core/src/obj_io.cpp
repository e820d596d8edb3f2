// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "specsep/error.hpp"
#include "specsep/geometry.hpp"

namespace specsep {

namespace fs = std::filesystem;

namespace {

struct Corner {
    int v = -1, vt = -1, vn = -1;
};

int
resolve_index(const std::string& token, int count, const std::string& where)
{
    int i = 0;
    try {
        std::size_t used = 0;
        i = std::stoi(token, &used);
        if (used != token.size())
            throw std::invalid_argument(token);
    } catch (const std::exception&) {
        fail(ErrorKind::Geometry, "malformed face index '" + token + "' at "
                                      + where);
    }
    if (i == 0)
        fail(ErrorKind::Geometry, "face index 0 at " + where);
    const int resolved = i > 0 ? i - 1 : count + i;
    if (resolved < 0 || resolved >= count)
        fail(ErrorKind::Geometry, "face index " + token + " out of range at "
                                      + where);
    return resolved;
}

Corner
parse_corner(const std::string& token, int nv, int nvt, int nvn,
             const std::string& where)
{
    Corner c;
    const auto s1 = token.find('/');
    if (s1 == std::string::npos) {
        c.v = resolve_index(token, nv, where);
        return c;
    }
    c.v = resolve_index(token.substr(0, s1), nv, where);
    const auto s2 = token.find('/', s1 + 1);
    const std::string vt = token.substr(s1 + 1, s2 == std::string::npos
                                                    ? std::string::npos
                                                    : s2 - s1 - 1);
    if (!vt.empty())
        c.vt = resolve_index(vt, nvt, where);
    if (s2 != std::string::npos) {
        const std::string vn = token.substr(s2 + 1);
        if (!vn.empty())
            c.vn = resolve_index(vn, nvn, where);
    }
    return c;
}

}  // namespace

Mesh
load_obj(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::Io, "cannot open OBJ file " + path.string());

    Mesh mesh;
    std::vector<Vec2> texcoords;
    std::vector<Vec3> normals;
    std::vector<int> uv_of_vertex;
    std::vector<int> normal_of_vertex;
    std::vector<Corner> face;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#')
            continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x >> p.y >> p.z))
                fail(ErrorKind::Geometry, "malformed vertex at " + where);
            mesh.vertices.push_back(p);
            uv_of_vertex.push_back(-1);
            normal_of_vertex.push_back(-1);
        } else if (tag == "vt") {
            Vec2 t;
            if (!(ls >> t.x >> t.y))
                fail(ErrorKind::Geometry, "malformed texcoord at " + where);
            texcoords.push_back(t);
        } else if (tag == "vn") {
            Vec3 n;
            if (!(ls >> n.x >> n.y >> n.z))
                fail(ErrorKind::Geometry, "malformed normal at " + where);
            normals.push_back(normalize(n));
        } else if (tag == "f") {
            face.clear();
            std::string token;
            while (ls >> token)
                face.push_back(parse_corner(token, int(mesh.vertices.size()),
                                            int(texcoords.size()),
                                            int(normals.size()), where));
            if (face.size() < 3)
                fail(ErrorKind::Geometry, "face with fewer than 3 corners at "
                                              + where);
            for (const Corner& c : face) {
                if (c.vt >= 0 && uv_of_vertex[c.v] < 0)
                    uv_of_vertex[c.v] = c.vt;
                if (c.vn >= 0 && normal_of_vertex[c.v] < 0)
                    normal_of_vertex[c.v] = c.vn;
            }
            for (std::size_t k = 1; k + 1 < face.size(); ++k)
                mesh.triangles.push_back({face[0].v, face[k].v, face[k + 1].v});
        }
        // other statements (o, g, s, usemtl, mtllib, ...) are ignored
    }

    const std::size_t n = mesh.vertices.size();
    bool all_uv = n > 0, all_normals = n > 0;
    for (std::size_t i = 0; i < n; ++i) {
        all_uv = all_uv && uv_of_vertex[i] >= 0;
        all_normals = all_normals && normal_of_vertex[i] >= 0;
    }
    if (all_uv) {
        mesh.uvs.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 t = texcoords[uv_of_vertex[i]];
            // OBJ texcoords have v pointing up; texel rows grow downwards
            mesh.uvs[i] = {std::clamp(t.x, 0.0, 1.0),
                           std::clamp(1.0 - t.y, 0.0, 1.0)};
        }
    }
    if (all_normals) {
        mesh.normals.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            mesh.normals[i] = normals[normal_of_vertex[i]];
    }
    mesh.validate();
    if (!all_normals)
        mesh = compute_vertex_normals(std::move(mesh));
    if (!all_uv)
        mesh = assign_spherical_uvs(std::move(mesh));
    return mesh;
}

void
save_obj(const Mesh& mesh, const fs::path& path)
{
    mesh.validate();
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::Io, "cannot write " + path.string());
    out << std::setprecision(17);
    for (const Vec3& v : mesh.vertices)
        out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const Vec2& t : mesh.uvs)
        out << "vt " << t.x << ' ' << 1.0 - t.y << '\n';
    for (const Vec3& n : mesh.normals)
        out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
    const bool has_uv = !mesh.uvs.empty();
    const bool has_n = !mesh.normals.empty();
    for (const auto& t : mesh.triangles) {
        out << 'f';
        for (int i : t) {
            out << ' ' << i + 1;
            if (has_uv || has_n)
                out << '/';
            if (has_uv)
                out << i + 1;
            if (has_n)
                out << '/' << i + 1;
        }
        out << '\n';
    }
    if (!out)
        fail(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace specsep
