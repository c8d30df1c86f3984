// OBJ and ASCII/binary-LE PLY readers and writers.
//
// OBJ: `v x y z`, `vt u v`, `f i j k` (1-based, `i/ti` and `i/ti/ni` accepted;
// per-corner texture indices are resolved to per-vertex UVs, last write wins).
// PLY: ascii 1.0 required for writing; binary_little_endian 1.0 accepted on read.
#pragma once

#include "specreg/mesh.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace specreg {

enum class MeshFormat { Obj, Ply };

inline MeshFormat format_from_path(const std::string& path) {
    auto dot = path.rfind('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(c));
    if (ext == "obj") return MeshFormat::Obj;
    if (ext == "ply") return MeshFormat::Ply;
    throw MeshError("cannot infer mesh format from path: " + path);
}

namespace detail {

inline TriMesh load_obj(std::istream& in) {
    TriMesh mesh;
    std::vector<Vec2> vt;
    std::vector<int> corner_uv;  // per-vertex uv index, -1 = unset
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw MeshError("OBJ parse error at line " + std::to_string(lineno));
            mesh.positions.emplace_back(x, y, z);
        } else if (tag == "vt") {
            double u, v;
            if (!(ls >> u >> v))
                throw MeshError("OBJ parse error at line " + std::to_string(lineno));
            vt.emplace_back(u, v);
        } else if (tag == "f") {
            std::array<int, 3> vi{}, ti{-1, -1, -1};
            std::string tok;
            int c = 0;
            while (ls >> tok) {
                if (c >= 3)
                    throw MeshError("OBJ face with more than 3 corners at line " +
                                    std::to_string(lineno) + " (triangles only)");
                // forms: i, i/t, i/t/n, i//n
                size_t s1 = tok.find('/');
                vi[c] = std::stoi(tok.substr(0, s1)) - 1;
                if (s1 != std::string::npos) {
                    size_t s2 = tok.find('/', s1 + 1);
                    std::string tpart = tok.substr(s1 + 1, s2 == std::string::npos
                                                               ? std::string::npos
                                                               : s2 - s1 - 1);
                    if (!tpart.empty()) ti[c] = std::stoi(tpart) - 1;
                }
                ++c;
            }
            if (c != 3)
                throw MeshError("OBJ face with " + std::to_string(c) +
                                " corners at line " + std::to_string(lineno));
            mesh.faces.push_back({vi[0], vi[1], vi[2]});
            if (ti[0] >= 0) {
                corner_uv.resize(mesh.positions.size(), -1);
                for (int k = 0; k < 3; ++k)
                    if (vi[k] >= 0 && vi[k] < static_cast<int>(corner_uv.size()))
                        corner_uv[vi[k]] = ti[k];
            }
        }
    }
    if (!corner_uv.empty() && !vt.empty()) {
        mesh.uv.assign(mesh.positions.size(), Vec2::Zero());
        for (size_t i = 0; i < corner_uv.size(); ++i)
            if (corner_uv[i] >= 0 && corner_uv[i] < static_cast<int>(vt.size()))
                mesh.uv[i] = vt[corner_uv[i]];
    }
    return mesh;
}

struct PlyProperty {
    std::string type;
    std::string name;
    bool is_list = false;
    std::string count_type;
};

inline size_t ply_type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
        t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    throw MeshError("PLY: unknown property type " + t);
}

inline double ply_read_binary_scalar(std::istream& in, const std::string& t) {
    unsigned char buf[8];
    size_t sz = ply_type_size(t);
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(sz));
    if (!in) throw MeshError("PLY: unexpected end of binary data");
    auto as = [&](auto v) {
        std::memcpy(&v, buf, sizeof(v));
        return static_cast<double>(v);
    };
    if (t == "char" || t == "int8") return as(std::int8_t{});
    if (t == "uchar" || t == "uint8") return as(std::uint8_t{});
    if (t == "short" || t == "int16") return as(std::int16_t{});
    if (t == "ushort" || t == "uint16") return as(std::uint16_t{});
    if (t == "int" || t == "int32") return as(std::int32_t{});
    if (t == "uint" || t == "uint32") return as(std::uint32_t{});
    if (t == "float" || t == "float32") return as(float{});
    return as(double{});
}

inline TriMesh load_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
        throw MeshError("PLY: missing 'ply' magic line");
    bool binary = false;
    struct Element {
        std::string name;
        long count = 0;
        std::vector<PlyProperty> props;
    };
    std::vector<Element> elements;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "comment" || tag == "obj_info") continue;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii")
                binary = false;
            else if (fmt == "binary_little_endian")
                binary = true;
            else
                throw MeshError("PLY: unsupported format " + fmt);
        } else if (tag == "element") {
            Element e;
            ls >> e.name >> e.count;
            elements.push_back(e);
        } else if (tag == "property") {
            if (elements.empty()) throw MeshError("PLY: property before element");
            PlyProperty p;
            std::string t;
            ls >> t;
            if (t == "list") {
                p.is_list = true;
                ls >> p.count_type >> p.type >> p.name;
            } else {
                p.type = t;
                ls >> p.name;
            }
            elements.back().props.push_back(p);
        } else if (tag == "end_header") {
            break;
        } else {
            throw MeshError("PLY: unexpected header line: " + line);
        }
    }

    TriMesh mesh;
    auto read_scalar = [&](std::istream& s, const std::string& t) -> double {
        if (binary) return ply_read_binary_scalar(s, t);
        double v;
        if (!(s >> v)) throw MeshError("PLY: unexpected end of ascii data");
        return v;
    };
    for (const Element& e : elements) {
        if (e.name == "vertex") {
            int xi = -1, yi = -1, zi = -1;
            for (size_t p = 0; p < e.props.size(); ++p) {
                if (e.props[p].name == "x") xi = static_cast<int>(p);
                if (e.props[p].name == "y") yi = static_cast<int>(p);
                if (e.props[p].name == "z") zi = static_cast<int>(p);
            }
            if (xi < 0 || yi < 0 || zi < 0)
                throw MeshError("PLY: vertex element missing x/y/z");
            for (long i = 0; i < e.count; ++i) {
                std::vector<double> vals(e.props.size());
                for (size_t p = 0; p < e.props.size(); ++p) {
                    if (e.props[p].is_list)
                        throw MeshError("PLY: list property on vertex element unsupported");
                    vals[p] = read_scalar(in, e.props[p].type);
                }
                mesh.positions.emplace_back(vals[xi], vals[yi], vals[zi]);
            }
        } else if (e.name == "face") {
            for (long i = 0; i < e.count; ++i) {
                for (const PlyProperty& p : e.props) {
                    if (p.is_list) {
                        long n = static_cast<long>(read_scalar(in, p.count_type));
                        if (p.name == "vertex_indices" || p.name == "vertex_index") {
                            if (n != 3)
                                throw MeshError("PLY: face " + std::to_string(i) + " has " +
                                                std::to_string(n) +
                                                " corners (triangles only)");
                            Face f;
                            for (int c = 0; c < 3; ++c)
                                f[c] = static_cast<int>(read_scalar(in, p.type));
                            mesh.faces.push_back(f);
                        } else {
                            for (long c = 0; c < n; ++c) read_scalar(in, p.type);
                        }
                    } else {
                        read_scalar(in, p.type);
                    }
                }
            }
        } else {
            // skip unknown element payload
            for (long i = 0; i < e.count; ++i)
                for (const PlyProperty& p : e.props) {
                    if (p.is_list) {
                        long n = static_cast<long>(read_scalar(in, p.count_type));
                        for (long c = 0; c < n; ++c) read_scalar(in, p.type);
                    } else {
                        read_scalar(in, p.type);
                    }
                }
        }
    }
    return mesh;
}

}  // namespace detail

inline TriMesh load_mesh(const std::string& path, std::optional<MeshFormat> format = {},
                         const ValidateOptions& opt = {}) {
    MeshFormat fmt = format.value_or(format_from_path(path));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MeshError("cannot open file: " + path);
    TriMesh mesh = fmt == MeshFormat::Obj ? detail::load_obj(in) : detail::load_ply(in);
    validate_mesh(mesh, opt);
    return mesh;
}

// Optional per-vertex scalar attribute is written as a PLY "quality" property.
inline void save_mesh(const TriMesh& mesh, const std::string& path,
                      std::optional<MeshFormat> format = {},
                      const ScalarField* vertex_attr = nullptr) {
    MeshFormat fmt = format.value_or(format_from_path(path));
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write file: " + path);
    out << std::setprecision(9);
    if (fmt == MeshFormat::Obj) {
        for (const Vec3& p : mesh.positions)
            out << "v " << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
        for (const Vec2& t : mesh.uv) out << "vt " << t.x() << ' ' << t.y() << '\n';
        for (const Face& f : mesh.faces) {
            if (mesh.has_uv())
                out << "f " << f[0] + 1 << '/' << f[0] + 1 << ' ' << f[1] + 1 << '/'
                    << f[1] + 1 << ' ' << f[2] + 1 << '/' << f[2] + 1 << '\n';
            else
                out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
        }
    } else {
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << mesh.vertex_count() << '\n';
        out << "property float x\nproperty float y\nproperty float z\n";
        if (vertex_attr) out << "property float quality\n";
        out << "element face " << mesh.face_count() << '\n';
        out << "property list uchar int vertex_indices\n";
        out << "end_header\n";
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            const Vec3& p = mesh.positions[i];
            out << p.x() << ' ' << p.y() << ' ' << p.z();
            if (vertex_attr) out << ' ' << (*vertex_attr)[i];
            out << '\n';
        }
        for (const Face& f : mesh.faces)
            out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
    if (!out) throw MeshError("I/O failure while writing: " + path);
}

}  // namespace specreg
