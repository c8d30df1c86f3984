// Global subdivision schemes: barycentric (BCS), midpoint upsample, and Loop,
// all with provenance records tying new vertices and faces back to the input.
#pragma once

#include "specreg/mesh.hpp"

#include <fstream>
#include <sstream>

namespace specreg {

enum class SubdivisionScheme { Bcs, Upsample, Loop };

inline std::string to_string(SubdivisionScheme s) {
    switch (s) {
        case SubdivisionScheme::Bcs: return "bcs";
        case SubdivisionScheme::Upsample: return "upsample";
        case SubdivisionScheme::Loop: return "loop";
    }
    return "?";
}

inline SubdivisionScheme scheme_from_string(const std::string& s) {
    if (s == "bcs") return SubdivisionScheme::Bcs;
    if (s == "upsample") return SubdivisionScheme::Upsample;
    if (s == "loop") return SubdivisionScheme::Loop;
    throw MeshError("unknown subdivision scheme: " + s);
}

// Where a new (Odd) vertex came from: a face barycenter or an edge.
struct OddVertexOrigin {
    int vertex = -1;          // new vertex id
    int face = -1;            // BCS: parent face; otherwise -1
    int edge_a = -1, edge_b = -1;  // upsample/loop: parent edge endpoints (old ids)
};

struct SubdivisionRecord {
    SubdivisionScheme scheme = SubdivisionScheme::Loop;
    std::vector<int> old_vertex_map;          // old vertex id -> new vertex id
    std::vector<OddVertexOrigin> new_vertex_origin;
    std::vector<int> face_parent;             // new face id -> old face id
};

namespace detail {

// Deterministic odd-vertex ids: new vertices appended after the old ones,
// ordered by sorted (min,max) endpoint pairs.
inline std::map<EdgeKey, int> number_edge_vertices(const TriMesh& mesh, int first_id) {
    std::map<EdgeKey, int> ids;
    for (const Face& f : mesh.faces)
        for (int e = 0; e < 3; ++e) ids.emplace(EdgeKey(f[e], f[(e + 1) % 3]), 0);
    int next = first_id;
    for (auto& [key, id] : ids) id = next++;
    return ids;
}

inline double loop_even_beta(int valence) {
    double c = 3.0 / 8.0 + 0.25 * std::cos(2.0 * M_PI / valence);
    return (5.0 / 8.0 - c * c) / valence;
}

}  // namespace detail

inline std::pair<TriMesh, SubdivisionRecord> bcs_subdivide(const TriMesh& mesh) {
    TriMesh out;
    SubdivisionRecord rec;
    rec.scheme = SubdivisionScheme::Bcs;
    const int nv = mesh.vertex_count();
    out.positions = mesh.positions;
    rec.old_vertex_map.resize(nv);
    for (int i = 0; i < nv; ++i) rec.old_vertex_map[i] = i;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Face& t = mesh.faces[f];
        int bc = static_cast<int>(out.positions.size());
        out.positions.push_back((mesh.positions[t[0]] + mesh.positions[t[1]] +
                                 mesh.positions[t[2]]) / 3.0);
        rec.new_vertex_origin.push_back({bc, f, -1, -1});
        for (int e = 0; e < 3; ++e) {
            out.faces.push_back({t[e], t[(e + 1) % 3], bc});
            rec.face_parent.push_back(f);
        }
    }
    return {std::move(out), std::move(rec)};
}

namespace detail {

// Shared connectivity for the 1->4 split; positions are scheme-specific.
inline std::pair<TriMesh, SubdivisionRecord> one_to_four(const TriMesh& mesh,
                                                         SubdivisionScheme scheme) {
    const int nv = mesh.vertex_count();
    auto edge_ids = number_edge_vertices(mesh, nv);
    TriMesh out;
    SubdivisionRecord rec;
    rec.scheme = scheme;
    out.positions.resize(nv + edge_ids.size());
    rec.old_vertex_map.resize(nv);
    for (int i = 0; i < nv; ++i) rec.old_vertex_map[i] = i;
    rec.new_vertex_origin.resize(edge_ids.size());
    for (const auto& [key, id] : edge_ids)
        rec.new_vertex_origin[id - nv] = {id, -1, key.a, key.b};
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Face& t = mesh.faces[f];
        int m01 = edge_ids.at(EdgeKey(t[0], t[1]));
        int m12 = edge_ids.at(EdgeKey(t[1], t[2]));
        int m20 = edge_ids.at(EdgeKey(t[2], t[0]));
        out.faces.push_back({t[0], m01, m20});
        out.faces.push_back({m01, t[1], m12});
        out.faces.push_back({m20, m12, t[2]});
        out.faces.push_back({m01, m12, m20});
        for (int c = 0; c < 4; ++c) rec.face_parent.push_back(f);
    }
    return {std::move(out), std::move(rec)};
}

}  // namespace detail

inline std::pair<TriMesh, SubdivisionRecord> upsample_subdivide(const TriMesh& mesh) {
    auto [out, rec] = detail::one_to_four(mesh, SubdivisionScheme::Upsample);
    const int nv = mesh.vertex_count();
    for (int i = 0; i < nv; ++i) out.positions[i] = mesh.positions[i];
    for (const OddVertexOrigin& o : rec.new_vertex_origin)
        out.positions[o.vertex] =
            0.5 * (mesh.positions[o.edge_a] + mesh.positions[o.edge_b]);
    return {std::move(out), std::move(rec)};
}

inline std::pair<TriMesh, SubdivisionRecord> loop_subdivide(const TriMesh& mesh) {
    auto [out, rec] = detail::one_to_four(mesh, SubdivisionScheme::Loop);
    const int nv = mesh.vertex_count();
    auto ef = build_edge_faces(mesh);

    // odd vertices: 3/8 endpoints + 1/8 opposite vertices; boundary edge -> midpoint
    for (const OddVertexOrigin& o : rec.new_vertex_origin) {
        const auto& fs = ef.at(EdgeKey(o.edge_a, o.edge_b));
        if (fs.size() == 2) {
            Vec3 p = 3.0 / 8.0 * (mesh.positions[o.edge_a] + mesh.positions[o.edge_b]);
            for (int f : fs) {
                for (int c = 0; c < 3; ++c) {
                    int v = mesh.faces[f][c];
                    if (v != o.edge_a && v != o.edge_b) p += 1.0 / 8.0 * mesh.positions[v];
                }
            }
            out.positions[o.vertex] = p;
        } else {
            out.positions[o.vertex] =
                0.5 * (mesh.positions[o.edge_a] + mesh.positions[o.edge_b]);
        }
    }

    // even vertices: interior Loop mask; boundary cubic-spline mask
    auto adj = vertex_adjacency(mesh);
    std::vector<bool> bnd = boundary_vertices(mesh);
    std::vector<std::vector<int>> bnd_nbrs(nv);
    for (const auto& [e, fs] : ef)
        if (fs.size() < 2) {
            bnd_nbrs[e.a].push_back(e.b);
            bnd_nbrs[e.b].push_back(e.a);
        }
    for (int i = 0; i < nv; ++i) {
        if (bnd[i]) {
            if (bnd_nbrs[i].size() == 2) {
                out.positions[i] = 0.75 * mesh.positions[i] +
                                   0.125 * (mesh.positions[bnd_nbrs[i][0]] +
                                            mesh.positions[bnd_nbrs[i][1]]);
            } else {
                out.positions[i] = mesh.positions[i];  // corner, keep
            }
            continue;
        }
        int n = static_cast<int>(adj[i].size());
        double beta = detail::loop_even_beta(n);
        Vec3 p = (1.0 - n * beta) * mesh.positions[i];
        for (int j : adj[i]) p += beta * mesh.positions[j];
        out.positions[i] = p;
    }
    return {std::move(out), std::move(rec)};
}

inline std::pair<TriMesh, SubdivisionRecord> subdivide(const TriMesh& mesh,
                                                       SubdivisionScheme scheme) {
    switch (scheme) {
        case SubdivisionScheme::Bcs: return bcs_subdivide(mesh);
        case SubdivisionScheme::Upsample: return upsample_subdivide(mesh);
        case SubdivisionScheme::Loop: return loop_subdivide(mesh);
    }
    throw MeshError("unreachable scheme");
}

// Text serialization for pipeline provenance: a `parent` table then an `origin` table.
inline void save_record(const SubdivisionRecord& rec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write record file: " + path);
    out << "scheme " << to_string(rec.scheme) << '\n';
    out << "parent " << rec.face_parent.size() << '\n';
    for (size_t f = 0; f < rec.face_parent.size(); ++f)
        out << f << ' ' << rec.face_parent[f] << '\n';
    out << "origin " << rec.new_vertex_origin.size() << '\n';
    for (const OddVertexOrigin& o : rec.new_vertex_origin) {
        if (o.face >= 0)
            out << o.vertex << " f " << o.face << '\n';
        else
            out << o.vertex << " e " << o.edge_a << ' ' << o.edge_b << '\n';
    }
}

}  // namespace specreg
