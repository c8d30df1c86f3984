// Localized Loop subdivision: split only a selected face region 1->4, then
// stitch each border odd vertex to the opposite corner of its single adjacent
// unselected face, splitting that face 1->2. Selections must first be repaired
// so no unselected face touches more than one selected face.
#pragma once

#include "specreg/subdivision.hpp"

#include <set>

namespace specreg {

struct FaceSelection {
    const TriMesh* mesh = nullptr;
    std::vector<char> selected;  // one flag per face

    static FaceSelection none(const TriMesh& m) {
        return {&m, std::vector<char>(m.face_count(), 0)};
    }
    static FaceSelection all(const TriMesh& m) {
        return {&m, std::vector<char>(m.face_count(), 1)};
    }
    static FaceSelection from_ids(const TriMesh& m, const std::vector<int>& ids) {
        FaceSelection s = none(m);
        for (int f : ids) {
            if (f < 0 || f >= m.face_count())
                throw MeshError("face selection id " + std::to_string(f) + " out of range");
            s.selected[f] = 1;
        }
        return s;
    }

    int count() const {
        int c = 0;
        for (char s : selected) c += s;
        return c;
    }
    std::vector<int> ids() const {
        std::vector<int> out;
        for (int f = 0; f < static_cast<int>(selected.size()); ++f)
            if (selected[f]) out.push_back(f);
        return out;
    }
};

namespace detail {

// face -> edge-adjacent faces
inline std::vector<std::vector<int>> face_adjacency(const TriMesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.face_count());
    auto ef = build_edge_faces(mesh);
    for (const auto& [e, fs] : ef)
        if (fs.size() == 2) {
            adj[fs[0]].push_back(fs[1]);
            adj[fs[1]].push_back(fs[0]);
        }
    return adj;
}

}  // namespace detail

// Smallest superset of the selection such that every unselected face is
// edge-adjacent to at most one selected face. Idempotent.
inline FaceSelection repair_selection(const FaceSelection& sel) {
    FaceSelection out = sel;
    auto adj = detail::face_adjacency(*sel.mesh);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int f = 0; f < sel.mesh->face_count(); ++f) {
            if (out.selected[f]) continue;
            int selected_nbrs = 0;
            for (int g : adj[f]) selected_nbrs += out.selected[g];
            if (selected_nbrs > 1) {
                out.selected[f] = 1;
                changed = true;
            }
        }
    }
    return out;
}

inline std::pair<TriMesh, SubdivisionRecord> local_loop_subdivide(const TriMesh& mesh,
                                                                 const FaceSelection& sel) {
    if (sel.mesh != &mesh || static_cast<int>(sel.selected.size()) != mesh.face_count())
        throw MeshError("local_loop_subdivide: selection does not belong to this mesh");
    auto adj = detail::face_adjacency(mesh);
    for (int f = 0; f < mesh.face_count(); ++f) {
        if (sel.selected[f]) continue;
        int selected_nbrs = 0;
        for (int g : adj[f]) selected_nbrs += sel.selected[g];
        if (selected_nbrs > 1)
            throw MeshError("unrepaired selection: outer face " + std::to_string(f) +
                            " is adjacent to " + std::to_string(selected_nbrs) +
                            " selected faces; run repair_selection first");
    }

    const int nv = mesh.vertex_count();
    auto ef = build_edge_faces(mesh);

    // odd vertices on edges of selected faces, deterministic ordering
    std::map<EdgeKey, int> odd_ids;
    for (int f = 0; f < mesh.face_count(); ++f) {
        if (!sel.selected[f]) continue;
        const Face& t = mesh.faces[f];
        for (int e = 0; e < 3; ++e) odd_ids.emplace(EdgeKey(t[e], t[(e + 1) % 3]), 0);
    }
    int next = nv;
    for (auto& [key, id] : odd_ids) id = next++;

    TriMesh out;
    SubdivisionRecord rec;
    rec.scheme = SubdivisionScheme::Loop;
    out.positions.resize(next);
    rec.old_vertex_map.resize(nv);
    for (int i = 0; i < nv; ++i) rec.old_vertex_map[i] = i;
    rec.new_vertex_origin.resize(odd_ids.size());
    for (const auto& [key, id] : odd_ids)
        rec.new_vertex_origin[id - nv] = {id, -1, key.a, key.b};

    // odd positions: Loop mask when both incident faces exist, midpoint on boundary
    for (const auto& [key, id] : odd_ids) {
        const auto& fs = ef.at(key);
        if (fs.size() == 2) {
            Vec3 p = 3.0 / 8.0 * (mesh.positions[key.a] + mesh.positions[key.b]);
            for (int f : fs)
                for (int c = 0; c < 3; ++c) {
                    int v = mesh.faces[f][c];
                    if (v != key.a && v != key.b) p += 1.0 / 8.0 * mesh.positions[v];
                }
            out.positions[id] = p;
        } else {
            out.positions[id] = 0.5 * (mesh.positions[key.a] + mesh.positions[key.b]);
        }
    }

    // even positions: Loop mask only where the whole face-star is selected
    auto vf = vertex_faces(mesh);
    auto vadj = vertex_adjacency(mesh);
    for (int i = 0; i < nv; ++i) {
        bool interior = !vf[i].empty();
        for (int f : vf[i])
            if (!sel.selected[f]) {
                interior = false;
                break;
            }
        if (!interior) {
            out.positions[i] = mesh.positions[i];
            continue;
        }
        int n = static_cast<int>(vadj[i].size());
        double beta = detail::loop_even_beta(n);
        Vec3 p = (1.0 - n * beta) * mesh.positions[i];
        for (int j : vadj[i]) p += beta * mesh.positions[j];
        out.positions[i] = p;
    }

    // faces
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Face& t = mesh.faces[f];
        if (sel.selected[f]) {
            int m01 = odd_ids.at(EdgeKey(t[0], t[1]));
            int m12 = odd_ids.at(EdgeKey(t[1], t[2]));
            int m20 = odd_ids.at(EdgeKey(t[2], t[0]));
            out.faces.push_back({t[0], m01, m20});
            out.faces.push_back({m01, t[1], m12});
            out.faces.push_back({m20, m12, t[2]});
            out.faces.push_back({m01, m12, m20});
            for (int c = 0; c < 4; ++c) rec.face_parent.push_back(f);
            continue;
        }
        // unselected: split along any edge that carries an odd vertex
        int split_edge = -1;
        for (int e = 0; e < 3; ++e)
            if (odd_ids.count(EdgeKey(t[e], t[(e + 1) % 3]))) {
                split_edge = e;
                break;
            }
        if (split_edge < 0) {
            out.faces.push_back(t);
            rec.face_parent.push_back(f);
        } else {
            int a = t[split_edge], b = t[(split_edge + 1) % 3], c = t[(split_edge + 2) % 3];
            int v = odd_ids.at(EdgeKey(a, b));
            out.faces.push_back({a, v, c});
            out.faces.push_back({v, b, c});
            rec.face_parent.push_back(f);
            rec.face_parent.push_back(f);
        }
    }
    return {std::move(out), std::move(rec)};
}

// FaceSelection file: 0-based face ids, one per line.
inline void save_selection(const FaceSelection& sel, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("cannot write selection file: " + path);
    for (int f : sel.ids()) out << f << '\n';
}

inline FaceSelection load_selection(const TriMesh& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open selection file: " + path);
    std::vector<int> ids;
    int f;
    while (in >> f) ids.push_back(f);
    return FaceSelection::from_ids(mesh, ids);
}

}  // namespace specreg
