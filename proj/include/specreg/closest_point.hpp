// Exact point-to-triangle closest point queries over a mesh, accelerated by a
// median-split AABB tree.
#pragma once

#include "specreg/mesh.hpp"

#include <algorithm>
#include <numeric>

namespace specreg {

// Closest point on triangle (a,b,c) to p, with barycentric weights.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c, std::array<double, 3>* bary = nullptr) {
    // Ericson, Real-Time Collision Detection, 5.1.5
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    auto set_bary = [&](double u, double v, double w) {
        if (bary) *bary = {u, v, w};
    };
    if (d1 <= 0 && d2 <= 0) {
        set_bary(1, 0, 0);
        return a;
    }
    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0 && d4 <= d3) {
        set_bary(0, 1, 0);
        return b;
    }
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) {
        double v = d1 / (d1 - d3);
        set_bary(1 - v, v, 0);
        return a + v * ab;
    }
    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0 && d5 <= d6) {
        set_bary(0, 0, 1);
        return c;
    }
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) {
        double w = d2 / (d2 - d6);
        set_bary(1 - w, 0, w);
        return a + w * ac;
    }
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        set_bary(0, 1 - w, w);
        return b + w * (c - b);
    }
    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    set_bary(1 - v - w, v, w);
    return a + ab * v + ac * w;
}

struct SurfacePoint {
    BarycentricPoint bary;
    Vec3 position;
    double distance = 0;
};

class AabbTree {
public:
    explicit AabbTree(const TriMesh& mesh) : mesh_(&mesh) {
        const int nf = mesh.face_count();
        boxes_lo_.resize(nf);
        boxes_hi_.resize(nf);
        order_.resize(nf);
        std::iota(order_.begin(), order_.end(), 0);
        for (int f = 0; f < nf; ++f) {
            const Face& t = mesh.faces[f];
            Vec3 lo = mesh.positions[t[0]].cwiseMin(mesh.positions[t[1]]).cwiseMin(
                mesh.positions[t[2]]);
            Vec3 hi = mesh.positions[t[0]].cwiseMax(mesh.positions[t[1]]).cwiseMax(
                mesh.positions[t[2]]);
            boxes_lo_[f] = lo;
            boxes_hi_[f] = hi;
        }
        nodes_.reserve(2 * nf);
        if (nf > 0) build(0, nf);
    }

    SurfacePoint closest(const Vec3& p) const {
        SurfacePoint best;
        best.distance = std::numeric_limits<double>::infinity();
        if (!nodes_.empty()) query(0, p, best);
        return best;
    }

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1, right = -1;  // children, or
        int begin = 0, end = 0;     // leaf face range in order_
    };

    int build(int begin, int end) {
        Node node;
        node.lo = Vec3::Constant(std::numeric_limits<double>::infinity());
        node.hi = -node.lo;
        for (int i = begin; i < end; ++i) {
            node.lo = node.lo.cwiseMin(boxes_lo_[order_[i]]);
            node.hi = node.hi.cwiseMax(boxes_hi_[order_[i]]);
        }
        int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (end - begin <= 4) {
            nodes_[idx].begin = begin;
            nodes_[idx].end = end;
            return idx;
        }
        Vec3 extent = node.hi - node.lo;
        int axis = 0;
        if (extent[1] > extent[axis]) axis = 1;
        if (extent[2] > extent[axis]) axis = 2;
        int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int fa, int fb) {
                             double ca = boxes_lo_[fa][axis] + boxes_hi_[fa][axis];
                             double cb = boxes_lo_[fb][axis] + boxes_hi_[fb][axis];
                             return ca < cb || (ca == cb && fa < fb);
                         });
        int l = build(begin, mid);
        int r = build(mid, end);
        nodes_[idx].left = l;
        nodes_[idx].right = r;
        return idx;
    }

    static double box_distance_sq(const Vec3& p, const Vec3& lo, const Vec3& hi) {
        double d = 0;
        for (int c = 0; c < 3; ++c) {
            double v = std::max({lo[c] - p[c], 0.0, p[c] - hi[c]});
            d += v * v;
        }
        return d;
    }

    void query(int node_idx, const Vec3& p, SurfacePoint& best) const {
        const Node& node = nodes_[node_idx];
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                int f = order_[i];
                const Face& t = mesh_->faces[f];
                std::array<double, 3> bary;
                Vec3 q = closest_point_on_triangle(p, mesh_->positions[t[0]],
                                                   mesh_->positions[t[1]],
                                                   mesh_->positions[t[2]], &bary);
                double d = (q - p).norm();
                // deterministic tie rule: strictly better, or equal with smaller face id
                if (d < best.distance ||
                    (d == best.distance && f < best.bary.face)) {
                    best.distance = d;
                    best.position = q;
                    best.bary.face = f;
                    best.bary.weights = bary;
                }
            }
            return;
        }
        double dl = box_distance_sq(p, nodes_[node.left].lo, nodes_[node.left].hi);
        double dr = box_distance_sq(p, nodes_[node.right].lo, nodes_[node.right].hi);
        int first = node.left, second = node.right;
        double dfirst = dl, dsecond = dr;
        if (dr < dl) {
            std::swap(first, second);
            std::swap(dfirst, dsecond);
        }
        if (dfirst <= best.distance * best.distance) query(first, p, best);
        if (dsecond <= best.distance * best.distance) query(second, p, best);
    }

    const TriMesh* mesh_;
    std::vector<Vec3> boxes_lo_, boxes_hi_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

// Nearest vertex by Euclidean distance; ties to the smallest index.
inline int nearest_vertex(const TriMesh& mesh, const Vec3& p) {
    int best = 0;
    double best_d = (mesh.positions[0] - p).squaredNorm();
    for (int i = 1; i < mesh.vertex_count(); ++i) {
        double d = (mesh.positions[i] - p).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace specreg
