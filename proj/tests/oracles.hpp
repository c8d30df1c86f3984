// Independent brute-force oracles used by the test suites. These deliberately
// avoid the library's own code paths wherever a check targets them.
#pragma once

#include "specreg/mesh.hpp"

#include <Eigen/Eigenvalues>

#include <set>

namespace oracles {

using specreg::TriMesh;
using specreg::Vec3;

// All-pairs shortest edge-graph paths by Bellman-Ford relaxation, O(V^2 E).
inline Eigen::MatrixXd bellman_ford_all_pairs(const TriMesh& mesh) {
    const int n = mesh.vertex_count();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::tuple<int, int, double>> edges;
    std::set<std::pair<int, int>> seen;
    for (const auto& f : mesh.faces)
        for (int e = 0; e < 3; ++e) {
            int a = f[e], b = f[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            if (seen.insert({a, b}).second)
                edges.emplace_back(a, b, (mesh.positions[a] - mesh.positions[b]).norm());
        }
    Eigen::MatrixXd D = Eigen::MatrixXd::Constant(n, n, inf);
    for (int s = 0; s < n; ++s) {
        D(s, s) = 0;
        for (int pass = 0; pass < n; ++pass) {
            bool changed = false;
            for (auto [a, b, w] : edges) {
                if (D(s, a) + w < D(s, b)) { D(s, b) = D(s, a) + w; changed = true; }
                if (D(s, b) + w < D(s, a)) { D(s, a) = D(s, b) + w; changed = true; }
            }
            if (!changed) break;
        }
    }
    return D;
}

// Dense cotangent stiffness assembled face-by-face from angle cotangents
// computed trigonometrically (independent of the sparse assembly path).
inline Eigen::MatrixXd dense_cotangent_stiffness(const TriMesh& mesh) {
    const int n = mesh.vertex_count();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (const auto& f : mesh.faces) {
        for (int c = 0; c < 3; ++c) {
            int v = f[c], i = f[(c + 1) % 3], j = f[(c + 2) % 3];
            Vec3 u = mesh.positions[i] - mesh.positions[v];
            Vec3 w = mesh.positions[j] - mesh.positions[v];
            double angle = std::acos(
                std::clamp(u.dot(w) / (u.norm() * w.norm()), -1.0, 1.0));
            double cot = 1.0 / std::tan(angle);
            W(i, j) -= 0.5 * cot;
            W(j, i) -= 0.5 * cot;
            W(i, i) += 0.5 * cot;
            W(j, j) += 0.5 * cot;
        }
    }
    return W;
}

// Generalized eigenpairs of W x = lambda A x by a dense symmetric solve on
// A^{-1/2} W A^{-1/2}; returns ascending eigenvalues.
inline Eigen::VectorXd dense_generalized_eigenvalues(const Eigen::MatrixXd& W,
                                                     const Eigen::VectorXd& a) {
    Eigen::VectorXd isqrt = a.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd B = isqrt.asDiagonal() * W * isqrt.asDiagonal();
    B = 0.5 * (B + B.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    return es.eigenvalues();
}

// Fixed point of the selection-repair rule by exhaustive re-scan.
inline std::vector<char> repair_fixed_point(const TriMesh& mesh, std::vector<char> sel) {
    // adjacency by shared undirected edge
    auto ef = specreg::build_edge_faces(mesh);
    std::vector<std::vector<int>> adj(mesh.face_count());
    for (const auto& [e, fs] : ef)
        if (fs.size() == 2) {
            adj[fs[0]].push_back(fs[1]);
            adj[fs[1]].push_back(fs[0]);
        }
    for (;;) {
        bool changed = false;
        for (int f = 0; f < mesh.face_count(); ++f) {
            if (sel[f]) continue;
            int cnt = 0;
            for (int g : adj[f]) cnt += sel[g];
            if (cnt > 1) { sel[f] = 1; changed = true; }
        }
        if (!changed) return sel;
    }
}

}  // namespace oracles
