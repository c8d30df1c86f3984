// Cotangent stiffness matrix and lumped mass matrix.
//
// Sign convention: W is positive semi-definite, off-diagonal entries
// w_ij = -(cot a_ij + cot b_ij)/2, diagonal = negative sum of the row's
// off-diagonals. The discrete LBO is A^{-1} W.
#pragma once

#include "specreg/mesh.hpp"

#include <Eigen/Sparse>

#include <iostream>

namespace specreg {

struct Laplacian {
    Eigen::SparseMatrix<double> stiffness;  // n x n, PSD
    Eigen::VectorXd mass;                   // diagonal of A, strictly positive
    const TriMesh* mesh = nullptr;
};

struct LaplacianOptions {
    double cot_clamp = 1e8;
    bool warn_on_clamp = true;
};

inline Laplacian build_laplacian(const TriMesh& mesh, const LaplacianOptions& opt = {}) {
    const int n = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.face_count() * 12);
    int clamped = 0;
    for (int f = 0; f < mesh.face_count(); ++f) {
        const Face& t = mesh.faces[f];
        for (int c = 0; c < 3; ++c) {
            // cotangent at corner c weighs the opposite edge (c+1, c+2)
            int i = t[(c + 1) % 3], j = t[(c + 2) % 3];
            const Vec3 u = mesh.positions[i] - mesh.positions[t[c]];
            const Vec3 v = mesh.positions[j] - mesh.positions[t[c]];
            double cross = u.cross(v).norm();
            double cot = cross > 0 ? u.dot(v) / cross : opt.cot_clamp;
            if (std::abs(cot) > opt.cot_clamp) {
                cot = cot > 0 ? opt.cot_clamp : -opt.cot_clamp;
                ++clamped;
            }
            double w = 0.5 * cot;
            trips.emplace_back(i, j, -w);
            trips.emplace_back(j, i, -w);
            trips.emplace_back(i, i, w);
            trips.emplace_back(j, j, w);
        }
    }
    if (clamped > 0 && opt.warn_on_clamp)
        std::cerr << "warning: clamped " << clamped
                  << " near-degenerate cotangent weights to |cot| <= " << opt.cot_clamp
                  << "\n";
    Laplacian lap;
    lap.stiffness.resize(n, n);
    lap.stiffness.setFromTriplets(trips.begin(), trips.end());
    lap.mass = vertex_areas(mesh);
    lap.mesh = &mesh;
    return lap;
}

// Signed mean curvature via the mean-curvature normal: |H| = |A^{-1} W x| / 2,
// sign from agreement with the outward vertex normal. Units 1/meter.
struct MeanCurvature {
    ScalarField values;
    std::vector<bool> boundary;  // H unreliable where true
};

inline MeanCurvature mean_curvature(const TriMesh& mesh) {
    Laplacian lap = build_laplacian(mesh);
    const int n = mesh.vertex_count();
    Eigen::MatrixXd X(n, 3);
    for (int i = 0; i < n; ++i) X.row(i) = mesh.positions[i];
    Eigen::MatrixXd HN = lap.stiffness * X;  // then divide by mass
    auto normals = vertex_normals(mesh);
    MeanCurvature out;
    out.values.resize(n);
    out.boundary = boundary_vertices(mesh);
    for (int i = 0; i < n; ++i) {
        Vec3 hn = HN.row(i).transpose() / lap.mass[i];
        double mag = 0.5 * hn.norm();
        double sgn = hn.dot(normals[i]) >= 0 ? 1.0 : -1.0;
        out.values[i] = sgn * mag;
    }
    return out;
}

}  // namespace specreg
