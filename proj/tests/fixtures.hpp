// Shared mesh fixtures for the test suites.
#pragma once

#include "specreg/mesh.hpp"
#include "specreg/subdivision.hpp"

#include <random>

namespace fixtures {

using specreg::Face;
using specreg::TriMesh;
using specreg::Vec3;

// Regular tetrahedron with unit edge length, outward orientation.
inline TriMesh tetrahedron() {
    TriMesh m;
    double s = 1.0 / std::sqrt(2.0);
    m.positions = {Vec3(1, 0, -s), Vec3(-1, 0, -s), Vec3(0, 1, s), Vec3(0, -1, s)};
    for (Vec3& p : m.positions) p *= 0.5;  // edge length 1
    m.faces = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
    return m;
}

// Unit icosahedron (vertices on the unit sphere).
inline TriMesh icosahedron() {
    TriMesh m;
    double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& p : v) p.normalize();
    m.positions = v;
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return m;
}

// Icosphere: midpoint-subdivided icosahedron projected to radius r.
inline TriMesh icosphere(int subdivisions, double radius = 1.0) {
    TriMesh m = icosahedron();
    for (int s = 0; s < subdivisions; ++s) {
        auto [next, rec] = specreg::upsample_subdivide(m);
        m = std::move(next);
        for (Vec3& p : m.positions) p.normalize();
    }
    for (Vec3& p : m.positions) p *= radius;
    return m;
}

// Flat square grid in the z=0 plane, (n+1)^2 vertices over [0,1]^2.
inline TriMesh grid(int n) {
    TriMesh m;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            m.positions.emplace_back(double(i) / n, double(j) / n, 0.0);
    auto id = [&](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return m;
}

// Open strip of collinear-ish vertices for path-distance tests: 3 vertices at
// x = 0,1,2 plus offset apex vertices forming valid triangles.
inline TriMesh path3() {
    TriMesh m;
    m.positions = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(0.5, 1, 0),
                   Vec3(1.5, 1, 0)};
    m.faces = {{0, 1, 3}, {1, 4, 3}, {1, 2, 4}};
    return m;
}

// Icosphere with a localized radial bump to break spherical symmetry.
inline TriMesh bumpy_sphere(int subdivisions, double bump_height, const Vec3& bump_dir,
                            double bump_width = 0.5) {
    TriMesh m = icosphere(subdivisions);
    Vec3 dir = bump_dir.normalized();
    for (Vec3& p : m.positions) {
        double c = p.normalized().dot(dir);
        double t = (c - (1.0 - bump_width)) / bump_width;
        if (t > 0) p *= 1.0 + bump_height * t * t;
    }
    return m;
}

// Sphere with smooth radial noise over one octant (x,y,z > 0).
inline TriMesh octant_bumpy_sphere(int subdivisions, double amplitude) {
    TriMesh m = icosphere(subdivisions);
    for (Vec3& p : m.positions) {
        Vec3 n = p.normalized();
        double gate = 1.0;
        for (int c = 0; c < 3; ++c) gate *= std::clamp(n[c] / 0.15, 0.0, 1.0);
        if (gate > 0) {
            double wav = std::sin(14.0 * n.x()) * std::sin(14.0 * n.y()) *
                         std::sin(14.0 * n.z());
            p *= 1.0 + amplitude * gate * wav;
        }
    }
    return m;
}

inline specreg::TriMesh rigid_transform(const TriMesh& m, const Eigen::Matrix3d& R,
                                        const Vec3& t) {
    TriMesh out = m;
    for (Vec3& p : out.positions) p = R * p + t;
    return out;
}

inline Eigen::Matrix3d rotation_xyz(double ax, double ay, double az) {
    return (Eigen::AngleAxisd(az, Vec3::UnitZ()) * Eigen::AngleAxisd(ay, Vec3::UnitY()) *
            Eigen::AngleAxisd(ax, Vec3::UnitX()))
        .toRotationMatrix();
}

// Random closed genus-0 mesh: icosphere with bounded random radial perturbation.
inline TriMesh random_blob(std::mt19937& rng, int subdivisions = 2, double amplitude = 0.25) {
    TriMesh m = icosphere(subdivisions);
    std::uniform_real_distribution<double> amp(-amplitude, amplitude);
    // smooth low-order perturbation so the mesh stays valid
    Eigen::Vector3d a(amp(rng), amp(rng), amp(rng)), b(amp(rng), amp(rng), amp(rng));
    for (Vec3& p : m.positions) {
        Vec3 n = p.normalized();
        double r = 1.0 + a.dot(n) * 0.5 + b.dot(Vec3(n.x() * n.y(), n.y() * n.z(),
                                                     n.z() * n.x()));
        p = n * std::max(0.4, r);
    }
    return m;
}

}  // namespace fixtures
