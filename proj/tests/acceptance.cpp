// End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
// the process exits nonzero if any criterion fails.
#include "fixtures.hpp"
#include "oracles.hpp"
#include "specreg/eval.hpp"
#include "specreg/hra.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

using namespace specreg;

namespace {

int g_failures = 0;

void run(int id, const std::string& name, const std::function<void()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
        body();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

// Closed UV-sphere triangulation: `stacks` latitude bands, `sectors` meridians.
// Face count is 2 * sectors * (stacks - 1).
TriMesh uv_sphere(int stacks, int sectors) {
    TriMesh m;
    m.positions.push_back(Vec3(0, 0, 1));  // north pole
    for (int i = 1; i < stacks; ++i) {
        double phi = M_PI * i / stacks;
        for (int j = 0; j < sectors; ++j) {
            double theta = 2 * M_PI * j / sectors;
            m.positions.push_back(Vec3(std::sin(phi) * std::cos(theta),
                                       std::sin(phi) * std::sin(theta), std::cos(phi)));
        }
    }
    m.positions.push_back(Vec3(0, 0, -1));  // south pole
    auto ring = [&](int i, int j) { return 1 + (i - 1) * sectors + (j % sectors); };
    for (int j = 0; j < sectors; ++j) m.faces.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < stacks; ++i)
        for (int j = 0; j < sectors; ++j) {
            m.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            m.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    int south = m.vertex_count() - 1;
    for (int j = 0; j < sectors; ++j)
        m.faces.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
    return m;
}

}  // namespace

int main() {
    run(1, "three loop iterations grow 13776 faces to 881664", [] {
        TriMesh m = uv_sphere(83, 84);  // 2*84*82 = 13776 faces
        require(m.face_count() == 13776, "fixture face count");
        validate_mesh(m);
        for (int i = 0; i < 3; ++i) {
            auto [next, rec] = loop_subdivide(m);
            m = std::move(next);
        }
        require(m.face_count() == 881664,
                "got " + std::to_string(m.face_count()) + " faces");
        require(m.face_count() == 13776 * 64, "64x growth");
    });

    run(2, "sphere spectrum l(l+1) with multiplicities 3,5,7 and dense-oracle match", [] {
        TriMesh sphere = fixtures::icosphere(3);
        require(sphere.vertex_count() == 642, "fixture vertex count");
        Laplacian lap = build_laplacian(sphere);
        Eigenbasis basis = eigenbasis(lap, 17);
        require(std::abs(basis.lambda[0]) < 1e-8, "first eigenvalue is zero");
        int idx = 1;
        for (int l = 1; l <= 3; ++l) {
            int mult = 2 * l + 1;
            double mean = 0;
            for (int j = 0; j < mult; ++j) mean += basis.lambda[idx + j] / mult;
            require(std::abs(mean - l * (l + 1)) / (l * (l + 1)) < 0.05,
                    "cluster l=" + std::to_string(l) + " mean " + std::to_string(mean));
            idx += mult;
        }
        Eigen::VectorXd oracle = oracles::dense_generalized_eigenvalues(
            Eigen::MatrixXd(lap.stiffness), lap.mass);
        for (int i = 0; i < 17; ++i)
            require(std::abs(basis.lambda[i] - oracle[i]) < 1e-8, "oracle eigenvalue mismatch");
    });

    run(3, "functional map of the identity is I; its pointmap is the identity", [] {
        for (TriMesh m : {fixtures::icosphere(2), fixtures::bumpy_sphere(2, 0.1, Vec3(1, 0, 0))}) {
            Laplacian lap = build_laplacian(m);
            Eigenbasis basis = eigenbasis(lap, 20);
            FunctionalMap C = fmap_from_pointmap(identity_pointmap(m), basis, basis, 20, 20);
            require((C.C - Eigen::MatrixXd::Identity(20, 20)).cwiseAbs().maxCoeff() < 1e-6,
                    "C != I");
            FunctionalMap I;
            I.C = Eigen::MatrixXd::Identity(20, 20);
            I.basis_M = &basis;
            I.basis_N = &basis;
            PointMap pi = pointmap_from_fmap(I);
            for (int i = 0; i < m.vertex_count(); ++i)
                require(std::get<int>(pi.assignments[i]) == i, "pointmap not identity");
        }
    });

    run(4, "zoomout recovers a rigid isometry from 5 landmarks", [] {
        TriMesh M = fixtures::bumpy_sphere(3, 0.1, Vec3(0.7, 1, 0.25));
        require(M.vertex_count() == 642, "fixture vertex count");
        TriMesh N = fixtures::rigid_transform(M, fixtures::rotation_xyz(0.4, -0.7, 1.1),
                                              Vec3(1, -0.5, 2));
        Eigenbasis basis_M = eigenbasis(build_laplacian(M), 60);
        Eigenbasis basis_N = eigenbasis(build_laplacian(N), 60);
        std::vector<std::pair<int, int>> lm;
        for (int v : {0, 100, 250, 401, 600}) lm.emplace_back(v, v);
        FunctionalMap C0 = fmap_from_landmarks(lm, basis_M, basis_N, 10, 10, 0.0);
        ZoomOutResult z = zoomout(C0, 60, 60, 1);
        int exact = 0;
        for (int i = 0; i < M.vertex_count(); ++i)
            if (std::get<int>(z.pointmap.assignments[i]) == i) ++exact;
        require(exact >= int(0.99 * M.vertex_count()),
                std::to_string(exact) + "/642 exact");
        ScalarField err = geodesic_error(z.pointmap, identity_pointmap(M));
        require(err.mean() <= 0.01, "mean geodesic error " + std::to_string(err.mean()));
    });

    run(5, "ARAP recovers a rigid transform; energy traces are monotone", [] {
        std::vector<TriMesh> fixtures_list = {fixtures::icosphere(2),
                                              fixtures::bumpy_sphere(2, 0.15, Vec3(0.3, 1, 0.2))};
        Eigen::Matrix3d R = fixtures::rotation_xyz(0.5, -0.2, 0.9);
        Vec3 t(0.4, -1.2, 2.0);
        for (const TriMesh& rest : fixtures_list) {
            FitConstraints fc;
            fc.data_weight = 1e4;
            for (int i = 0; i < rest.vertex_count(); ++i)
                fc.anchors.push_back({i, R * rest.positions[i] + t, 1.0});
            ArapState s = make_arap_state(rest);
            arap_fit(s, fc, 100, 1e-14);
            double rms = 0;
            for (int i = 0; i < rest.vertex_count(); ++i)
                rms += (s.positions[i] - (R * rest.positions[i] + t)).squaredNorm();
            rms = std::sqrt(rms / rest.vertex_count());
            require(rms < 1e-6, "rigid RMS " + std::to_string(rms));
            for (size_t i = 1; i < s.energy_trace.size(); ++i)
                require(s.energy_trace[i] <= s.energy_trace[i - 1] + 1e-10,
                        "energy trace not monotone");
        }
    });

    run(6, "global HRA halves the mean distance on the bumpy sphere", [] {
        TriMesh templ = fixtures::icosphere(2);  // 162 vertices
        TriMesh target = fixtures::bumpy_sphere(5, 0.05, Vec3(0.6, 1, 0.3));  // 10242 vertices
        HraConfig cfg;
        cfg.iterations = 3;
        cfg.max_distance = 0.3;
        cfg.normal_cos_min = 0.0;
        RegistrationResult res = hra_global(templ, target, cfg);
        double before = res.log.front().mean_dist_m;
        double after = res.log.back().mean_dist_m;
        require(after <= 0.5 * before,
                "mean distance " + std::to_string(before) + " -> " + std::to_string(after));
        for (size_t i = 1; i < res.log.size(); ++i)
            require(res.log[i].mean_dist_m <= res.log[i - 1].mean_dist_m + 1e-12,
                    "per-stage mean distance not monotone");
    });

    run(7, "localized HRA uses fewer vertices and fits the detail region", [] {
        TriMesh templ = fixtures::icosphere(2);
        TriMesh target = fixtures::octant_bumpy_sphere(5, 0.05);
        HraConfig cfg;
        cfg.iterations = 3;
        cfg.max_distance = 0.3;
        cfg.normal_cos_min = 0.0;
        // the smooth unit sphere has |H| = 1; only the octant bumps exceed this
        cfg.curvature_threshold = 2.0;
        // reach past one coarse-template edge so the dilated region is contiguous
        cfg.dilation_radius = 0.35;
        AabbTree tree(target);
        PointMap pi = detail::nearest_vertex_pointmap(templ, target, tree);
        RegistrationResult local = hra_local(templ, target, pi, cfg);
        RegistrationResult global = hra_global(templ, target, cfg);
        require(local.registered.vertex_count() < global.registered.vertex_count(),
                "local " + std::to_string(local.registered.vertex_count()) + " vs global " +
                    std::to_string(global.registered.vertex_count()));
        // mean distance restricted to the bump octant (x, y, z > 0)
        auto region_mean = [](const RegistrationResult& r) {
            double sum = 0;
            int n = 0;
            for (int i = 0; i < r.registered.vertex_count(); ++i) {
                const Vec3& p = r.registered.positions[i];
                if (p.x() > 0 && p.y() > 0 && p.z() > 0) {
                    sum += r.distance[i];
                    ++n;
                }
            }
            return sum / std::max(n, 1);
        };
        double lm = region_mean(local), gm = region_mean(global);
        require(lm <= 2.0 * gm, "region mean local " + std::to_string(lm) + " vs global " +
                                    std::to_string(gm));
    });

    run(8, "100 randomized local subdivisions stay valid; repair matches its oracle", [] {
        std::mt19937 rng(71);
        for (int trial = 0; trial < 100; ++trial) {
            TriMesh m = fixtures::random_blob(rng, 2);  // 320 faces
            std::bernoulli_distribution pick(0.15);
            FaceSelection sel = FaceSelection::none(m);
            for (int f = 0; f < m.face_count(); ++f) sel.selected[f] = pick(rng);
            FaceSelection rep = repair_selection(sel);
            auto [out, rec] = local_loop_subdivide(m, rep);
            validate_mesh(out);
            require(euler_characteristic(out) == euler_characteristic(m), "chi changed");
        }
        for (int trial = 0; trial < 100; ++trial) {
            TriMesh m = fixtures::random_blob(rng, 1);  // 80 faces
            std::bernoulli_distribution pick(0.25);
            FaceSelection sel = FaceSelection::none(m);
            for (int f = 0; f < m.face_count(); ++f) sel.selected[f] = pick(rng);
            require(repair_selection(sel).selected ==
                        oracles::repair_fixed_point(m, sel.selected),
                    "repair oracle mismatch");
        }
    });

    run(9, "mean curvature: unit sphere 1, plane interior 0, radius-2 sphere 0.5", [] {
        MeanCurvature unit = mean_curvature(fixtures::icosphere(3));
        for (int i = 0; i < unit.values.size(); ++i)
            require(std::abs(std::abs(unit.values[i]) - 1.0) < 0.05, "unit sphere |H|");
        TriMesh plane = fixtures::grid(12);
        MeanCurvature flat = mean_curvature(plane);
        for (int i = 0; i < flat.values.size(); ++i)
            if (!flat.boundary[i])
                require(std::abs(flat.values[i]) < 1e-9, "plane interior |H|");
        MeanCurvature big = mean_curvature(fixtures::icosphere(3, 2.0));
        for (int i = 0; i < big.values.size(); ++i)
            require(std::abs(std::abs(big.values[i]) - 0.5) < 0.025, "radius-2 sphere |H|");
    });

    run(10, "geodesic error matches the shortest-path oracle; error_curve is a CDF", [] {
        std::mt19937 rng(83);
        for (int trial = 0; trial < 5; ++trial) {
            TriMesh m = fixtures::random_blob(rng, 1);  // 42 vertices
            require(m.vertex_count() <= 50, "fixture size");
            auto dist = oracles::bellman_ford_all_pairs(m);
            double norm = std::sqrt(m.total_area());
            std::uniform_int_distribution<int> pick(0, m.vertex_count() - 1);
            PointMap pred, truth;
            pred.source = truth.source = &m;
            pred.target = truth.target = &m;
            std::vector<int> tv(m.vertex_count()), pv(m.vertex_count());
            for (int i = 0; i < m.vertex_count(); ++i) {
                tv[i] = pick(rng);
                pv[i] = pick(rng);
                truth.assignments.emplace_back(tv[i]);
                pred.assignments.emplace_back(pv[i]);
            }
            ScalarField err = geodesic_error(pred, truth);
            for (int i = 0; i < m.vertex_count(); ++i)
                require(std::abs(err[i] - dist(tv[i], pv[i]) / norm) < 1e-10,
                        "oracle mismatch");
            std::vector<double> th;
            for (int k = 0; k <= 20; ++k) th.push_back(0.05 * k);
            ErrorCurve c = error_curve(err, th);
            for (size_t i = 0; i < c.fractions.size(); ++i) {
                require(c.fractions[i] >= 0 && c.fractions[i] <= 1, "fraction out of range");
                if (i) require(c.fractions[i] >= c.fractions[i - 1], "CDF not monotone");
            }
        }
    });

    if (g_failures) {
        std::printf("%d criteria FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
