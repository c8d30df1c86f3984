// High-resolution augmentation: alternating subdivision and ARAP fitting,
// in global and localized variants, plus the spectral registration pipeline
// (landmark-initialized functional map -> ZoomOut -> pointwise map -> ARAP).
#pragma once

#include "specreg/arap.hpp"
#include "specreg/fmap.hpp"
#include "specreg/local_subdivision.hpp"

namespace specreg {

class HraError : public std::runtime_error {
public:
    explicit HraError(const std::string& msg) : std::runtime_error(msg) {}
};

struct HraConfig {
    SubdivisionScheme scheme = SubdivisionScheme::Loop;
    int iterations = 3;               // BCS is capped at 2
    double curvature_threshold = 0.03;  // 1/m
    double dilation_radius = -1.0;    // meters; < 0 means 2.5% of target bbox diagonal
    bool localized = false;
    // ARAP / data-term parameters
    double max_distance = 0.05;  // m
    double normal_cos_min = 0.5;
    double data_weight = 1.0;
    double arap_weight = 1.0;
    int arap_max_iters = 50;
    double arap_rel_tol = 1e-6;

    void check() const {
        if (iterations < 1) throw HraError("iterations must be >= 1");
        if (scheme == SubdivisionScheme::Bcs && iterations > 2)
            throw HraError("BCS subdivision supports at most 2 iterations");
        if (curvature_threshold <= 0) throw HraError("curvature threshold must be > 0");
    }

    double resolved_dilation_radius(const TriMesh& target) const {
        return dilation_radius >= 0 ? dilation_radius : 0.025 * target.bbox_diagonal();
    }
};

struct StageLog {
    std::string stage;
    int vertices = 0;
    int faces = 0;
    double mean_dist_m = 0;
    double max_dist_m = 0;
    int arap_iters = 0;
    double energy = 0;
};

struct RegistrationResult {
    TriMesh registered;
    PointMap pointmap;          // template vertex -> target surface
    ScalarField distance;       // per-vertex point-to-triangle distance, meters
    std::vector<StageLog> log;
};

// Per-vertex point-to-triangle distance to the target surface.
inline ScalarField distance_to_target(const TriMesh& mesh, const AabbTree& target_tree) {
    ScalarField d(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i)
        d[i] = target_tree.closest(mesh.positions[i]).distance;
    return d;
}

namespace detail {

inline StageLog make_stage_log(const std::string& stage, const TriMesh& mesh,
                               const ScalarField& dist, int arap_iters, double energy) {
    StageLog s;
    s.stage = stage;
    s.vertices = mesh.vertex_count();
    s.faces = mesh.face_count();
    s.mean_dist_m = dist.size() ? dist.mean() : 0.0;
    s.max_dist_m = dist.size() ? dist.maxCoeff() : 0.0;
    s.arap_iters = arap_iters;
    s.energy = energy;
    return s;
}

// Closest-target-vertex pointmap, used to refresh correspondence after the
// template connectivity has changed.
inline PointMap nearest_vertex_pointmap(const TriMesh& templ, const TriMesh& target,
                                        const AabbTree& target_tree) {
    PointMap pi;
    pi.source = &target;
    pi.target = &templ;
    pi.assignments.resize(templ.vertex_count());
    for (int i = 0; i < templ.vertex_count(); ++i) {
        SurfacePoint sp = target_tree.closest(templ.positions[i]);
        pi.assignments[i] = sp.bary;
    }
    return pi;
}

}  // namespace detail

// Faces of the template covering high-curvature regions of the target:
// threshold |H| on the target, project to template vertices through pi, dilate
// geodesically, convert to faces (all three corners selected) and repair.
inline FaceSelection select_detail_regions(const TriMesh& target, const TriMesh& templ,
                                           const PointMap& pi, const HraConfig& cfg) {
    MeanCurvature H = mean_curvature(target);
    std::vector<char> target_sel(target.vertex_count(), 0);
    for (int i = 0; i < target.vertex_count(); ++i)
        if (std::abs(H.values[i]) > cfg.curvature_threshold) target_sel[i] = 1;

    std::vector<int> seeds;
    for (int i = 0; i < templ.vertex_count(); ++i) {
        int tv = pi.snapped_vertex(i, target);
        if (target_sel[tv]) seeds.push_back(i);
    }
    std::vector<char> vertex_sel(templ.vertex_count(), 0);
    if (!seeds.empty()) {
        double radius = cfg.resolved_dilation_radius(target);
        ScalarField dist = dijkstra_geodesic(templ, seeds);
        for (int i = 0; i < templ.vertex_count(); ++i)
            if (dist[i] <= radius) vertex_sel[i] = 1;
    }
    FaceSelection sel = FaceSelection::none(templ);
    for (int f = 0; f < templ.face_count(); ++f) {
        const Face& t = templ.faces[f];
        if (vertex_sel[t[0]] && vertex_sel[t[1]] && vertex_sel[t[2]]) sel.selected[f] = 1;
    }
    return repair_selection(sel);
}

inline RegistrationResult hra_global(const TriMesh& templ, const TriMesh& target,
                                     const HraConfig& cfg) {
    cfg.check();
    AabbTree target_tree(target);
    TriMesh current = templ;
    RegistrationResult res;
    {
        ScalarField d0 = distance_to_target(current, target_tree);
        res.log.push_back(detail::make_stage_log("initial", current, d0, 0, 0.0));
    }
    for (int it = 0; it < cfg.iterations; ++it) {
        auto [subdiv, rec] = subdivide(current, cfg.scheme);
        current = std::move(subdiv);
        FitConstraints fc =
            closest_point_constraints(current, target, cfg.max_distance, cfg.normal_cos_min);
        fc.data_weight = cfg.data_weight;
        fc.arap_weight = cfg.arap_weight;
        ArapState state = make_arap_state(current);
        arap_fit(state, fc, cfg.arap_max_iters, cfg.arap_rel_tol);
        current = arap_result_mesh(state);
        ScalarField d = distance_to_target(current, target_tree);
        res.log.push_back(detail::make_stage_log("hra_" + std::to_string(it + 1), current, d,
                                                 state.iterations, state.energy));
    }
    res.distance = distance_to_target(current, target_tree);
    res.pointmap = detail::nearest_vertex_pointmap(current, target, target_tree);
    res.registered = std::move(current);
    return res;
}

inline RegistrationResult hra_local(const TriMesh& templ, const TriMesh& target,
                                    const PointMap& pi0, const HraConfig& cfg) {
    cfg.check();
    if (cfg.scheme != SubdivisionScheme::Loop)
        throw HraError("localized HRA supports the loop scheme only");
    AabbTree target_tree(target);
    TriMesh current = templ;
    PointMap pi = pi0;
    RegistrationResult res;
    {
        ScalarField d0 = distance_to_target(current, target_tree);
        res.log.push_back(detail::make_stage_log("initial", current, d0, 0, 0.0));
    }
    for (int it = 0; it < cfg.iterations; ++it) {
        FaceSelection sel = select_detail_regions(target, current, pi, cfg);
        if (sel.count() > 0) {
            auto [subdiv, rec] = local_loop_subdivide(current, sel);
            current = std::move(subdiv);
        }
        FitConstraints fc =
            closest_point_constraints(current, target, cfg.max_distance, cfg.normal_cos_min);
        fc.data_weight = cfg.data_weight;
        fc.arap_weight = cfg.arap_weight;
        ArapState state = make_arap_state(current);
        arap_fit(state, fc, cfg.arap_max_iters, cfg.arap_rel_tol);
        current = arap_result_mesh(state);
        // selection is recomputed each round against the refreshed correspondence
        pi = detail::nearest_vertex_pointmap(current, target, target_tree);
        ScalarField d = distance_to_target(current, target_tree);
        res.log.push_back(detail::make_stage_log("hra_local_" + std::to_string(it + 1),
                                                 current, d, state.iterations, state.energy));
    }
    res.distance = distance_to_target(current, target_tree);
    res.pointmap = std::move(pi);
    res.registered = std::move(current);
    return res;
}

struct ZoomOutParams {
    int k_start_M = 30;  // rectangular start: 50 rows x 30 columns
    int k_start_N = 50;
    int k_end = 100;
    int step = 1;
    double landmark_regularization = 0.0;
};

// Landmark pairs are (template vertex, target vertex).
inline RegistrationResult zosr_register(const TriMesh& templ, const TriMesh& target,
                                        const std::vector<std::pair<int, int>>& landmarks,
                                        const HraConfig& cfg, const ZoomOutParams& zo) {
    if (landmarks.empty()) throw HraError("zosr_register requires at least one landmark pair");
    {
        ScalarField reach = dijkstra_geodesic(target, {0});
        if (!reach.allFinite()) throw HraError("target mesh is disconnected");
    }
    Laplacian lap_t = build_laplacian(templ);
    Laplacian lap_g = build_laplacian(target);
    int k = std::max({zo.k_end, zo.k_start_M, zo.k_start_N});
    Eigenbasis basis_templ = eigenbasis(lap_t, std::min(k, templ.vertex_count()));
    Eigenbasis basis_target = eigenbasis(lap_g, std::min(k, target.vertex_count()));

    // template plays N (the map's domain), target plays M
    std::vector<std::pair<int, int>> lm;  // (vertex on N=template, vertex on M=target)
    for (auto [tv, gv] : landmarks) lm.emplace_back(tv, gv);
    FunctionalMap C0 = fmap_from_landmarks(lm, basis_target, basis_templ, zo.k_start_M,
                                           zo.k_start_N, zo.landmark_regularization);
    ZoomOutResult zres = zoomout(C0, std::min(zo.k_end, basis_target.k),
                                 std::min(zo.k_end, basis_templ.k), zo.step);

    FitConstraints fc;
    fc.data_weight = cfg.data_weight;
    fc.arap_weight = cfg.arap_weight;
    for (int i = 0; i < templ.vertex_count(); ++i)
        fc.anchors.push_back({i, zres.pointmap.point(i, target), 1.0});
    ArapState state = make_arap_state(templ);
    arap_fit(state, fc, cfg.arap_max_iters, cfg.arap_rel_tol);

    AabbTree target_tree(target);
    RegistrationResult res;
    res.registered = arap_result_mesh(state);
    res.pointmap = std::move(zres.pointmap);
    res.distance = distance_to_target(res.registered, target_tree);
    res.log.push_back(detail::make_stage_log("zosr", res.registered, res.distance,
                                             state.iterations, state.energy));
    return res;
}

// Stage log CSV: stage,vertices,faces,mean_dist_m,max_dist_m,arap_iters,energy
inline void save_stage_log(const std::vector<StageLog>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw HraError("cannot write stage log: " + path);
    out << "stage,vertices,faces,mean_dist_m,max_dist_m,arap_iters,energy\n"
        << std::setprecision(12);
    for (const StageLog& s : log)
        out << s.stage << ',' << s.vertices << ',' << s.faces << ',' << s.mean_dist_m << ','
            << s.max_dist_m << ',' << s.arap_iters << ',' << s.energy << '\n';
}

}  // namespace specreg
