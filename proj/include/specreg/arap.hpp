// As-rigid-as-possible surface fitting with soft positional anchors.
//
// Local step: per-vertex rotation from the SVD of the cotangent-weighted
// cross-covariance of rest vs current one-ring edges.
// Global step: sparse SPD solve of arap_weight * E_arap + data_weight * anchors.
#pragma once

#include "specreg/closest_point.hpp"
#include "specreg/laplacian.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

namespace specreg {

class ArapError : public std::runtime_error {
public:
    explicit ArapError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Anchor {
    int vertex = -1;
    Vec3 target = Vec3::Zero();
    double weight = 1.0;
};

struct FitConstraints {
    std::vector<Anchor> anchors;
    double data_weight = 1.0;
    double arap_weight = 1.0;
};

// For each template vertex, the closest point on the target surface; pairs are
// rejected beyond max_distance or when normals disagree.
inline FitConstraints closest_point_constraints(const TriMesh& templ, const TriMesh& target,
                                                double max_distance = 0.05,
                                                double normal_cos_min = 0.5) {
    AabbTree tree(target);
    auto tnormals = vertex_normals(templ);
    FitConstraints fc;
    fc.anchors.reserve(templ.vertex_count());
    for (int i = 0; i < templ.vertex_count(); ++i) {
        SurfacePoint sp = tree.closest(templ.positions[i]);
        if (sp.distance > max_distance) continue;
        if (target.face_normal(sp.bary.face).dot(tnormals[i]) < normal_cos_min) continue;
        fc.anchors.push_back({i, sp.position, 1.0});
    }
    return fc;
}

struct ArapState {
    TriMesh rest;                      // connectivity + rest positions
    std::vector<Vec3> positions;       // current positions
    std::vector<Eigen::Matrix3d> rotations;
    int iterations = 0;
    double energy = 0.0;
    std::vector<double> energy_trace;  // one entry per completed iteration
};

inline ArapState make_arap_state(const TriMesh& rest) {
    ArapState s;
    s.rest = rest;
    s.positions = rest.positions;
    s.rotations.assign(rest.vertex_count(), Eigen::Matrix3d::Identity());
    return s;
}

namespace detail {

// Symmetric positive edge weights w_ij = (cot a + cot b)/2, from the stiffness matrix.
struct ArapSystem {
    Eigen::SparseMatrix<double> W;  // positive cotangent Laplacian (stiffness)
    std::vector<std::vector<std::pair<int, double>>> neighbors;  // (j, w_ij)
};

inline ArapSystem build_arap_system(const TriMesh& rest) {
    ArapSystem sys;
    LaplacianOptions lopt;
    lopt.warn_on_clamp = false;
    sys.W = build_laplacian(rest, lopt).stiffness;
    sys.neighbors.resize(rest.vertex_count());
    for (int col = 0; col < sys.W.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.W, col); it; ++it)
            if (it.row() != it.col())
                sys.neighbors[it.row()].emplace_back(static_cast<int>(it.col()), -it.value());
    return sys;
}

inline Eigen::Matrix3d fit_rotation(const Eigen::Matrix3d& covariance) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(covariance,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d R = svd.matrixV() * svd.matrixU().transpose();
    if (R.determinant() < 0) {
        Eigen::Matrix3d V = svd.matrixV();
        V.col(2) = -V.col(2);
        R = V * svd.matrixU().transpose();
    }
    return R;
}

inline double arap_energy(const ArapSystem& sys, const ArapState& s) {
    double e = 0;
    for (int i = 0; i < s.rest.vertex_count(); ++i)
        for (auto [j, w] : sys.neighbors[i]) {
            Vec3 rest_e = s.rest.positions[i] - s.rest.positions[j];
            Vec3 cur_e = s.positions[i] - s.positions[j];
            e += 0.5 * w * (cur_e - s.rotations[i] * rest_e).squaredNorm();
        }
    return 0.5 * e;  // each undirected edge visited twice
}

inline double data_energy(const FitConstraints& fc, const ArapState& s) {
    double e = 0;
    for (const Anchor& a : fc.anchors)
        e += a.weight * (s.positions[a.vertex] - a.target).squaredNorm();
    return e;
}

}  // namespace detail

// Local-global ARAP minimization; mutates and returns the state. The energy
// trace is monotone non-increasing up to solver roundoff.
inline ArapState& arap_fit(ArapState& state, const FitConstraints& fc, int max_iters = 50,
                           double rel_tol = 1e-6) {
    const int n = state.rest.vertex_count();
    for (const Anchor& a : fc.anchors)
        if (a.vertex < 0 || a.vertex >= n)
            throw ArapError("anchor references invalid vertex " + std::to_string(a.vertex));
    double total_anchor_weight = 0;
    for (const Anchor& a : fc.anchors) total_anchor_weight += a.weight;
    if (fc.data_weight <= 0 || total_anchor_weight <= 0)
        throw ArapError(
            "the ARAP system is singular without positional constraints; add anchors or pin "
            "a vertex");

    detail::ArapSystem sys = detail::build_arap_system(state.rest);

    // global-step matrix: arap_weight * W + data_weight * diag(anchor weights)
    Eigen::SparseMatrix<double> Asys = fc.arap_weight * sys.W;
    Eigen::VectorXd anchor_diag = Eigen::VectorXd::Zero(n);
    for (const Anchor& a : fc.anchors) anchor_diag[a.vertex] += fc.data_weight * a.weight;
    for (int i = 0; i < n; ++i)
        if (anchor_diag[i] != 0) Asys.coeffRef(i, i) += anchor_diag[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(Asys);
    if (solver.info() != Eigen::Success)
        throw ArapError("global-step factorization failed (system singular?)");

    double prev_energy = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        // local step: per-vertex rotations
        for (int i = 0; i < n; ++i) {
            Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
            for (auto [j, w] : sys.neighbors[i]) {
                Vec3 rest_e = state.rest.positions[i] - state.rest.positions[j];
                Vec3 cur_e = state.positions[i] - state.positions[j];
                S += w * rest_e * cur_e.transpose();
            }
            state.rotations[i] = detail::fit_rotation(S);
        }
        // global step: one solve per coordinate
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, 3);
        for (int i = 0; i < n; ++i)
            for (auto [j, w] : sys.neighbors[i]) {
                Vec3 rest_e = state.rest.positions[i] - state.rest.positions[j];
                rhs.row(i) += (0.5 * fc.arap_weight * w *
                               ((state.rotations[i] + state.rotations[j]) * rest_e))
                                  .transpose();
            }
        for (const Anchor& a : fc.anchors)
            rhs.row(a.vertex) += fc.data_weight * a.weight * a.target.transpose();
        Eigen::MatrixXd X = solver.solve(rhs);
        for (int i = 0; i < n; ++i) state.positions[i] = X.row(i).transpose();

        double e = fc.arap_weight * detail::arap_energy(sys, state) +
                   fc.data_weight * detail::data_energy(fc, state);
        state.energy = e;
        state.energy_trace.push_back(e);
        ++state.iterations;
        if (prev_energy < std::numeric_limits<double>::infinity() &&
            prev_energy - e < rel_tol * std::max(1e-300, std::abs(prev_energy)))
            break;
        prev_energy = e;
    }
    return state;
}

inline TriMesh arap_result_mesh(const ArapState& state) {
    TriMesh m = state.rest;
    m.positions = state.positions;
    return m;
}

}  // namespace specreg
