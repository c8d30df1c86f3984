// Functional maps between truncated eigenbases, pointwise conversions and
// the ZoomOut refinement loop.
#pragma once

#include "specreg/eigenbasis.hpp"

#include <iomanip>
#include <variant>

namespace specreg {

class FmapError : public std::runtime_error {
public:
    explicit FmapError(const std::string& msg) : std::runtime_error(msg) {}
};

// Per-vertex assignment into the source mesh M: vertex index or barycentric point.
struct PointMap {
    using Assignment = std::variant<int, BarycentricPoint>;
    std::vector<Assignment> assignments;  // one per vertex of N
    const TriMesh* source = nullptr;      // M, the mesh being indexed
    const TriMesh* target = nullptr;      // N, the domain of the map

    int size() const { return static_cast<int>(assignments.size()); }

    // Heaviest-weight vertex of the assignment.
    int snapped_vertex(int i, const TriMesh& m) const {
        if (const int* v = std::get_if<int>(&assignments[i])) return *v;
        const BarycentricPoint& bp = std::get<BarycentricPoint>(assignments[i]);
        int best = 0;
        for (int c = 1; c < 3; ++c)
            if (bp.weights[c] > bp.weights[best]) best = c;
        return m.faces[bp.face][best];
    }

    Vec3 point(int i, const TriMesh& m) const {
        if (const int* v = std::get_if<int>(&assignments[i])) return m.positions[*v];
        return m.point_at(std::get<BarycentricPoint>(assignments[i]));
    }
};

inline PointMap identity_pointmap(const TriMesh& mesh) {
    PointMap pi;
    pi.source = &mesh;
    pi.target = &mesh;
    pi.assignments.resize(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) pi.assignments[i] = i;
    return pi;
}

// C in R^{kN x kM}, mapping coefficients in basis_M to coefficients in basis_N.
struct FunctionalMap {
    Eigen::MatrixXd C;
    const Eigenbasis* basis_M = nullptr;
    const Eigenbasis* basis_N = nullptr;

    int kM() const { return static_cast<int>(C.cols()); }
    int kN() const { return static_cast<int>(C.rows()); }
};

// Rows of phi_M sampled through pi (vertex lookup or barycentric interpolation),
// truncated to kM columns. This is Pi * Phi_M.
inline Eigen::MatrixXd pullback_basis(const PointMap& pi, const Eigenbasis& basis_M, int kM) {
    Eigen::MatrixXd P(pi.size(), kM);
    for (int i = 0; i < pi.size(); ++i) {
        if (const int* v = std::get_if<int>(&pi.assignments[i])) {
            P.row(i) = basis_M.phi.row(*v).head(kM);
        } else {
            const BarycentricPoint& bp = std::get<BarycentricPoint>(pi.assignments[i]);
            const Face& f = pi.source->faces[bp.face];
            P.row(i) = bp.weights[0] * basis_M.phi.row(f[0]).head(kM) +
                       bp.weights[1] * basis_M.phi.row(f[1]).head(kM) +
                       bp.weights[2] * basis_M.phi.row(f[2]).head(kM);
        }
    }
    return P;
}

// C = Phi_N^T A_N Pi Phi_M.
inline FunctionalMap fmap_from_pointmap(const PointMap& pi, const Eigenbasis& basis_M,
                                        const Eigenbasis& basis_N, int kM, int kN) {
    if (kM > basis_M.k || kN > basis_N.k)
        throw FmapError("fmap_from_pointmap: truncation exceeds available basis (kM=" +
                        std::to_string(kM) + ", kN=" + std::to_string(kN) + ")");
    if (pi.size() != basis_N.n())
        throw FmapError("fmap_from_pointmap: map length does not match target basis");
    Eigen::MatrixXd P = pullback_basis(pi, basis_M, kM);
    FunctionalMap fm;
    fm.C = basis_N.phi.leftCols(kN).transpose() *
           (basis_N.mass.asDiagonal() * P);
    fm.basis_M = &basis_M;
    fm.basis_N = &basis_N;
    return fm;
}

// For each vertex of N, the M-vertex whose mapped spectral embedding C*phi_M(j)
// is nearest to phi_N(i); ties broken by smallest index. Exact search via a
// blocked distance computation.
inline PointMap pointmap_from_fmap(const FunctionalMap& fm) {
    const Eigenbasis& bM = *fm.basis_M;
    const Eigenbasis& bN = *fm.basis_N;
    const int kM = fm.kM(), kN = fm.kN();
    const int nM = bM.n(), nN = bN.n();
    // embedded M points: rows of Phi_M(:,1:kM) * C^T
    Eigen::MatrixXd EM = bM.phi.leftCols(kM) * fm.C.transpose();  // nM x kN
    Eigen::MatrixXd EN = bN.phi.leftCols(kN);                     // nN x kN
    Eigen::VectorXd m_sq = EM.rowwise().squaredNorm();

    PointMap pi;
    pi.source = bM.mesh;
    pi.target = bN.mesh;
    pi.assignments.resize(nN);
    const int block = 512;
    for (int start = 0; start < nN; start += block) {
        int len = std::min(block, nN - start);
        // d(i,j) = |n_i|^2 - 2 n_i . m_j + |m_j|^2 ; |n_i|^2 constant per row
        Eigen::MatrixXd G = EN.middleRows(start, len) * EM.transpose();  // len x nM
        for (int r = 0; r < len; ++r) {
            int best = 0;
            double best_d = m_sq[0] - 2.0 * G(r, 0);
            for (int j = 1; j < nM; ++j) {
                double d = m_sq[j] - 2.0 * G(r, j);
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            pi.assignments[start + r] = best;
        }
    }
    return pi;
}

struct ZoomOutResult {
    FunctionalMap fmap;
    PointMap pointmap;
};

// Alternate pointwise/functional conversions while growing both truncations by
// `step` per iteration (clamped at the end sizes) until (k_end_N, k_end_M).
inline ZoomOutResult zoomout(const FunctionalMap& C0, int k_end_M, int k_end_N, int step = 1) {
    if (step < 1) throw FmapError("zoomout: step must be >= 1");
    const Eigenbasis& bM = *C0.basis_M;
    const Eigenbasis& bN = *C0.basis_N;
    if (k_end_M > bM.k || k_end_N > bN.k)
        throw FmapError("zoomout: basis too small for requested k_end");
    if (C0.kM() > k_end_M || C0.kN() > k_end_N)
        throw FmapError("zoomout: initial map larger than k_end");
    FunctionalMap C = C0;
    int kM = C.kM(), kN = C.kN();
    while (kM < k_end_M || kN < k_end_N) {
        PointMap pi = pointmap_from_fmap(C);
        kM = std::min(kM + step, k_end_M);
        kN = std::min(kN + step, k_end_N);
        C = fmap_from_pointmap(pi, bM, bN, kM, kN);
    }
    ZoomOutResult out;
    out.pointmap = pointmap_from_fmap(C);
    out.fmap = std::move(C);
    return out;
}

// Least-squares initial map from landmark pairs (n_vertex, m_vertex):
// minimize sum_l |C gM(l) - gN(l)|^2 + reg * |C o mask|_F^2, where g are the
// truncated spectral embedding columns of the landmark vertices and the mask
// penalizes entries coupling well-separated eigenvalues.
inline FunctionalMap fmap_from_landmarks(
    const std::vector<std::pair<int, int>>& landmarks,  // (vertex on N, vertex on M)
    const Eigenbasis& basis_M, const Eigenbasis& basis_N, int kM, int kN,
    double regularization = 0.0) {
    if (landmarks.empty()) throw FmapError("fmap_from_landmarks: empty landmark list");
    if (kM > basis_M.k || kN > basis_N.k)
        throw FmapError("fmap_from_landmarks: truncation exceeds available basis");
    const int L = static_cast<int>(landmarks.size());
    Eigen::MatrixXd G(kM, L), H(kN, L);
    for (int l = 0; l < L; ++l) {
        auto [vn, vm] = landmarks[l];
        if (vn < 0 || vn >= basis_N.n() || vm < 0 || vm >= basis_M.n())
            throw FmapError("fmap_from_landmarks: landmark vertex out of range");
        G.col(l) = basis_M.phi.row(vm).head(kM).transpose();
        H.col(l) = basis_N.phi.row(vn).head(kN).transpose();
    }
    Eigen::MatrixXd GGt = G * G.transpose();  // kM x kM
    Eigen::MatrixXd HGt = H * G.transpose();  // kN x kM

    FunctionalMap fm;
    fm.basis_M = &basis_M;
    fm.basis_N = &basis_N;
    fm.C.resize(kN, kM);
    if (regularization <= 0.0) {
        // may be rank-deficient for few landmarks; use a least-squares solve per row
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(GGt);
        fm.C = (cod.solve(HGt.transpose())).transpose();
    } else {
        double lmax = std::max(basis_M.lambda[kM - 1], basis_N.lambda[kN - 1]);
        if (lmax <= 0) lmax = 1.0;
        for (int r = 0; r < kN; ++r) {
            Eigen::VectorXd maskr(kM);
            for (int c = 0; c < kM; ++c) {
                double d = (basis_N.lambda[r] - basis_M.lambda[c]) / lmax;
                maskr[c] = d * d;
            }
            Eigen::MatrixXd Ar = GGt + regularization * maskr.cwiseAbs2().asDiagonal().toDenseMatrix();
            fm.C.row(r) = Ar.ldlt().solve(HGt.row(r).transpose()).transpose();
        }
    }
    return fm;
}

// --- text serialization -----------------------------------------------------

// PointMap file: one line per N-vertex, `v j` or `b f w0 w1 w2` (0-based).
inline void save_pointmap(const PointMap& pi, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FmapError("cannot write pointmap file: " + path);
    out << std::setprecision(17);
    for (int i = 0; i < pi.size(); ++i) {
        if (const int* v = std::get_if<int>(&pi.assignments[i])) {
            out << "v " << *v << '\n';
        } else {
            const BarycentricPoint& bp = std::get<BarycentricPoint>(pi.assignments[i]);
            out << "b " << bp.face << ' ' << bp.weights[0] << ' ' << bp.weights[1] << ' '
                << bp.weights[2] << '\n';
        }
    }
}

inline PointMap load_pointmap(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FmapError("cannot open pointmap file: " + path);
    PointMap pi;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        char tag;
        ls >> tag;
        if (tag == 'v') {
            int v;
            if (!(ls >> v)) throw FmapError("bad pointmap line " + std::to_string(lineno));
            pi.assignments.emplace_back(v);
        } else if (tag == 'b') {
            BarycentricPoint bp;
            if (!(ls >> bp.face >> bp.weights[0] >> bp.weights[1] >> bp.weights[2]))
                throw FmapError("bad pointmap line " + std::to_string(lineno));
            pi.assignments.emplace_back(bp);
        } else {
            throw FmapError("bad pointmap tag at line " + std::to_string(lineno));
        }
    }
    return pi;
}

// FunctionalMap file: header `kN kM`, then row-major values.
inline void save_fmap(const FunctionalMap& fm, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FmapError("cannot write fmap file: " + path);
    out << fm.kN() << ' ' << fm.kM() << '\n' << std::setprecision(17);
    for (int r = 0; r < fm.kN(); ++r) {
        for (int c = 0; c < fm.kM(); ++c) out << fm.C(r, c) << (c + 1 < fm.kM() ? ' ' : '\n');
    }
}

inline Eigen::MatrixXd load_fmap_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FmapError("cannot open fmap file: " + path);
    int kN, kM;
    if (!(in >> kN >> kM)) throw FmapError("bad fmap header in: " + path);
    Eigen::MatrixXd C(kN, kM);
    for (int r = 0; r < kN; ++r)
        for (int c = 0; c < kM; ++c)
            if (!(in >> C(r, c))) throw FmapError("truncated fmap file: " + path);
    return C;
}

}  // namespace specreg
