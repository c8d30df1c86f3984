// Truncated generalized eigenbasis of the cotangent Laplacian: W phi = lambda A phi.
//
// Dense solve below a size threshold, shift-invert Lanczos with sparse LDLT above.
// Eigenvectors are A-orthonormal, eigenvalues ascending, and a deterministic sign
// convention is applied (first entry with |value| > 1e-8 made positive).
#pragma once

#include "specreg/laplacian.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <fstream>

namespace specreg {

class SpectralError : public std::runtime_error {
public:
    explicit SpectralError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Eigenbasis {
    Eigen::MatrixXd phi;     // n x k, columns A-orthonormal
    Eigen::VectorXd lambda;  // k, ascending, lambda[0] ~ 0 on closed meshes
    Eigen::VectorXd mass;    // diagonal of A
    const TriMesh* mesh = nullptr;
    int k = 0;

    int n() const { return static_cast<int>(phi.rows()); }
};

namespace detail {

inline void fix_eigenvector_signs(Eigen::MatrixXd& phi) {
    for (int c = 0; c < phi.cols(); ++c) {
        for (int r = 0; r < phi.rows(); ++r) {
            if (std::abs(phi(r, c)) > 1e-8) {
                if (phi(r, c) < 0) phi.col(c) = -phi.col(c);
                break;
            }
        }
    }
}

// Dense path: symmetric reduction B = A^{-1/2} W A^{-1/2}.
inline Eigenbasis eigenbasis_dense(const Laplacian& lap, int k) {
    const int n = static_cast<int>(lap.mass.size());
    Eigen::VectorXd isqrt = lap.mass.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd B = isqrt.asDiagonal() * Eigen::MatrixXd(lap.stiffness) *
                        isqrt.asDiagonal();
    B = 0.5 * (B + B.transpose());  // symmetrize roundoff
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success)
        throw SpectralError("dense eigensolve failed to converge");
    Eigenbasis basis;
    basis.lambda = es.eigenvalues().head(k);
    basis.phi = isqrt.asDiagonal() * es.eigenvectors().leftCols(k);
    basis.mass = lap.mass;
    basis.mesh = lap.mesh;
    basis.k = k;
    detail::fix_eigenvector_signs(basis.phi);
    return basis;
}

// Shift-invert subspace iteration for the k smallest pairs of W phi = lambda A phi.
// Iterates a block through K = (W - sigma A)^{-1} A with Rayleigh-Ritz
// extraction on the original pencil. The block formulation resolves repeated
// eigenvalues (spheres and other symmetric shapes have large multiplicities)
// that a single Krylov vector cannot separate.
inline Eigenbasis eigenbasis_lanczos(const Laplacian& lap, int k) {
    const int n = static_cast<int>(lap.mass.size());
    const Eigen::VectorXd& a = lap.mass;
    double sigma = -1e-8 * lap.stiffness.coeffs().abs().maxCoeff();

    Eigen::SparseMatrix<double> shifted = lap.stiffness;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma * a[i];
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw SpectralError("sparse factorization of shifted stiffness failed");

    const int b = std::min(n, k + std::max(8, k / 4));  // guard vectors past k

    // deterministic start block
    Eigen::MatrixXd Q(n, b);
    for (int j = 0; j < b; ++j)
        for (int i = 0; i < n; ++i) Q(i, j) = std::sin(0.5 + (i + 1) * (j + 1) * 0.37);

    // A-orthonormalize the columns of Q (modified Gram-Schmidt, two passes)
    auto orthonormalize = [&](Eigen::MatrixXd& M) {
        for (int c = 0; c < M.cols(); ++c) {
            for (int pass = 0; pass < 2; ++pass)
                for (int p = 0; p < c; ++p)
                    M.col(c) -= M.col(p).dot(a.cwiseProduct(M.col(c))) * M.col(p);
            double nrm = std::sqrt(M.col(c).dot(a.cwiseProduct(M.col(c))));
            if (nrm < 1e-300)
                throw SpectralError("subspace iteration lost rank");
            M.col(c) /= nrm;
        }
    };
    orthonormalize(Q);

    Eigen::VectorXd ritz_prev = Eigen::VectorXd::Constant(k, 1e300);
    Eigen::VectorXd ritz(b);
    const int max_iters = 300;
    bool converged = false;
    for (int it = 0; it < max_iters && !converged; ++it) {
        // power step through the shift-inverted operator
        Eigen::MatrixXd Z(n, b);
        for (int c = 0; c < b; ++c) Z.col(c) = ldlt.solve(a.cwiseProduct(Q.col(c)));
        orthonormalize(Z);
        // Rayleigh-Ritz on the original pencil restricted to span(Z)
        Eigen::MatrixXd H = Z.transpose() * (lap.stiffness * Z);
        H = 0.5 * (H + H.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        if (es.info() != Eigen::Success)
            throw SpectralError("projected eigensolve failed");
        Q = Z * es.eigenvectors();
        ritz = es.eigenvalues();
        converged = true;
        for (int i = 0; i < k; ++i) {
            double scale = std::max(1.0, std::abs(ritz[i]));
            if (std::abs(ritz[i] - ritz_prev[i]) > 1e-11 * scale) converged = false;
        }
        ritz_prev = ritz.head(k);
    }
    if (!converged)
        throw SpectralError("subspace iteration did not converge in " +
                            std::to_string(max_iters) + " iterations");

    Eigenbasis basis;
    basis.lambda = ritz.head(k);
    basis.phi = Q.leftCols(k);
    basis.mass = a;
    basis.mesh = lap.mesh;
    basis.k = k;
    detail::fix_eigenvector_signs(basis.phi);
    return basis;
}

}  // namespace detail

struct EigensolveOptions {
    int dense_threshold = 2000;  // use dense solve for n below this
};

inline Eigenbasis eigenbasis(const Laplacian& lap, int k, const EigensolveOptions& opt = {}) {
    const int n = static_cast<int>(lap.mass.size());
    if (k <= 0 || k > n)
        throw SpectralError("eigenbasis: k=" + std::to_string(k) + " out of range for n=" +
                            std::to_string(n));
    if (n <= opt.dense_threshold) return detail::eigenbasis_dense(lap, k);
    return detail::eigenbasis_lanczos(lap, k);
}

// Spectral coefficients <f, phi_i>_A = phi_i^T A f.
inline Eigen::VectorXd analyze(const Eigenbasis& basis, const ScalarField& f) {
    if (f.size() != basis.n())
        throw SpectralError("analyze: field length " + std::to_string(f.size()) +
                            " does not match vertex count " + std::to_string(basis.n()));
    return basis.phi.transpose() * basis.mass.cwiseProduct(f);
}

inline ScalarField synthesize(const Eigenbasis& basis, const Eigen::VectorXd& coeffs) {
    if (coeffs.size() > basis.k)
        throw SpectralError("synthesize: " + std::to_string(coeffs.size()) +
                            " coefficients exceed basis truncation k=" +
                            std::to_string(basis.k));
    return basis.phi.leftCols(coeffs.size()) * coeffs;
}

// Binary cache: magic "HRSB1", then uint64 n, uint64 k, lambda (k doubles),
// phi column-major (n*k doubles); little-endian throughout.
inline void save_eigenbasis(const Eigenbasis& basis, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SpectralError("cannot write eigenbasis file: " + path);
    out.write("HRSB1", 5);
    std::uint64_t n = basis.n(), k = basis.k;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&k), 8);
    out.write(reinterpret_cast<const char*>(basis.lambda.data()),
              static_cast<std::streamsize>(k * 8));
    out.write(reinterpret_cast<const char*>(basis.phi.data()),
              static_cast<std::streamsize>(n * k * 8));
    if (!out) throw SpectralError("I/O failure writing eigenbasis: " + path);
}

inline Eigenbasis load_eigenbasis(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpectralError("cannot open eigenbasis file: " + path);
    char magic[5];
    in.read(magic, 5);
    if (!in || std::string(magic, 5) != "HRSB1")
        throw SpectralError("bad eigenbasis magic in: " + path);
    std::uint64_t n = 0, k = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&k), 8);
    Eigenbasis basis;
    basis.k = static_cast<int>(k);
    basis.lambda.resize(static_cast<int>(k));
    basis.phi.resize(static_cast<int>(n), static_cast<int>(k));
    in.read(reinterpret_cast<char*>(basis.lambda.data()),
            static_cast<std::streamsize>(k * 8));
    in.read(reinterpret_cast<char*>(basis.phi.data()),
            static_cast<std::streamsize>(n * k * 8));
    if (!in) throw SpectralError("truncated eigenbasis file: " + path);
    return basis;
}

}  // namespace specreg
