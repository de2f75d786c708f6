#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/numeric.hpp"
#include "framelab/parallel.hpp"
#include "framelab/pointset.hpp"
#include "framelab/spectrum.hpp"

namespace framelab {

inline constexpr int kMaxDenseDim = 4096;

/// Dense complex matrix that is Hermitian by construction: set(j,k,v) writes
/// v at (j,k) and conj(v) at (k,j); the diagonal is kept real.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(int n) : m_(Eigen::MatrixXcd::Zero(n, n)) {
        if (n < 0) throw invalid_input("hermitian: dimension must be >= 0");
    }

    /// Adopts a raw matrix, rejecting symmetry violations beyond herm_tol
    /// (relative to the largest entry); the stored copy is symmetrized.
    static HermitianMatrix from_matrix(const Eigen::MatrixXcd& m, double herm_tol = 1e-10) {
        if (m.rows() != m.cols())
            throw invalid_input("hermitian: matrix must be square");
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
            throw invalid_input("hermitian: input violates Hermitian symmetry");
        HermitianMatrix h(static_cast<int>(m.rows()));
        h.m_ = 0.5 * (m + m.adjoint().eval());
        return h;
    }

    int size() const { return static_cast<int>(m_.rows()); }

    void set(int j, int k, complex_d v) {
        if (j == k) {
            m_(j, j) = complex_d(v.real(), 0.0);
        } else {
            m_(j, k) = v;
            m_(k, j) = std::conj(v);
        }
    }

    complex_d operator()(int j, int k) const { return m_(j, k); }

    const Eigen::MatrixXcd& matrix() const { return m_; }

  private:
    Eigen::MatrixXcd m_;
};

/// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    Eigen::MatrixXcd vectors;
};

/// Dense Hermitian eigendecomposition. Validates the reconstruction residual
/// ||G - V diag(w) V*||_F <= 1e-8 ||G||_F and eigenvector orthonormality.
inline EigenDecomposition decompose(const HermitianMatrix& g) {
    const int n = g.size();
    EigenDecomposition out;
    out.vectors = Eigen::MatrixXcd::Zero(n, n);
    if (n == 0) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g.matrix());
    if (solver.info() != Eigen::Success)
        throw invariant_violation("eigendecomposition failed to converge");
    out.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) {
        out.eigenvalues[i] = solver.eigenvalues()(n - 1 - i);
        out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = out.eigenvalues[i];
    const double g_norm = g.matrix().norm();
    const double resid =
        (g.matrix() - out.vectors * w.asDiagonal() * out.vectors.adjoint()).norm();
    if (resid > 1e-8 * std::max(g_norm, 1e-300))
        throw invariant_violation("eigendecomposition reconstruction residual too large");
    const double ortho =
        (out.vectors.adjoint() * out.vectors - Eigen::MatrixXcd::Identity(n, n))
            .cwiseAbs()
            .maxCoeff();
    if (ortho > 1e-8)
        throw invariant_violation("eigenvectors are not orthonormal");
    return out;
}

/// Gram matrix of the exponential system over the windowed points:
/// G_{jk} = <e_{lambda_k}, e_{lambda_j}> = 1_S^(lambda_j - lambda_k).
/// Hermitian PSD with diagonal identically |S|.
inline HermitianMatrix assemble_gram(const Spectrum& s, const WindowedPointSet& pts,
                                     unsigned threads = 1) {
    const std::size_t n = pts.points.size();
    if (n == 0) throw invalid_input("assemble_gram: point set must be nonempty");
    if (n > static_cast<std::size_t>(kMaxDenseDim))
        throw resource_limit("assemble_gram: dense storage bound exceeded", n, kMaxDenseDim);
    HermitianMatrix g(static_cast<int>(n));
    const double diag = s.measure();
    parallel_for(n, threads, [&](std::size_t j) {
        g.set(static_cast<int>(j), static_cast<int>(j), diag);
        for (std::size_t k = j + 1; k < n; ++k)
            g.set(static_cast<int>(j), static_cast<int>(k),
                  s.ft_indicator(pts.points[j] - pts.points[k]));
    });
    return g;
}

/// Smallest and largest eigenvalue. Tiny negatives (>= -1e-10 * lambda_max)
/// are clamped to 0; anything below signals an assembly error, not roundoff.
inline std::pair<double, double> extremal_eigs(const HermitianMatrix& g) {
    if (g.size() == 0) throw invalid_input("extremal_eigs: empty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g.matrix(),
                                                           Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw invariant_violation("eigenvalue computation failed to converge");
    double lo = solver.eigenvalues()(0);
    const double hi = solver.eigenvalues()(g.size() - 1);
    if (lo < 0.0) {
        if (lo < -1e-10 * std::max(hi, 0.0))
            throw invariant_violation("matrix has a significantly negative eigenvalue");
        lo = 0.0;
    }
    return {lo, hi};
}

/// Diagonal of the orthogonal projection onto range(G): eigenvalues above
/// rank_tol * lambda_max are kept and diag(V_keep V_keep*) returned. For a
/// Gram matrix this is the dual-diagonal surrogate <e_lambda, S^-1 e_lambda>
/// of the finite system; entries lie in [0,1] and sum to the retained rank.
inline std::vector<double> range_projection_diag(const HermitianMatrix& g,
                                                 double rank_tol) {
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
        throw invalid_input("range_projection_diag: rank_tol must be in (0,1)");
    const int n = g.size();
    std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
    if (n == 0) return diag;
    const EigenDecomposition eig = decompose(g);
    const double lam_max = eig.eigenvalues.front();
    if (!(lam_max > 0.0)) return diag; // zero matrix: legal degenerate output
    const double cutoff = rank_tol * lam_max;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < n && eig.eigenvalues[k] > cutoff; ++k)
            acc += std::norm(eig.vectors(i, k));
        diag[static_cast<std::size_t>(i)] = std::min(1.0, acc);
    }
    return diag;
}

/// Spectral-cutoff least squares G^+ rhs: directions with eigenvalue
/// <= rank_tol * lambda_max are dropped.
inline Eigen::VectorXcd solve_psd(const HermitianMatrix& g, const Eigen::VectorXcd& rhs,
                                  double rank_tol) {
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
        throw invalid_input("solve_psd: rank_tol must be in (0,1)");
    if (rhs.size() != g.size())
        throw invalid_input("solve_psd: dimension mismatch");
    const int n = g.size();
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
    if (n == 0) return x;
    const EigenDecomposition eig = decompose(g);
    const double lam_max = eig.eigenvalues.front();
    if (!(lam_max > 0.0)) return x;
    const double cutoff = rank_tol * lam_max;
    for (int k = 0; k < n && eig.eigenvalues[k] > cutoff; ++k) {
        const complex_d w = eig.vectors.col(k).dot(rhs); // v_k^* rhs
        x += (w / eig.eigenvalues[k]) * eig.vectors.col(k);
    }
    return x;
}

} // namespace framelab
