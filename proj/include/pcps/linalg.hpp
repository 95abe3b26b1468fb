#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace pcps {

// Dense double-precision matrices, row-major. Desk scale (up to a few
// thousand rows, a few hundred columns); no sparse or complex support.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Throws ParameterError if any entry is NaN or infinite.
void require_finite(const Matrix& a, const char* what = "matrix");

// Thin SVD a = u * diag(sigma) * v^T with numerically determined rank.
//   u: n x r, v: d x r, both with orthonormal columns.
//   sigma: r positive values, non-increasing.
struct ThinSvd {
    Matrix u;
    Vector sigma;
    Matrix v;
    Index rank = 0;
};

// Spectral split at index m: a_m is the best rank-m part, a_m_perp the
// residual built from the trailing singular triplets. sigma_m keeps the top
// m values (rest zero), sigma_m_perp the complement.
struct RankSplit {
    Index m = 0;
    Matrix a_m;
    Matrix a_m_perp;
    Vector sigma_m;
    Vector sigma_m_perp;
};

// d x c matrix with orthonormal columns; codim is the column count c.
struct OrthonormalBasis {
    Matrix matrix;
    Index codim = 0;
};

struct NormBundle {
    double frobenius = 0.0;
    double spectral = 0.0;
    std::optional<double> trace;  // square matrices only
};

// Rank r counts singular values above rank_tol * sigma_1; rank_tol < 0
// selects the default max(rows, cols) * machine epsilon.
// Throws DimensionError on empty input, DegenerateError on the zero matrix.
ThinSvd thin_svd(const Matrix& a, double rank_tol = -1.0);

// Requires 1 <= m <= rank. For m = rank the residual is exactly zero.
RankSplit rank_split(const ThinSvd& svd, Index m);

// Rotation-invariant random orthonormal d x c basis: QR of an iid standard
// normal matrix with the R diagonal sign fixed. Deterministic per seed.
OrthonormalBasis haar_orthonormal(Index d, Index c, std::uint64_t seed);

// Orthonormal basis of the orthogonal complement, d x (d - c).
// Throws DegenerateError when c = d.
OrthonormalBasis complement_basis(const OrthonormalBasis& x);

// P = I - X X^T: symmetric idempotent projector of rank d - codim.
Matrix projector_from_complement(const OrthonormalBasis& x);

double frobenius_norm(const Matrix& a);
double spectral_norm(const Matrix& a);
// Largest |eigenvalue| of a symmetric matrix; cheaper and more accurate
// than the general path for the Gram differences used by the verifier.
double spectral_norm_symmetric(const Matrix& a);
// Sum of the diagonal; throws DimensionError on non-square input.
double trace(const Matrix& a);

NormBundle norms(const Matrix& a);

}  // namespace pcps
