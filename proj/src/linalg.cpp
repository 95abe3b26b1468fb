#include "pcps/linalg.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pcps/errors.hpp"
#include "pcps/rng.hpp"

namespace pcps {

void require_finite(const Matrix& a, const char* what) {
    if (!a.allFinite())
        throw ParameterError(std::string(what) + ": non-finite entries");
}

ThinSvd thin_svd(const Matrix& a, double rank_tol) {
    if (a.rows() == 0 || a.cols() == 0)
        throw DimensionError("thin_svd: empty matrix");
    require_finite(a, "thin_svd");

    // Column-major working copy; BDCSVD falls back to Jacobi at small sizes.
    const Eigen::MatrixXd ac = a;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(ac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();

    if (rank_tol < 0.0)
        rank_tol = static_cast<double>(std::max(a.rows(), a.cols())) *
                   std::numeric_limits<double>::epsilon();

    const double cutoff = rank_tol * sv(0);
    Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    if (r == 0)
        throw DegenerateError("thin_svd: matrix has numerical rank zero");

    ThinSvd out;
    out.u = svd.matrixU().leftCols(r);
    out.sigma = sv.head(r);
    out.v = svd.matrixV().leftCols(r);
    out.rank = r;
    return out;
}

RankSplit rank_split(const ThinSvd& svd, Index m) {
    const Index r = svd.rank;
    if (m < 1 || m > r)
        throw ParameterError("rank_split: m must lie in [1, rank]");

    RankSplit out;
    out.m = m;
    out.sigma_m = Vector::Zero(r);
    out.sigma_m_perp = Vector::Zero(r);
    out.sigma_m.head(m) = svd.sigma.head(m);
    out.sigma_m_perp.tail(r - m) = svd.sigma.tail(r - m);

    out.a_m = svd.u.leftCols(m) * svd.sigma.head(m).asDiagonal() *
              svd.v.leftCols(m).transpose();
    if (m == r) {
        out.a_m_perp = Matrix::Zero(svd.u.rows(), svd.v.rows());
    } else {
        out.a_m_perp = svd.u.rightCols(r - m) * svd.sigma.tail(r - m).asDiagonal() *
                       svd.v.rightCols(r - m).transpose();
    }
    return out;
}

OrthonormalBasis haar_orthonormal(Index d, Index c, std::uint64_t seed) {
    if (c < 1 || c > d)
        throw DimensionError("haar_orthonormal: need 1 <= c <= d");
    Rng rng(seed);
    Eigen::MatrixXd g(d, c);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < c; ++j) g(i, j) = rng.normal();

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, c);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
    for (Index j = 0; j < c; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);

    return OrthonormalBasis{q, c};
}

OrthonormalBasis complement_basis(const OrthonormalBasis& x) {
    const Index d = x.matrix.rows();
    const Index c = x.matrix.cols();
    if (c >= d)
        throw DegenerateError("complement_basis: basis already spans the space");

    // Householder QR of X: the trailing d - c columns of Q span the
    // orthogonal complement of the column space.
    const Eigen::MatrixXd xc = x.matrix;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(xc);
    const Eigen::MatrixXd full_q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
    return OrthonormalBasis{full_q.rightCols(d - c), d - c};
}

Matrix projector_from_complement(const OrthonormalBasis& x) {
    const Index d = x.matrix.rows();
    return Matrix::Identity(d, d) - x.matrix * x.matrix.transpose();
}

double frobenius_norm(const Matrix& a) { return a.norm(); }

double spectral_norm(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    if (a.isZero(0.0)) return 0.0;
    const Eigen::MatrixXd ac = a;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(ac);
    return svd.singularValues()(0);
}

double spectral_norm_symmetric(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("spectral_norm_symmetric: square input required");
    if (a.rows() == 0) return 0.0;
    const Eigen::MatrixXd ac = a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ac, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double trace(const Matrix& a) {
    if (a.rows() != a.cols())
        throw DimensionError("trace: square input required");
    return a.trace();
}

NormBundle norms(const Matrix& a) {
    require_finite(a, "norms");
    NormBundle out;
    out.frobenius = frobenius_norm(a);
    out.spectral = spectral_norm(a);
    if (a.rows() == a.cols()) out.trace = a.trace();
    return out;
}

}  // namespace pcps
