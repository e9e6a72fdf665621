#include "minsemi/hermitian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace minsemi {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigendecompose(const HermitianMatrix& u) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(u.entries());
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian eigendecomposition failed to converge");
    return es;
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Eigen::MatrixXcd& raw, double eq_tol)
    : dim_(static_cast<int>(raw.rows())) {
    if (raw.rows() != raw.cols())
        throw std::invalid_argument("HermitianMatrix: matrix must be square");
    if (!raw.allFinite()) throw std::invalid_argument("HermitianMatrix: non-finite entries");
    m_ = 0.5 * (raw + raw.adjoint());
    asymmetry_ = (raw - m_).cwiseAbs().maxCoeff();
    // Scale-invariant rejection: a tiny absolute skew on a huge matrix is
    // roundoff, the same skew on a tiny matrix is a bug.
    double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    if (asymmetry_ > eq_tol * scale)
        throw std::invalid_argument("HermitianMatrix: input deviates from self-adjointness by " +
                                    std::to_string(asymmetry_) + " (tolerance " +
                                    std::to_string(eq_tol * scale) + ")");
}

HermitianMatrix HermitianMatrix::zero(int dim) {
    return HermitianMatrix(dim, Eigen::MatrixXcd::Zero(dim, dim), 0.0);
}

HermitianMatrix HermitianMatrix::identity(int dim) {
    return HermitianMatrix(dim, Eigen::MatrixXcd::Identity(dim, dim), 0.0);
}

HermitianMatrix HermitianMatrix::outer(const Eigen::VectorXcd& v) {
    Eigen::MatrixXcd m = v * v.adjoint();
    return HermitianMatrix(static_cast<int>(v.size()), std::move(m), 0.0);
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("HermitianMatrix: dimension mismatch in +");
    return HermitianMatrix(dim_, m_ + o.m_, 0.0);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
    if (o.dim_ != dim_) throw std::invalid_argument("HermitianMatrix: dimension mismatch in -");
    return HermitianMatrix(dim_, m_ - o.m_, 0.0);
}

HermitianMatrix HermitianMatrix::operator*(double c) const {
    return HermitianMatrix(dim_, c * m_, 0.0);
}

JordanParts jordan_decompose(const HermitianMatrix& u) {
    auto es = eigendecompose(u);
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(u.dim(), u.dim());
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(u.dim(), u.dim());
    for (int i = 0; i < u.dim(); ++i) {
        Eigen::MatrixXcd proj = vecs.col(i) * vecs.col(i).adjoint();
        if (vals(i) >= 0.0)
            v += vals(i) * proj;
        else
            w -= vals(i) * proj;
    }
    return JordanParts{HermitianMatrix(v), HermitianMatrix(w)};
}

double trace_norm(const HermitianMatrix& u) {
    return eigendecompose(u).eigenvalues().cwiseAbs().sum();
}

PsdVerdict is_psd(const HermitianMatrix& u, double tol) {
    auto es = eigendecompose(u);
    int argmin = 0;
    double mn = es.eigenvalues().minCoeff(&argmin);
    if (mn >= -tol) return PsdVerdict{true, mn, {}};
    return PsdVerdict{false, mn, es.eigenvectors().col(argmin)};
}

PsdVerdict psd_order_le(const HermitianMatrix& u, const HermitianMatrix& v, double tol) {
    if (u.dim() != v.dim())
        throw std::invalid_argument("psd_order_le: dimension mismatch (" +
                                    std::to_string(u.dim()) + " vs " + std::to_string(v.dim()) +
                                    ")");
    return is_psd(v - u, tol);
}

MonotoneLimit monotone_net_limit(const std::vector<HermitianMatrix>& seq, double trace_bound,
                                 double tol) {
    if (seq.empty()) throw std::invalid_argument("monotone_net_limit: empty sequence");
    for (size_t k = 0; k < seq.size(); ++k) {
        if (!is_psd(seq[k], tol).psd)
            throw std::invalid_argument("monotone_net_limit: element " + std::to_string(k) +
                                        " is not PSD within tolerance");
        if (seq[k].trace() > trace_bound + tol)
            throw std::invalid_argument("monotone_net_limit: element " + std::to_string(k) +
                                        " exceeds the trace bound");
    }
    MonotoneLimit out{seq.back(), {}, {}};
    for (size_t k = 0; k + 1 < seq.size(); ++k) {
        HermitianMatrix inc = seq[k + 1] - seq[k];
        if (!is_psd(inc, tol).psd)
            throw std::invalid_argument("monotone_net_limit: order violated between elements " +
                                        std::to_string(k) + " and " + std::to_string(k + 1));
        out.increment_trace_norms.push_back(trace_norm(inc));
        out.increment_traces.push_back(inc.trace());
    }
    return out;
}

}  // namespace minsemi
