#pragma once

#include <Eigen/Dense>
#include <vector>

namespace minsemi {

inline constexpr double kDefaultEqTol = 1e-9;

// A self-adjoint matrix on the truncated space, symmetrised on construction.
// The raw input's deviation from self-adjointness is recorded; deviations
// beyond eq_tol are rejected so non-Hermitian drift cannot pass silently
// through long pipelines.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(const Eigen::MatrixXcd& raw, double eq_tol = kDefaultEqTol);

    static HermitianMatrix zero(int dim);
    static HermitianMatrix identity(int dim);

    // Rank-one projector |v><v| (not normalised).
    static HermitianMatrix outer(const Eigen::VectorXcd& v);

    int dim() const { return dim_; }
    const Eigen::MatrixXcd& entries() const { return m_; }

    // Max-abs-entry distance between the raw input and its Hermitian part.
    double asymmetry() const { return asymmetry_; }

    double trace() const { return m_.trace().real(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix operator*(double c) const;

  private:
    HermitianMatrix(int dim, Eigen::MatrixXcd sym, double asym)
        : dim_(dim), m_(std::move(sym)), asymmetry_(asym) {}

    int dim_;
    Eigen::MatrixXcd m_;
    double asymmetry_;
};

inline HermitianMatrix operator*(double c, const HermitianMatrix& u) { return u * c; }

// Positive and negative parts: u = positive - negative, |u| = positive +
// negative, with orthogonal supports.
struct JordanParts {
    HermitianMatrix positive;
    HermitianMatrix negative;
};

JordanParts jordan_decompose(const HermitianMatrix& u);

// Sum of absolute eigenvalues; equals the trace on the PSD cone.
double trace_norm(const HermitianMatrix& u);

// Cone-membership verdict with an eigenvector witness on failure.
struct PsdVerdict {
    bool psd;
    double min_eigenvalue;
    Eigen::VectorXcd witness;  // eigenvector attaining min_eigenvalue; empty when psd

    explicit operator bool() const { return psd; }
};

PsdVerdict is_psd(const HermitianMatrix& u, double tol);

// u <= v in the PSD order, i.e. v - u is PSD within tol.
PsdVerdict psd_order_le(const HermitianMatrix& u, const HermitianMatrix& v, double tol);

// Limit record of a nondecreasing PSD sequence with bounded traces. In the
// monotone regime each increment's trace norm equals its trace, which is what
// makes the total variation summable; both are recorded for cross-checking.
struct MonotoneLimit {
    HermitianMatrix limit;
    std::vector<double> increment_trace_norms;
    std::vector<double> increment_traces;
};

// Validates PSD-ness, monotonicity and the trace bound (throwing with the
// offending index on violation), then returns the final element plus the
// Cauchy record of increments.
MonotoneLimit monotone_net_limit(const std::vector<HermitianMatrix>& seq, double trace_bound,
                                 double tol);

}  // namespace minsemi
