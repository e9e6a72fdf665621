#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minsemi/hermitian.hpp"

namespace minsemi {

// Column-stacking vectorisation: vectorize(m)(col * dim + row) = m(row, col).
// Under this convention the map rho -> A rho B^* has matrix kron(conj(B), A).
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v, int dim);

// Exact test that a vectorised map sends Hermitian matrices to Hermitian
// matrices: with p the vec-transpose permutation, the condition is
// m(p(i), p(j)) == conj(m(i, j)) entrywise, up to tol * max(1, max|m|).
bool preserves_hermiticity(const Eigen::MatrixXcd& m, int state_dim,
                           double tol = kDefaultEqTol);

// One summand of a sandwich map: rho -> left * rho * right^*.
struct SandwichTerm {
    Eigen::MatrixXcd left;
    Eigen::MatrixXcd right;
};

// A linear map on dim x dim matrices, stored as its (dim^2) x (dim^2) matrix
// in the column-stacking convention. Instances are immutable after
// construction; the partition of vectorised indices into connected components
// of the symmetrised sparsity pattern is computed once and shared, so that
// exponentials, resolvents and matrix-vector products can run block by block.
// The maps arising from the boson model couple only matrix entries on a common
// diagonal offset, so their components have size at most dim -- the difference
// between working with ~2*dim blocks of side <= dim and one dense matrix of
// side dim^2 is what keeps large truncations tractable.
class SuperOperator {
  public:
    // General constructor; verifies the Hermiticity-preservation identity
    // unless check is false (the named builders below preserve it by
    // construction and skip the scan).
    static SuperOperator from_matrix(Eigen::MatrixXcd m, std::string label,
                                     bool check = true,
                                     double tol = kDefaultEqTol);

    // rho -> sum_k left_k * rho * right_k^*; requires each pair square of
    // equal size. Hermiticity-preserving iff the sum is self-paired; callers
    // are trusted (the model builders only produce self-paired sums).
    static SuperOperator from_sandwich_sum(const std::vector<SandwichTerm>& terms,
                                           std::string label);

    // rho -> sum_k c_k * v_k * rho * v_k^* with c_k >= 0; positivity
    // preserving by construction.
    static SuperOperator from_sandwich_sum(
        const std::vector<std::pair<double, Eigen::MatrixXcd>>& terms,
        std::string label);

    // rho -> a * rho + rho * a^*.
    static SuperOperator from_left_right(const Eigen::MatrixXcd& a,
                                         std::string label);

    static SuperOperator zero(int state_dim);
    static SuperOperator identity(int state_dim);

    int state_dim() const { return state_dim_; }
    int vec_dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    const std::string& label() const { return label_; }

    // Partition of vectorised indices into connected components of the
    // symmetrised nonzero pattern; components are sorted by smallest member,
    // members ascending. Isolated indices appear as singletons.
    const std::vector<std::vector<int>>& components() const {
        return components_;
    }

    // The adjoint with respect to the trace pairing (u, v) -> tr(u^* v);
    // equals the conjugate transpose of the vectorised matrix.
    SuperOperator trace_adjoint() const;

    // Matrix-vector product evaluated component by component (exact, since
    // entries outside the diagonal blocks of the component partition vanish).
    Eigen::VectorXcd apply_vec(const Eigen::VectorXcd& x) const;

    friend SuperOperator operator+(const SuperOperator& a, const SuperOperator& b);
    friend SuperOperator operator-(const SuperOperator& a, const SuperOperator& b);
    friend SuperOperator operator*(double c, const SuperOperator& s);
    friend SuperOperator compose(const SuperOperator& a, const SuperOperator& b);

  private:
    SuperOperator(Eigen::MatrixXcd m, int state_dim, std::string label);

    Eigen::MatrixXcd matrix_;
    int state_dim_ = 0;
    std::string label_;
    std::vector<std::vector<int>> components_;
};

SuperOperator operator+(const SuperOperator& a, const SuperOperator& b);
SuperOperator operator-(const SuperOperator& a, const SuperOperator& b);
SuperOperator operator*(double c, const SuperOperator& s);
SuperOperator compose(const SuperOperator& a, const SuperOperator& b);

// Applies s to a Hermitian input and validates that the output is Hermitian
// up to tol * max(1, max|entry|), naming the offending map otherwise.
HermitianMatrix apply(const SuperOperator& s, const HermitianMatrix& u,
                      double tol = kDefaultEqTol);

// Positivity probe: feeds every basis projector plus `samples` seeded
// trace-one PSD inputs of cycling rank through s and records the most
// negative output eigenvalue seen together with the input that produced it.
struct ProbeReport {
    int samples = 0;
    double worst_min_eigenvalue = 0.0;
    Eigen::MatrixXcd witness_input;
    std::uint64_t seed = 0;

    bool positive(double tol) const { return worst_min_eigenvalue >= -tol; }
};

ProbeReport positivity_probe(const SuperOperator& s, int samples,
                             std::uint64_t seed);

// Lower bound for the induced trace norm sup ||s(rho)||_1 / ||rho||_1.
// Random rank-one inputs seed an alternating ascent: for the current unit v,
// take U = sign(s(v v^*)), then replace v by the top eigenvector of the
// Hermitian matrix s^*(U); the objective tr(s(v v^*) U) is nondecreasing
// along the iteration, and every reported value is a directly evaluated
// trace norm, hence a certified lower bound.
struct NormProbe {
    double lower_bound = 0.0;
    Eigen::VectorXcd witness;
    int samples = 0;
    int ascent_steps = 0;
    std::uint64_t seed = 0;
};

NormProbe induced_trace_norm_probe(const SuperOperator& s, int samples,
                                   std::uint64_t seed);

// exp(t * s), computed block by block with a scaling-and-squaring Pade
// evaluation per block. Throws if the result overflows, with a hint to
// rescale t. Materialises a full vec_dim x vec_dim matrix; prefer exp_apply
// when only the action on one input is needed.
SuperOperator exponential(const SuperOperator& s, double t);

// exp(t * s) applied to u without materialising the full exponential: blocks
// whose slice of vectorize(u) vanishes are skipped entirely.
HermitianMatrix exp_apply(const SuperOperator& s, double t,
                          const HermitianMatrix& u,
                          double tol = kDefaultEqTol);

// Solves (lambda * I + s) x = u block by block and devectorises x. The
// residual must satisfy ||(lambda*I + s)x - u||_2 <= rel_residual_tol *
// ||u||_2 in the vectorised 2-norm; otherwise the call fails with the
// reciprocal condition estimate of the worst block in the message.
HermitianMatrix resolvent_apply(const SuperOperator& s, double lambda,
                                const HermitianMatrix& u,
                                double rel_residual_tol = 1e-10,
                                double tol = kDefaultEqTol);

// Implicit Euler power (I + (t/n) s)^{-n} u, the classical approximation of
// exp(-t*s) u for an accretive s: one LU factorisation per block, n
// successive solves.
HermitianMatrix euler_power(const SuperOperator& s, double t, long n,
                            const HermitianMatrix& u,
                            double tol = kDefaultEqTol);

}  // namespace minsemi
