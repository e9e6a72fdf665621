#pragma once

#include <Eigen/Dense>
#include <string>

namespace minsemi {

// Finite truncation window for the one-mode Fock space: basis e_0..e_{dim-1}.
// Every operator is the compression of its infinite-dimensional counterpart to
// this window; the only algebraic casualty is the top-level commutation defect
// (see commutation_defect). States whose range avoids the top `buffer` levels
// are called "interior"; identities that rely on the canonical commutation
// relation are exact there.
struct TruncationConfig {
    int dim = 40;
    int buffer = 4;
    double psd_tol = 1e-9;  // cone-membership slack, scaled by trace norm
    double eq_tol = 1e-9;   // entrywise/trace-norm equality slack

    void validate() const;  // throws std::invalid_argument on bad fields

    // Highest level an interior state may occupy.
    int interior_top() const { return dim - 1 - buffer; }
};

// A dense complex matrix on the truncated Fock space, tagged with a label so
// downstream error messages can name their operands.
struct FockOperator {
    int dim;
    Eigen::MatrixXcd entries;
    std::string label;

    FockOperator(Eigen::MatrixXcd m, std::string lab);

    FockOperator adjoint() const;
};

// Lowering operator: e_n -> sqrt(n) e_{n-1}, vacuum annihilated.
FockOperator annihilation(const TruncationConfig& cfg);

// Raising operator: adjoint of annihilation; the transition out of the top
// level e_{dim-1} is dropped by the truncation.
FockOperator creation(const TruncationConfig& cfg);

// Occupation-number operator diag(0, 1, ..., dim-1); equals
// creation * annihilation exactly at truncation.
FockOperator number_op(const TruncationConfig& cfg);

// Harmonic ladder Hamiltonian with level spacing E: E * number_op.
FockOperator hamiltonian(double energy, const TruncationConfig& cfg);

// Spectral projector of the number operator onto levels 0..N.
FockOperator projector(int N, const TruncationConfig& cfg);

// Diagonal tilt diag(e^{-s n}); conjugation by it damps high levels.
FockOperator exp_tilt(double s, const TruncationConfig& cfg);

// b b* - b* b - I. Zero on levels 0..dim-2; the (dim-1, dim-1) entry is -dim,
// quantifying exactly how the truncation breaks the commutation relation.
FockOperator commutation_defect(const TruncationConfig& cfg);

}  // namespace minsemi
