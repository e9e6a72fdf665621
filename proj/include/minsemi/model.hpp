#pragma once

#include <string>
#include <utility>
#include <vector>

#include "minsemi/fock.hpp"
#include "minsemi/hermitian.hpp"
#include "minsemi/superop.hpp"

namespace minsemi {

// Parameters of the open one-mode boson system: level spacing `energy`,
// decay rate `sigma_minus`, excitation rate `sigma_plus`. Both rates zero is
// allowed and degenerates to the isolated (unitary-conjugation) system.
struct ModelParams {
    double energy = 1.0;
    double sigma_minus = 1.0;
    double sigma_plus = 0.25;
    TruncationConfig trunc{};

    void validate() const;
};

enum class FamilyKind { NumberCutoff, CompressFirst, KatoScaling };

// One member of a regularisation family: a positivity-preserving map below
// the full jump term Q, indexed either by a level cutoff N (projector
// families) or by a scaling factor r in [0,1).
struct RegularizationFamily {
    FamilyKind kind = FamilyKind::NumberCutoff;
    int cutoff = 0;     // N, used by NumberCutoff and CompressFirst
    double scale = 0.0; // r, used by KatoScaling

    static RegularizationFamily number_cutoff(int n);
    static RegularizationFamily compress_first(int n);
    static RegularizationFamily kato_scaling(double r);

    // Bounds: N in {0..dim-2}, r in [0,1).
    void validate(const TruncationConfig& trunc) const;
    std::string describe() const;
};

// Diagonal single-particle operator with entry n equal to
// i*E*n + (sigma_minus*n + sigma_plus*nu_n)/2, where nu_n = n+1 except
// nu_{dim-1} = 0: the raising term is compressed to the truncated space, so
// the top level carries no upward rate.
FockOperator build_h_sigma(const ModelParams& p);

// rho -> h_sigma rho + rho h_sigma^*; the no-jump part of the generator.
SuperOperator build_H(const ModelParams& p);

// Jump term rho -> sigma_minus * b rho b^* + sigma_plus * b^* rho b.
SuperOperator build_Q(const ModelParams& p);

// The two summands of build_Q, (Q_minus, Q_plus); their sum is build_Q.
std::pair<SuperOperator, SuperOperator> build_Q_pm(const ModelParams& p);

// Tilted jump term exp(-2s) Q_minus + exp(2s) Q_plus together with the
// constants of its interior trace identity
//   tr(Q~ rho) = mixing * tr(H rho) + trace_constant * tr(rho).
struct TiltedQ {
    SuperOperator op;
    double mixing = 0.0;          // (exp(-2s) s_minus + exp(2s) s_plus) / (s_minus + s_plus)
    double trace_constant = 0.0;  // 2 s_minus s_plus sinh(2s) / (s_minus + s_plus)
    bool regime_ok = false;       // sigma_plus * exp(2s) < sigma_minus
};
TiltedQ build_Q_tilde(const ModelParams& p, double s);

// NumberCutoff(N): sigma_minus * (P_N b) rho (P_N b)^* +
//                  sigma_plus  * (P_N b^*) rho (P_N b^*)^*,
// which satisfies Q_N rho = P_N (Q rho) P_N exactly.
// CompressFirst(N): Q applied to P_N rho P_N.
// KatoScaling(r): r * Q. All three positivity preserving by construction.
SuperOperator build_regularized_Q(const ModelParams& p,
                                  const RegularizationFamily& fam);

// Full generator L = H - Q, or the regularised L_alpha = H - Q_alpha. The
// evolution it generates is exp(-t L).
SuperOperator build_generator(const ModelParams& p);
SuperOperator build_generator(const ModelParams& p,
                              const RegularizationFamily& fam);

struct StateDiagnostics {
    double trace = 0.0;
    double trace_norm = 0.0;
    double min_eigenvalue = 0.0;
    double purity = 0.0;           // tr(rho^2)
    double mean_occupation = 0.0;  // tr(n rho)
};
StateDiagnostics diagnose(const HermitianMatrix& state);

struct EvolutionRecord {
    std::vector<double> times;
    std::vector<HermitianMatrix> states;
    std::vector<StateDiagnostics> diagnostics;  // recomputed from states
};

// Applies exp(-t * generator) to rho0 at every grid time (grid strictly
// increasing, entries >= 0); a grid entry t = 0 returns rho0 itself.
EvolutionRecord evolve(const SuperOperator& generator,
                       const HermitianMatrix& rho0,
                       const std::vector<double>& t_grid);

struct NeumannRecord {
    bool converged = false;
    int terms = 0;
    std::vector<double> increment_trace_norms;
    double last_increment = 0.0;
    // Trace-norm distance between the series value and the direct solve of
    // (lambda I + H - K) x = u.
    double residual_vs_direct = 0.0;
};

// Partial sums of sum_n (lambda I + H)^{-1} (K (lambda I + H)^{-1})^n u.
// Terms are accumulated until the trace norm of the latest term drops below
// tol/10 (one order under the requested tolerance: the remaining geometric
// tail is a small multiple of the last term) or max_terms is reached.
std::pair<HermitianMatrix, NeumannRecord> neumann_series_resolvent(
    const SuperOperator& h, const SuperOperator& k, double lambda,
    const HermitianMatrix& u, double tol = 1e-8, int max_terms = 200);

struct SweepRow {
    double index = 0.0;           // N or r
    double evolve_error = 0.0;    // || T^alpha_t rho0 - T_t rho0 ||_1
    double evolve_min_eig = 0.0;  // min-eig( T_t rho0 - T^alpha_t rho0 )
    double resolvent_error = 0.0;    // same pair at lambda = 1
    double resolvent_min_eig = 0.0;
};

// Compares the regularised evolution/resolvent against the full ones over a
// strictly increasing list of family indices.
std::vector<SweepRow> regularization_sweep(const ModelParams& p,
                                           FamilyKind kind,
                                           const std::vector<double>& indices,
                                           double t,
                                           const HermitianMatrix& rho0);

// rho -> (I + n)^{-1} rho (I + n)^{-1}.
SuperOperator psi_map(const ModelParams& p);

// Constructive split rho = rho1 - rho2 with rho1, rho2 PSD and
// tr(rho1) + tr(rho2) <= ||rho||_1 + eps: conjugate by
// (I + t n)(I + n)^{-1}, bisecting t downward from 1 until the conjugated
// trace norm is within eps of ||rho||_1, Jordan-decompose there, and
// conjugate the two parts back by (I + t n)^{-1}.
std::pair<HermitianMatrix, HermitianMatrix> psi_decompose(
    const HermitianMatrix& rho, double eps, const ModelParams& p);

// Trace-one kernel state of the generator (smallest-magnitude eigenvalue,
// refined by inverse iteration). Fails if the near-kernel is not
// one-dimensional or the residual ||L rho||_1 stays above 1e-8.
HermitianMatrix stationary_state(const SuperOperator& generator);

}  // namespace minsemi
