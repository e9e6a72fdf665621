#include "minsemi/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace minsemi {

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

Eigen::MatrixXcd gather(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXcd out(k, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) out(i, j) = m(idx[i], idx[j]);
    return out;
}

}  // namespace

void ModelParams::validate() const {
    trunc.validate();
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw std::invalid_argument("ModelParams: energy " +
                                    fmt_double(energy) +
                                    " must be positive and finite");
    if (!(sigma_minus >= 0.0) || !std::isfinite(sigma_minus))
        throw std::invalid_argument("ModelParams: sigma_minus " +
                                    fmt_double(sigma_minus) +
                                    " must be nonnegative and finite");
    if (!(sigma_plus >= 0.0) || !std::isfinite(sigma_plus))
        throw std::invalid_argument("ModelParams: sigma_plus " +
                                    fmt_double(sigma_plus) +
                                    " must be nonnegative and finite");
}

RegularizationFamily RegularizationFamily::number_cutoff(int n) {
    RegularizationFamily f;
    f.kind = FamilyKind::NumberCutoff;
    f.cutoff = n;
    return f;
}

RegularizationFamily RegularizationFamily::compress_first(int n) {
    RegularizationFamily f;
    f.kind = FamilyKind::CompressFirst;
    f.cutoff = n;
    return f;
}

RegularizationFamily RegularizationFamily::kato_scaling(double r) {
    RegularizationFamily f;
    f.kind = FamilyKind::KatoScaling;
    f.scale = r;
    return f;
}

void RegularizationFamily::validate(const TruncationConfig& trunc) const {
    switch (kind) {
        case FamilyKind::NumberCutoff:
        case FamilyKind::CompressFirst:
            if (cutoff < 0 || cutoff > trunc.dim - 2)
                throw std::invalid_argument(
                    "RegularizationFamily: cutoff " + std::to_string(cutoff) +
                    " outside {0.." + std::to_string(trunc.dim - 2) +
                    "} for dim " + std::to_string(trunc.dim));
            return;
        case FamilyKind::KatoScaling:
            if (!(scale >= 0.0) || !(scale < 1.0))
                throw std::invalid_argument("RegularizationFamily: scale " +
                                            fmt_double(scale) +
                                            " outside [0,1)");
            return;
    }
    throw std::logic_error("RegularizationFamily: unknown kind");
}

std::string RegularizationFamily::describe() const {
    switch (kind) {
        case FamilyKind::NumberCutoff:
            return "cutoff(" + std::to_string(cutoff) + ")";
        case FamilyKind::CompressFirst:
            return "compress(" + std::to_string(cutoff) + ")";
        case FamilyKind::KatoScaling:
            return "kato(" + fmt_double(scale) + ")";
    }
    return "?";
}

FockOperator build_h_sigma(const ModelParams& p) {
    p.validate();
    const FockOperator b = annihilation(p.trunc);
    const FockOperator bdag = creation(p.trunc);
    const std::complex<double> i_unit(0.0, 1.0);
    Eigen::MatrixXcd m =
        i_unit * p.energy * number_op(p.trunc).entries +
        0.5 * (p.sigma_minus * (bdag.entries * b.entries) +
               p.sigma_plus * (b.entries * bdag.entries));
    return FockOperator(std::move(m), "h_sigma");
}

SuperOperator build_H(const ModelParams& p) {
    return SuperOperator::from_left_right(build_h_sigma(p).entries, "H");
}

SuperOperator build_Q(const ModelParams& p) {
    p.validate();
    return SuperOperator::from_sandwich_sum(
        {{p.sigma_minus, annihilation(p.trunc).entries},
         {p.sigma_plus, creation(p.trunc).entries}},
        "Q");
}

std::pair<SuperOperator, SuperOperator> build_Q_pm(const ModelParams& p) {
    p.validate();
    return {SuperOperator::from_sandwich_sum(
                {{p.sigma_minus, annihilation(p.trunc).entries}}, "Q-"),
            SuperOperator::from_sandwich_sum(
                {{p.sigma_plus, creation(p.trunc).entries}}, "Q+")};
}

TiltedQ build_Q_tilde(const ModelParams& p, double s) {
    p.validate();
    if (!(s > 0.0) || !std::isfinite(s))
        throw std::invalid_argument("build_Q_tilde: tilt " + fmt_double(s) +
                                    " must be positive and finite");
    const double down = std::exp(-2.0 * s);
    const double up = std::exp(2.0 * s);
    const double total = p.sigma_minus + p.sigma_plus;
    TiltedQ out{SuperOperator::from_sandwich_sum(
                    {{p.sigma_minus * down, annihilation(p.trunc).entries},
                     {p.sigma_plus * up, creation(p.trunc).entries}},
                    "Q~"),
                0.0, 0.0, false};
    if (total > 0.0) {
        out.mixing = (down * p.sigma_minus + up * p.sigma_plus) / total;
        out.trace_constant =
            2.0 * p.sigma_minus * p.sigma_plus * std::sinh(2.0 * s) / total;
    }
    out.regime_ok = p.sigma_plus * up < p.sigma_minus;
    return out;
}

SuperOperator build_regularized_Q(const ModelParams& p,
                                  const RegularizationFamily& fam) {
    p.validate();
    fam.validate(p.trunc);
    switch (fam.kind) {
        case FamilyKind::NumberCutoff: {
            const Eigen::MatrixXcd pn = projector(fam.cutoff, p.trunc).entries;
            return SuperOperator::from_sandwich_sum(
                {{p.sigma_minus,
                  Eigen::MatrixXcd(pn * annihilation(p.trunc).entries)},
                 {p.sigma_plus,
                  Eigen::MatrixXcd(pn * creation(p.trunc).entries)}},
                "Q[" + fam.describe() + "]");
        }
        case FamilyKind::CompressFirst: {
            // Q(P rho P) = s- (bP) rho (bP)* + s+ (b*P) rho (b*P)*, so the
            // compress-then-jump map is itself a two-term sandwich.
            const Eigen::MatrixXcd pn = projector(fam.cutoff, p.trunc).entries;
            return SuperOperator::from_sandwich_sum(
                {{p.sigma_minus,
                  Eigen::MatrixXcd(annihilation(p.trunc).entries * pn)},
                 {p.sigma_plus,
                  Eigen::MatrixXcd(creation(p.trunc).entries * pn)}},
                "Q[" + fam.describe() + "]");
        }
        case FamilyKind::KatoScaling:
            return SuperOperator::from_matrix(fam.scale * build_Q(p).matrix(),
                                              "Q[" + fam.describe() + "]",
                                              false);
    }
    throw std::logic_error("build_regularized_Q: unknown family kind");
}

SuperOperator build_generator(const ModelParams& p) {
    return SuperOperator::from_matrix(
        build_H(p).matrix() - build_Q(p).matrix(), "L", false);
}

SuperOperator build_generator(const ModelParams& p,
                              const RegularizationFamily& fam) {
    return SuperOperator::from_matrix(
        build_H(p).matrix() - build_regularized_Q(p, fam).matrix(),
        "L[" + fam.describe() + "]", false);
}

StateDiagnostics diagnose(const HermitianMatrix& state) {
    StateDiagnostics d;
    d.trace = state.trace();
    d.trace_norm = trace_norm(state);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(state.entries(),
                                                        Eigen::EigenvaluesOnly);
    d.min_eigenvalue = eig.eigenvalues().minCoeff();
    d.purity = state.entries().squaredNorm();
    double occ = 0.0;
    for (int n = 0; n < state.dim(); ++n)
        occ += n * state.entries()(n, n).real();
    d.mean_occupation = occ;
    return d;
}

EvolutionRecord evolve(const SuperOperator& generator,
                       const HermitianMatrix& rho0,
                       const std::vector<double>& t_grid) {
    if (rho0.dim() != generator.state_dim())
        throw std::invalid_argument("evolve: state dimension " +
                                    std::to_string(rho0.dim()) +
                                    ", expected " +
                                    std::to_string(generator.state_dim()));
    if (t_grid.empty())
        throw std::invalid_argument("evolve: empty time grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i]))
            throw std::invalid_argument("evolve: time entry " +
                                        std::to_string(i) + " = " +
                                        fmt_double(t_grid[i]) +
                                        " must be finite and nonnegative");
        if (i > 0 && !(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument(
                "evolve: time grid not strictly increasing at entry " +
                std::to_string(i));
    }

    EvolutionRecord rec;
    rec.times = t_grid;
    rec.states.reserve(t_grid.size());
    rec.diagnostics.reserve(t_grid.size());

    // States are advanced block by block through the gaps of the grid; each
    // gap's per-block exponentials are exact, so only the matrix-vector
    // roundoff of at most |grid| applications accumulates. Blocks where the
    // initial state vanishes stay zero under the block-diagonal action and
    // are skipped outright.
    Eigen::VectorXcd x = vectorize(rho0.entries());
    std::vector<const std::vector<int>*> active;
    for (const auto& comp : generator.components()) {
        for (int i : comp)
            if (x(i) != 0.0) {
                active.push_back(&comp);
                break;
            }
    }
    std::vector<Eigen::MatrixXcd> step_exp(active.size());
    double cached_gap = std::numeric_limits<double>::quiet_NaN();
    double tau = 0.0;

    for (double t : t_grid) {
        if (t == 0.0) {
            rec.states.push_back(rho0);
            rec.diagnostics.push_back(diagnose(rho0));
            continue;
        }
        const double gap = t - tau;
        if (gap > 0.0) {
            if (gap != cached_gap) {
                for (std::size_t c = 0; c < active.size(); ++c) {
                    step_exp[c] =
                        (-gap * gather(generator.matrix(), *active[c])).exp();
                    if (!step_exp[c].allFinite())
                        throw std::runtime_error(
                            "evolve: exponential of '" + generator.label() +
                            "' overflowed over a gap of " + fmt_double(gap) +
                            "; rescale the time variable and retry");
                }
                cached_gap = gap;
            }
            for (std::size_t c = 0; c < active.size(); ++c) {
                const auto& idx = *active[c];
                Eigen::VectorXcd slice(static_cast<Eigen::Index>(idx.size()));
                for (std::size_t i = 0; i < idx.size(); ++i)
                    slice(static_cast<Eigen::Index>(i)) = x(idx[i]);
                slice = step_exp[c] * slice;
                for (std::size_t i = 0; i < idx.size(); ++i)
                    x(idx[i]) = slice(static_cast<Eigen::Index>(i));
            }
            tau = t;
        }
        HermitianMatrix state(devectorize(x, generator.state_dim()));
        rec.diagnostics.push_back(diagnose(state));
        rec.states.push_back(std::move(state));
    }
    return rec;
}

std::pair<HermitianMatrix, NeumannRecord> neumann_series_resolvent(
    const SuperOperator& h, const SuperOperator& k, double lambda,
    const HermitianMatrix& u, double tol, int max_terms) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("neumann_series_resolvent: lambda " +
                                    fmt_double(lambda) + " must be positive");
    if (h.vec_dim() != k.vec_dim())
        throw std::invalid_argument(
            "neumann_series_resolvent: '" + h.label() + "' and '" + k.label() +
            "' act on different spaces");
    if (max_terms < 1)
        throw std::invalid_argument(
            "neumann_series_resolvent: max_terms must be at least 1");

    NeumannRecord rec;
    HermitianMatrix term = resolvent_apply(h, lambda, u);
    HermitianMatrix sum = term;
    rec.increment_trace_norms.push_back(trace_norm(term));
    rec.terms = 1;
    // The increments decay geometrically; stopping one decade under tol
    // leaves the remaining tail well inside tol.
    const double stop = tol / 10.0;
    bool exact_tail = false;
    while (rec.increment_trace_norms.back() >= stop && rec.terms < max_terms) {
        term = resolvent_apply(h, lambda, apply(k, term));
        const double size = trace_norm(term);
        if (size == 0.0) {  // K annihilated the tail: the sum is exact
            exact_tail = true;
            break;
        }
        sum = sum + term;
        rec.increment_trace_norms.push_back(size);
        ++rec.terms;
    }
    rec.last_increment = rec.increment_trace_norms.back();
    rec.converged = exact_tail || rec.last_increment < stop;

    const SuperOperator l = SuperOperator::from_matrix(
        h.matrix() - k.matrix(), "(" + h.label() + "-" + k.label() + ")",
        false);
    rec.residual_vs_direct = trace_norm(sum - resolvent_apply(l, lambda, u));
    return {sum, rec};
}

std::vector<SweepRow> regularization_sweep(const ModelParams& p,
                                           FamilyKind kind,
                                           const std::vector<double>& indices,
                                           double t,
                                           const HermitianMatrix& rho0) {
    p.validate();
    if (indices.empty())
        throw std::invalid_argument("regularization_sweep: empty index list");
    for (std::size_t i = 1; i < indices.size(); ++i)
        if (!(indices[i] > indices[i - 1]))
            throw std::invalid_argument(
                "regularization_sweep: indices not strictly increasing at "
                "entry " +
                std::to_string(i));
    if (!(t >= 0.0))
        throw std::invalid_argument("regularization_sweep: time " +
                                    fmt_double(t) + " must be nonnegative");

    const auto family_at = [&](double idx) {
        if (kind == FamilyKind::KatoScaling)
            return RegularizationFamily::kato_scaling(idx);
        const double rounded = std::round(idx);
        if (std::abs(idx - rounded) > 1e-9)
            throw std::invalid_argument(
                "regularization_sweep: projector-family index " +
                fmt_double(idx) + " is not an integer");
        return kind == FamilyKind::NumberCutoff
                   ? RegularizationFamily::number_cutoff(
                         static_cast<int>(rounded))
                   : RegularizationFamily::compress_first(
                         static_cast<int>(rounded));
    };

    const SuperOperator full = build_generator(p);
    const HermitianMatrix ref_evolve = exp_apply(full, -t, rho0);
    const HermitianMatrix ref_resolvent = resolvent_apply(full, 1.0, rho0);

    std::vector<SweepRow> rows;
    rows.reserve(indices.size());
    for (double idx : indices) {
        const SuperOperator gen = build_generator(p, family_at(idx));
        const HermitianMatrix at = exp_apply(gen, -t, rho0);
        const HermitianMatrix ar = resolvent_apply(gen, 1.0, rho0);
        SweepRow row;
        row.index = idx;
        row.evolve_error = trace_norm(at - ref_evolve);
        row.evolve_min_eig = is_psd(ref_evolve - at, 0.0).min_eigenvalue;
        row.resolvent_error = trace_norm(ar - ref_resolvent);
        row.resolvent_min_eig = is_psd(ref_resolvent - ar, 0.0).min_eigenvalue;
        rows.push_back(row);
    }
    return rows;
}

SuperOperator psi_map(const ModelParams& p) {
    p.validate();
    const int d = p.trunc.dim;
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 0; n < d; ++n) c(n, n) = 1.0 / (1.0 + n);
    return SuperOperator::from_sandwich_sum({{1.0, c}}, "psi");
}

std::pair<HermitianMatrix, HermitianMatrix> psi_decompose(
    const HermitianMatrix& rho, double eps, const ModelParams& p) {
    p.validate();
    if (!(eps > 0.0))
        throw std::invalid_argument("psi_decompose: slack " + fmt_double(eps) +
                                    " must be positive");
    const int d = p.trunc.dim;
    if (rho.dim() != d)
        throw std::invalid_argument("psi_decompose: state dimension " +
                                    std::to_string(rho.dim()) +
                                    ", expected " + std::to_string(d));

    // rho = psi(rho0) with rho0 = (I+n) rho (I+n); conjugating rho0 by
    // (I+tn)(I+n)^{-1} interpolates between rho0 (t=1) and rho (t->0), so its
    // trace norm reaches ||rho||_1 + eps after finitely many halvings of t.
    Eigen::VectorXd lift(d), scale_t(d);
    for (int n = 0; n < d; ++n) lift(n) = 1.0 + n;
    const Eigen::MatrixXcd rho0 =
        lift.asDiagonal() * rho.entries() * lift.asDiagonal();

    const double target = trace_norm(rho) + eps;
    double t = 1.0;
    HermitianMatrix rho_t = HermitianMatrix::zero(d);
    bool found = false;
    for (int iter = 0; iter < 200; ++iter) {
        for (int n = 0; n < d; ++n) scale_t(n) = (1.0 + t * n) / (1.0 + n);
        rho_t = HermitianMatrix(scale_t.asDiagonal() * rho0 *
                                scale_t.asDiagonal());
        if (trace_norm(rho_t) <= target) {
            found = true;
            break;
        }
        t /= 2.0;
    }
    if (!found)
        throw std::runtime_error(
            "psi_decompose: trace-norm target not reached after 200 "
            "bisections (slack " +
            fmt_double(eps) + ")");

    const JordanParts parts = jordan_decompose(rho_t);
    Eigen::VectorXd unscale(d);
    for (int n = 0; n < d; ++n) unscale(n) = 1.0 / (1.0 + t * n);
    const auto conjugate_back = [&](const HermitianMatrix& part) {
        return HermitianMatrix(unscale.asDiagonal() * part.entries() *
                               unscale.asDiagonal());
    };
    return {conjugate_back(parts.positive), conjugate_back(parts.negative)};
}

HermitianMatrix stationary_state(const SuperOperator& generator) {
    const int d = generator.state_dim();
    struct Candidate {
        double magnitude;
        std::complex<double> value;
        const std::vector<int>* comp;
        Eigen::VectorXcd vec;
    };
    Candidate best{std::numeric_limits<double>::infinity(), 0.0, nullptr, {}};
    double second = std::numeric_limits<double>::infinity();

    for (const auto& comp : generator.components()) {
        Eigen::VectorXcd values;
        Eigen::MatrixXcd vectors;
        if (comp.size() == 1) {
            values = Eigen::VectorXcd::Constant(
                1, generator.matrix()(comp[0], comp[0]));
            vectors = Eigen::MatrixXcd::Identity(1, 1);
        } else {
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(
                gather(generator.matrix(), comp));
            if (eig.info() != Eigen::Success)
                throw std::runtime_error(
                    "stationary_state: eigensolver failed on a block of "
                    "size " +
                    std::to_string(comp.size()));
            values = eig.eigenvalues();
            vectors = eig.eigenvectors();
        }
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            const double mag = std::abs(values(i));
            if (mag < best.magnitude) {
                second = best.magnitude;
                best = {mag, values(i), &comp, vectors.col(i)};
            } else if (mag < second) {
                second = mag;
            }
        }
    }
    if (best.comp == nullptr)
        throw std::runtime_error("stationary_state: empty generator");
    if (second < 1e-8)
        throw std::runtime_error(
            "stationary_state: near-kernel is not one-dimensional "
            "(|lambda_0| = " +
            fmt_double(best.magnitude) + ", |lambda_1| = " + fmt_double(second) +
            ")");

    // Inverse iteration with a tiny shift sharpens the eigenvector to the
    // kernel far beyond the plain eigensolver's accuracy.
    Eigen::MatrixXcd a = gather(generator.matrix(), *best.comp);
    a.diagonal().array() -= best.value + std::complex<double>(1e-13, 0.0);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd v = best.vec;
    for (int sweep = 0; sweep < 8; ++sweep) {
        v = lu.solve(v);
        const double n = v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            v = best.vec;
            break;
        }
        v /= n;
    }

    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(
        static_cast<Eigen::Index>(d) * d);
    for (std::size_t i = 0; i < best.comp->size(); ++i)
        y((*best.comp)[i]) = v(static_cast<Eigen::Index>(i));
    Eigen::MatrixXcd m = devectorize(y, d);
    const std::complex<double> tr = m.trace();
    if (std::abs(tr) < 1e-10)
        throw std::runtime_error(
            "stationary_state: kernel vector is traceless; no stationary "
            "state in this direction");
    m /= tr;
    const HermitianMatrix state(0.5 * (m + Eigen::MatrixXcd(m.adjoint())));

    const double residual = trace_norm(apply(generator, state));
    if (residual > 1e-8)
        throw std::runtime_error("stationary_state: residual " +
                                 fmt_double(residual) +
                                 " exceeds 1e-8; generator '" +
                                 generator.label() +
                                 "' may not have a Markov stationary regime");
    const PsdVerdict psd = is_psd(state, 1e-9);
    if (!psd)
        throw std::runtime_error("stationary_state: kernel state fails "
                                 "positivity (min eigenvalue " +
                                 fmt_double(psd.min_eigenvalue) + ")");
    return state;
}

}  // namespace minsemi
