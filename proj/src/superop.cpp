#include "minsemi/superop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "minsemi/rng.hpp"

namespace minsemi {

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}

Eigen::MatrixXcd gather(const Eigen::MatrixXcd& m, const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXcd out(k, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) out(i, j) = m(idx[i], idx[j]);
    return out;
}

Eigen::VectorXcd gather_vec(const Eigen::VectorXcd& x, const std::vector<int>& idx) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = x(idx[i]);
    return out;
}

void scatter_vec(Eigen::VectorXcd& x, const std::vector<int>& idx,
                 const Eigen::VectorXcd& values) {
    for (std::size_t i = 0; i < idx.size(); ++i) x(idx[i]) = values(static_cast<Eigen::Index>(i));
}

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }

    int find(int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Validates the devectorised output of a Hermiticity-preserving map and
// symmetrises away the floating-point remainder.
HermitianMatrix finalize_hermitian(const Eigen::MatrixXcd& y,
                                   const std::string& who, double tol) {
    if (!y.allFinite())
        throw std::runtime_error("superoperator '" + who +
                                 "' produced a non-finite output");
    const double asym = (y - y.adjoint()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
    if (asym > tol * scale)
        throw std::invalid_argument(
            "superoperator '" + who + "' broke Hermiticity: asymmetry " +
            fmt_double(asym) + " exceeds " + fmt_double(tol * scale));
    return HermitianMatrix(0.5 * (y + Eigen::MatrixXcd(y.adjoint())), tol);
}

}  // namespace

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd devectorize(const Eigen::VectorXcd& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim)
        throw std::invalid_argument("devectorize: length " +
                                    std::to_string(v.size()) +
                                    " is not dim^2 for dim " +
                                    std::to_string(dim));
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), dim, dim);
}

bool preserves_hermiticity(const Eigen::MatrixXcd& m, int state_dim,
                           double tol) {
    const Eigen::Index vd = m.rows();
    if (m.cols() != vd || vd != static_cast<Eigen::Index>(state_dim) * state_dim)
        throw std::invalid_argument("preserves_hermiticity: matrix is " +
                                    std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) +
                                    ", expected side " +
                                    std::to_string(state_dim * state_dim));
    const auto perm = [state_dim](Eigen::Index i) {
        return (i % state_dim) * state_dim + i / state_dim;
    };
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < vd; ++j) {
        const Eigen::Index pj = perm(j);
        for (Eigen::Index i = 0; i < vd; ++i) {
            if (std::abs(m(perm(i), pj) - std::conj(m(i, j))) > tol * scale)
                return false;
        }
    }
    return true;
}

SuperOperator::SuperOperator(Eigen::MatrixXcd m, int state_dim,
                             std::string label)
    : matrix_(std::move(m)), state_dim_(state_dim), label_(std::move(label)) {
    const int vd = static_cast<int>(matrix_.rows());
    UnionFind uf(vd);
    for (int j = 0; j < vd; ++j)
        for (int i = 0; i < vd; ++i)
            if (matrix_(i, j) != 0.0 && i != j) uf.unite(i, j);
    std::vector<std::vector<int>> buckets(vd);
    for (int i = 0; i < vd; ++i) buckets[uf.find(i)].push_back(i);
    for (auto& b : buckets)
        if (!b.empty()) components_.push_back(std::move(b));
}

SuperOperator SuperOperator::from_matrix(Eigen::MatrixXcd m, std::string label,
                                         bool check, double tol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("superoperator '" + label +
                                    "': matrix is not square (" +
                                    std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ")");
    const auto side = m.rows();
    const int state_dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(side))));
    if (static_cast<Eigen::Index>(state_dim) * state_dim != side)
        throw std::invalid_argument("superoperator '" + label + "': side " +
                                    std::to_string(side) +
                                    " is not a perfect square");
    if (check && !preserves_hermiticity(m, state_dim, tol))
        throw std::invalid_argument(
            "superoperator '" + label +
            "' does not preserve Hermiticity (vec-transpose identity fails)");
    return SuperOperator(std::move(m), state_dim, std::move(label));
}

SuperOperator SuperOperator::from_sandwich_sum(
    const std::vector<SandwichTerm>& terms, std::string label) {
    if (terms.empty())
        throw std::invalid_argument("superoperator '" + label +
                                    "': sandwich sum needs at least one term");
    const Eigen::Index d = terms.front().left.rows();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (const auto& t : terms) {
        if (t.left.rows() != d || t.left.cols() != d || t.right.rows() != d ||
            t.right.cols() != d)
            throw std::invalid_argument(
                "superoperator '" + label +
                "': sandwich factors must all be square of size " +
                std::to_string(d));
        m.noalias() += kron(t.right.conjugate(), t.left);
    }
    return SuperOperator(std::move(m), static_cast<int>(d), std::move(label));
}

SuperOperator SuperOperator::from_sandwich_sum(
    const std::vector<std::pair<double, Eigen::MatrixXcd>>& terms,
    std::string label) {
    std::vector<SandwichTerm> expanded;
    expanded.reserve(terms.size());
    for (const auto& [c, v] : terms) {
        if (!(c >= 0.0))
            throw std::invalid_argument("superoperator '" + label +
                                        "': sandwich coefficient " +
                                        fmt_double(c) + " is negative");
        expanded.push_back({c * v, v});
    }
    return from_sandwich_sum(expanded, std::move(label));
}

SuperOperator SuperOperator::from_left_right(const Eigen::MatrixXcd& a,
                                             std::string label) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("superoperator '" + label +
                                    "': factor is not square");
    const Eigen::Index d = a.rows();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd m = kron(eye, a);
    m.noalias() += kron(a.conjugate(), eye);
    return SuperOperator(std::move(m), static_cast<int>(d), std::move(label));
}

SuperOperator SuperOperator::zero(int state_dim) {
    return SuperOperator(
        Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(state_dim) * state_dim,
                               static_cast<Eigen::Index>(state_dim) * state_dim),
        state_dim, "0");
}

SuperOperator SuperOperator::identity(int state_dim) {
    return SuperOperator(
        Eigen::MatrixXcd::Identity(
            static_cast<Eigen::Index>(state_dim) * state_dim,
            static_cast<Eigen::Index>(state_dim) * state_dim),
        state_dim, "I");
}

SuperOperator SuperOperator::trace_adjoint() const {
    return SuperOperator(matrix_.adjoint(), state_dim_, label_ + "*");
}

Eigen::VectorXcd SuperOperator::apply_vec(const Eigen::VectorXcd& x) const {
    if (x.size() != matrix_.rows())
        throw std::invalid_argument("superoperator '" + label_ +
                                    "': input length " +
                                    std::to_string(x.size()) + ", expected " +
                                    std::to_string(matrix_.rows()));
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    for (const auto& comp : components_) {
        if (comp.size() == 1) {
            const int i = comp.front();
            y(i) = matrix_(i, i) * x(i);
            continue;
        }
        scatter_vec(y, comp, gather(matrix_, comp) * gather_vec(x, comp));
    }
    return y;
}

SuperOperator operator+(const SuperOperator& a, const SuperOperator& b) {
    if (a.vec_dim() != b.vec_dim())
        throw std::invalid_argument("superoperator sum: '" + a.label() +
                                    "' and '" + b.label() +
                                    "' act on different spaces");
    return SuperOperator(a.matrix_ + b.matrix_, a.state_dim_,
                         "(" + a.label_ + "+" + b.label_ + ")");
}

SuperOperator operator-(const SuperOperator& a, const SuperOperator& b) {
    if (a.vec_dim() != b.vec_dim())
        throw std::invalid_argument("superoperator difference: '" + a.label() +
                                    "' and '" + b.label() +
                                    "' act on different spaces");
    return SuperOperator(a.matrix_ - b.matrix_, a.state_dim_,
                         "(" + a.label_ + "-" + b.label_ + ")");
}

SuperOperator operator*(double c, const SuperOperator& s) {
    return SuperOperator(c * s.matrix_, s.state_dim_,
                         fmt_double(c) + "*" + s.label_);
}

SuperOperator compose(const SuperOperator& a, const SuperOperator& b) {
    if (a.vec_dim() != b.vec_dim())
        throw std::invalid_argument("superoperator composition: '" + a.label() +
                                    "' and '" + b.label() +
                                    "' act on different spaces");
    return SuperOperator(a.matrix_ * b.matrix_, a.state_dim_,
                         "compose(" + a.label_ + "," + b.label_ + ")");
}

HermitianMatrix apply(const SuperOperator& s, const HermitianMatrix& u,
                      double tol) {
    if (u.dim() != s.state_dim())
        throw std::invalid_argument("superoperator '" + s.label() +
                                    "': input dimension " +
                                    std::to_string(u.dim()) + ", expected " +
                                    std::to_string(s.state_dim()));
    const Eigen::VectorXcd y = s.apply_vec(vectorize(u.entries()));
    return finalize_hermitian(devectorize(y, s.state_dim()), s.label(), tol);
}

ProbeReport positivity_probe(const SuperOperator& s, int samples,
                             std::uint64_t seed) {
    if (samples < 0)
        throw std::invalid_argument("positivity_probe: negative sample count");
    const int d = s.state_dim();
    Rng rng(seed);
    ProbeReport report;
    report.seed = seed;
    report.worst_min_eigenvalue = std::numeric_limits<double>::infinity();

    const auto feed = [&](const HermitianMatrix& input) {
        const HermitianMatrix out = apply(s, input);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(
            out.entries(), Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        if (lo < report.worst_min_eigenvalue) {
            report.worst_min_eigenvalue = lo;
            report.witness_input = input.entries();
        }
        ++report.samples;
    };

    for (int k = 0; k < d; ++k) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
        e(k) = 1.0;
        feed(HermitianMatrix::outer(e));
    }
    for (int k = 0; k < samples; ++k) feed(rng.psd_state(d, d, 1 + k % d));
    return report;
}

NormProbe induced_trace_norm_probe(const SuperOperator& s, int samples,
                                   std::uint64_t seed) {
    if (samples < 0)
        throw std::invalid_argument(
            "induced_trace_norm_probe: negative sample count");
    const int d = s.state_dim();
    Rng rng(seed);
    NormProbe probe;
    probe.seed = seed;

    const auto objective = [&](const Eigen::VectorXcd& v) {
        ++probe.samples;
        return trace_norm(apply(s, HermitianMatrix::outer(v)));
    };
    const auto consider = [&](const Eigen::VectorXcd& v) {
        const double f = objective(v);
        if (f > probe.lower_bound) {
            probe.lower_bound = f;
            probe.witness = v;
        }
        return f;
    };

    for (int k = 0; k < d; ++k) {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(d);
        e(k) = 1.0;
        consider(e);
    }
    for (int k = 0; k < samples; ++k) consider(rng.unit_vector(d));

    // Alternating ascent from the best input found so far. The objective is
    // nondecreasing step to step, so the loop exits once improvement stalls.
    const SuperOperator adj = s.trace_adjoint();
    Eigen::VectorXcd v = probe.witness;
    double current = probe.lower_bound;
    for (int step = 0; step < 30; ++step) {
        const HermitianMatrix x = apply(s, HermitianMatrix::outer(v));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> xeig(x.entries());
        Eigen::VectorXd signs = xeig.eigenvalues();
        for (Eigen::Index i = 0; i < signs.size(); ++i)
            signs(i) = signs(i) < 0.0 ? -1.0 : 1.0;
        const Eigen::MatrixXcd u_sign = xeig.eigenvectors() *
                                        signs.asDiagonal() *
                                        xeig.eigenvectors().adjoint();
        const Eigen::MatrixXcd m =
            devectorize(adj.apply_vec(vectorize(u_sign)), d);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> meig(
            0.5 * (m + Eigen::MatrixXcd(m.adjoint())));
        v = meig.eigenvectors().col(d - 1);
        ++probe.ascent_steps;
        const double f = consider(v);
        if (f <= current + 1e-12 * (1.0 + current)) break;
        current = f;
    }
    return probe;
}

SuperOperator exponential(const SuperOperator& s, double t) {
    const int vd = s.vec_dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(vd, vd);
    for (const auto& comp : s.components()) {
        const Eigen::MatrixXcd block =
            (t * gather(s.matrix(), comp)).exp();
        if (!block.allFinite())
            throw std::runtime_error(
                "exponential of '" + s.label() + "' overflowed at t=" +
                fmt_double(t) + " on a block of size " +
                std::to_string(comp.size()) +
                "; rescale the time variable and retry");
        for (std::size_t j = 0; j < comp.size(); ++j)
            for (std::size_t i = 0; i < comp.size(); ++i)
                out(comp[i], comp[j]) = block(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j));
    }
    return SuperOperator::from_matrix(
        std::move(out), "exp(" + fmt_double(t) + "*" + s.label() + ")", false);
}

HermitianMatrix exp_apply(const SuperOperator& s, double t,
                          const HermitianMatrix& u, double tol) {
    if (u.dim() != s.state_dim())
        throw std::invalid_argument("exp_apply: input dimension " +
                                    std::to_string(u.dim()) + ", expected " +
                                    std::to_string(s.state_dim()));
    const Eigen::VectorXcd x = vectorize(u.entries());
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    const std::string who = "exp(" + fmt_double(t) + "*" + s.label() + ")";
    for (const auto& comp : s.components()) {
        const Eigen::VectorXcd xb = gather_vec(x, comp);
        if (xb.isZero(0.0)) continue;
        const Eigen::MatrixXcd block = (t * gather(s.matrix(), comp)).exp();
        if (!block.allFinite())
            throw std::runtime_error("exponential of '" + s.label() +
                                     "' overflowed at t=" + fmt_double(t) +
                                     " on a block of size " +
                                     std::to_string(comp.size()) +
                                     "; rescale the time variable and retry");
        scatter_vec(y, comp, block * xb);
    }
    return finalize_hermitian(devectorize(y, s.state_dim()), who, tol);
}

HermitianMatrix resolvent_apply(const SuperOperator& s, double lambda,
                                const HermitianMatrix& u,
                                double rel_residual_tol, double tol) {
    if (u.dim() != s.state_dim())
        throw std::invalid_argument("resolvent_apply: input dimension " +
                                    std::to_string(u.dim()) + ", expected " +
                                    std::to_string(s.state_dim()));
    const std::string who =
        "(" + fmt_double(lambda) + "+" + s.label() + ")^-1";
    const Eigen::VectorXcd b = vectorize(u.entries());
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
    double residual_sq = 0.0;
    double worst_rcond = std::numeric_limits<double>::infinity();
    for (const auto& comp : s.components()) {
        const Eigen::VectorXcd bb = gather_vec(b, comp);
        if (bb.isZero(0.0)) continue;
        const Eigen::Index k = static_cast<Eigen::Index>(comp.size());
        Eigen::MatrixXcd a = gather(s.matrix(), comp);
        a.diagonal().array() += lambda;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        const Eigen::VectorXcd xb = lu.solve(bb);
        worst_rcond = std::min(worst_rcond, lu.rcond());
        residual_sq += (a * xb - bb).squaredNorm();
        scatter_vec(x, comp, xb);
        (void)k;
    }
    const double residual = std::sqrt(residual_sq);
    const double bound = rel_residual_tol * b.norm();
    if (!x.allFinite() || residual > bound)
        throw std::runtime_error(
            "resolvent of '" + s.label() + "' at lambda=" + fmt_double(lambda) +
            " failed: residual " + fmt_double(residual) + " exceeds " +
            fmt_double(bound) + " (worst block reciprocal condition " +
            fmt_double(worst_rcond) + ")");
    return finalize_hermitian(devectorize(x, s.state_dim()), who, tol);
}

HermitianMatrix euler_power(const SuperOperator& s, double t, long n,
                            const HermitianMatrix& u, double tol) {
    if (n < 1)
        throw std::invalid_argument("euler_power: step count " +
                                    std::to_string(n) + " must be positive");
    if (u.dim() != s.state_dim())
        throw std::invalid_argument("euler_power: input dimension " +
                                    std::to_string(u.dim()) + ", expected " +
                                    std::to_string(s.state_dim()));
    const std::string who = "(1+(" + fmt_double(t) + "/" + std::to_string(n) +
                            ")*" + s.label() + ")^-" + std::to_string(n);
    Eigen::VectorXcd x = vectorize(u.entries());
    const double h = t / static_cast<double>(n);

    struct Factor {
        const std::vector<int>* idx;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    };
    std::vector<Factor> factors;
    for (const auto& comp : s.components()) {
        if (gather_vec(x, comp).isZero(0.0)) continue;
        Eigen::MatrixXcd a = h * gather(s.matrix(), comp);
        a.diagonal().array() += 1.0;
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
        if (lu.rcond() < 1e-14)
            throw std::runtime_error(
                "euler_power of '" + s.label() + "': factor 1+(t/n)S is "
                "numerically singular at t/n=" + fmt_double(h) +
                " (reciprocal condition " + fmt_double(lu.rcond()) +
                "); increase the step count");
        factors.push_back({&comp, std::move(lu)});
    }
    for (long step = 0; step < n; ++step)
        for (const auto& f : factors)
            scatter_vec(x, *f.idx, f.lu.solve(gather_vec(x, *f.idx)));
    return finalize_hermitian(devectorize(x, s.state_dim()), who, tol);
}

}  // namespace minsemi
