#include "minsemi/fock.hpp"

#include <cmath>
#include <stdexcept>

namespace minsemi {

void TruncationConfig::validate() const {
    if (dim < 2)
        throw std::invalid_argument("TruncationConfig: dim must be >= 2, got " +
                                    std::to_string(dim));
    if (buffer < 0 || buffer > dim - 2)
        throw std::invalid_argument("TruncationConfig: buffer must lie in [0, dim-2], got " +
                                    std::to_string(buffer));
    if (!(psd_tol > 0.0) || !std::isfinite(psd_tol))
        throw std::invalid_argument("TruncationConfig: psd_tol must be positive and finite");
    if (!(eq_tol > 0.0) || !std::isfinite(eq_tol))
        throw std::invalid_argument("TruncationConfig: eq_tol must be positive and finite");
}

FockOperator::FockOperator(Eigen::MatrixXcd m, std::string lab)
    : dim(static_cast<int>(m.rows())), entries(std::move(m)), label(std::move(lab)) {
    if (entries.rows() != entries.cols())
        throw std::invalid_argument("FockOperator '" + label + "': matrix must be square");
    if (!entries.allFinite())
        throw std::invalid_argument("FockOperator '" + label + "': non-finite entries");
}

FockOperator FockOperator::adjoint() const {
    return FockOperator(entries.adjoint(), label + "*");
}

FockOperator annihilation(const TruncationConfig& cfg) {
    cfg.validate();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.dim, cfg.dim);
    for (int n = 1; n < cfg.dim; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
    return FockOperator(std::move(m), "b");
}

FockOperator creation(const TruncationConfig& cfg) {
    FockOperator b = annihilation(cfg);
    return FockOperator(b.entries.adjoint(), "b*");
}

FockOperator number_op(const TruncationConfig& cfg) {
    cfg.validate();
    Eigen::VectorXcd d(cfg.dim);
    for (int n = 0; n < cfg.dim; ++n) d(n) = static_cast<double>(n);
    return FockOperator(d.asDiagonal(), "n");
}

FockOperator hamiltonian(double energy, const TruncationConfig& cfg) {
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw std::invalid_argument("hamiltonian: energy must be positive and finite");
    FockOperator n = number_op(cfg);
    return FockOperator(energy * n.entries, "h");
}

FockOperator projector(int N, const TruncationConfig& cfg) {
    cfg.validate();
    if (N < 0 || N > cfg.dim - 1)
        throw std::out_of_range("projector: N must lie in [0, dim-1], got " + std::to_string(N));
    Eigen::VectorXcd d = Eigen::VectorXcd::Zero(cfg.dim);
    for (int n = 0; n <= N; ++n) d(n) = 1.0;
    return FockOperator(d.asDiagonal(), "P_" + std::to_string(N));
}

FockOperator exp_tilt(double s, const TruncationConfig& cfg) {
    cfg.validate();
    if (s < 0.0 || !std::isfinite(s))
        throw std::invalid_argument("exp_tilt: s must be >= 0 and finite");
    Eigen::VectorXcd d(cfg.dim);
    for (int n = 0; n < cfg.dim; ++n) d(n) = std::exp(-s * n);
    return FockOperator(d.asDiagonal(), "exp(-s n)");
}

FockOperator commutation_defect(const TruncationConfig& cfg) {
    FockOperator b = annihilation(cfg);
    FockOperator bd = creation(cfg);
    Eigen::MatrixXcd m = b.entries * bd.entries - bd.entries * b.entries -
                         Eigen::MatrixXcd::Identity(cfg.dim, cfg.dim);
    return FockOperator(std::move(m), "[b,b*]-I");
}

}  // namespace minsemi
