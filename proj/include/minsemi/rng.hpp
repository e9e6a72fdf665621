#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "minsemi/hermitian.hpp"

namespace minsemi {

// Deterministic sample source. Uniforms are derived from raw mt19937_64 words
// and gaussians via Box-Muller, avoiding std::*_distribution whose output is
// implementation-defined; identical seeds give identical streams on every
// platform, which the reproducibility contract of the report files relies on.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    std::complex<double> cgaussian() {
        double re = gaussian();
        double im = gaussian();
        return {re, im};
    }

    // Unit vector supported on levels 0..support-1 (whole space when support
    // <= 0), embedded in dimension dim.
    Eigen::VectorXcd unit_vector(int dim, int support = -1) {
        if (support <= 0 || support > dim) support = dim;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        for (int i = 0; i < support; ++i) v(i) = cgaussian();
        double n = v.norm();
        if (n == 0.0) v(0) = 1.0, n = 1.0;
        return v / n;
    }

    // Trace-one PSD state of the given rank supported on levels
    // 0..support-1, embedded in dimension dim.
    HermitianMatrix psd_state(int dim, int support, int rank) {
        if (support <= 0 || support > dim) support = dim;
        if (rank <= 0 || rank > support) rank = support;
        Eigen::MatrixXcd x(support, rank);
        for (int i = 0; i < support; ++i)
            for (int j = 0; j < rank; ++j) x(i, j) = cgaussian();
        Eigen::MatrixXcd g = x * x.adjoint();
        g /= g.trace().real();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        m.topLeftCorner(support, support) = g;
        return HermitianMatrix(m);
    }

    // Gaussian Hermitian matrix supported on levels 0..support-1, normalised
    // to unit trace norm.
    HermitianMatrix hermitian_state(int dim, int support) {
        if (support <= 0 || support > dim) support = dim;
        Eigen::MatrixXcd x(support, support);
        for (int i = 0; i < support; ++i)
            for (int j = 0; j < support; ++j) x(i, j) = cgaussian();
        Eigen::MatrixXcd h = 0.5 * (x + x.adjoint());
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        m.topLeftCorner(support, support) = h;
        HermitianMatrix out(m);
        double n = trace_norm(out);
        return n > 0.0 ? out * (1.0 / n) : out;
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace minsemi
