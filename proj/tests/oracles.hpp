#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// code paths it is used to check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline Matrix annihilation(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int m = 0; m + 1 < dim; ++m) a(m, m + 1) = std::sqrt(static_cast<double>(m + 1));
    return a;
}

// exp(beta a^dag - beta^* a) on a large space, cut back to `dim`.
inline Matrix displacement_expm(Complex beta, int dim, int work_dim) {
    const Matrix a = annihilation(work_dim);
    const Matrix gen = beta * a.adjoint() - std::conj(beta) * a;
    const Matrix full = gen.exp();
    return full.topLeftCorner(dim, dim);
}

// Columns of D(beta) by D|n+1> = (a^dag - beta^*) D|n> / sqrt(n+1) on a
// bigger space, cut back to `dim`.
inline Matrix displacement_columns(Complex beta, int dim, int work_dim) {
    Matrix d = Matrix::Zero(work_dim, dim);
    Eigen::VectorXcd col(work_dim);
    Complex c = std::exp(-0.5 * std::norm(beta));
    for (int m = 0; m < work_dim; ++m) {
        col(m) = c;
        c *= beta / std::sqrt(static_cast<double>(m + 1));
    }
    d.col(0) = col;
    for (int n = 0; n + 1 < dim; ++n) {
        Eigen::VectorXcd next = Eigen::VectorXcd::Zero(work_dim);
        for (int m = 0; m < work_dim; ++m) {
            if (m > 0) next(m) += std::sqrt(static_cast<double>(m)) * d(m - 1, n);
            next(m) -= std::conj(beta) * d(m, n);
        }
        d.col(n + 1) = next / std::sqrt(static_cast<double>(n + 1));
    }
    return d.topRows(dim);
}

// Amplitude damping with survival eta via its Kraus operators.
inline Matrix amplitude_damping_kraus(const Matrix& rho, double eta) {
    const int dim = static_cast<int>(rho.rows());
    Matrix out = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        Matrix k = Matrix::Zero(dim, dim);
        for (int n = j; n < dim; ++n) {
            const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0));
            k(n - j, n) = std::sqrt(binom * std::pow(eta, n - j) * std::pow(1.0 - eta, j));
        }
        out += k * rho * k.adjoint();
    }
    return out;
}

// Wigner function of (|a> + |-a>)/N, normalized so the vacuum gives (2/pi) e^{-2|beta|^2}.
inline double even_cat_wigner(Complex a, Complex beta) {
    const double norm2 = 2.0 * (1.0 + std::exp(-2.0 * std::norm(a)));
    const double direct = std::exp(-2.0 * std::norm(beta - a)) + std::exp(-2.0 * std::norm(beta + a));
    const double cross = 2.0 * std::exp(-2.0 * std::norm(beta)) * std::cos(4.0 * std::imag(std::conj(a) * beta));
    return 2.0 / std::numbers::pi * (direct + cross) / norm2;
}

// Random density matrix G G^dag / tr with G Gaussian, supported on the first `support` levels.
inline Matrix random_density(int dim, int support, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix gm = Matrix::Zero(dim, dim);
    for (int i = 0; i < support; ++i)
        for (int j = 0; j < support; ++j) gm(i, j) = Complex(g(rng), g(rng));
    Matrix r = gm * gm.adjoint();
    return r / r.trace().real();
}

inline Matrix random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng), g(rng));
    return 0.5 * (m + m.adjoint());
}

}  // namespace oracle
