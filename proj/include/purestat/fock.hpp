// fock.hpp: Truncated Fock-space matrices for oscillator-type Hamiltonians

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

#include "purestat/types.hpp"

namespace purestat {

inline constexpr double kHermitianTol = 1e-10;

struct HilbertParams {
    int dim{32};
    double hbar{1.0};
    double mass{1.0};
    double omega{1.0};

    void validate() const {
        if (dim < 2) throw Error(ErrorKind::InvalidSpec, "dim must be >= 2");
        if (!(hbar > 0.0) || !(mass > 0.0) || !(omega > 0.0)) {
            throw Error(ErrorKind::InvalidSpec, "hbar, mass and omega must be positive");
        }
    }

    /// Highest Fock level whose matrix elements are unaffected by the cutoff.
    int trusted_max_level(int pad = 4) const { return std::max(0, dim - pad); }
};

/// Parameters of the anharmonic oscillator with friction. Delta is always
/// recomputed from the stored Omega.
struct NonlinearParams {
    double Omega{1.0};
    double gamma{0.0};
    double beta{0.0};
    double Delta{0.0};

    static NonlinearParams from_omega(const HilbertParams& hp, double Omega, double gamma, double beta) {
        if (!(Omega > 0.0)) throw Error(ErrorKind::InvalidSpec, "Omega must be positive");
        return NonlinearParams{Omega, gamma, beta, Omega * Omega - hp.omega * hp.omega};
    }

    static NonlinearParams from_delta(const HilbertParams& hp, double Delta, double gamma, double beta) {
        const double omega_sq = hp.omega * hp.omega + Delta;
        if (!(omega_sq > 0.0)) {
            throw Error(ErrorKind::InvalidSpec, "omega^2 + Delta must be positive (Omega real)");
        }
        return from_omega(hp, std::sqrt(omega_sq), gamma, beta);
    }
};

struct CouplingParams {
    double lambda_coupling{0.0};
};

/// Annihilation and creation operators: a(n-1, n) = sqrt(n).
inline std::pair<Op, Op> ladder(const HilbertParams& hp) {
    hp.validate();
    Matrix a = Matrix::Zero(hp.dim, hp.dim);
    for (int n = 1; n < hp.dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix ad = a.adjoint();
    return {Op(std::move(a), "a"), Op(std::move(ad), "a^dag")};
}

inline std::pair<Op, Op> position_momentum(const HilbertParams& hp) {
    auto [a, ad] = ladder(hp);
    const double xs = std::sqrt(hp.hbar / (2.0 * hp.mass * hp.omega));
    const double ps = std::sqrt(hp.hbar * hp.mass * hp.omega / 2.0);
    Op q(xs * (a.mat + ad.mat), "q");
    Op p(I_unit * ps * (ad.mat - a.mat), "p");
    return {std::move(q), std::move(p)};
}

enum class OscillatorMode { exact_diagonal, from_qp };

/// Linear oscillator. exact_diagonal is the cutoff-free spectrum hbar*omega*(n+1/2);
/// from_qp squares the truncated q and p and is wrong in the last row.
inline Op oscillator_hamiltonian(const HilbertParams& hp,
                                 OscillatorMode mode = OscillatorMode::exact_diagonal) {
    hp.validate();
    if (mode == OscillatorMode::exact_diagonal) {
        Matrix h = Matrix::Zero(hp.dim, hp.dim);
        for (int n = 0; n < hp.dim; ++n) h(n, n) = hp.hbar * hp.omega * (n + 0.5);
        return Op(std::move(h), "H");
    }
    auto [q, p] = position_momentum(hp);
    Matrix h = p.mat * p.mat / (2.0 * hp.mass) +
               0.5 * hp.mass * hp.omega * hp.omega * q.mat * q.mat;
    return Op(std::move(h), "H");
}

inline Op nonlinear_hamiltonian(const HilbertParams& hp, const NonlinearParams& nl) {
    auto [q, p] = position_momentum(hp);
    const Matrix q2 = q.mat * q.mat;
    Matrix h = p.mat * p.mat / (2.0 * hp.mass) + 0.5 * hp.mass * nl.Omega * nl.Omega * q2 +
               0.5 * nl.gamma * q2 * q2;
    return Op(std::move(h), "H_nl");
}

/// p^2/2m + m w^2 q^2/2 + (lambda/2)(qp + pq).
inline Op squeezed_hamiltonian(const HilbertParams& hp, const CouplingParams& cp) {
    auto [q, p] = position_momentum(hp);
    Matrix h = p.mat * p.mat / (2.0 * hp.mass) +
               0.5 * hp.mass * hp.omega * hp.omega * q.mat * q.mat +
               0.5 * cp.lambda_coupling * (q.mat * p.mat + p.mat * q.mat);
    return Op(std::move(h), "H_sq");
}

inline double hermiticity_defect(const Matrix& a) { return (a - a.adjoint()).norm(); }

inline void require_hermitian(const Op& a, const char* where, double tol = kHermitianTol) {
    const double defect = hermiticity_defect(a.mat);
    if (!(defect <= tol)) {
        throw Error(ErrorKind::NotHermitian,
                    std::string(where) + ": ||A - A^dag|| = " + std::to_string(defect));
    }
}

struct Eigensystem {
    RealVector values; // ascending
    Matrix vectors;    // columns; largest-magnitude component made real positive
};

inline Eigensystem eigendecompose(const Op& a) {
    require_hermitian(a, "eigendecompose");
    const Matrix herm = 0.5 * (a.mat + a.mat.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NotHermitian, "eigendecompose: solver did not converge");
    }
    Eigensystem es{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index k = 0; k < es.vectors.cols(); ++k) {
        Eigen::Index imax = 0;
        es.vectors.col(k).cwiseAbs().maxCoeff(&imax);
        const cplx c = es.vectors(imax, k);
        es.vectors.col(k) *= std::conj(c) / std::abs(c);
    }
    return es;
}

/// Pure state |n><n| of the Fock basis.
inline Op fock_projector(Eigen::Index d, Eigen::Index n) {
    Op rho = Op::ket_bra(d, n, n);
    rho.label = "rho_" + std::to_string(n);
    return rho;
}

} // namespace purestat
