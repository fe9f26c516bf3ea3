// evolve.hpp: Propagation of density matrices under d|rho)/dt = Lambda |rho)

#pragma once

#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "purestat/liouville.hpp"
#include "purestat/steady.hpp"
#include "purestat/types.hpp"

namespace purestat {

namespace method {
struct Expm {};
struct Rk4 {
    double dt{0.0}; // <= 0 selects min(0.01, 0.1 / ||Lambda||_2)
};
} // namespace method

using EvolveMethod = std::variant<method::Expm, method::Rk4>;

inline constexpr double kMaxEigenvectorCondition = 1e8;

/// Power-iteration estimate of the spectral norm.
inline double spectral_norm_estimate(const SuperOp& lambda, int iterations = 60) {
    const Eigen::Index n = lambda.size();
    if (n == 0) return 0.0;
    Vector x = Vector::Constant(n, cplx{1.0 / std::sqrt(static_cast<double>(n))});
    for (Eigen::Index i = 0; i < n; ++i) x(i) *= cplx{1.0, 0.37 * std::sin(1.0 + static_cast<double>(i))};
    x.normalize();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const Vector y = lambda.mat.adjoint() * (lambda.mat * x);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        est = std::sqrt(ny);
        x = y / ny;
    }
    return est;
}

inline double default_rk4_dt(const SuperOp& lambda) {
    const double norm = spectral_norm_estimate(lambda);
    return norm > 0.0 ? std::min(0.01, 0.1 / norm) : 0.01;
}

/// exp(Lambda t) with a reusable factorization. Diagonalizes Lambda when the
/// eigenvector matrix has condition number <= 1e8, otherwise falls back to
/// Pade scaling-and-squaring at every requested time.
class ExpmPropagator {
public:
    explicit ExpmPropagator(SuperOp lambda) : lambda_(std::move(lambda)) {
        if (!lambda_.mat.allFinite()) throw Error(ErrorKind::NonFiniteState, "generator has non-finite entries");
        Eigen::ComplexEigenSolver<Matrix> es(lambda_.mat);
        if (es.info() == Eigen::Success) {
            const Matrix& v = es.eigenvectors();
            Eigen::JacobiSVD<Matrix> svd(v);
            const RealVector& s = svd.singularValues();
            const double smin = s(s.size() - 1);
            condition_ = smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
            if (condition_ <= kMaxEigenvectorCondition) {
                values_ = es.eigenvalues();
                vectors_ = v;
                lu_.compute(v);
                diagonalized_ = true;
            }
        }
    }

    bool diagonalized() const { return diagonalized_; }
    double eigenvector_condition() const { return condition_; }
    const SuperOp& generator() const { return lambda_; }

    LVec apply(const LVec& v0, double t) const {
        if (t == 0.0) return v0;
        Vector out;
        if (diagonalized_) {
            Vector c = lu_.solve(v0.vec);
            for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(values_(i) * t);
            out = vectors_ * c;
        } else {
            const Matrix e = (lambda_.mat * t).exp();
            out = e * v0.vec;
        }
        if (!out.allFinite()) throw Error(ErrorKind::NonFiniteState, "state became non-finite at t = " + std::to_string(t));
        return LVec(std::move(out));
    }

private:
    SuperOp lambda_;
    bool diagonalized_{false};
    double condition_{std::numeric_limits<double>::infinity()};
    Vector values_;
    Matrix vectors_;
    Eigen::PartialPivLU<Matrix> lu_;
};

namespace detail {

inline Vector rk4_advance(const Matrix& lam, Vector x, double t, double dt) {
    if (t <= 0.0) return x;
    const auto steps = static_cast<long>(std::ceil(t / dt - 1e-12));
    const double h = t / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
        const Vector k1 = lam * x;
        const Vector k2 = lam * (x + 0.5 * h * k1);
        const Vector k3 = lam * (x + 0.5 * h * k2);
        const Vector k4 = lam * (x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!x.allFinite()) throw Error(ErrorKind::NonFiniteState, "rk4 state became non-finite");
    return x;
}

} // namespace detail

inline Op propagate(const SuperOp& lambda, const Op& rho0, double t, const EvolveMethod& m = method::Expm{}) {
    if (!(t >= 0.0)) throw Error(ErrorKind::InvalidSpec, "propagate: t must be >= 0");
    const LVec v0 = vectorize(rho0);
    require_same_dim(lambda.mat.cols(), v0.size(), "propagate");
    if (t == 0.0) return rho0;
    if (const auto* rk = std::get_if<method::Rk4>(&m)) {
        const double dt = rk->dt > 0.0 ? rk->dt : default_rk4_dt(lambda);
        return devectorize(LVec(detail::rk4_advance(lambda.mat, v0.vec, t, dt)));
    }
    return devectorize(ExpmPropagator(lambda).apply(v0, t));
}

struct TrajectoryPoint {
    cplx trace{0.0};
    double purity_defect{0.0};
    double min_eigenvalue{0.0};
    cplx energy{0.0};
    double residual{0.0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Op> states;
    std::vector<TrajectoryPoint> diagnostics;
};

inline TrajectoryPoint diagnose(const SuperOp& lambda, const Op& rho, const Op* h) {
    TrajectoryPoint p;
    const Matrix herm = 0.5 * (rho.mat + rho.mat.adjoint());
    p.trace = rho.mat.trace();
    p.purity_defect = (herm * herm - herm).norm();
    p.min_eigenvalue = min_eigenvalue_hermitian_part(rho.mat);
    if (h != nullptr) p.energy = (h->mat * herm).trace();
    p.residual = residual(lambda, rho);
    return p;
}

/// States on an increasing time grid. Stops at the first non-finite state,
/// returning what was computed so far together with the error.
struct TrajectoryResult {
    Trajectory trajectory;
    std::optional<Error> failure;
};

inline TrajectoryResult trajectory_checked(const SuperOp& lambda, const Op& rho0, const std::vector<double>& t_grid,
                                           const EvolveMethod& m = method::Expm{}, const Op* h = nullptr) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] >= 0.0) || (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
            throw Error(ErrorKind::InvalidSpec, "time grid must be non-negative and strictly increasing");
        }
    }
    const LVec v0 = vectorize(rho0);
    require_same_dim(lambda.mat.cols(), v0.size(), "trajectory");
    TrajectoryResult out;
    auto record = [&](double t, const Vector& v) {
        Op rho = devectorize(LVec(v));
        out.trajectory.times.push_back(t);
        out.trajectory.diagnostics.push_back(diagnose(lambda, rho, h));
        out.trajectory.states.push_back(std::move(rho));
    };
    try {
        if (const auto* rk = std::get_if<method::Rk4>(&m)) {
            const double dt = rk->dt > 0.0 ? rk->dt : default_rk4_dt(lambda);
            Vector x = v0.vec;
            double t_prev = 0.0;
            for (double t : t_grid) {
                x = detail::rk4_advance(lambda.mat, x, t - t_prev, dt);
                t_prev = t;
                record(t, x);
            }
        } else {
            const ExpmPropagator prop(lambda);
            for (double t : t_grid) record(t, prop.apply(v0, t).vec);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFiniteState) throw;
        out.failure = e;
    }
    return out;
}

inline Trajectory trajectory(const SuperOp& lambda, const Op& rho0, const std::vector<double>& t_grid,
                             const EvolveMethod& m = method::Expm{}, const Op* h = nullptr) {
    TrajectoryResult r = trajectory_checked(lambda, rho0, t_grid, m, h);
    if (r.failure) throw *r.failure;
    return std::move(r.trajectory);
}

struct ConvergenceResult {
    Op state;
    bool converged{false};
    double t_reached{0.0};
    double residual{0.0};
};

/// Checks residual(Lambda, rho_t) at t_max / 2^(checkpoints-1), ..., t_max / 2, t_max.
inline ConvergenceResult converge_to_steady(const SuperOp& lambda, const Op& rho0, double t_max, double tol,
                                            int checkpoints, const EvolveMethod& m = method::Expm{}) {
    if (!(t_max > 0.0)) throw Error(ErrorKind::InvalidSpec, "converge_to_steady: t_max must be positive");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidSpec, "converge_to_steady: tol must be positive");
    if (checkpoints < 2) throw Error(ErrorKind::InvalidSpec, "converge_to_steady: checkpoints must be >= 2");
    std::vector<double> schedule;
    for (int k = checkpoints - 1; k >= 0; --k) schedule.push_back(t_max / std::ldexp(1.0, k));

    std::optional<ExpmPropagator> prop;
    if (std::holds_alternative<method::Expm>(m)) prop.emplace(lambda);
    const LVec v0 = vectorize(rho0);

    ConvergenceResult out;
    for (double t : schedule) {
        out.state = prop ? devectorize(prop->apply(v0, t)) : propagate(lambda, rho0, t, m);
        out.t_reached = t;
        out.residual = residual(lambda, out.state);
        if (out.residual <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

} // namespace purestat
