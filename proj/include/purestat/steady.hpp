// steady.hpp: Null spaces of generators with per-state diagnostics, and the zeros
// of N(E, E) matched against the spectrum of H

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/SVD>

#include "purestat/fock.hpp"
#include "purestat/liouville.hpp"
#include "purestat/types.hpp"

namespace purestat {

inline constexpr int kMaxSteadyDim = 48;
inline constexpr double kTracelessTol = 1e-8;

struct StateDiagnostics {
    double residual{0.0};
    cplx trace{0.0};
    double purity_defect{0.0}; // NaN for traceless coherences
    double min_eigenvalue{0.0};
    cplx energy{0.0};
    bool traceless{false};
    Op state; // Hermitized, trace-normalized unless traceless
};

struct SteadyReport {
    std::vector<double> singular_values; // ascending
    int null_dim{0};
    std::vector<LVec> basis;             // orthonormal
    std::vector<StateDiagnostics> per_state;
};

/// ||Lambda |rho)||_2
inline double residual(const SuperOp& lambda, const Op& rho) {
    const LVec v = vectorize(rho);
    require_same_dim(lambda.mat.cols(), v.size(), "residual");
    return (lambda.mat * v.vec).norm();
}

/// Tr(H rho).
inline cplx energy(const Op& rho, const Op& h) {
    require_same_dim(rho.dim(), h.dim(), "energy");
    return (h.mat * rho.mat).trace();
}

inline double min_eigenvalue_hermitian_part(const Matrix& rho) {
    const Matrix herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

struct PurityCheck {
    bool pure{false};
    double hermiticity_defect{0.0};
    double trace_defect{0.0};
    double purity_defect{0.0}; // ||rho^2 - rho||_F
    double min_eigenvalue{0.0};
};

inline PurityCheck is_pure(const Op& rho, double tol) {
    PurityCheck c;
    c.hermiticity_defect = hermiticity_defect(rho.mat);
    c.trace_defect = std::abs(rho.mat.trace() - 1.0);
    c.purity_defect = (rho.mat * rho.mat - rho.mat).norm();
    c.min_eigenvalue = min_eigenvalue_hermitian_part(rho.mat);
    c.pure = c.hermiticity_defect <= tol && c.trace_defect <= tol && c.purity_defect <= tol &&
             c.min_eigenvalue >= -tol;
    return c;
}

namespace detail {

/// Global phase that makes an operator as Hermitian as possible: real positive
/// trace when the trace is non-negligible, else e^{2i phi} Tr(X^2) real positive.
inline Vector fix_phase(const Vector& v) {
    const Op x = devectorize(LVec(v));
    const cplx tr = x.mat.trace();
    cplx phase{1.0};
    if (std::abs(tr) > kTracelessTol) {
        phase = std::conj(tr) / std::abs(tr);
    } else {
        const cplx t2 = (x.mat * x.mat).trace();
        if (std::abs(t2) > kTracelessTol) {
            phase = std::exp(-I_unit * 0.5 * std::arg(t2));
        } else {
            Eigen::Index imax = 0;
            v.cwiseAbs().maxCoeff(&imax);
            phase = std::conj(v(imax)) / std::abs(v(imax));
        }
        const Matrix w = devectorize(LVec(phase * v)).mat;
        const Matrix herm = 0.5 * (w + w.adjoint());
        Eigen::Index r = 0, c = 0;
        herm.cwiseAbs().maxCoeff(&r, &c);
        if (herm(r, c).real() < 0.0) phase = -phase;
    }
    return phase * v;
}

/// Rotate an orthonormal null-space basis so that it diagonalizes the
/// compression of G = L^+_H + kappa L_H R_H. Eigenprojectors of H with
/// distinct energies come out as individual basis vectors.
inline Matrix canonical_basis(const Matrix& p, const Op& h) {
    const Eigen::Index d = h.dim();
    const Eigen::Index k = p.cols();
    if (k == 0) return p;
    Eigen::SelfAdjointEigenSolver<Matrix> hs(0.5 * (h.mat + h.mat.adjoint()), Eigen::EigenvaluesOnly);
    const double hnorm = hs.eigenvalues().cwiseAbs().maxCoeff();
    const double kappa = std::sqrt(2.0) / (1.0 + hnorm);
    Matrix gp(d * d, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const Matrix x = devectorize(LVec(p.col(c))).mat;
        const Matrix gx = 0.5 * (h.mat * x + x * h.mat) + kappa * h.mat * x * h.mat;
        gp.col(c) = vectorize(Op(gx)).vec;
    }
    Matrix compressed = p.adjoint() * gp;
    compressed = 0.5 * (compressed + compressed.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(compressed);
    Matrix rotated = p * es.eigenvectors();
    for (Eigen::Index c = 0; c < k; ++c) rotated.col(c) = fix_phase(rotated.col(c));
    return rotated;
}

} // namespace detail

inline StateDiagnostics diagnose_state(const SuperOp& lambda, const LVec& v, const Op* h) {
    StateDiagnostics s;
    s.residual = (lambda.mat * v.vec).norm();
    const Op raw = devectorize(v);
    Op rho(0.5 * (raw.mat + raw.mat.adjoint()));
    const cplx tr = rho.mat.trace();
    if (std::abs(tr) > kTracelessTol) {
        rho.mat /= tr;
        s.trace = tr;
        s.purity_defect = (rho.mat * rho.mat - rho.mat).norm();
    } else {
        s.traceless = true;
        s.trace = tr;
        s.purity_defect = std::numeric_limits<double>::quiet_NaN();
    }
    s.min_eigenvalue = min_eigenvalue_hermitian_part(rho.mat);
    if (h != nullptr) s.energy = energy(rho, *h);
    s.state = std::move(rho);
    return s;
}

/// Null space of Lambda: right singular vectors with sigma <= tol * sigma_max.
/// When h is given, the basis is rotated to diagonalize L^+_H on the null space.
inline SteadyReport stationary_subspace(const SuperOp& lambda, double tol = 1e-9, const Op* h = nullptr) {
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidSpec, "stationary_subspace: tol must be positive");
    const Eigen::Index d = liouville_side(lambda.size());
    if (d > kMaxSteadyDim) {
        throw Error(ErrorKind::InvalidSpec, "stationary_subspace: dense SVD limited to d <= 48");
    }
    if (h != nullptr) require_same_dim(h->dim(), d, "stationary_subspace");
    if (!lambda.mat.allFinite()) throw Error(ErrorKind::SvdFailure, "generator has non-finite entries");

    Eigen::BDCSVD<Matrix> svd(lambda.mat, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw Error(ErrorKind::SvdFailure, "SVD did not converge");
    const RealVector& sv = svd.singularValues(); // descending
    const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);

    SteadyReport report;
    report.singular_values.assign(sv.data(), sv.data() + sv.size());
    std::reverse(report.singular_values.begin(), report.singular_values.end());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= cutoff) ++report.null_dim;

    Matrix null_basis = svd.matrixV().rightCols(report.null_dim);
    null_basis = h != nullptr ? detail::canonical_basis(null_basis, *h) : null_basis;
    for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
        LVec v(null_basis.col(c));
        report.per_state.push_back(diagnose_state(lambda, v, h));
        report.basis.push_back(std::move(v));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Zeros of N(E, E)

struct Interval {
    double lo{0.0};
    double hi{0.0};
};

namespace detail {

inline void require_domain(const Interval& dom) {
    if (!std::isfinite(dom.lo) || !std::isfinite(dom.hi) || !(dom.lo < dom.hi)) {
        throw Error(ErrorKind::InvalidDomain, "domain must be a finite interval with lo < hi");
    }
}

inline std::vector<cplx> diagonal_coefficients(const ScalarBiFunction& f) {
    if (const auto* p = std::get_if<bifunc::Polynomial>(&f)) return p->diagonal();
    if (const auto* a = std::get_if<bifunc::Affine>(&f)) return {a->c0, a->c_left + a->c_right};
    throw Error(ErrorKind::NonPolynomial, "function is not polynomial on the diagonal");
}

inline std::vector<double> dedupe_sorted(std::vector<double> xs, double tol) {
    std::sort(xs.begin(), xs.end());
    std::vector<double> out;
    for (double x : xs)
        if (out.empty() || std::abs(x - out.back()) > tol * std::max(1.0, std::abs(x))) out.push_back(x);
    return out;
}

inline cplx horner(const std::vector<cplx>& c, cplx x) {
    cplx s{0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
    return s;
}

} // namespace detail

namespace detail {

/// sum_k |c_k| |x|^k, the rounding scale of a polynomial evaluation at x.
inline double horner_scale(const std::vector<cplx>& c, double x) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * std::abs(x) + std::abs(*it);
    return s;
}

} // namespace detail

/// Real roots of sum_n c_n E^n inside dom, via the companion matrix.
/// Eigenvalues with |Im z| <= 1e-9 max(1, |z|) are real. A multiple root
/// splits into a cluster of width ~eps^(1/k); cluster members (up to
/// |Im z| <= 1e-6 max(1, |z|)) at which the polynomial vanishes to rounding
/// are merged into their mean.
inline std::vector<double> real_polynomial_roots(std::vector<cplx> c, const Interval& dom) {
    detail::require_domain(dom);
    while (!c.empty() && c.back() == cplx{0.0}) c.pop_back();
    if (c.size() < 2) throw Error(ErrorKind::DegreeTooLow, "polynomial N(E,E) must have degree >= 1");
    const auto n = static_cast<Eigen::Index>(c.size() - 1);
    Matrix comp = Matrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Matrix> es(comp, false);

    std::vector<cplx> deriv;
    for (std::size_t k = 1; k < c.size(); ++k) deriv.push_back(static_cast<double>(k) * c[k]);
    auto negligible = [&](double x) {
        return std::abs(detail::horner(c, x)) <= 1e-12 * detail::horner_scale(c, x);
    };

    std::vector<double> cand;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx z = es.eigenvalues()(i);
        const double scale = std::max(1.0, std::abs(z));
        const double im = std::abs(z.imag());
        if (im > 1e-9 * scale && !(im <= 1e-6 * scale && negligible(z.real()))) continue;
        double x = z.real();
        for (int it = 0; it < 3; ++it) { // Newton polish along the real axis
            const cplx fx = detail::horner(c, x);
            const cplx dfx = detail::horner(deriv, x);
            if (std::abs(dfx) == 0.0) break;
            const double step = (fx / dfx).real();
            if (!std::isfinite(step) || std::abs(step) > 1e-6 * std::max(1.0, std::abs(x))) break;
            x -= step;
        }
        cand.push_back(x);
    }
    std::sort(cand.begin(), cand.end());

    std::vector<double> roots;
    std::size_t i = 0;
    while (i < cand.size()) {
        std::size_t j = i + 1;
        double sum = cand[i];
        while (j < cand.size() && cand[j] - cand[j - 1] <= 1e-6 * std::max(1.0, std::abs(cand[j])) &&
               negligible(0.5 * (cand[j] + cand[j - 1]))) {
            sum += cand[j];
            ++j;
        }
        const double x = sum / static_cast<double>(j - i);
        if (x >= dom.lo && x <= dom.hi) roots.push_back(x);
        i = j;
    }
    return detail::dedupe_sorted(std::move(roots), 1e-9);
}

/// Sign-change scan of Re f on an n-point grid refined by bisection.
inline std::vector<double> scan_roots(const std::function<double(double)>& g, const Interval& dom,
                                      int points = 1024, double xtol = 1e-12) {
    detail::require_domain(dom);
    std::vector<double> roots;
    const double h = (dom.hi - dom.lo) / (points - 1);
    double x0 = dom.lo;
    double g0 = g(x0);
    if (g0 == 0.0) roots.push_back(x0);
    for (int i = 1; i < points; ++i) {
        const double x1 = (i == points - 1) ? dom.hi : dom.lo + i * h;
        const double g1 = g(x1);
        if (g1 == 0.0) {
            roots.push_back(x1);
        } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
            double a = x0, b = x1, ga = g0;
            while (b - a > xtol) {
                const double m = 0.5 * (a + b);
                const double gm = g(m);
                if (gm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        g0 = g1;
    }
    return detail::dedupe_sorted(std::move(roots), 1e-10);
}

/// All real zeros of g(E) = N(E, E) in dom.
inline std::vector<double> roots_of_N(const ScalarBiFunction& f, const Interval& dom) {
    detail::require_domain(dom);
    validate(f);
    if (std::holds_alternative<bifunc::Polynomial>(f) || std::holds_alternative<bifunc::Affine>(f)) {
        return real_polynomial_roots(detail::diagonal_coefficients(f), dom);
    }
    return scan_roots([&f](double e) { return evaluate_diagonal(f, e).real(); }, dom);
}

struct MatchedLevel {
    int n{0};
    double energy{0.0};
    double gap{0.0};
};

struct SpectrumMatch {
    std::vector<double> roots;
    std::vector<std::vector<MatchedLevel>> per_root; // empty entry: unmatched root
    double tol_match{1e-6};

    std::vector<MatchedLevel> levels() const {
        std::vector<MatchedLevel> out;
        for (const auto& r : per_root) out.insert(out.end(), r.begin(), r.end());
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
        return out;
    }
};

inline SpectrumMatch match_spectrum(const std::vector<double>& roots, const Op& h, double tol_match = 1e-6) {
    const Eigensystem es = eigendecompose(h);
    SpectrumMatch sm;
    sm.roots = roots;
    sm.tol_match = tol_match;
    for (double r : roots) {
        std::vector<MatchedLevel> hits;
        for (Eigen::Index n = 0; n < es.values.size(); ++n) {
            const double gap = std::abs(es.values(n) - r);
            if (gap <= tol_match) hits.push_back({static_cast<int>(n), es.values(n), gap});
        }
        sm.per_root.push_back(std::move(hits));
    }
    return sm;
}

/// Eigenprojector u_n u_n^dag of H (the Fock projector for diagonal H).
inline Op eigenprojector(const Eigensystem& es, Eigen::Index n) {
    const Vector u = es.vectors.col(n);
    Op rho(u * u.adjoint());
    rho.label = "rho_" + std::to_string(n);
    return rho;
}

} // namespace purestat
