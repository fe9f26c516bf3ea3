// liouville.hpp: Liouville-space vectorization and the superoperators acting on it,
// from left/right multiplication up to spectral functions of H

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "purestat/fock.hpp"
#include "purestat/types.hpp"

namespace purestat {

// ---------------------------------------------------------------------------
// Vectorization (row-major: flat index i*d + j <-> A(i, j))

inline LVec vectorize(const Op& a) {
    const Eigen::Index d = a.dim();
    require_same_dim(a.mat.rows(), a.mat.cols(), "vectorize");
    Vector v(d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = a.mat(i, j);
    return LVec(std::move(v));
}

inline Eigen::Index liouville_side(Eigen::Index n) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (d * d != n) {
        throw Error(ErrorKind::DimensionMismatch, "length " + std::to_string(n) + " is not a perfect square");
    }
    return d;
}

inline Op devectorize(const LVec& v) {
    const Eigen::Index d = liouville_side(v.size());
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = v.vec(i * d + j);
    return Op(std::move(m));
}

/// (A|B) = Tr(A^dag B).
inline cplx inner(const LVec& a, const LVec& b) {
    require_same_dim(a.size(), b.size(), "inner");
    return a.vec.dot(b.vec); // Eigen's dot conjugates the first argument
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// L_A|B) = |AB): entry ((i,j),(k,l)) = A(i,k) delta(j,l).
inline SuperOp left_mul(const Op& a) {
    const Eigen::Index d = a.dim();
    return SuperOp(kron(a.mat, Matrix::Identity(d, d)));
}

/// R_A|B) = |BA): entry ((i,j),(k,l)) = delta(i,k) A(l,j).
inline SuperOp right_mul(const Op& a) {
    const Eigen::Index d = a.dim();
    return SuperOp(kron(Matrix::Identity(d, d), a.mat.transpose()));
}

/// L^-_A = (1/(i hbar)) (L_A - R_A).
inline SuperOp lie(const Op& a, double hbar = 1.0) {
    return SuperOp((left_mul(a).mat - right_mul(a).mat) / (I_unit * hbar));
}

/// L^+_A = (L_A + R_A) / 2.
inline SuperOp jordan(const Op& a) { return SuperOp(0.5 * (left_mul(a).mat + right_mul(a).mat)); }

/// A.B = (1/(i hbar)) (AB - BA).
inline Op lie_product(const Op& a, const Op& b, double hbar = 1.0) {
    return Op((a.mat * b.mat - b.mat * a.mat) / (I_unit * hbar));
}

/// A o B = (AB + BA) / 2.
inline Op jordan_product(const Op& a, const Op& b) {
    return Op(0.5 * (a.mat * b.mat + b.mat * a.mat));
}

// ---------------------------------------------------------------------------
// Scalar functions N(e_left, e_right) of the commuting pair (L_H, R_H)

namespace bifunc {

/// sum_n sum_{m<=n} a[n][m] e_left^m e_right^(n-m)
struct Polynomial {
    std::vector<std::vector<cplx>> a;

    /// Coefficients alpha_n = sum_m a[n][m] of the diagonal N(E, E).
    std::vector<cplx> diagonal() const {
        std::vector<cplx> alpha(a.size(), cplx{0.0});
        for (std::size_t n = 0; n < a.size(); ++n)
            for (const auto& c : a[n]) alpha[n] += c;
        return alpha;
    }

    /// sum_k c_k (L^+_H)^k expanded with (L^+)^k = 2^-k sum_m C(k,m) L^m R^(k-m).
    static Polynomial from_jordan_powers(const std::vector<double>& c) {
        Polynomial p;
        p.a.resize(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) {
            p.a[k].assign(k + 1, cplx{0.0});
            double binom = 1.0;
            for (std::size_t m = 0; m <= k; ++m) {
                p.a[k][m] = c[k] * binom / std::ldexp(1.0, static_cast<int>(k));
                binom = binom * static_cast<double>(k - m) / static_cast<double>(m + 1);
            }
        }
        return p;
    }

    static Polynomial constant(cplx c) { return Polynomial{{{c}}}; }
};

/// cos(pi / (2 eps0) (e_left + e_right)); on the diagonal cos(pi E / eps0).
struct Cosine {
    double eps0{1.0};
};

/// c0 + c_left e_left + c_right e_right.
struct Affine {
    double c0{0.0};
    double c_left{0.0};
    double c_right{0.0};
};

struct Custom {
    std::function<cplx(double, double)> rule;
    std::string name{"custom"};
};

} // namespace bifunc

using ScalarBiFunction = std::variant<bifunc::Polynomial, bifunc::Cosine, bifunc::Affine, bifunc::Custom>;

inline void validate(const ScalarBiFunction& f) {
    if (const auto* c = std::get_if<bifunc::Cosine>(&f); c && !(c->eps0 > 0.0)) {
        throw Error(ErrorKind::InvalidSpec, "cosine eps0 must be positive");
    }
    if (const auto* p = std::get_if<bifunc::Polynomial>(&f)) {
        if (p->a.empty()) throw Error(ErrorKind::InvalidSpec, "polynomial needs at least a constant term");
        for (std::size_t n = 0; n < p->a.size(); ++n)
            if (p->a[n].size() != n + 1)
                throw Error(ErrorKind::InvalidSpec, "polynomial row n must hold n+1 coefficients");
    }
    if (const auto* c = std::get_if<bifunc::Custom>(&f); c && !c->rule) {
        throw Error(ErrorKind::InvalidSpec, "custom function has no rule");
    }
}

inline cplx evaluate(const ScalarBiFunction& f, double el, double er) {
    struct Visitor {
        double el, er;
        cplx operator()(const bifunc::Polynomial& p) const {
            cplx sum{0.0};
            for (std::size_t n = 0; n < p.a.size(); ++n)
                for (std::size_t m = 0; m < p.a[n].size(); ++m)
                    sum += p.a[n][m] * std::pow(el, static_cast<double>(m)) *
                           std::pow(er, static_cast<double>(n - m));
            return sum;
        }
        cplx operator()(const bifunc::Cosine& c) const {
            return std::cos(std::numbers::pi / (2.0 * c.eps0) * (el + er));
        }
        cplx operator()(const bifunc::Affine& a) const { return a.c0 + a.c_left * el + a.c_right * er; }
        cplx operator()(const bifunc::Custom& c) const { return c.rule(el, er); }
    };
    return std::visit(Visitor{el, er}, f);
}

/// N(E, E).
inline cplx evaluate_diagonal(const ScalarBiFunction& f, double e) { return evaluate(f, e, e); }

/// N(L_H, R_H) by functional calculus in the eigenbasis of H: |u_n><u_m| is
/// scaled by f(E_n, E_m). Costs O(d^5).
inline SuperOp superfunction(const Op& h, const ScalarBiFunction& f) {
    validate(f);
    const Eigensystem es = eigendecompose(h);
    const Eigen::Index d = h.dim();
    const Matrix& u = es.vectors;
    const Matrix u_adj = u.adjoint();

    Matrix fvals(d, d);
    for (Eigen::Index n = 0; n < d; ++n)
        for (Eigen::Index m = 0; m < d; ++m) fvals(n, m) = evaluate(f, es.values(n), es.values(m));

    Matrix out(d * d, d * d);
    for (Eigen::Index k = 0; k < d; ++k) {
        for (Eigen::Index l = 0; l < d; ++l) {
            // U^dag |k><l| U = (column k of U^dag) (row l of U)
            Matrix y = u_adj.col(k) * u.row(l);
            y = y.cwiseProduct(fvals);
            const Matrix z = u * y * u_adj;
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) out(i * d + j, k * d + l) = z(i, j);
        }
    }
    return SuperOp(std::move(out));
}

/// Explicit sum_n sum_m a[n][m] L_H^m R_H^(n-m) built from matrix powers.
inline SuperOp polynomial_superop(const Op& h, const bifunc::Polynomial& p) {
    validate(ScalarBiFunction{p});
    const Eigen::Index d = h.dim();
    const std::size_t deg = p.a.size();
    std::vector<Matrix> lp{Matrix::Identity(d * d, d * d)};
    std::vector<Matrix> rp{Matrix::Identity(d * d, d * d)};
    const Matrix lh = left_mul(h).mat;
    const Matrix rh = right_mul(h).mat;
    for (std::size_t k = 1; k < deg; ++k) {
        lp.push_back(lp.back() * lh);
        rp.push_back(rp.back() * rh);
    }
    Matrix out = Matrix::Zero(d * d, d * d);
    for (std::size_t n = 0; n < deg; ++n)
        for (std::size_t m = 0; m <= n; ++m)
            if (p.a[n][m] != cplx{0.0}) out += p.a[n][m] * lp[m] * rp[n - m];
    return SuperOp(std::move(out));
}

// ---------------------------------------------------------------------------
// Superoperator algebra identities

struct IdentityResidual {
    std::string name;
    double max_residual{0.0};
};

struct AlgebraReport {
    std::vector<IdentityResidual> identities;

    double max_residual() const {
        double r = 0.0;
        for (const auto& i : identities) r = std::max(r, i.max_residual);
        return r;
    }
};

namespace detail {

inline double normalized_residual(const Matrix& lhs, const Matrix& rhs) {
    const double diff = (lhs - rhs).norm();
    const double scale = lhs.norm();
    return scale > 0.0 ? diff / scale : diff;
}

} // namespace detail

inline const std::vector<std::string>& algebra_identity_names() {
    static const std::vector<std::string> names{
        "lie",           "jordan_1",       "jordan_2",           "jordan_3",
        "mixed_lie_dot", "mixed_lie_circ", "mixed_jordan_circ", "mixed_jordan_commutator"};
    return names;
}

/// Normalized residuals ||lhs - rhs|| / ||lhs|| of the eight superoperator
/// identities, in the order of algebra_identity_names().
///
/// Two mixed relations are evaluated in the form that holds:
///   L^-_{AoB} = L^+_A L^-_B + L^+_B L^-_A
///   L^+_B L^+_A - L^+_A L^+_B = +(hbar^2/4) L^-_{A.B}
/// See variant_form_residuals() for the variants that do not hold.
inline std::vector<double> identity_residuals(const Op& a, const Op& b, const Op& c, double hbar) {
    const auto lm = [&](const Op& x) { return lie(x, hbar).mat; };
    const auto jp = [](const Op& x) { return jordan(x).mat; };
    const auto dot = [&](const Op& x, const Op& y) { return lie_product(x, y, hbar); };
    const auto circ = [](const Op& x, const Op& y) { return jordan_product(x, y); };
    const double h2 = hbar * hbar / 4.0;

    const Matrix ja = jp(a), jb = jp(b), jc = jp(c);
    const Matrix la = lm(a), lb = lm(b);
    const Op ab = circ(a, b), bc = circ(b, c), ac = circ(a, c);
    const Matrix jab = jp(ab), jbc = jp(bc), jac = jp(ac);

    const Matrix jordan_lhs = jp(circ(ab, c)) + jb * jc * ja + ja * jc * jb;
    const Matrix jordan_right_first = jab * jc + jbc * ja + jac * jb;
    const Matrix jordan_left_first = jc * jab + jb * jac + ja * jbc;

    std::vector<double> r;
    r.push_back(detail::normalized_residual(lm(dot(a, b)), la * lb - lb * la));
    r.push_back(detail::normalized_residual(jordan_lhs, jordan_right_first));
    r.push_back(detail::normalized_residual(jordan_lhs, jordan_left_first));
    r.push_back(detail::normalized_residual(jordan_left_first, jordan_right_first));
    r.push_back(detail::normalized_residual(jp(dot(a, b)), la * jb - jb * la));
    r.push_back(detail::normalized_residual(lm(ab), ja * lb + jb * la));
    r.push_back(detail::normalized_residual(jab, ja * jb - h2 * lb * la));
    r.push_back(detail::normalized_residual(jb * ja - ja * jb, h2 * lm(dot(a, b))));
    return r;
}

/// Residuals of two look-alike variants of the mixed relations:
///   L^-_{AoB} = L^+_A L^-_B + L^-_B L^+_A
///   L^+_B L^+_A - L^+_A L^+_B = -(hbar^2/4) L^-_{A.B}
/// Neither holds for generic operators.
inline std::pair<double, double> variant_form_residuals(const Op& a, const Op& b, double hbar) {
    const Matrix ja = jordan(a).mat, jb = jordan(b).mat;
    const Matrix lb = lie(b, hbar).mat;
    const double h2 = hbar * hbar / 4.0;
    const double circ = detail::normalized_residual(lie(jordan_product(a, b), hbar).mat, ja * lb + lb * ja);
    const double comm = detail::normalized_residual(jb * ja - ja * jb, -h2 * lie(lie_product(a, b, hbar), hbar).mat);
    return {circ, comm};
}

/// Operator with independent standard complex Gaussian entries.
inline Op random_operator(Eigen::Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = cplx{gauss(rng), gauss(rng)};
    return Op(std::move(m));
}

inline AlgebraReport verify_algebra(int d, int trials, std::uint64_t seed, double hbar = 1.0) {
    if (d < 2) throw Error(ErrorKind::InvalidSpec, "verify_algebra: d must be >= 2");
    if (trials < 1) throw Error(ErrorKind::InvalidSpec, "verify_algebra: trials must be >= 1");
    if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidSpec, "verify_algebra: hbar must be positive");
    std::mt19937_64 rng(seed);
    AlgebraReport report;
    for (const auto& name : algebra_identity_names()) report.identities.push_back({name, 0.0});
    for (int t = 0; t < trials; ++t) {
        const Op a = random_operator(d, rng);
        const Op b = random_operator(d, rng);
        const Op c = random_operator(d, rng);
        const auto r = identity_residuals(a, b, c, hbar);
        for (std::size_t k = 0; k < r.size(); ++k)
            report.identities[k].max_residual = std::max(report.identities[k].max_residual, r[k]);
    }
    return report;
}

} // namespace purestat
