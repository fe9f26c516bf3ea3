// models.hpp: Catalog of open-system generators built as Liouville superoperators
//
// Every generator has the shape
//     Lambda = L^-_H + sum_k F_k N_k(L_H, R_H)
// or, for the friction oscillator in commutator form and the GKSL models,
// an equivalent literal assembly from left/right multiplications.

#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "purestat/fock.hpp"
#include "purestat/liouville.hpp"
#include "purestat/types.hpp"

namespace purestat {

namespace recipe {
struct LieOf {
    Op x;
};
/// -2 L^-_X L^+_Y
struct LieJordanProduct {
    Op x;
    Op y;
};
struct Identity {};
} // namespace recipe

using SuperOpRecipe = std::variant<recipe::LieOf, recipe::LieJordanProduct, recipe::Identity>;

struct OpenTerm {
    SuperOpRecipe f;
    ScalarBiFunction n;
};

enum class FrictionForm { commutator, superop };

namespace model {

struct Closed {
    Op h;
    double hbar{1.0};
};

struct GeneralOpen {
    Op h;
    double hbar{1.0};
    std::vector<OpenTerm> terms;
};

struct FrictionOscillator {
    HilbertParams hp;
    NonlinearParams nl;
    FrictionForm form{FrictionForm::commutator};
};

struct CosineOscillator {
    HilbertParams hp;
    double eps0{1.0};
};

/// V_k = sum_n v[k][n] H^n
struct LindbladPolynomial {
    Op h;
    double hbar{1.0};
    std::vector<std::vector<cplx>> v;
};

struct BrownianGeneralized {
    HilbertParams hp;
    CouplingParams cp;
    std::vector<cplx> a;
    double alpha{0.0};
    double beta_nl{0.0};
};

struct FoldModel {
    HilbertParams hp;
    double alpha0{0.0};
    double alpha1{0.0};
    double alpha2{1.0};
};

} // namespace model

using ModelSpec = std::variant<model::Closed, model::GeneralOpen, model::FrictionOscillator,
                               model::CosineOscillator, model::LindbladPolynomial,
                               model::BrownianGeneralized, model::FoldModel>;

inline const char* model_name(const ModelSpec& spec) {
    constexpr const char* names[] = {"closed", "general_open", "friction", "cosine",
                                     "lindblad_poly", "brownian", "fold"};
    return names[spec.index()];
}

// ---------------------------------------------------------------------------

inline SuperOp build_recipe(const SuperOpRecipe& r, Eigen::Index d, double hbar) {
    return std::visit(
        [&](const auto& x) -> SuperOp {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, recipe::LieOf>) {
                require_same_dim(x.x.dim(), d, "recipe LieOf");
                return lie(x.x, hbar);
            } else if constexpr (std::is_same_v<T, recipe::LieJordanProduct>) {
                require_same_dim(x.x.dim(), d, "recipe LieJordanProduct");
                require_same_dim(x.y.dim(), d, "recipe LieJordanProduct");
                return SuperOp(-2.0 * lie(x.x, hbar).mat * jordan(x.y).mat);
            } else {
                return SuperOp::identity(d);
            }
        },
        r);
}

/// V = sum_n v_n H^n evaluated in the eigenbasis of H.
inline Op v_operator(const std::vector<cplx>& coeffs, const Op& h) {
    const Eigensystem es = eigendecompose(h);
    Vector vals(es.values.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        cplx s{0.0};
        double pw = 1.0;
        for (const auto& c : coeffs) {
            s += c * pw;
            pw *= es.values(i);
        }
        vals(i) = s;
    }
    return Op(es.vectors * vals.asDiagonal() * es.vectors.adjoint(), "V");
}

/// -(i/hbar)[H, .] + (1/2hbar) sum_k (2 V_k . V_k^dag - V_k^dag V_k . - . V_k^dag V_k)
inline SuperOp build_lindblad(const Op& h, const std::vector<Op>& vs, double hbar = 1.0) {
    const Eigen::Index d = h.dim();
    SuperOp out = lie(h, hbar);
    for (const auto& v : vs) {
        require_same_dim(v.dim(), d, "build_lindblad");
        const Op vdv(v.mat.adjoint() * v.mat);
        out.mat += (1.0 / (2.0 * hbar)) *
                   (2.0 * left_mul(v).mat * right_mul(v.adjoint()).mat - left_mul(vdv).mat - right_mul(vdv).mat);
    }
    return out;
}

/// V_k = a_k (p + alpha q + beta p^2 + m^2 w^2 beta q^2 + m lambda beta (qp + pq)).
inline std::vector<Op> brownian_v(const model::BrownianGeneralized& spec) {
    const auto& hp = spec.hp;
    auto [q, p] = position_momentum(hp);
    const Matrix base = p.mat + spec.alpha * q.mat +
                        spec.beta_nl * (p.mat * p.mat + hp.mass * hp.mass * hp.omega * hp.omega * q.mat * q.mat +
                                        hp.mass * spec.cp.lambda_coupling * (q.mat * p.mat + p.mat * q.mat));
    std::vector<Op> out;
    out.reserve(spec.a.size());
    for (const auto& ak : spec.a) out.emplace_back(ak * base, "V");
    return out;
}

inline SuperOp build_friction(const model::FrictionOscillator& spec) {
    const auto& hp = spec.hp;
    const auto& nl = spec.nl;
    auto [q, p] = position_momentum(hp);
    const Op q2 = q * q;
    const Op p2 = p * p;
    if (spec.form == FrictionForm::commutator) {
        const Op ht = nonlinear_hamiltonian(hp, nl);
        Matrix out = (-I_unit / hp.hbar) * (left_mul(ht).mat - right_mul(ht).mat);
        // (L_q2 - R_q2)(L_p2 + R_p2) expanded with L_A L_B = L_AB, R_A R_B = R_BA,
        // L_A R_B = kron(A, B^T), which keeps the assembly O(d^4).
        const Matrix cross = left_mul(q2 * p2).mat + kron(q2.mat, p2.mat.transpose()) -
                             kron(p2.mat, q2.mat.transpose()) - right_mul(p2 * q2).mat;
        out += (-I_unit / (2.0 * hp.hbar)) * nl.beta * cross;
        return SuperOp(std::move(out));
    }
    if (nl.beta == 0.0) {
        throw Error(ErrorKind::DivisionByZero, "friction superop form needs beta != 0 (gamma / (2 m beta))");
    }
    const Op h = oscillator_hamiltonian(hp);
    const Eigen::Index d = hp.dim;
    const Matrix jp = jordan(p).mat;
    const Matrix jq = jordan(q).mat;
    const Matrix inner = (1.0 / (2.0 * hp.mass)) * jp * jp + (nl.gamma / (2.0 * hp.mass * nl.beta)) * jq * jq -
                         (nl.Delta / (4.0 * nl.beta)) * Matrix::Identity(d * d, d * d);
    return SuperOp(lie(h, hp.hbar).mat + 2.0 * hp.mass * nl.beta * lie(q, hp.hbar).mat * inner);
}

namespace detail {

inline void validate_spec(const ModelSpec& spec) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, model::Closed> || std::is_same_v<T, model::GeneralOpen> ||
                          std::is_same_v<T, model::LindbladPolynomial>) {
                if (m.h.dim() < 1 || m.h.mat.rows() != m.h.mat.cols())
                    throw Error(ErrorKind::InvalidSpec, "Hamiltonian must be a non-empty square matrix");
                if (!(m.hbar > 0.0)) throw Error(ErrorKind::InvalidSpec, "hbar must be positive");
            } else {
                m.hp.validate();
            }
            if constexpr (std::is_same_v<T, model::GeneralOpen>) {
                for (const auto& t : m.terms) validate(t.n);
            } else if constexpr (std::is_same_v<T, model::LindbladPolynomial>) {
                if (m.v.empty()) throw Error(ErrorKind::InvalidSpec, "lindblad_poly needs at least one V row");
            } else if constexpr (std::is_same_v<T, model::CosineOscillator>) {
                if (!(m.eps0 > 0.0)) throw Error(ErrorKind::InvalidSpec, "eps0 must be positive");
            } else if constexpr (std::is_same_v<T, model::FoldModel>) {
                if (m.alpha2 == 0.0) throw Error(ErrorKind::InvalidSpec, "fold model needs alpha2 != 0");
            }
        },
        spec);
}

} // namespace detail

/// Hamiltonian whose eigenprojectors are the candidate pure stationary states.
inline Op reference_hamiltonian(const ModelSpec& spec) {
    return std::visit(
        [](const auto& m) -> Op {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, model::Closed> || std::is_same_v<T, model::GeneralOpen> ||
                          std::is_same_v<T, model::LindbladPolynomial>) {
                return m.h;
            } else if constexpr (std::is_same_v<T, model::BrownianGeneralized>) {
                return squeezed_hamiltonian(m.hp, m.cp);
            } else {
                return oscillator_hamiltonian(m.hp);
            }
        },
        spec);
}

inline double model_hbar(const ModelSpec& spec) {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, model::Closed> || std::is_same_v<T, model::GeneralOpen> ||
                          std::is_same_v<T, model::LindbladPolynomial>) {
                return m.hbar;
            } else {
                return m.hp.hbar;
            }
        },
        spec);
}

inline Eigen::Index model_dim(const ModelSpec& spec) { return reference_hamiltonian(spec).dim(); }

/// Lindblad row v as the bifunction (1/2hbar)(2 v(e_l) v*(e_r) - |v(e_l)|^2 - |v(e_r)|^2).
inline ScalarBiFunction lindblad_bifunction(std::vector<cplx> row, double hbar) {
    auto poly = [row](double e) {
        cplx s{0.0};
        double pw = 1.0;
        for (const auto& c : row) {
            s += c * pw;
            pw *= e;
        }
        return s;
    };
    return bifunc::Custom{[poly, hbar](double el, double er) {
                              const cplx vl = poly(el), vr = poly(er);
                              return (2.0 * vl * std::conj(vr) - std::norm(vl) - std::norm(vr)) / (2.0 * hbar);
                          },
                          "lindblad_row"};
}

/// Fold N = alpha0 + alpha1 L^+_H + alpha2 (L^+_H)^2 as a polynomial in (L_H, R_H).
inline bifunc::Polynomial fold_bifunction(double alpha0, double alpha1, double alpha2) {
    return bifunc::Polynomial::from_jordan_powers({alpha0, alpha1, alpha2});
}

/// The scalar functions N_k whose zeros on the diagonal mark stationary
/// eigenprojectors. Empty for the closed system; empty for the Brownian
/// model, whose V_k are not functions of H.
inline std::vector<ScalarBiFunction> stationarity_functions(const ModelSpec& spec) {
    return std::visit(
        [](const auto& m) -> std::vector<ScalarBiFunction> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, model::GeneralOpen>) {
                std::vector<ScalarBiFunction> out;
                for (const auto& t : m.terms) out.push_back(t.n);
                return out;
            } else if constexpr (std::is_same_v<T, model::FrictionOscillator>) {
                if (m.nl.beta == 0.0) return {};
                return {bifunc::Affine{-m.nl.Delta / (2.0 * m.nl.beta), 0.5, 0.5}};
            } else if constexpr (std::is_same_v<T, model::CosineOscillator>) {
                return {bifunc::Cosine{m.eps0}};
            } else if constexpr (std::is_same_v<T, model::LindbladPolynomial>) {
                std::vector<ScalarBiFunction> out;
                for (const auto& row : m.v) out.push_back(lindblad_bifunction(row, m.hbar));
                return out;
            } else if constexpr (std::is_same_v<T, model::FoldModel>) {
                return {fold_bifunction(m.alpha0, m.alpha1, m.alpha2)};
            } else {
                return {};
            }
        },
        spec);
}

/// Superoperator F multiplying N in the dissipative part (first term for
/// multi-term models). Used to normalize residuals of eigenprojectors:
/// for F N(L_H, R_H) the residual on rho_n is |N(E_n,E_n)| ||F rho_n||.
inline SuperOp dissipative_prefactor(const ModelSpec& spec) {
    return std::visit(
        [&](const auto& m) -> SuperOp {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, model::GeneralOpen>) {
                if (m.terms.empty()) return SuperOp::zero(m.h.dim());
                return build_recipe(m.terms.front().f, m.h.dim(), m.hbar);
            } else if constexpr (std::is_same_v<T, model::FrictionOscillator>) {
                auto [q, p] = position_momentum(m.hp);
                return SuperOp(2.0 * m.hp.mass * m.nl.beta * lie(q, m.hp.hbar).mat);
            } else if constexpr (std::is_same_v<T, model::CosineOscillator>) {
                auto [q, p] = position_momentum(m.hp);
                return lie(q, m.hp.hbar);
            } else if constexpr (std::is_same_v<T, model::FoldModel>) {
                auto [q, p] = position_momentum(m.hp);
                return build_recipe(recipe::LieJordanProduct{q, p}, m.hp.dim, m.hp.hbar);
            } else if constexpr (std::is_same_v<T, model::Closed>) {
                return SuperOp::zero(m.h.dim());
            } else {
                return SuperOp::identity(model_dim(spec));
            }
        },
        spec);
}

inline SuperOp build_generator(const ModelSpec& spec) {
    detail::validate_spec(spec);
    return std::visit(
        [](const auto& m) -> SuperOp {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, model::Closed>) {
                return lie(m.h, m.hbar);
            } else if constexpr (std::is_same_v<T, model::GeneralOpen>) {
                SuperOp out = lie(m.h, m.hbar);
                for (const auto& t : m.terms)
                    out.mat += build_recipe(t.f, m.h.dim(), m.hbar).mat * superfunction(m.h, t.n).mat;
                return out;
            } else if constexpr (std::is_same_v<T, model::FrictionOscillator>) {
                return build_friction(m);
            } else if constexpr (std::is_same_v<T, model::CosineOscillator>) {
                const Op h = oscillator_hamiltonian(m.hp);
                auto [q, p] = position_momentum(m.hp);
                return SuperOp(lie(h, m.hp.hbar).mat +
                               lie(q, m.hp.hbar).mat * superfunction(h, bifunc::Cosine{m.eps0}).mat);
            } else if constexpr (std::is_same_v<T, model::LindbladPolynomial>) {
                std::vector<Op> vs;
                for (const auto& row : m.v) vs.push_back(v_operator(row, m.h));
                return build_lindblad(m.h, vs, m.hbar);
            } else if constexpr (std::is_same_v<T, model::BrownianGeneralized>) {
                return build_lindblad(squeezed_hamiltonian(m.hp, m.cp), brownian_v(m), m.hp.hbar);
            } else {
                const Op h = oscillator_hamiltonian(m.hp);
                auto [q, p] = position_momentum(m.hp);
                const Eigen::Index d = m.hp.dim;
                const Matrix jh = jordan(h).mat;
                const Matrix n_op = m.alpha0 * Matrix::Identity(d * d, d * d) + m.alpha1 * jh + m.alpha2 * jh * jh;
                const SuperOp f = build_recipe(recipe::LieJordanProduct{q, p}, d, m.hp.hbar);
                return SuperOp(lie(h, m.hp.hbar).mat + f.mat * n_op);
            }
        },
        spec);
}

/// max over basis vectors v of |(I|Lambda v)|.
inline double trace_defect(const SuperOp& lambda) {
    const Eigen::Index d = liouville_side(lambda.size());
    double worst = 0.0;
    for (Eigen::Index col = 0; col < lambda.mat.cols(); ++col) {
        cplx tr{0.0};
        for (Eigen::Index i = 0; i < d; ++i) tr += lambda.mat(i * d + i, col);
        worst = std::max(worst, std::abs(tr));
    }
    return worst;
}

} // namespace purestat
