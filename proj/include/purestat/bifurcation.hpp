// bifurcation.hpp: Potentials V(E) with V'(E) = N(E, E) and the fold analysis built on them.
// Parameter sweeps track stationary eigenprojectors; catastrophe germs are emitted as templates.

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "purestat/fock.hpp"
#include "purestat/liouville.hpp"
#include "purestat/models.hpp"
#include "purestat/steady.hpp"
#include "purestat/types.hpp"

namespace purestat {

struct Potential1D {
    std::vector<double> coeffs; // V(E) = sum_j coeffs[j] E^j
    ScalarBiFunction source_N;

    double value(double e) const {
        double s = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * e + *it;
        return s;
    }

    std::vector<double> derivative() const {
        std::vector<double> out;
        for (std::size_t j = 1; j < coeffs.size(); ++j) out.push_back(static_cast<double>(j) * coeffs[j]);
        return out;
    }
};

/// Antiderivative of N(E, E) with zero constant term.
inline Potential1D potential_from_N(const ScalarBiFunction& f) {
    validate(f);
    const std::vector<cplx> alpha = detail::diagonal_coefficients(f);
    Potential1D v;
    v.source_N = f;
    v.coeffs.assign(alpha.size() + 1, 0.0);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (std::abs(alpha[j].imag()) > 1e-12 * std::max(1.0, std::abs(alpha[j]))) {
            throw Error(ErrorKind::InvalidSpec, "potential_from_N: diagonal coefficients must be real");
        }
        v.coeffs[j + 1] = alpha[j].real() / static_cast<double>(j + 1);
    }
    while (v.coeffs.size() > 1 && v.coeffs.back() == 0.0) v.coeffs.pop_back();
    return v;
}

enum class CriticalKind { minimum, maximum, degenerate };

inline const char* to_string(CriticalKind k) {
    switch (k) {
    case CriticalKind::minimum: return "min";
    case CriticalKind::maximum: return "max";
    case CriticalKind::degenerate: return "degenerate";
    }
    return "?";
}

struct CriticalPoint {
    double energy{0.0};
    CriticalKind kind{CriticalKind::degenerate};
};

inline std::vector<CriticalPoint> critical_points(const Potential1D& v, const Interval& dom) {
    detail::require_domain(dom);
    const std::vector<double> dv = v.derivative();
    if (dv.empty()) throw Error(ErrorKind::DegreeTooLow, "critical_points: potential must have degree >= 1");
    const std::vector<cplx> dvc(dv.begin(), dv.end());
    std::vector<double> d2v;
    for (std::size_t j = 1; j < dv.size(); ++j) d2v.push_back(static_cast<double>(j) * dv[j]);

    std::vector<CriticalPoint> out;
    bool has_variation = false;
    for (std::size_t j = 1; j < dv.size(); ++j) has_variation = has_variation || dv[j] != 0.0;
    if (!has_variation) return out; // V' constant: no isolated critical points
    for (double e : real_polynomial_roots(dvc, dom)) {
        double curv = 0.0;
        for (auto it = d2v.rbegin(); it != d2v.rend(); ++it) curv = curv * e + *it;
        CriticalKind kind = CriticalKind::degenerate;
        if (curv > 1e-9) kind = CriticalKind::minimum;
        else if (curv < -1e-9) kind = CriticalKind::maximum;
        out.push_back({e, kind});
    }
    return out;
}

struct DepressedShift {
    double shift{0.0};
    std::vector<double> shifted; // coefficients of N(x + shift)
};

/// Taylor shift of sum_n c_n E^n to x = E - a.
inline std::vector<double> taylor_shift(const std::vector<double>& c, double a) {
    const std::size_t n = c.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        double binom = 1.0; // C(m, k) for m = k
        double pw = 1.0;    // a^(m-k)
        for (std::size_t m = k; m < n; ++m) {
            out[k] += c[m] * binom * pw;
            binom = binom * static_cast<double>(m + 1) / static_cast<double>(m + 1 - k);
            pw *= a;
        }
    }
    return out;
}

/// Shift a = -alpha_{n-1} / (n alpha_n) that removes the degree-(n-1) term.
inline DepressedShift depressed_shift(std::vector<double> coeffs) {
    while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
    if (coeffs.size() < 3) throw Error(ErrorKind::DegreeTooLow, "depressed_shift needs degree >= 2");
    const std::size_t n = coeffs.size() - 1;
    DepressedShift out;
    out.shift = -coeffs[n - 1] / (static_cast<double>(n) * coeffs[n]);
    out.shifted = taylor_shift(coeffs, out.shift);
    return out;
}

// ---------------------------------------------------------------------------
// Fold catastrophe N(E, E) = alpha0 + alpha1 E + alpha2 E^2 = alpha2 (x^2 - lambda)

struct FoldParams {
    double center{0.0};            // -alpha1 / (2 alpha2)
    double lambda_fold{0.0};       // (alpha1^2 - 4 alpha0 alpha2) / (4 alpha2^2)
    double lambda_negated{0.0};    // (4 alpha0 alpha2 - alpha1^2) / (4 alpha2^2) = -lambda_fold
    std::vector<double> branch_energies;
};

struct FoldAnalysis {
    FoldParams params;
    SpectrumMatch match;
};

inline FoldAnalysis fold_analyze(double alpha0, double alpha1, double alpha2, const HilbertParams& hp,
                                 double tol_match = 1e-6) {
    if (alpha2 == 0.0) throw Error(ErrorKind::InvalidSpec, "fold_analyze needs alpha2 != 0");
    FoldAnalysis out;
    FoldParams& fp = out.params;
    fp.center = -alpha1 / (2.0 * alpha2);
    fp.lambda_fold = (alpha1 * alpha1 - 4.0 * alpha0 * alpha2) / (4.0 * alpha2 * alpha2);
    fp.lambda_negated = -fp.lambda_fold;
    const double zero_tol = 1e-12 * std::max(1.0, fp.center * fp.center);
    if (std::abs(fp.lambda_fold) <= zero_tol) {
        fp.branch_energies = {fp.center};
    } else if (fp.lambda_fold > 0.0) {
        const double r = std::sqrt(fp.lambda_fold);
        fp.branch_energies = {fp.center - r, fp.center + r};
    }
    out.match = match_spectrum(fp.branch_energies, oscillator_hamiltonian(hp), tol_match);
    return out;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

struct SweepOptions {
    bool build_generators{false};
    std::optional<Interval> domain; // default: spectrum of H widened by 1
    double tol_match{1e-6};
    double steady_tol{1e-9};
    int pad{4};
    std::vector<int> probe_levels; // eigenprojectors whose residual is recorded at every point
};

struct SweepRow {
    double parameter{0.0};
    std::vector<double> roots;
    std::vector<int> matched_levels;
    std::optional<int> null_dim;
    std::vector<double> pure_residuals;  // aligned with matched_levels (when a generator is built)
    std::vector<double> level_residuals; // aligned with SweepOptions::probe_levels
};

struct BifurcationDiagram {
    std::string parameter_name;
    std::vector<double> grid;
    std::vector<int> probe_levels;
    std::vector<SweepRow> rows;
};

using ModelFamily = std::function<ModelSpec(double)>;

inline std::vector<double> linspace(double from, double to, int points) {
    if (points < 1) throw Error(ErrorKind::InvalidSpec, "grid needs at least one point");
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = from;
        return g;
    }
    const double step = (to - from) / (points - 1);
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = (i == points - 1) ? to : from + i * step;
    return g;
}

namespace detail {

inline bool vanishes_on_grid(const ScalarBiFunction& f, const Interval& dom) {
    for (double e : linspace(dom.lo, dom.hi, 64))
        if (std::abs(evaluate_diagonal(f, e)) > 1e-12) return false;
    return true;
}

/// Common zeros of all non-trivial N_k on dom.
inline std::vector<double> common_roots(const std::vector<ScalarBiFunction>& fs, const Interval& dom) {
    std::optional<std::vector<double>> acc;
    for (const auto& f : fs) {
        if (vanishes_on_grid(f, dom)) continue;
        if (!acc) {
            acc = roots_of_N(f, dom);
            continue;
        }
        std::vector<double> kept;
        for (double r : *acc)
            if (std::abs(evaluate_diagonal(f, r)) <= 1e-9) kept.push_back(r);
        acc = std::move(kept);
    }
    return acc.value_or(std::vector<double>{});
}

} // namespace detail

inline BifurcationDiagram sweep(const ModelFamily& family, std::string parameter_name,
                                const std::vector<double>& grid, const SweepOptions& opt = {}) {
    if (grid.empty()) throw Error(ErrorKind::InvalidSpec, "sweep grid is empty");
    BifurcationDiagram diag;
    diag.parameter_name = std::move(parameter_name);
    diag.grid = grid;
    diag.probe_levels = opt.probe_levels;
    for (double x : grid) {
        const ModelSpec spec = family(x);
        const Op h = reference_hamiltonian(spec);
        const Eigen::Index d = h.dim();
        if (opt.build_generators && d > kMaxSteadyDim) {
            throw Error(ErrorKind::InvalidSpec, "sweep with build_generators limited to d <= 48");
        }
        const Eigensystem es = eigendecompose(h);
        Interval dom = opt.domain.value_or(Interval{es.values(0) - 1.0, es.values(d - 1) + 1.0});

        SweepRow row;
        row.parameter = x;
        row.roots = detail::common_roots(stationarity_functions(spec), dom);
        const int max_level = static_cast<int>(d) - opt.pad;
        for (const auto& lv : match_spectrum(row.roots, h, opt.tol_match).levels())
            if (lv.n <= max_level) row.matched_levels.push_back(lv.n);

        if (opt.build_generators || !opt.probe_levels.empty()) {
            const SuperOp lambda = build_generator(spec);
            if (opt.build_generators) {
                for (int n : row.matched_levels) row.pure_residuals.push_back(residual(lambda, eigenprojector(es, n)));
                row.null_dim = stationary_subspace(lambda, opt.steady_tol).null_dim;
            }
            for (int n : opt.probe_levels) {
                if (n < 0 || n >= d) throw Error(ErrorKind::InvalidSpec, "probe level outside the truncation");
                row.level_residuals.push_back(residual(lambda, eigenprojector(es, n)));
            }
        }
        diag.rows.push_back(std::move(row));
    }
    return diag;
}

// ---------------------------------------------------------------------------
// Catastrophe germ templates V(x) = V0(x) + Q(x)

enum class CatastropheFamily { A_plus, A_minus, D_plus, D_minus, E6_plus, E6_minus, E7, E8 };

struct CatastropheTemplate {
    CatastropheFamily family{CatastropheFamily::A_plus};
    int n{2};                     // A: n >= 2, D: n >= 4; ignored for E
    std::vector<double> a;        // unfolding coefficients a_1, a_2, ...
    int variables{1};             // total number of variables s
    std::vector<int> quadratic_signs; // signs of Q in the remaining variables (default +1)
};

struct Monomial {
    double coeff{0.0};
    std::vector<int> exps; // one exponent per variable
};

struct PolynomialDescription {
    int variables{0};
    std::vector<Monomial> terms;

    std::string to_string() const {
        std::ostringstream os;
        bool first = true;
        for (const auto& t : terms) {
            const double mag = std::abs(t.coeff);
            if (first) {
                if (t.coeff < 0) os << "-";
            } else {
                os << (t.coeff < 0 ? " - " : " + ");
            }
            bool any_var = false;
            std::ostringstream vars;
            for (std::size_t v = 0; v < t.exps.size(); ++v) {
                if (t.exps[v] == 0) continue;
                if (any_var) vars << "*";
                vars << "x" << (v + 1);
                if (t.exps[v] > 1) vars << "^" << t.exps[v];
                any_var = true;
            }
            if (mag != 1.0 || !any_var) {
                os << mag;
                if (any_var) os << "*";
            }
            os << vars.str();
            first = false;
        }
        if (first) os << "0";
        return os.str();
    }
};

inline int unfolding_count(const CatastropheTemplate& t) {
    switch (t.family) {
    case CatastropheFamily::A_plus:
    case CatastropheFamily::A_minus: return t.n - 1;
    case CatastropheFamily::D_plus:
    case CatastropheFamily::D_minus: return t.n - 1;
    case CatastropheFamily::E6_plus:
    case CatastropheFamily::E6_minus: return 5;
    case CatastropheFamily::E7: return 6;
    case CatastropheFamily::E8: return 7;
    }
    return 0;
}

/// Germ plus unfolding, followed by the diagonal quadratic form in the
/// remaining variables. Zero-coefficient monomials are dropped.
inline PolynomialDescription catastrophe_template(const CatastropheTemplate& t) {
    const bool a_type = t.family == CatastropheFamily::A_plus || t.family == CatastropheFamily::A_minus;
    const bool d_type = t.family == CatastropheFamily::D_plus || t.family == CatastropheFamily::D_minus;
    if (a_type && t.n < 2) throw Error(ErrorKind::InvalidFamily, "A-type catastrophes need n >= 2");
    if (d_type && t.n < 4) throw Error(ErrorKind::InvalidFamily, "D-type catastrophes need n >= 4");
    const int germ_vars = a_type ? 1 : 2;
    if (t.variables < germ_vars) throw Error(ErrorKind::InvalidFamily, "too few variables for this family");
    const int want = unfolding_count(t);
    if (static_cast<int>(t.a.size()) != want) {
        throw Error(ErrorKind::InvalidFamily,
                    "expected " + std::to_string(want) + " unfolding coefficients, got " + std::to_string(t.a.size()));
    }
    const int extra = t.variables - germ_vars;
    if (!t.quadratic_signs.empty() && static_cast<int>(t.quadratic_signs.size()) != extra) {
        throw Error(ErrorKind::InvalidFamily, "quadratic_signs must cover the remaining variables");
    }

    PolynomialDescription out;
    out.variables = t.variables;
    auto add = [&](double c, int e1, int e2) {
        if (c == 0.0) return;
        Monomial m{c, std::vector<int>(static_cast<std::size_t>(t.variables), 0)};
        m.exps[0] = e1;
        if (e2 > 0) m.exps[1] = e2;
        out.terms.push_back(std::move(m));
    };
    auto a = [&](int j) { return t.a[static_cast<std::size_t>(j - 1)]; };

    switch (t.family) {
    case CatastropheFamily::A_plus:
    case CatastropheFamily::A_minus:
        add(t.family == CatastropheFamily::A_plus ? 1.0 : -1.0, t.n + 1, 0);
        for (int j = t.n - 1; j >= 1; --j) add(a(j), j, 0);
        break;
    case CatastropheFamily::D_plus:
    case CatastropheFamily::D_minus:
        add(1.0, 2, 1);
        add(t.family == CatastropheFamily::D_plus ? 1.0 : -1.0, 0, t.n - 1);
        for (int j = t.n - 3; j >= 1; --j) add(a(j), 0, j);
        for (int j = t.n - 1; j >= t.n - 2; --j) add(a(j), j - (t.n - 3), 0);
        break;
    case CatastropheFamily::E6_plus:
    case CatastropheFamily::E6_minus:
        add(1.0, 3, 0);
        add(t.family == CatastropheFamily::E6_plus ? 1.0 : -1.0, 0, 4);
        for (int j = 2; j >= 1; --j) add(a(j), 0, j);
        for (int j = 5; j >= 3; --j) add(a(j), 1, j - 3);
        break;
    case CatastropheFamily::E7:
        add(1.0, 3, 0);
        add(1.0, 1, 3);
        for (int j = 4; j >= 1; --j) add(a(j), 0, j);
        for (int j = 6; j >= 5; --j) add(a(j), 1, j - 5);
        break;
    case CatastropheFamily::E8:
        add(1.0, 3, 0);
        add(1.0, 0, 5);
        for (int j = 3; j >= 1; --j) add(a(j), 0, j);
        for (int j = 7; j >= 4; --j) add(a(j), 1, j - 4);
        break;
    }
    for (int k = 0; k < extra; ++k) {
        Monomial m{t.quadratic_signs.empty() ? 1.0 : static_cast<double>(t.quadratic_signs[static_cast<std::size_t>(k)]),
                   std::vector<int>(static_cast<std::size_t>(t.variables), 0)};
        m.exps[static_cast<std::size_t>(germ_vars + k)] = 2;
        out.terms.push_back(std::move(m));
    }
    return out;
}

} // namespace purestat
