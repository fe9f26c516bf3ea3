#include <catch_amalgamated.hpp>

#include <random>

#include "purestat/bifurcation.hpp"

using namespace purestat;
using Catch::Approx;

namespace {

bifunc::Polynomial quad(double a0, double a1, double a2) { return bifunc::Polynomial::from_jordan_powers({a0, a1, a2}); }

ModelFamily fold_alpha0(int d) {
    return [d](double a0) -> ModelSpec { return model::FoldModel{HilbertParams{d}, a0, -5.0, 1.0}; };
}

} // namespace

TEST_CASE("potential_from_N", "[bifurcation]") {
    SECTION("linear N") {
        const Potential1D v = potential_from_N(bifunc::Affine{-1.5, 0.5, 0.5});
        REQUIRE(v.coeffs.size() == 3);
        CHECK(v.coeffs[0] == 0.0);
        CHECK(v.coeffs[1] == -1.5);
        CHECK(v.coeffs[2] == 0.5);
    }
    SECTION("quadratic N gives the fold cubic") {
        const Potential1D v = potential_from_N(quad(5.25, -5.0, 1.0));
        REQUIRE(v.coeffs.size() == 4);
        CHECK(v.coeffs[1] == 5.25);
        CHECK(v.coeffs[2] == -2.5);
        CHECK(v.coeffs[3] == Approx(1.0 / 3.0).epsilon(1e-15));
        const auto dv = v.derivative();
        CHECK(dv == std::vector<double>{5.25, -5.0, 1.0});
    }
    SECTION("zero N") {
        const Potential1D v = potential_from_N(bifunc::Polynomial::constant(0.0));
        for (double c : v.coeffs) CHECK(c == 0.0);
        CHECK(v.value(3.0) == 0.0);
    }
    SECTION("non-polynomial N is rejected") {
        try {
            potential_from_N(bifunc::Cosine{1.0});
            FAIL("expected NonPolynomial");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NonPolynomial);
        }
    }
}

TEST_CASE("critical_points", "[bifurcation]") {
    const Interval dom{-5.0, 5.0};
    SECTION("E^3/3 - E") {
        const auto cps = critical_points(Potential1D{{0.0, -1.0, 0.0, 1.0 / 3.0}, bifunc::Polynomial::constant(0.0)}, dom);
        REQUIRE(cps.size() == 2);
        CHECK(cps[0].energy == Approx(-1.0));
        CHECK(cps[0].kind == CriticalKind::maximum);
        CHECK(cps[1].energy == Approx(1.0));
        CHECK(cps[1].kind == CriticalKind::minimum);
    }
    SECTION("E^2") {
        const auto cps = critical_points(Potential1D{{0.0, 0.0, 1.0}, bifunc::Polynomial::constant(0.0)}, dom);
        REQUIRE(cps.size() == 1);
        CHECK(cps[0].energy == Approx(0.0).margin(1e-14));
        CHECK(cps[0].kind == CriticalKind::minimum);
    }
    SECTION("E^3 is degenerate") {
        const auto cps = critical_points(Potential1D{{0.0, 0.0, 0.0, 1.0}, bifunc::Polynomial::constant(0.0)}, dom);
        REQUIRE(cps.size() == 1);
        CHECK(cps[0].energy == Approx(0.0).margin(1e-6));
        CHECK(cps[0].kind == CriticalKind::degenerate);
    }
    SECTION("bad domain") {
        CHECK_THROWS_AS(critical_points(Potential1D{{0.0, 0.0, 1.0}, bifunc::Polynomial::constant(0.0)}, {1.0, 0.0}), Error);
    }
    SECTION("round trip with roots_of_N") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int t = 0; t < 20; ++t) {
            const auto f = quad(u(rng), u(rng), u(rng) + 3.5);
            const auto cps = critical_points(potential_from_N(f), dom);
            const auto rs = roots_of_N(f, dom);
            REQUIRE(cps.size() == rs.size());
            for (std::size_t k = 0; k < rs.size(); ++k) CHECK(std::abs(cps[k].energy - rs[k]) <= 1e-9);
        }
    }
}

TEST_CASE("depressed_shift", "[bifurcation]") {
    SECTION("fold coefficients") {
        const auto s = depressed_shift({5.25, -5.0, 1.0});
        CHECK(s.shift == 2.5);
        REQUIRE(s.shifted.size() == 3);
        CHECK(s.shifted[0] == Approx(-1.0).margin(1e-12));
        CHECK(std::abs(s.shifted[1]) <= 1e-12);
        CHECK(s.shifted[2] == 1.0);
    }
    SECTION("already depressed") {
        const auto s = depressed_shift({0.0, 0.0, 1.0});
        CHECK(s.shift == 0.0);
        CHECK(s.shifted == std::vector<double>{0.0, 0.0, 1.0});
    }
    SECTION("generic quadratic constant is c - b^2/(4a)") {
        const double c = 1.7, b = -0.3, a = 2.2;
        CHECK(depressed_shift({c, b, a}).shifted[0] == Approx(c - b * b / (4 * a)).epsilon(1e-12));
    }
    SECTION("shifting back recovers the input") {
        std::mt19937_64 rng(10);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int deg = 2; deg <= 5; ++deg) {
            std::vector<double> c(static_cast<std::size_t>(deg + 1));
            for (auto& x : c) x = u(rng);
            c.back() = 1.0 + std::abs(c.back());
            const auto s = depressed_shift(c);
            CHECK(std::abs(s.shifted[static_cast<std::size_t>(deg - 1)]) <= 1e-12);
            const auto back = taylor_shift(s.shifted, -s.shift);
            for (std::size_t k = 0; k < c.size(); ++k) CHECK(std::abs(back[k] - c[k]) <= 1e-12);
        }
    }
    SECTION("degree too low") {
        try {
            depressed_shift({1.0, 2.0});
            FAIL("expected DegreeTooLow");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegreeTooLow);
        }
    }
}

TEST_CASE("fold_analyze", "[bifurcation]") {
    const HilbertParams hp{12};
    SECTION("two branches on levels 1 and 3") {
        const FoldAnalysis fa = fold_analyze(5.25, -5.0, 1.0, hp);
        CHECK(fa.params.center == 2.5);
        CHECK(fa.params.lambda_fold == 1.0);
        CHECK(fa.params.lambda_negated == -1.0);
        REQUIRE(fa.params.branch_energies.size() == 2);
        CHECK(fa.params.branch_energies[0] == 1.5);
        CHECK(fa.params.branch_energies[1] == 3.5);
        const auto lv = fa.match.levels();
        REQUIRE(lv.size() == 2);
        CHECK(lv[0].n == 1);
        CHECK(lv[1].n == 3);
        // n = 1, m = 2 case: center hbar w (n + 1/2 + m/2), lambda hbar^2 w^2 m^2 / 4
        CHECK(fa.params.center == 1 + 0.5 + 1.0);
        CHECK(fa.params.lambda_fold == 4.0 / 4.0);
    }
    SECTION("negative lambda has no branches") {
        const FoldAnalysis fa = fold_analyze(1.0, 0.0, 1.0, hp);
        CHECK(fa.params.lambda_fold == -1.0);
        CHECK(fa.params.branch_energies.empty());
        CHECK(fa.match.levels().empty());
    }
    SECTION("zero lambda gives one branch") {
        const FoldAnalysis fa = fold_analyze(6.25, -5.0, 1.0, hp);
        CHECK(fa.params.lambda_fold == 0.0);
        REQUIRE(fa.params.branch_energies.size() == 1);
        CHECK(fa.params.branch_energies[0] == 2.5);
        // 2.5 = E_2, so the tangency sits on a level
        const auto lv = fa.match.levels();
        REQUIRE(lv.size() == 1);
        CHECK(lv[0].n == 2);
        const FoldAnalysis off = fold_analyze(4.0, -4.0, 1.0, hp);
        CHECK(off.params.branch_energies == std::vector<double>{2.0});
        CHECK(off.match.levels().empty());
    }
    SECTION("double roots from the companion matrix are merged") {
        for (double x0 : {2.5, 2.0, -3.7, 11.3}) {
            const auto rs = roots_of_N(quad(x0 * x0, -2.0 * x0, 1.0), {-20.0, 20.0});
            REQUIRE(rs.size() == 1);
            CHECK(std::abs(rs[0] - x0) <= 1e-7);
        }
    }
    SECTION("branches equal roots_of_N") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (int t = 0; t < 30; ++t) {
            const double a0 = u(rng), a1 = u(rng), a2 = u(rng) >= 0 ? 1.0 + std::abs(u(rng)) : -1.0 - std::abs(u(rng));
            const FoldAnalysis fa = fold_analyze(a0, a1, a2, hp);
            if (fa.params.lambda_fold < 0.0) continue;
            const auto rs = roots_of_N(quad(a0, a1, a2), {-100.0, 100.0});
            REQUIRE(rs.size() == fa.params.branch_energies.size());
            for (std::size_t k = 0; k < rs.size(); ++k) CHECK(std::abs(rs[k] - fa.params.branch_energies[k]) <= 1e-9);
        }
    }
    SECTION("scaling invariance") {
        const FoldAnalysis base = fold_analyze(0.75, -4.0, 1.0, hp);
        for (double s : {-3.0, -0.5, 0.25, 7.0}) {
            const FoldAnalysis fa = fold_analyze(0.75 * s, -4.0 * s, s, hp);
            REQUIRE(fa.params.branch_energies.size() == base.params.branch_energies.size());
            for (std::size_t k = 0; k < fa.params.branch_energies.size(); ++k)
                CHECK(fa.params.branch_energies[k] == Approx(base.params.branch_energies[k]).epsilon(1e-14));
            const auto a = fa.match.levels(), b = base.match.levels();
            REQUIRE(a.size() == b.size());
            for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].n == b[k].n);
        }
    }
    SECTION("alpha2 = 0 is rejected") { CHECK_THROWS_AS(fold_analyze(1.0, 1.0, 0.0, hp), Error); }
}

TEST_CASE("sweep", "[bifurcation]") {
    SECTION("fold alpha0 through 6.25: 2 -> 1 -> 0 matched levels") {
        const std::vector<double> grid{5.25, 6.0, 6.25, 6.5};
        const BifurcationDiagram diag = sweep(fold_alpha0(12), "alpha0", grid);
        REQUIRE(diag.rows.size() == grid.size());
        CHECK(diag.rows[0].matched_levels == std::vector<int>{1, 3});
        CHECK(diag.rows[1].roots.size() == 2);
        CHECK(diag.rows[1].matched_levels.empty());
        CHECK(diag.rows[2].roots.size() == 1);
        CHECK(diag.rows[2].matched_levels == std::vector<int>{2});
        CHECK(diag.rows[3].roots.empty());
        // 6.0 has roots 2.5 +- 0.5 = (2.0, 3.0): no half-integer level
        CHECK(diag.rows[1].roots[0] == Approx(2.0));
    }
    SECTION("fold birth along a path where lambda crosses zero from below") {
        const auto grid = linspace(7.0, 5.0, 9);
        const BifurcationDiagram diag = sweep(fold_alpha0(12), "alpha0", grid);
        std::size_t prev = diag.rows.front().roots.size();
        CHECK(prev == 0);
        bool born = false;
        for (const auto& row : diag.rows) {
            if (prev == 0 && row.roots.size() == 2) born = true;
            if (prev == 0 && row.roots.size() == 1) born = true; // touches exactly at lambda = 0
            prev = row.roots.size();
        }
        CHECK(born);
        CHECK(diag.rows.back().roots.size() == 2);
    }
    SECTION("friction sweep: root Delta/(2 beta) crosses levels at Delta = 0.5, 1.5, 2.5, 3.5") {
        const HilbertParams hp{16};
        const ModelFamily fam = [hp](double delta) -> ModelSpec {
            return model::FrictionOscillator{hp, NonlinearParams::from_delta(hp, delta, 0.5, 0.5)};
        };
        const auto grid = linspace(0.0, 4.0, 81);
        const BifurcationDiagram diag = sweep(fam, "Delta", grid);
        std::vector<double> hits;
        for (const auto& row : diag.rows)
            if (!row.matched_levels.empty()) hits.push_back(row.parameter);
        REQUIRE(hits.size() == 4);
        for (int k = 0; k < 4; ++k) CHECK(hits[static_cast<std::size_t>(k)] == Approx(k + 0.5).margin(1e-12));
    }
    SECTION("closed model: no roots and constant null_dim") {
        const ModelFamily fam = [](double) -> ModelSpec { return model::Closed{oscillator_hamiltonian({6})}; };
        SweepOptions opt;
        opt.build_generators = true;
        const BifurcationDiagram diag = sweep(fam, "dummy", linspace(0.0, 1.0, 3), opt);
        for (const auto& row : diag.rows) {
            CHECK(row.roots.empty());
            REQUIRE(row.null_dim.has_value());
            CHECK(*row.null_dim == 6);
        }
    }
    SECTION("generators yield small residuals on matched levels") {
        SweepOptions opt;
        opt.build_generators = true;
        opt.probe_levels = {0, 1};
        const BifurcationDiagram diag = sweep(fold_alpha0(10), "alpha0", {5.25, 0.75}, opt);
        for (const auto& row : diag.rows) {
            REQUIRE(row.pure_residuals.size() == row.matched_levels.size());
            for (double r : row.pure_residuals) CHECK(r <= 1e-9);
            REQUIRE(row.level_residuals.size() == 2);
        }
        // at alpha0 = 5.25 level 1 is stationary and level 0 is not
        CHECK(diag.rows[0].level_residuals[1] <= 1e-9);
        CHECK(diag.rows[0].level_residuals[0] > 1.0);
    }
    SECTION("errors") {
        CHECK_THROWS_AS(sweep(fold_alpha0(6), "alpha0", {}), Error);
        SweepOptions opt;
        opt.build_generators = true;
        CHECK_THROWS_AS(sweep(fold_alpha0(49), "alpha0", {5.25}, opt), Error);
        CHECK_THROWS_AS(linspace(0.0, 1.0, 0), Error);
    }
}

TEST_CASE("catastrophe templates", "[bifurcation]") {
    using F = CatastropheFamily;
    SECTION("A2 fold") {
        CHECK(catastrophe_template({F::A_plus, 2, {-1.0}, 1, {}}).to_string() == "x1^3 - x1");
    }
    SECTION("A3 cusp germ") {
        CHECK(catastrophe_template({F::A_plus, 3, {0.0, 0.0}, 1, {}}).to_string() == "x1^4");
    }
    SECTION("A minus with quadratic form") {
        CHECK(catastrophe_template({F::A_minus, 2, {0.5}, 3, {1, -1}}).to_string() == "-x1^3 + 0.5*x1 + x2^2 - x3^2");
    }
    SECTION("E8 germ") {
        CHECK(catastrophe_template({F::E8, 0, std::vector<double>(7, 0.0), 2, {}}).to_string() == "x1^3 + x2^5");
    }
    SECTION("E7 and E6 germs") {
        CHECK(catastrophe_template({F::E7, 0, std::vector<double>(6, 0.0), 2, {}}).to_string() == "x1^3 + x1*x2^3");
        CHECK(catastrophe_template({F::E6_minus, 0, std::vector<double>(5, 0.0), 2, {}}).to_string() == "x1^3 - x2^4");
        CHECK(catastrophe_template({F::E6_plus, 0, {1, 2, 3, 4, 5}, 2, {}}).to_string() ==
              "x1^3 + x2^4 + 2*x2^2 + x2 + 5*x1*x2^2 + 4*x1*x2 + 3*x1");
    }
    SECTION("D4 with unfolding") {
        CHECK(catastrophe_template({F::D_plus, 4, {1.0, 2.0, 3.0}, 2, {}}).to_string() ==
              "x1^2*x2 + x2^3 + x2 + 3*x1^2 + 2*x1");
    }
    SECTION("unfolding counts") {
        CHECK(unfolding_count({F::A_plus, 5, {}, 1, {}}) == 4);
        CHECK(unfolding_count({F::D_minus, 6, {}, 2, {}}) == 5);
        CHECK(unfolding_count({F::E7, 0, {}, 2, {}}) == 6);
    }
    SECTION("invalid families") {
        auto kind = [](const CatastropheTemplate& t) {
            try {
                catastrophe_template(t);
            } catch (const Error& e) {
                return e.kind();
            }
            return ErrorKind::InvalidConfig;
        };
        CHECK(kind({F::A_plus, 1, {}, 1, {}}) == ErrorKind::InvalidFamily);
        CHECK(kind({F::D_plus, 3, {1.0, 2.0}, 2, {}}) == ErrorKind::InvalidFamily);
        CHECK(kind({F::A_plus, 2, {1.0, 2.0}, 1, {}}) == ErrorKind::InvalidFamily);
        CHECK(kind({F::E8, 0, std::vector<double>(7, 0.0), 1, {}}) == ErrorKind::InvalidFamily);
        CHECK(kind({F::A_plus, 2, {1.0}, 3, {1}}) == ErrorKind::InvalidFamily);
    }
}
