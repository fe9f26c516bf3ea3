#include <catch_amalgamated.hpp>

#include <random>

#include "purestat/liouville.hpp"

using namespace purestat;
using Catch::Approx;

namespace {

Op random_op(int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_operator(d, rng);
}

Op random_density(int d, std::uint64_t seed) {
    const Op g = random_op(d, seed);
    Matrix rho = g.mat * g.mat.adjoint();
    rho /= rho.trace();
    return Op(rho);
}

} // namespace

TEST_CASE("vectorize / devectorize", "[liouville]") {
    SECTION("identity at d=2") {
        const LVec v = vectorize(Op::identity(2));
        CHECK(v.vec == Eigen::Vector4cd(1, 0, 0, 1));
    }
    SECTION("|0><1| at d=2 sits at flat index 1") {
        const LVec v = vectorize(Op::ket_bra(2, 0, 1));
        CHECK(v.vec == Eigen::Vector4cd(0, 1, 0, 0));
    }
    SECTION("round trip is exact and linear") {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const Op a = random_op(5, s), b = random_op(5, s + 100);
            CHECK(devectorize(vectorize(a)).mat == a.mat);
            const cplx z{0.3, -1.2};
            CHECK((vectorize(Op(a.mat + z * b.mat)).vec - (vectorize(a).vec + z * vectorize(b).vec)).norm() < 1e-14);
        }
    }
    SECTION("length must be a perfect square") {
        CHECK_THROWS_AS(devectorize(LVec(Vector::Zero(5))), Error);
    }
}

TEST_CASE("inner product", "[liouville]") {
    const LVec id5 = vectorize(Op::identity(5));
    CHECK(inner(id5, id5) == cplx{5.0});
    CHECK(std::abs(inner(id5, vectorize(random_density(5, 3))) - 1.0) < 1e-14);
    const LVec e01 = vectorize(Op::ket_bra(3, 0, 1));
    CHECK(inner(e01, e01) == cplx{1.0});

    SECTION("conjugate-linear first slot, linear second slot") {
        const LVec a = vectorize(random_op(4, 1)), b = vectorize(random_op(4, 2));
        const cplx z{0.7, 0.4};
        CHECK(std::abs(inner(LVec(z * a.vec), b) - std::conj(z) * inner(a, b)) < 1e-12);
        CHECK(std::abs(inner(a, LVec(z * b.vec)) - z * inner(a, b)) < 1e-12);
        const cplx aa = inner(a, a);
        CHECK(aa.real() > 0.0);
        CHECK(aa.imag() == 0.0);
    }
    SECTION("matches Tr(A^dag B)") {
        const Op a = random_op(4, 5), b = random_op(4, 6);
        CHECK(std::abs(inner(vectorize(a), vectorize(b)) - (a.mat.adjoint() * b.mat).trace()) < 1e-12);
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(inner(vectorize(Op::identity(2)), vectorize(Op::identity(3))), Error);
    }
}

TEST_CASE("left and right multiplication superoperators", "[liouville]") {
    SECTION("L_I is the identity superoperator") {
        CHECK(left_mul(Op::identity(4)).mat == Matrix::Identity(16, 16));
        CHECK(right_mul(Op::identity(4)).mat == Matrix::Identity(16, 16));
    }
    SECTION("L_A |I) = |A)") {
        const Op a = random_op(4, 9);
        CHECK((left_mul(a) * vectorize(Op::identity(4))).vec == vectorize(a).vec);
    }
    SECTION("kernel entries") {
        const int d = 3;
        const Op a = random_op(d, 11);
        const Matrix l = left_mul(a).mat, r = right_mul(a).mat;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k)
                    for (int m = 0; m < d; ++m) {
                        CHECK(l(i * d + j, k * d + m) == (j == m ? a.mat(i, k) : cplx{0.0}));
                        CHECK(r(i * d + j, k * d + m) == (i == k ? a.mat(m, j) : cplx{0.0}));
                    }
    }
    SECTION("L_A R_B |C) = |ACB) over every basis matrix C") {
        const int d = 4;
        const Op a = random_op(d, 21), b = random_op(d, 22);
        const SuperOp lr = left_mul(a) * right_mul(b);
        for (int k = 0; k < d; ++k)
            for (int m = 0; m < d; ++m) {
                const Op c = Op::ket_bra(d, k, m);
                CHECK((devectorize(lr * vectorize(c)).mat - a.mat * c.mat * b.mat).norm() < 1e-12);
            }
    }
    SECTION("left and right multiplications commute") {
        for (std::uint64_t s = 0; s < 4; ++s) {
            const SuperOp l = left_mul(random_op(4, s)), r = right_mul(random_op(4, s + 50));
            CHECK(((l * r).mat - (r * l).mat).norm() <= 1e-12 * (l * r).mat.norm());
        }
    }
    SECTION("trace functional (I| L_A |rho) = Tr(A rho)") {
        const Op a = random_op(5, 31);
        const Op rho = random_density(5, 32);
        const cplx lhs = inner(vectorize(Op::identity(5)), left_mul(a) * vectorize(rho));
        CHECK(std::abs(lhs - (a.mat * rho.mat).trace()) < 1e-12);
    }
}

TEST_CASE("Lie and Jordan superoperators", "[liouville]") {
    const HilbertParams hp{5};
    const Op h = oscillator_hamiltonian(hp);

    SECTION("lie(H) on |1><0| has eigenvalue (E1 - E0)/i = -i") {
        const LVec v = vectorize(Op::ket_bra(5, 1, 0));
        const LVec out = lie(h) * v;
        CHECK((out.vec - cplx{0.0, -1.0} * v.vec).norm() < 1e-14);
    }
    SECTION("jordan(H) on |n><n| gives E_n") {
        const LVec v0 = vectorize(fock_projector(5, 0));
        CHECK(((jordan(h) * v0).vec - 0.5 * v0.vec).norm() < 1e-14);
    }
    SECTION("lie(A)|I) = 0") {
        const Op a = random_op(4, 40);
        CHECK((lie(a, 1.7) * vectorize(Op::identity(4))).vec.norm() < 1e-13);
    }
    SECTION("right-sided Lie is minus left, Jordan is side-symmetric") {
        // R^-_A B = (1/i hbar)(BA - AB), R^+_A B = (BA + AB)/2
        const Op a = random_op(3, 41);
        const double hbar = 2.0;
        const SuperOp right_lie((right_mul(a).mat - left_mul(a).mat) / (I_unit * hbar));
        const SuperOp right_jordan(0.5 * (right_mul(a).mat + left_mul(a).mat));
        CHECK((lie(a, hbar).mat + right_lie.mat).norm() < 1e-13);
        CHECK((jordan(a).mat - right_jordan.mat).norm() == 0.0);
    }
    SECTION("spectral action (E_n - E_m)/(i hbar) for hbar != 1") {
        const HilbertParams hp2{4, 2.0, 1.0, 1.0};
        const Op h2 = oscillator_hamiltonian(hp2);
        const LVec v = vectorize(Op::ket_bra(4, 3, 1));
        const cplx want = (h2.mat(3, 3) - h2.mat(1, 1)) / (I_unit * 2.0);
        CHECK(((lie(h2, 2.0) * v).vec - want * v.vec).norm() < 1e-14);
    }
}

TEST_CASE("spectral superoperator functions", "[liouville]") {
    const HilbertParams hp{6};
    const Op h = oscillator_hamiltonian(hp);

    SECTION("affine N = (e_l + e_r)/2 - 1.5 vanishes on rho_1") {
        const SuperOp n = superfunction(h, bifunc::Affine{-1.5, 0.5, 0.5});
        CHECK((n * vectorize(fock_projector(6, 1))).vec.norm() < 1e-14);
        const LVec v2 = vectorize(fock_projector(6, 2));
        CHECK(((n * v2).vec - 1.0 * v2.vec).norm() < 1e-14);
    }
    SECTION("cosine with eps0 = 1 vanishes on rho_0") {
        const SuperOp n = superfunction(h, bifunc::Cosine{1.0});
        CHECK((n * vectorize(fock_projector(6, 0))).vec.norm() < 1e-15);
    }
    SECTION("constant polynomial is the identity") {
        const SuperOp n = superfunction(h, bifunc::Polynomial::constant(1.0));
        CHECK((n.mat - Matrix::Identity(36, 36)).norm() < 1e-13);
    }
    SECTION("functional calculus equals the explicit polynomial for a non-diagonal H") {
        for (int d : {3, 5, 8}) {
            std::mt19937_64 rng(static_cast<std::uint64_t>(d));
            const Op g = random_operator(d, rng);
            const Op hh(g.mat + g.mat.adjoint());
            bifunc::Polynomial p;
            std::normal_distribution<double> gauss;
            for (int n = 0; n <= 4; ++n) {
                p.a.emplace_back();
                for (int m = 0; m <= n; ++m) p.a.back().push_back(cplx{gauss(rng), gauss(rng)});
            }
            const Matrix spectral = superfunction(hh, p).mat;
            const Matrix explicit_sum = polynomial_superop(hh, p).mat;
            CHECK((spectral - explicit_sum).norm() <= 1e-9 * explicit_sum.norm());
        }
    }
    SECTION("eigen-action f(E_n, E_m) on eigenbasis ket-bras") {
        std::mt19937_64 rng(77);
        const Op g = random_operator(5, rng);
        const Op hh(g.mat + g.mat.adjoint());
        const Eigensystem es = eigendecompose(hh);
        const ScalarBiFunction f = bifunc::Custom{[](double l, double r) { return cplx{std::sin(l), l * r}; }};
        const SuperOp s = superfunction(hh, f);
        for (int n = 0; n < 5; ++n)
            for (int m = 0; m < 5; ++m) {
                const LVec v = vectorize(Op(es.vectors.col(n) * es.vectors.col(m).adjoint()));
                const cplx want = evaluate(f, es.values(n), es.values(m));
                CHECK(((s * v).vec - want * v.vec).norm() <= 1e-10);
            }
    }
    SECTION("cosine series converges to the spectral cosine at low order") {
        // cos(pi/(2 eps0) (L_H + R_H)) = sum_k (-1)^k x^(2k) / (2k)!, x = pi/(2 eps0) (L_H + R_H)
        const HilbertParams small{3};
        const Op h3 = oscillator_hamiltonian(small);
        const double eps0 = 4.0;
        const Matrix x = std::numbers::pi / (2.0 * eps0) * (left_mul(h3).mat + right_mul(h3).mat);
        Matrix term = Matrix::Identity(9, 9), sum = term;
        for (int k = 1; k <= 20; ++k) {
            term = -term * x * x / static_cast<double>((2 * k - 1) * (2 * k));
            sum += term;
        }
        CHECK((sum - superfunction(h3, bifunc::Cosine{eps0}).mat).norm() < 1e-10);
    }
    SECTION("non-Hermitian H is rejected") {
        CHECK_THROWS_AS(superfunction(Op::ket_bra(2, 0, 1), bifunc::Cosine{1.0}), Error);
    }
    SECTION("Jordan-power expansion matches (L^+)^k") {
        const auto p = bifunc::Polynomial::from_jordan_powers({0.5, -1.0, 2.0, 0.25});
        const Matrix j = jordan(h).mat;
        const Matrix direct = 0.5 * Matrix::Identity(36, 36) - j + 2.0 * j * j + 0.25 * j * j * j;
        CHECK((polynomial_superop(h, p).mat - direct).norm() < 1e-10 * direct.norm());
    }
}

TEST_CASE("superoperator algebra identities", "[liouville][algebra]") {
    SECTION("identity operators give zero residual") {
        const Op id = Op::identity(2);
        for (double r : identity_residuals(id, id, id, 1.0)) CHECK(r == 0.0);
    }
    SECTION("d=5, 100 trials, hbar 1 and 2") {
        for (double hbar : {1.0, 2.0}) {
            const AlgebraReport rep = verify_algebra(5, 100, 7, hbar);
            REQUIRE(rep.identities.size() == 8);
            for (const auto& id : rep.identities) {
                INFO(id.name << " hbar=" << hbar);
                CHECK(id.max_residual <= 1e-10);
            }
        }
    }
    SECTION("Lie relation at d=3") {
        std::mt19937_64 rng(3);
        const Op a = random_operator(3, rng), b = random_operator(3, rng), c = random_operator(3, rng);
        CHECK(identity_residuals(a, b, c, 1.0)[0] <= 1e-12);
    }
    SECTION("seeded reproducibility") {
        const auto r1 = verify_algebra(3, 1, 99), r2 = verify_algebra(3, 1, 99);
        for (std::size_t k = 0; k < 8; ++k) CHECK(r1.identities[k].max_residual == r2.identities[k].max_residual);
    }
    SECTION("variant mixed relations fail for generic operators") {
        std::mt19937_64 rng(5);
        const Op a = random_operator(4, rng), b = random_operator(4, rng);
        const auto [circ, comm] = variant_form_residuals(a, b, 1.0);
        CHECK(circ > 0.1);
        CHECK(comm == Approx(2.0).epsilon(1e-9));
    }
    SECTION("argument validation") {
        CHECK_THROWS_AS(verify_algebra(1, 5, 0), Error);
        CHECK_THROWS_AS(verify_algebra(3, 0, 0), Error);
    }
}
