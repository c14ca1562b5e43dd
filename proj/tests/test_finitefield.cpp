#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "steersim/finite_field.hpp"

using namespace steersim;
using ff::Field;
using ff::FieldElement;

namespace {

// Independent oracle for prime-field inverses: extended Euclid.
int egcd_inverse(int a, int p) {
    int t = 0, newt = 1, r = p, newr = a % p;
    while (newr != 0) {
        const int q = r / newr;
        const int tmp_t = t - q * newt;
        t = newt;
        newt = tmp_t;
        const int tmp_r = r - q * newr;
        r = newr;
        newr = tmp_r;
    }
    return ((t % p) + p) % p;
}

// Independent oracle for GF(4) products: schoolbook polynomial
// multiplication reduced by x^2 + x + 1 over GF(2).
std::vector<int> gf4_mul_oracle(const std::vector<int>& a, const std::vector<int>& b) {
    int prod[3] = {0, 0, 0};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) prod[i + j] ^= a[i] & b[j];
    // x^2 = x + 1
    return {prod[0] ^ prod[2], prod[1] ^ prod[2]};
}

const std::vector<std::pair<int, int>> kScope = {{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1},
                                                 {2, 3}, {3, 2}, {11, 1}, {13, 1}};

}  // namespace

TEST_CASE("prime-field inverses match extended Euclid") {
    for (int p : {5, 7, 11, 13}) {
        const Field f(p, 1);
        for (int a = 1; a < p; ++a) {
            const int got = f.index_of(f.inv(f.element(a)));
            CHECK(got == egcd_inverse(a, p));
        }
    }
    const Field f5(5, 1);
    CHECK(f5.index_of(f5.inv(f5.element(2))) == 3);  // 2*3 = 6 = 1 mod 5
}

TEST_CASE("GF(4) arithmetic against the polynomial oracle") {
    const Field f(2, 2);
    CHECK(f.modulus() == std::vector<int>{1, 1, 1});
    const FieldElement omega = f.element(2);  // the class of x

    // omega * omega = omega + 1
    const auto sq = f.mul(omega, omega);
    CHECK(sq.coeffs == gf4_mul_oracle(omega.coeffs, omega.coeffs));
    CHECK(sq.coeffs == std::vector<int>{1, 1});

    // characteristic 2: omega + omega = 0
    CHECK(f.index_of(f.add(omega, omega)) == 0);

    // every product agrees with the oracle
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            CHECK(f.mul(f.element(a), f.element(b)).coeffs == gf4_mul_oracle(f.element(a).coeffs, f.element(b).coeffs));
}

TEST_CASE("traces") {
    const Field f4(2, 2);
    // Tr(omega) = omega + omega^2 = omega + omega + 1 = 1 over GF(2)
    CHECK(f4.trace(f4.element(2)) == 1);
    CHECK(f4.trace(f4.zero()) == 0);

    const Field f7(7, 1);
    for (int a = 0; a < 7; ++a) CHECK(f7.trace(f7.element(a)) == a);
    CHECK(f7.index_of(f7.inv(f7.one())) == 1);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(ff::field_create(4, 1), not_prime);
    CHECK_THROWS_AS(ff::field_create(6, 1), not_prime);
    CHECK_THROWS_AS(ff::field_create(2, 13), unsupported_size);  // 8192 > 4096
    CHECK_THROWS_AS(ff::field_create(2, 0), unsupported_size);
}

TEST_CASE("field axioms hold exhaustively at desk scale") {
    for (const auto& [p, k] : kScope) {
        const Field f(p, k);
        const int q = f.q();

        // inverses
        for (int a = 1; a < q; ++a) {
            const auto prod = f.mul(f.element(a), f.inv(f.element(a)));
            CHECK(f.index_of(prod) == 1);
        }
        CHECK_THROWS_AS(f.inv(f.zero()), division_by_zero);

        // commutativity and distributivity over all pairs/triples for small q,
        // and over a fixed stride otherwise
        const int stride = q <= 13 ? 1 : 3;
        for (int a = 0; a < q; a += stride)
            for (int b = 0; b < q; b += stride) {
                CHECK(f.index_of(f.mul(f.element(a), f.element(b))) ==
                      f.index_of(f.mul(f.element(b), f.element(a))));
                CHECK(f.index_of(f.add(f.element(a), f.element(b))) ==
                      f.index_of(f.add(f.element(b), f.element(a))));
                for (int c = 0; c < q; c += stride) {
                    const auto lhs = f.mul(f.element(a), f.add(f.element(b), f.element(c)));
                    const auto rhs = f.add(f.mul(f.element(a), f.element(b)), f.mul(f.element(a), f.element(c)));
                    CHECK(f.index_of(lhs) == f.index_of(rhs));
                    const auto massoc1 = f.mul(f.element(a), f.mul(f.element(b), f.element(c)));
                    const auto massoc2 = f.mul(f.mul(f.element(a), f.element(b)), f.element(c));
                    CHECK(f.index_of(massoc1) == f.index_of(massoc2));
                }
            }
    }
}

TEST_CASE("trace is GF(p)-linear and the trace form is nondegenerate") {
    for (const auto& [p, k] : kScope) {
        const Field f(p, k);
        const int q = f.q();
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b) {
                const int lhs = f.trace(f.add(f.element(a), f.element(b)));
                CHECK(lhs == (f.trace(f.element(a)) + f.trace(f.element(b))) % p);
            }
        // for each b != 0 some a has Tr(ab) != 0
        for (int b = 1; b < q; ++b) {
            bool hit = false;
            for (int a = 0; a < q && !hit; ++a) hit = f.trace(f.mul(f.element(a), f.element(b))) != 0;
            CHECK(hit);
        }
    }
}

TEST_CASE("GF(5): 3*4 = 2") {
    const Field f(5, 1);
    CHECK(f.index_of(f.mul(f.element(3), f.element(4))) == 2);
}

TEST_CASE("free-function spellings") {
    const Field f = ff::field_create(2, 2);
    const FieldElement omega = f.element(2);
    CHECK(f.index_of(ff::gf_add(f, omega, omega)) == 0);
    CHECK(ff::gf_mul(f, omega, omega).coeffs == std::vector<int>{1, 1});
    CHECK(f.index_of(ff::gf_mul(f, omega, ff::gf_inv(f, omega))) == 1);
    CHECK(ff::gf_trace(f, omega) == 1);
}

TEST_CASE("field creation is deterministic") {
    for (const auto& [p, k] : kScope) {
        const Field f1(p, k), f2(p, k);
        CHECK(f1.modulus() == f2.modulus());
        for (int a = 0; a < f1.q(); ++a)
            for (int b = 0; b < f1.q(); ++b)
                CHECK(f1.index_of(f1.mul(f1.element(a), f1.element(b))) ==
                      f2.index_of(f2.mul(f2.element(a), f2.element(b))));
    }
}
