#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "htpq/dyadic.hpp"
#include "htpq/poly.hpp"

using namespace htpq;

TEST_CASE("dyadic canonical form") {
    CHECK(Dyadic(mpz_class(4), 3).num() == 1);
    CHECK(Dyadic(mpz_class(4), 3).exp() == 1);
    CHECK(Dyadic(mpz_class(-6), 1).num() == -3);
    CHECK(Dyadic(mpz_class(-6), 1).exp() == 0);
    CHECK(Dyadic(mpz_class(0), 7).exp() == 0);
    CHECK(Dyadic(mpz_class(0), 7).is_zero());
    CHECK(Dyadic(5L).num() == 5);
    CHECK(Dyadic::half_pow(0) == Dyadic(1L));
    CHECK(Dyadic::half_pow(3).to_mpq() == mpq_class(1, 8));
}

TEST_CASE("dyadic arithmetic matches exact rationals") {
    std::vector<Dyadic> pool;
    for (long n = -9; n <= 9; ++n)
        for (unsigned long k = 0; k <= 5; ++k) pool.push_back(Dyadic(mpz_class(n), k));
    for (const Dyadic& a : pool) {
        for (const Dyadic& b : pool) {
            mpq_class qa = a.to_mpq(), qb = b.to_mpq();
            CHECK((a + b).to_mpq() == qa + qb);
            CHECK((a - b).to_mpq() == qa - qb);
            CHECK((a * b).to_mpq() == qa * qb);
            CHECK(a.cmp(b) == (qa < qb ? -1 : qa == qb ? 0 : 1));
            CHECK(a.cmp(qb) == (qa < qb ? -1 : qa == qb ? 0 : 1));
        }
    }
}

TEST_CASE("dyadic ordering operators") {
    CHECK(Dyadic(mpz_class(1), 1) < Dyadic(mpz_class(3), 2));
    CHECK(Dyadic(mpz_class(3), 2) <= Dyadic(mpz_class(3), 2));
    CHECK(Dyadic(mpz_class(-1), 4) > Dyadic(mpz_class(-1), 2));
    CHECK(Dyadic(mpz_class(2), 1) == Dyadic(1L));
    CHECK(Dyadic(mpz_class(1), 2) != Dyadic(mpz_class(1), 3));
}

TEST_CASE("dyadic strings round-trip") {
    CHECK(Dyadic(mpz_class(5), 3).str() == "5/2^3");
    CHECK(Dyadic(7L).str() == "7");
    CHECK(Dyadic(mpz_class(-3), 4).str() == "-3/2^4");
    CHECK(Dyadic().str() == "0");
    for (long n = -9; n <= 9; ++n)
        for (unsigned long k = 0; k <= 6; ++k) {
            Dyadic d(mpz_class(n), k);
            CHECK(Dyadic::parse(d.str()) == d);
        }
    CHECK(Dyadic::parse("5/8") == Dyadic(mpz_class(5), 3));
    CHECK(Dyadic::parse("-12/16") == Dyadic(mpz_class(-3), 2));
    CHECK(Dyadic::parse("0") == Dyadic());
    CHECK_THROWS_AS(Dyadic::parse("5/6"), std::invalid_argument);
    CHECK_THROWS_AS(Dyadic::parse("1/2^"), std::invalid_argument);
    CHECK_THROWS_AS(Dyadic::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(Dyadic::parse("x"), std::invalid_argument);
}

TEST_CASE("dyadic from exact rationals") {
    CHECK(Dyadic::from_mpq(mpq_class(3, 8)) == Dyadic(mpz_class(3), 3));
    CHECK(Dyadic::from_mpq(mpq_class(-4, 2)) == Dyadic(-2L));
    CHECK_THROWS_AS(Dyadic::from_mpq(mpq_class(1, 3)), std::invalid_argument);
}

TEST_CASE("poly construction and identity") {
    IntPoly zero;
    CHECK(zero.is_zero());
    CHECK(zero.str() == "0");
    CHECK(IntPoly::constant(0).is_zero());
    CHECK(IntPoly::parse("0").is_zero());

    IntPoly x0 = IntPoly::variable(0);
    IntPoly square = (x0 + IntPoly::constant(1)).pow(2);
    CHECK(square.str() == "1*x0^2 + 2*x0^1 + 1");
    CHECK(square.term_count() == 3);
    CHECK(IntPoly::parse(square.str()) == square);
    CHECK(IntPoly::parse("x0^2 + 2*x0 + 1") == square);
    CHECK((square - square).is_zero());
    CHECK(square + square == IntPoly::constant(2) * square);
    CHECK(square.pow(0) == IntPoly::constant(1));
}

TEST_CASE("poly multiplication and power") {
    IntPoly x = IntPoly::variable(0), y = IntPoly::variable(1);
    IntPoly p = (x - y) * (x + y);
    CHECK(p == x * x - y * y);
    IntPoly cube = (x + IntPoly::constant(1)).pow(3);
    CHECK(cube.str() == "1*x0^3 + 3*x0^2 + 3*x0^1 + 1");
    CHECK(-p == y * y - x * x);
}

TEST_CASE("poly variables and shifting") {
    IntPoly f = IntPoly::variable(0) + IntPoly::variable(1).pow(2);
    CHECK(f.used_vars() == std::set<unsigned>{0, 1});
    IntPoly g = f.shift_vars(2);
    CHECK(g.used_vars() == std::set<unsigned>{2, 3});
    CHECK(g == IntPoly::variable(2) + IntPoly::variable(3).pow(2));
}

TEST_CASE("poly exact evaluation") {
    IntPoly f = IntPoly::variable(0).pow(2) + IntPoly::constant(3) * IntPoly::variable(1);
    CHECK(f.eval({mpq_class(2), mpq_class(1, 3)}) == 5);
    CHECK(f.eval({mpq_class(-1, 2), mpq_class(0)}) == mpq_class(1, 4));
    CHECK_THROWS_AS(f.eval({mpq_class(2)}), std::invalid_argument);
    CHECK(IntPoly().eval({}) == 0);
    CHECK(IntPoly::constant(4).eval({}) == 4);
}

TEST_CASE("poly parse details") {
    CHECK(IntPoly::parse("x0*x0") == IntPoly::variable(0).pow(2));
    CHECK(IntPoly::parse("2*x3^0") == IntPoly::constant(2));
    CHECK(IntPoly::parse("x1*x0") == IntPoly::parse("x0*x1"));
    CHECK(IntPoly::parse("x0 + x0") == IntPoly::constant(2) * IntPoly::variable(0));
    CHECK_THROWS_AS(IntPoly::parse("2*3*x0"), std::invalid_argument);
    CHECK_THROWS_AS(IntPoly::parse("x"), std::invalid_argument);
    CHECK_THROWS_AS(IntPoly::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(IntPoly::parse("x0^"), std::invalid_argument);

    mpz_class big("1000000000000000000000000000001");
    IntPoly h = IntPoly::constant(big) * IntPoly::variable(5).pow(4);
    CHECK(IntPoly::parse(h.str()) == h);
}
