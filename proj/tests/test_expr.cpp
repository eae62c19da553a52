#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "statman/expr.hpp"

using namespace statman;

TEST_CASE("precedence: 1/x2^2 divides by the square") {
    Expression e = parse_expression("1/x2^2", 2);
    CHECK(e.value({7.0, 2.0}) == doctest::Approx(0.25));
    // d/dy (y^-2) = -2 y^-3
    Jet j = e.eval({7.0, 2.0}, 1);
    CHECK(j.g1(0) == doctest::Approx(0.0));
    CHECK(j.g1(1) == doctest::Approx(-0.25));
}

TEST_CASE("sin(x1)*exp(-x2) jet at the origin") {
    Expression e = parse_expression("sin(x1)*exp(-x2)", 2);
    Jet j = e.eval({0.0, 0.0}, 1);
    CHECK(j.value == doctest::Approx(0.0));
    CHECK(j.g1(0) == doctest::Approx(1.0));
    CHECK(j.g1(1) == doctest::Approx(0.0));
}

TEST_CASE("unknown coordinate is rejected") {
    CHECK_THROWS_AS(parse_expression("x3", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("frob(x1)", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("", 2), ParseError);
    CHECK_THROWS_AS(parse_expression("x1 +", 2), ParseError);
}

TEST_CASE("named coordinates are accepted alongside canonical aliases") {
    Expression e = parse_expression("r^2 * sin(theta)", {"r", "theta"});
    CHECK(e.value({2.0, 0.5}) == doctest::Approx(4.0 * std::sin(0.5)));
    Expression alias = parse_expression("x1^2 * sin(x2)", {"r", "theta"});
    CHECK(alias.value({2.0, 0.5}) == doctest::Approx(4.0 * std::sin(0.5)));
}

TEST_CASE("power is right-associative, unary minus binds below it") {
    CHECK(parse_expression("2^3^2", 1).value({0.0}) == doctest::Approx(512.0));
    CHECK(parse_expression("-x1^2", 1).value({3.0}) == doctest::Approx(-9.0));
    CHECK(parse_expression("2 - 3 - 4", 1).value({0.0}) == doctest::Approx(-5.0));
    CHECK(parse_expression("12 / 2 / 3", 1).value({0.0}) == doctest::Approx(2.0));
    CHECK(parse_expression("pow(x1, 3)", 1).value({2.0}) == doctest::Approx(8.0));
}

namespace {

/// Random arithmetic expression over two coordinates, built from a grammar
/// that stays smooth and bounded on [0.5, 1.5]^2.
std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
    std::uniform_real_distribution<double> c(0.2, 2.0);
    auto lit = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", c(rng));
        return std::string(buf);
    };
    switch (pick(rng)) {
        case 0: return "x1";
        case 1: return "x2";
        case 2: return lit();
        case 3: return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + " * " + random_expr(rng, depth - 1) + ")";
        case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 7: return "cos(" + random_expr(rng, depth - 1) + ")";
        default: return "exp(0.3 * sin(" + random_expr(rng, depth - 1) + "))";
    }
}

}  // namespace

TEST_CASE("100 random expressions: analytic jets match finite differences") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> coord(0.5, 1.5);
    const double fd_tol = 1e-4;
    for (int trial = 0; trial < 100; ++trial) {
        std::string src = random_expr(rng, 3);
        CAPTURE(src);
        Expression e = parse_expression(src, 2);
        Point p{coord(rng), coord(rng)};
        Jet a = e.eval(p, 3);
        Jet fd = e.fd_field(1e-3).eval(p, 3);
        double scale = std::max(1.0, std::abs(a.value));
        for (int i = 0; i < 2; ++i) {
            CHECK(std::abs(a.g1(i) - fd.g1(i)) <= fd_tol * scale);
            for (int j = 0; j < 2; ++j) {
                CHECK(std::abs(a.g2(i, j) - fd.g2(i, j)) <= fd_tol * scale);
                for (int k = 0; k < 2; ++k)
                    CHECK(std::abs(a.g3(i, j, k) - fd.g3(i, j, k)) <= 10 * fd_tol * scale);
            }
        }
    }
}
