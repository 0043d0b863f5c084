#include <doctest.h>

#include <cmath>

#include "flocksim/weights.hpp"

using namespace flocksim;

TEST_SUITE("weights") {

TEST_CASE("regular weight values") {
    const CommWeight w = CommWeight::regular(0.5);
    CHECK(eval_weight(w, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    // (1 + 3)^(-1/4) = 1/sqrt(2)
    CHECK(eval_weight(w, std::sqrt(3.0)) == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(eval_weight(CommWeight::regular(2.0, 3.0), 0.0) == 3.0);
}

TEST_CASE("constant weight") {
    const CommWeight w = CommWeight::constant(0.3);
    for (double dist : {0.0, 1.0, 50.0}) CHECK(eval_weight(w, dist) == 0.3);
}

TEST_CASE("table weight interpolates and clamps") {
    const CommWeight w = CommWeight::table({0.0, 1.0, 3.0}, {1.0, 0.5, 0.1});
    CHECK(eval_weight(w, 0.0) == 1.0);
    CHECK(eval_weight(w, 0.5) == doctest::Approx(0.75));
    CHECK(eval_weight(w, 2.0) == doctest::Approx(0.3));
    CHECK(eval_weight(w, 10.0) == 0.1);  // clamped beyond the last breakpoint
    CHECK_THROWS_AS((void)CommWeight::table({0.0, 1.0}, {0.5, 0.9}), ValidationError);
}

TEST_CASE("weights are non-increasing in distance") {
    const CommWeight reg = CommWeight::regular(1.3, 2.0);
    const CommWeight tab = CommWeight::table({0.0, 2.0, 5.0}, {1.0, 0.4, 0.4});
    double prev_r = eval_weight(reg, 0.0), prev_t = eval_weight(tab, 0.0);
    for (double dist = 0.1; dist < 12.0; dist += 0.1) {
        const double r = eval_weight(reg, dist);
        const double t = eval_weight(tab, dist);
        CHECK(r <= prev_r + 1e-15);
        CHECK(t <= prev_t + 1e-15);
        CHECK(r >= 0.0);
        CHECK(t >= 0.0);
        prev_r = r;
        prev_t = t;
    }
}

TEST_CASE("pairwise lower bound values") {
    CHECK(regular_weight_lower_bound(1.0, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(regular_weight_lower_bound(1.0, 3.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS_AS((void)regular_weight_lower_bound(0.0, 1.0, 0.5), ValidationError);
    CHECK_THROWS_AS((void)regular_weight_lower_bound(-0.5, 1.0, 0.5), ValidationError);
}

TEST_CASE("min-weight integral bound closed forms") {
    CHECK(psi_min_integral_lower_bound({1.0, 4.0, 2.0}, kInfiniteHorizon) ==
          doctest::Approx(0.25).epsilon(1e-15));
    CHECK(psi_min_integral_lower_bound({0.7, 2.0, 0.5}, 0.0) == 0.0);
    CHECK(std::isinf(psi_min_integral_lower_bound({0.7, 2.0, 0.5}, kInfiniteHorizon)));
    CHECK(std::isinf(psi_min_integral_lower_bound({0.7, 2.0, 1.0}, kInfiniteHorizon)));
    CHECK_THROWS_AS((void)psi_min_integral_lower_bound({1.0, 0.0, 0.5}, 1.0),
                    ValidationError);
}

TEST_CASE("integral bound matches quadrature of its own integrand") {
    // the closed form integrates [psi0^(-1/beta) + M s]^(-beta); verify against
    // fine midpoint quadrature, including the logarithmic beta = 1 branch
    for (double beta : {0.5, 1.0, 2.5}) {
        const WeightBound wb{0.6, 3.0, beta};
        const double u0 = std::pow(wb.psi0_min, -1.0 / beta);
        for (double t : {0.3, 2.0, 11.0}) {
            const int steps = 200000;
            double acc = 0.0;
            const double h = t / steps;
            for (int i = 0; i < steps; ++i) {
                const double s = (i + 0.5) * h;
                acc += h * std::pow(u0 + wb.M * s, -beta);
            }
            CHECK(psi_min_integral_lower_bound(wb, t) ==
                  doctest::Approx(acc).epsilon(1e-8));
        }
    }
}

TEST_CASE("bound is monotone in t and conservative in the integral argument") {
    const WeightBound wb{0.9, 2.0, 0.8};
    double prev = 0.0;
    for (double t = 0.25; t < 20.0; t += 0.25) {
        const double cur = psi_min_integral_lower_bound(wb, t);
        CHECK(cur >= prev);
        prev = cur;
    }
    // overestimating the velocity integral can only lower the pair bound
    CHECK(regular_weight_lower_bound(0.8, 2.0, 0.7) >=
          regular_weight_lower_bound(0.8, 2.5, 0.7));
}

}  // TEST_SUITE
