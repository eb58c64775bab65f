#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ebb/leverage.hpp"
#include "ebb/random.hpp"
#include "ebb/verify.hpp"

using namespace ebb;

namespace {
Rational R(long long n, long long d = 1) { return Rational(n, d); }

DiscreteBet zero_or_two(Rational q_heads) {
  return DiscreteBet::make({R(0), R(2)}, {R(1, 2), R(1, 2)},
                           {R(1) - q_heads, q_heads});
}
}  // namespace

TEST_CASE("bet construction normalizes its support") {
  const auto bet = DiscreteBet::make({R(2), R(0), R(2)}, {R(1, 4), R(1, 2), R(1, 4)},
                                     {R(1, 2), R(0), R(1, 2)});
  CHECK(bet.size() == 2);
  CHECK(bet.values == std::vector<Rational>{R(0), R(2)});
  CHECK(bet.p_weights == std::vector<Rational>{R(1, 2), R(1, 2)});
  CHECK(bet.q_weights == std::vector<Rational>{R(0), R(1)});
  CHECK_THROWS_AS(DiscreteBet::make({R(0)}, {R(1, 2)}, {R(1)}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteBet::make({R(0), R(1)}, {R(1), R(0)}, {R(1), R(-1)}),
                  std::invalid_argument);
}

TEST_CASE("leverage map is the affine borrow transform") {
  const auto bet = zero_or_two(R(9, 10));
  SUBCASE("zero borrow is the identity") {
    const auto mapped = leverage_map(bet, R(0));
    CHECK(mapped.values == bet.values);
    CHECK(mapped.q_weights == bet.q_weights);
  }
  SUBCASE("borrow 1 doubles the stake") {
    const auto mapped = leverage_map(bet, R(1));
    CHECK(mapped.values == std::vector<Rational>{R(-1), R(3)});
  }
  SUBCASE("multipliers below -1 reverse the order and carry the weights") {
    const auto mapped = leverage_map(bet, R(-2));
    CHECK(mapped.values == std::vector<Rational>{R(0), R(2)});
    CHECK(mapped.q_weights == std::vector<Rational>{R(9, 10), R(1, 10)});
  }
  SUBCASE("borrow -1 collapses the bet") {
    CHECK_THROWS_AS(leverage_map(bet, R(-1)), std::invalid_argument);
  }
}

TEST_CASE("Sharpe ratio pieces are exact") {
  SUBCASE("fair double-or-nothing is all risk, no excess") {
    const auto s = sharpe(zero_or_two(R(1, 2)));
    CHECK(s.excess_mean == 0);
    CHECK(s.variance == 1);
    CHECK(s.value() == 0.0);
  }
  SUBCASE("a tilted coin has excess 1/2 over variance 3/4") {
    const auto bet = DiscreteBet::make({R(0), R(2)}, {R(1, 4), R(3, 4)}, {R(1, 2), R(1, 2)});
    const auto s = sharpe(bet);
    CHECK(s.excess_mean == R(1, 2));
    CHECK(s.variance == R(3, 4));
    CHECK(s.squared() == R(1, 3));
  }
  SUBCASE("squared ratio is leverage invariant") {
    const auto bet = DiscreteBet::make({R(0), R(2)}, {R(1, 4), R(3, 4)}, {R(1, 2), R(1, 2)});
    for (auto borrow : {R(1), R(1, 3), R(-1, 2), R(3), R(-5, 2)})
      CHECK(sharpe(leverage_map(bet, borrow)).squared() == sharpe(bet).squared());
  }
  SUBCASE("constant payoffs have no ratio") {
    const auto constant = DiscreteBet::make({R(1), R(2)}, {R(1), R(0)}, {R(1, 2), R(1, 2)});
    CHECK_THROWS_AS(sharpe(constant), std::domain_error);
  }
}

TEST_CASE("evidence functional on pinned instances") {
  SUBCASE("a sure unit payoff standardizes to one") {
    const auto sure = DiscreteBet::make({R(1)}, {R(1)}, {R(1)});
    const auto result = evidence_functional(sure);
    CHECK(result.bounded);
    CHECK(result.value == 1);
    CHECK(result.scale == 0);
    CHECK(result.shift == 1);
  }
  SUBCASE("the favorable double-or-nothing is worth 19/10") {
    const auto result = evidence_functional(zero_or_two(R(9, 10)));
    CHECK(result.bounded);
    CHECK(result.value == R(19, 10));
    CHECK(result.scale == R(1, 2));
    CHECK(result.shift == 1);
    CHECK_FALSE(result.negative_scale_branch);
    CHECK_FALSE(result.restricted_differs);
  }
  SUBCASE("an unfavorable alternative uses the negative branch") {
    // Q concentrates on the low value; flipping the sign of the scale pays
    const auto result = evidence_functional(zero_or_two(R(1, 100)));
    CHECK(result.bounded);
    CHECK(result.value > 1);
    CHECK(result.negative_scale_branch);
  }
  SUBCASE("the sign-restricted optimum can be strictly smaller") {
    const auto bet = DiscreteBet::make({R(-10), R(1), R(2)}, {R(1, 2), R(2, 5), R(1, 10)},
                                       {R(0), R(0), R(1)});
    const auto result = evidence_functional(bet);
    CHECK(result.value == 10);
    CHECK(result.scale == 8);
    CHECK(result.shift == -6);
    CHECK(result.restricted_differs);
    CHECK(result.restricted_value == 4);
  }
  SUBCASE("alternative mass beyond the null support is unbounded") {
    const auto bet = DiscreteBet::make({R(0), R(2)}, {R(1), R(0)}, {R(0), R(1)});
    const auto result = evidence_functional(bet);
    CHECK_FALSE(result.bounded);
  }
  SUBCASE("the functional never drops below one") {
    SplitMix64 rng(404);
    for (int i = 0; i < 50; ++i)
      CHECK(evidence_functional(verify::random_bet(rng, 6)).value >= 1);
  }
}

TEST_CASE("the continuum constraint family reduces to the jump points") {
  // dense-x audit: at the returned optimum, the tail bound holds not only at
  // the jump points but along a fine sweep of levels
  SplitMix64 rng(777);
  for (int instance = 0; instance < 10; ++instance) {
    const auto bet = verify::random_bet(rng, 5);
    const auto result = evidence_functional(bet);
    REQUIRE(result.bounded);
    const double a = to_double(result.scale), b = to_double(result.shift);
    double top = 0;
    for (size_t i = 0; i < bet.size(); ++i)
      top = std::max(top, a * to_double(bet.values[i]) + b);
    for (double x = 1e-3; x < top + 1.0; x += 1e-3) {
      double tail = 0;
      for (size_t i = 0; i < bet.size(); ++i)
        if (a * to_double(bet.values[i]) + b >= x - 1e-12) tail += to_double(bet.p_weights[i]);
      CHECK(tail * x <= 1.0 + 1e-6);
    }
  }
}

TEST_CASE("leverage invariance holds exactly on a hash-driven corpus") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 60; ++i) {
    const auto bet = verify::random_bet(rng, 6);
    const Rational borrow = (i % 4 == 3) ? R(-1) - R(1 + static_cast<long long>(rng.next_below(6)), 4)
                                         : R(-1) + R(1 + static_cast<long long>(rng.next_below(20)), 4);
    const auto base = evidence_functional(bet);
    const auto mapped = evidence_functional(leverage_map(bet, borrow));
    REQUIRE(base.bounded);
    REQUIRE(mapped.bounded);
    CHECK(base.value == mapped.value);
  }
}

TEST_CASE("grid search corroborates vertex enumeration") {
  const auto bet = zero_or_two(R(9, 10));
  CHECK(grid_search_evidence(bet) == doctest::Approx(1.9).epsilon(1e-3));
  const auto skewed = DiscreteBet::make({R(-1), R(0), R(3)}, {R(1, 4), R(1, 2), R(1, 4)},
                                        {R(0), R(1, 5), R(4, 5)});
  const auto exact = evidence_functional(skewed);
  REQUIRE(exact.bounded);
  CHECK(grid_search_evidence(skewed) ==
        doctest::Approx(to_double(exact.value)).epsilon(2e-3));
}
