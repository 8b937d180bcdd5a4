#include <doctest.h>

#include <cmath>

#include "riccati_spectra/jensen.hpp"
#include "support/oracles.hpp"
#include "support/suite.hpp"

using namespace riccati_spectra;

namespace {

// Random root set of size m, closed under conjugation, |Re| in [0.1, 3].
std::vector<Complex> random_roots(suite::Sampler& s, int m, bool allow_unstable) {
  std::vector<Complex> roots;
  while (static_cast<int>(roots.size()) < m) {
    double re = -s.uniform(0.1, 3.0);
    if (allow_unstable && s.uniform(0.0, 1.0) < 0.5) re = -re;
    if (m - static_cast<int>(roots.size()) >= 2 && s.uniform(0.0, 1.0) < 0.5) {
      const double im = s.uniform(0.2, 4.0);
      roots.emplace_back(re, im);
      roots.emplace_back(re, -im);
    } else {
      roots.emplace_back(re, 0.0);
    }
  }
  return roots;
}

}  // namespace

TEST_CASE("limit term") {
  CHECK(limit_term(RationalFunction({-1, 1}, {1, 1})) == doctest::Approx(-1.0));
  CHECK(limit_term(RationalFunction({2, 1}, {1, 1})) == doctest::Approx(0.5));
  CHECK(limit_term(RationalFunction({1}, {1})) == 0.0);
}

TEST_CASE("hand examples") {
  SUBCASE("(s-1)/(s+1)") {
    const RationalFunction f({-1, 1}, {1, 1});
    const JensenResult r = verify_proposition(f, JensenMode::prop1, 1e-11);
    CHECK(r.closed_form == doctest::Approx(0.0).scale(1.0));
    CHECK(std::abs(r.integral_numeric) <= 1e-10);
    CHECK(r.residual <= 1e-8);
  }
  SUBCASE("(s+2)/(s+1)") {
    const RationalFunction f({2, 1}, {1, 1});
    const JensenResult r = verify_proposition(f, JensenMode::prop1, 1e-11);
    CHECK(r.closed_form == doctest::Approx(0.5));
    CHECK(r.integral_numeric == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.residual <= 1e-8);
  }
  SUBCASE("(s+2)/(s-1) needs the second form") {
    const RationalFunction f({2, 1}, {-1, 1});
    CHECK_THROWS_AS(jensen_closed_form(f, true), ContractError);
    const JensenResult r = verify_proposition(f, JensenMode::prop2, 1e-11);
    CHECK(r.limit_term == doctest::Approx(1.5));
    CHECK(r.poles_term == doctest::Approx(1.0));
    CHECK(r.closed_form == doctest::Approx(0.5));
    CHECK(r.residual <= 1e-8);
  }
  SUBCASE("(s+2)(s-3) / ((s+1)(s+4))") {
    const RationalFunction f({-6, -1, 1}, {4, 5, 1});
    const JensenResult r = verify_proposition(f, JensenMode::prop1, 1e-11);
    CHECK(r.closed_form == doctest::Approx(oracle::jensen_by_factors({-2.0, 3.0}, {-1.0, -4.0})).scale(1.0));
    CHECK(r.residual <= 1e-8);
  }
  SUBCASE("conjugate zero pair 0.5 +- 2j") {
    const RationalFunction f(oracle::poly_from_roots({{0.5, 2.0}, {0.5, -2.0}}),
                             oracle::poly_from_roots({{-1.0, 0.0}, {-3.0, 0.0}}));
    const JensenResult r = verify_proposition(f, JensenMode::prop1, 1e-11);
    CHECK(r.zeros_term == doctest::Approx(1.0));
    CHECK(r.residual <= 1e-8);
  }
}

TEST_CASE("randomized catalog against the factor oracle") {
  suite::Sampler s(41);
  for (int rep = 0; rep < 60; ++rep) {
    const int m = s.uniform_int(1, 4);
    const bool unstable_poles = rep % 2 == 1;
    const auto zeros = random_roots(s, m, true);
    const auto poles = random_roots(s, m, unstable_poles);
    const RationalFunction f(oracle::poly_from_roots(zeros), oracle::poly_from_roots(poles));
    const JensenResult r = verify_proposition(f, unstable_poles ? JensenMode::prop2 : JensenMode::prop1, 1e-11);
    CAPTURE(rep);
    CHECK(r.residual <= 1e-7);
    CHECK(r.closed_form == doctest::Approx(oracle::jensen_by_factors(zeros, poles)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("invariants") {
  suite::Sampler s(42);
  for (int rep = 0; rep < 10; ++rep) {
    const int m = s.uniform_int(1, 4);
    const auto zeros = random_roots(s, m, true);
    const auto poles = random_roots(s, m, true);
    const auto p = oracle::poly_from_roots(zeros);
    const auto q = oracle::poly_from_roots(poles);
    const RationalFunction f(p, q);

    SUBCASE("conjugate symmetry: half line vs whole line") {
      CHECK(jensen_numeric_detail(f, 1e-12).value ==
            doctest::Approx(jensen_numeric_detail(f, 1e-12, true).value).epsilon(1e-10).scale(1.0));
    }
    SUBCASE("scaling p and q together") {
      std::vector<double> ps = p, qs = q;
      for (double& c : ps) c *= -3.7;
      for (double& c : qs) c *= -3.7;
      const RationalFunction g(ps, qs);
      const JensenResult a = verify_proposition(f, JensenMode::prop2, 1e-11);
      const JensenResult b = verify_proposition(g, JensenMode::prop2, 1e-11);
      CHECK(b.closed_form == doctest::Approx(a.closed_form).epsilon(1e-12).scale(1.0));
      CHECK(b.integral_numeric == doctest::Approx(a.integral_numeric).epsilon(1e-10).scale(1.0));
    }
    SUBCASE("second form splits into two first-form evaluations") {
      // f = (p / l) / (q / l) with l monic and all zeros in the left half plane
      std::vector<Complex> l_roots;
      for (int k = 0; k < m; ++k) l_roots.emplace_back(-1.0 - k, 0.0);
      const auto l = oracle::poly_from_roots(l_roots);
      const JensenResult top = verify_proposition(RationalFunction(p, l), JensenMode::prop1, 1e-11);
      const JensenResult bottom = verify_proposition(RationalFunction(q, l), JensenMode::prop1, 1e-11);
      const JensenResult whole = verify_proposition(f, JensenMode::prop2, 1e-11);
      CHECK(std::abs(whole.closed_form - (top.closed_form - bottom.closed_form)) <= 1e-7);
      CHECK(std::abs(whole.integral_numeric - (top.integral_numeric - bottom.integral_numeric)) <= 1e-7);
    }
  }
  SUBCASE("second form equals the first when poles are stable") {
    const RationalFunction f({-6, -1, 1}, {4, 5, 1});
    CHECK(jensen_closed_form(f, true).closed_form == jensen_closed_form(f, false).closed_form);
    CHECK(jensen_closed_form(f, false).poles_term == 0.0);
  }
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(RationalFunction({1}, {1, 1}), ContractError);
  CHECK_THROWS_AS(RationalFunction({1, 2}, {1, 1}), ContractError);
  CHECK_THROWS_AS(RationalFunction({1, 0, 1}, {1, 2, 1}), ContractError);  // zeros at +-j
  CHECK_THROWS_AS(RationalFunction({2, 1}, {0, 1}), ContractError);        // pole at 0
  CHECK_THROWS_AS(RationalFunction({2, 3, 1}, {2, 3, 1}), ContractError);  // cancellation
  CHECK_THROWS_AS(RationalFunction({}, {1}), ContractError);
  // leading coefficients below 1e-12 of the largest are stripped
  CHECK(RationalFunction({2, 1, 1e-14}, {1, 1}).degree() == 1);
}

TEST_CASE("near-axis roots carry a warning") {
  const RationalFunction f(oracle::poly_from_roots({{-5e-9, 1.0}, {-5e-9, -1.0}}),
                           oracle::poly_from_roots({{-1.0, 0.0}, {-2.0, 0.0}}));
  const JensenNumeric n = jensen_numeric_detail(f, 1e-10);
  CHECK_FALSE(n.warnings.empty());
  CHECK(n.value == doctest::Approx(oracle::jensen_by_factors({{-5e-9, 1.0}, {-5e-9, -1.0}}, {-1.0, -2.0}))
                       .epsilon(1e-6));
}
