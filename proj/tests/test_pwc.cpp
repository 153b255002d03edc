#include <doctest.h>

#include <sstream>

#include "hao/pwc.hpp"
#include "support.hpp"

using namespace hao;
using testing::probe_grid;
using testing::random_lattice_function;

namespace {

const std::vector<double> kSquare{10.0, 10.0};

PwcFunction step_1d(double at, double below, double above) {
  return PwcFunction({10.0}, 0.0, {{external_box({0.0}, {at}, std::vector<double>{10.0}), below},
                                   {external_box({at}, {10.0}, std::vector<double>{10.0}), above}});
}

}  // namespace

TEST_SUITE("pwc") {
  TEST_CASE("evaluate constant and half-open boundaries") {
    const PwcFunction c = constant(kSquare, 5.0);
    for (const auto& x : probe_grid(kSquare, 7)) CHECK(c(x) == 5.0);

    const PwcFunction f = step_1d(5.0, 1.0, 2.0);
    CHECK(f(std::vector<double>{4.999}) == 1.0);
    CHECK(f(std::vector<double>{5.0}) == 2.0);
    CHECK(f(std::vector<double>{10.0}) == 2.0);
    CHECK(f(std::vector<double>{0.0}) == 1.0);
  }

  TEST_CASE("evaluate outside the hypercube is a domain error") {
    const PwcFunction f = step_1d(5.0, 1.0, 2.0);
    CHECK_THROWS_AS(f(std::vector<double>{10.5}), DomainError);
    CHECK_THROWS_AS(f(std::vector<double>{-0.1}), DomainError);
    CHECK_THROWS_AS(f(std::vector<double>{1.0, 1.0}), DomainError);
  }

  TEST_CASE("piece whose upper bound equals max owns the top face") {
    const PwcFunction f(kSquare, 0.0, {{external_box({2, 2}, {10, 10}, kSquare), 7.0}});
    CHECK(f(Point{10, 10}) == 7.0);
    CHECK(f(Point{10, 2}) == 7.0);
    CHECK(f(Point{1.9, 10}) == 0.0);
  }

  TEST_CASE("pointwise max of constants") {
    const PwcFunction a = constant(kSquare, 3.0), b = constant(kSquare, 5.0);
    const TaggedCandidate c[] = {{0, &a}, {1, &b}};
    const auto m = pointwise_max_tagged(c);
    for (const auto& x : probe_grid(kSquare, 5)) {
      CHECK(m.max(x) == 5.0);
      CHECK(m.argmax(x) == 1);
    }
  }

  TEST_CASE("pointwise max prefers the marked tag on ties, then the lowest tag") {
    std::mt19937_64 rng(11);
    const PwcFunction f = random_lattice_function(rng, kSquare, 3, 5);
    const TaggedCandidate c[] = {{0, &f}, {1, &f}};
    const TagFunction marked(kSquare, 1);
    const auto with_mark = pointwise_max_tagged(c, &marked);
    const auto without = pointwise_max_tagged(c);
    for (const auto& x : probe_grid(kSquare, 11)) {
      CHECK(with_mark.argmax(x) == 1);
      CHECK(without.argmax(x) == 0);
    }
  }

  TEST_CASE("pointwise max of crossing 2-D steps matches a 50x50 grid") {
    const PwcFunction a(kSquare, 1.0, {{external_box({4, 0}, {10, 10}, kSquare), 6.0}});
    const PwcFunction b(kSquare, 2.0, {{external_box({0, 3}, {10, 7}, kSquare), 8.0}});
    const TaggedCandidate c[] = {{0, &a}, {1, &b}};
    const auto m = pointwise_max_tagged(c);
    const auto probes = probe_grid(kSquare, 50);
    for (const auto& x : probes) {
      const double va = a(x), vb = b(x);
      CHECK(m.max(x) == std::max(va, vb));
      CHECK(m.argmax(x) == (va >= vb ? 0 : 1));
    }
    CHECK(testing::disjoint_everywhere(m.max, probes));
  }

  TEST_CASE("pointwise max rejects an empty candidate list") {
    CHECK_THROWS_AS(pointwise_max_tagged({}), DomainError);
  }

  TEST_CASE("pointwise max is idempotent, commutative in value and associative") {
    std::mt19937_64 rng(5);
    const auto probes = probe_grid(kSquare, 23);
    for (int trial = 0; trial < 20; ++trial) {
      const PwcFunction f = random_lattice_function(rng, kSquare, 4, 9);
      const PwcFunction g = random_lattice_function(rng, kSquare, 4, 9);
      const PwcFunction h = random_lattice_function(rng, kSquare, 4, 9);
      const TaggedCandidate ff[] = {{0, &f}, {1, &f}};
      const TaggedCandidate fg[] = {{0, &f}, {1, &g}};
      const TaggedCandidate gf[] = {{0, &g}, {1, &f}};
      const auto m_ff = pointwise_max_tagged(ff).max;
      const auto m_fg = pointwise_max_tagged(fg).max;
      const auto m_gf = pointwise_max_tagged(gf).max;
      const TaggedCandidate left[] = {{0, &m_fg}, {1, &h}};
      const auto m_gh_list = [&] {
        const TaggedCandidate gh[] = {{0, &g}, {1, &h}};
        return pointwise_max_tagged(gh).max;
      }();
      const TaggedCandidate right[] = {{0, &f}, {1, &m_gh_list}};
      const auto l = pointwise_max_tagged(left).max;
      const auto r = pointwise_max_tagged(right).max;
      for (const auto& x : probes) {
        CHECK(m_ff(x) == f(x));
        CHECK(m_fg(x) == m_gf(x));
        CHECK(l(x) == r(x));
      }
    }
  }

  TEST_CASE("affine combination of constants and identity") {
    const PwcFunction four = constant(kSquare, 4.0), ten = constant(kSquare, 10.0);
    const Term t[] = {{0.5, &four}, {0.5, &ten}};
    const auto seven = affine_combine(t);
    for (const auto& x : probe_grid(kSquare, 5)) CHECK(seven(x) == 7.0);

    std::mt19937_64 rng(3);
    const PwcFunction f = random_lattice_function(rng, kSquare, 4, 9);
    const PwcFunction g = random_lattice_function(rng, kSquare, 4, 9);
    const Term id[] = {{1.0, &f}, {0.0, &g}};
    const auto same = affine_combine(id);
    for (const auto& x : probe_grid(kSquare, 21)) CHECK(same(x) == f(x));
  }

  TEST_CASE("affine combination of random functions matches direct evaluation") {
    std::mt19937_64 rng(17);
    const auto probes = probe_grid(kSquare, 31);
    for (int trial = 0; trial < 30; ++trial) {
      const PwcFunction f = random_lattice_function(rng, kSquare, 2, 9);
      const PwcFunction g = random_lattice_function(rng, kSquare, 2, 9);
      const PwcFunction h = random_lattice_function(rng, kSquare, 2, 9);
      const PwcFunction off = random_lattice_function(rng, kSquare, 2, 9);
      const Term t[] = {{0.25, &f}, {-1.5, &g}, {3.0, &h}};
      const auto sum = affine_combine(t, &off);
      for (const auto& x : probes) CHECK(sum(x) == doctest::Approx(0.25 * f(x) - 1.5 * g(x) + 3.0 * h(x) + off(x)).epsilon(1e-12));
      CHECK(testing::disjoint_everywhere(sum, probes));
    }
  }

  TEST_CASE("shift translates pieces") {
    const PwcFunction f({10.0}, 0.0, {{Box{{2.0}, {4.0}}, 9.0}});
    const double delta[] = {1.0};
    const PwcFunction g = shift(f, delta, 0.0);
    CHECK(g(Point{0.99}) == 0.0);
    CHECK(g(Point{1.0}) == 9.0);
    CHECK(g(Point{2.99}) == 9.0);
    CHECK(g(Point{3.0}) == 0.0);
  }

  TEST_CASE("shift of a constant with the same fill is the constant") {
    const PwcFunction c = constant(kSquare, 4.5);
    for (const std::vector<double>& delta : {std::vector<double>{-3, -1}, std::vector<double>{2, -7}, std::vector<double>{0, 0}}) {
      const auto g = shift(c, delta, 4.5);
      for (const auto& x : probe_grid(kSquare, 9)) CHECK(g(x) == 4.5);
    }
  }

  TEST_CASE("shift is the pull-back f(x + delta) with fill outside") {
    std::mt19937_64 rng(23);
    const auto probes = probe_grid(kSquare, 41);
    for (int trial = 0; trial < 30; ++trial) {
      const PwcFunction f = random_lattice_function(rng, kSquare, 4, 9);
      std::uniform_int_distribution<int> step(0, 4);
      const std::vector<double> delta{-double(step(rng)), -double(step(rng)) - 0.5};
      const PwcFunction g = shift(f, delta, -99.0);
      for (const auto& x : probes) {
        const Point y{x[0] + delta[0], x[1] + delta[1]};
        const bool inside = y[0] >= 0 && y[1] >= 0;
        CHECK(g(x) == (inside ? f(y) : -99.0));
      }
    }
  }

  TEST_CASE("shift then inverse shift restores f on the interior") {
    std::mt19937_64 rng(29);
    const auto probes = probe_grid(kSquare, 41);
    for (int trial = 0; trial < 20; ++trial) {
      const PwcFunction f = random_lattice_function(rng, kSquare, 4, 9);
      const std::vector<double> delta{-2.0, -3.0}, back{2.0, 3.0};
      const PwcFunction round = shift(shift(f, delta, 0.0), back, 0.0);
      for (const auto& x : probes)
        if (x[0] + 2.0 < 10.0 && x[1] + 3.0 < 10.0) CHECK(round(x) == f(x));
    }
  }

  TEST_CASE("shift never adds measure") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const PwcFunction r = random_lattice_function(rng, kSquare, 4, 1, true);
      const std::vector<double> delta{-1.5, -2.0};
      const double before = measure(r);
      const double after = measure(shift(r, delta, 0.0));
      CHECK(after <= before + 1e-9);
      // Translation of a region well inside X keeps its measure.
      const PwcFunction inner = indicator(kSquare, {Box{{1, 1}, {4, 5}}});
      CHECK(measure(shift(inner, delta, 0.0)) == doctest::Approx(measure(inner)));
    }
  }

  TEST_CASE("region algebra") {
    const Box a{{1, 1}, {6, 6}}, b{{4, 2}, {9, 8}};
    const PwcFunction A = indicator(kSquare, {a}), B = indicator(kSquare, {b});
    const auto aa = region_and(A, A);
    for (const auto& x : probe_grid(kSquare, 21)) CHECK(aa(x) == A(x));
    const double inter = 2.0 * 4.0;
    CHECK(measure(region_or(A, B)) == doctest::Approx(25.0 + 30.0 - inter));
    CHECK(measure(region_and(A, B)) == doctest::Approx(inter));
    CHECK(measure(region_minus(A, B)) == doctest::Approx(25.0 - inter));
    CHECK(measure(region_not(A)) == doctest::Approx(100.0 - 25.0));
    CHECK(is_empty(region_and(region_minus(A, B), B)));
    CHECK(is_empty(region_and(A, region_not(A))));
    CHECK(measure(intersect_box(A, b)) == doctest::Approx(inter));
    CHECK(intersects(A, b));
    CHECK_FALSE(intersects(A, Box{{7, 7}, {9, 9}}));
  }

  TEST_CASE("boolean operations reject non-indicators") {
    const PwcFunction two = constant(kSquare, 2.0);
    const PwcFunction A = indicator(kSquare, {Box{{1, 1}, {6, 6}}});
    CHECK_THROWS_AS(region_and(two, A), DomainError);
    CHECK_THROWS_AS(region_or(A, two), DomainError);
    CHECK_THROWS_AS(region_not(two), DomainError);
    CHECK_THROWS_AS(region_minus(two, A), DomainError);
    CHECK_THROWS_AS(is_empty(two), DomainError);
  }

  TEST_CASE("region algebra on random regions matches pointwise logic") {
    std::mt19937_64 rng(37);
    const auto probes = probe_grid(kSquare, 21);
    for (int trial = 0; trial < 40; ++trial) {
      const PwcFunction a = random_lattice_function(rng, kSquare, 4, 1, true);
      const PwcFunction b = random_lattice_function(rng, kSquare, 4, 1, true);
      const auto o = region_or(a, b), n = region_and(a, b), m = region_minus(a, b), c = region_not(a);
      for (const auto& x : probes) {
        const bool ia = a(x) != 0, ib = b(x) != 0;
        CHECK((o(x) != 0) == (ia || ib));
        CHECK((n(x) != 0) == (ia && ib));
        CHECK((m(x) != 0) == (ia && !ib));
        CHECK((c(x) != 0) == !ia);
      }
      CHECK(is_empty(n) == (measure(n) == 0.0));
    }
  }

  TEST_CASE("support") {
    CHECK(is_empty(support(constant(kSquare, 0.0))));
    const Box b{{2, 3}, {5, 9}};
    const PwcFunction p(kSquare, 0.0, {{b, 0.3}});
    const auto s = support(p);
    for (const auto& x : probe_grid(kSquare, 21)) CHECK(s(x) == (b.contains(x) ? 1.0 : 0.0));

    const PwcFunction q(kSquare, 0.0, {{Box{{4, 1}, {8, 6}}, 0.2}});
    const Term t[] = {{1.0, &p}, {1.0, &q}};
    const auto u = support(affine_combine(t));
    const auto expect = region_or(support(p), support(q));
    for (const auto& x : probe_grid(kSquare, 41)) CHECK(u(x) == expect(x));
  }

  TEST_CASE("simplify merges, preserves values and never grows") {
    const PwcFunction split({10.0}, 0.0, {{Box{{0.0}, {5.0}}, 3.0}, {Box{{5.0}, {kInf}}, 3.0}});
    CHECK(simplify(split, 0.0).size() == 1);

    std::mt19937_64 rng(41);
    const auto probes = probe_grid(kSquare, 31);
    for (int trial = 0; trial < 30; ++trial) {
      const PwcFunction f = random_lattice_function(rng, kSquare, 6, 2);
      const auto exact = simplify(f, 0.0);
      const auto loose = simplify(f, 1e-12);
      CHECK(exact.size() <= f.size());
      CHECK(loose.size() <= f.size());
      for (const auto& x : probes) {
        CHECK(exact(x) == f(x));
        CHECK(std::fabs(loose(x) - f(x)) <= 1e-12);
      }
    }
  }

  TEST_CASE("operation outputs stay disjoint on random inputs") {
    std::mt19937_64 rng(43);
    const auto probes = probe_grid(kSquare, 17);
    for (int trial = 0; trial < 20; ++trial) {
      const PwcFunction f = random_lattice_function(rng, kSquare, 5, 3);
      const PwcFunction r = random_lattice_function(rng, kSquare, 5, 1, true);
      const std::vector<double> delta{-1.0, -2.5};
      CHECK(testing::disjoint_everywhere(shift(f, delta, 0.0), probes));
      CHECK(testing::disjoint_everywhere(select(r, f, constant(kSquare, 1.0)), probes));
      CHECK(testing::disjoint_everywhere(region_not(r), probes));
      CHECK(testing::disjoint_everywhere(simplify(f, 0.5), probes));
    }
  }

  TEST_CASE("csv export") {
    const PwcFunction f({4.0, 4.0}, 0.0, {{Box{{1, 1}, {2, kInf}}, 2.5}});
    std::ostringstream pieces;
    write_pieces_csv(pieces, f);
    CHECK(pieces.str() == "lo_1,lo_2,hi_1,hi_2,value\n1,1,2,4,2.5\n");
    std::ostringstream grid;
    write_grid_csv(grid, f, 3);
    CHECK(grid.str().rfind("x_1,x_2,value\n0,0,0\n", 0) == 0);
    CHECK(grid.str().find("2,4,0\n") != std::string::npos);
  }
}
