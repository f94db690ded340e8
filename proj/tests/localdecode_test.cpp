#include <gtest/gtest.h>

#include "mpir/localdecode.hpp"
#include "oracles.hpp"

using namespace mpir;

namespace {

struct Fixture {
  CodeParams params;
  MultiPoly poly;
  Codeword cw;
};

Fixture make_fixture(unsigned p, unsigned e, unsigned m, unsigned s, unsigned d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const CodeParams params = make_params(make_field(p, e), m, s, d);
  MultiPoly F = oracle::random_poly(params.field, m, d, rng);
  Codeword cw = encode(params, F);
  return {params, std::move(F), std::move(cw)};
}

}  // namespace

TEST(LocalDecode, RecoversCleanSymbols) {
  for (const bool transversal : {true, false}) {
    const Fixture fx = make_fixture(2, 2, 3, 2, 5, 41);
    Rng rng(1);
    const SymbolOracle oracle = [&](const Point& pt) { return fx.cw.tuple(point_index(fx.params, pt)); };
    for (std::uint64_t j = 0; j < fx.params.n; ++j) {
      const RecoverResult r = local_decode(fx.params, j, oracle, rng, transversal);
      ASSERT_EQ(r.status, RecoverStatus::ok) << to_string(r.status);
      ASSERT_EQ(r.value, fx.cw.tuple(j));
    }
  }
}

TEST(LocalDecode, ToleratesCorruptedHyperplanes) {
  // Transversal lines meet each hyperplane once, so wiping nu hyperplanes
  // puts at most nu errors on every line.
  const Fixture fx = make_fixture(2, 4, 2, 2, 14, 42);
  ASSERT_EQ(fx.params.nu, 4u);
  Rng rng(2);
  std::uniform_int_distribution<std::uint32_t> pick(0, 15);
  const SymbolOracle oracle = [&](const Point& pt) {
    EvalTuple t = fx.cw.tuple(point_index(fx.params, pt));
    if (hyperplane_of(fx.params, pt) < 4)
      for (Elem& e : t) e = Elem{pick(rng)};
    return t;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint64_t j = rng() % fx.params.n;
    const RecoverResult r = local_decode(fx.params, j, oracle, rng, /*transversal_only=*/true);
    ASSERT_EQ(r.status, RecoverStatus::ok);
    ASSERT_EQ(r.value, fx.cw.tuple(j));
  }
}

TEST(LocalDecode, SideValuesAreLineDerivatives) {
  const Fixture fx = make_fixture(2, 2, 3, 3, 7, 43);
  Rng rng(3);
  const Point base = index_point(fx.params, 5);
  const LineQuerySet lines = plan_lines(fx.params, base, rng, false);
  for (std::size_t i = 0; i < lines.directions.size(); ++i) {
    std::vector<EvalTuple> answers;
    for (const Point& r : lines.query_points[i]) answers.push_back(fx.cw.tuple(point_index(fx.params, r)));
    const LineWord w = side_values(fx.params, answers, lines.directions[i]);
    const UniPoly g = oracle::line_restriction(fx.poly, base, lines.directions[i]);
    EXPECT_EQ(w, line_encode(g, fx.params.s));
  }
}

TEST(LocalDecode, DegenerateDirectionsAreDetected) {
  const Fixture fx = make_fixture(2, 2, 3, 2, 5, 44);
  // Four transversal directions (0, a, 1) span only a plane.
  std::vector<std::uint64_t> classes;
  std::vector<Point> dirs;
  for (std::uint64_t c = 0; c < transversal_direction_count(fx.params) && classes.size() < 4; ++c) {
    const Point u = transversal_direction(fx.params, c);
    if (u[0].is_zero()) {
      classes.push_back(c);
      dirs.push_back(u);
    }
  }
  ASSERT_EQ(classes.size(), 4u);
  EXPECT_FALSE(directions_solvable(fx.params, dirs));
  const Point base = index_point(fx.params, 9);
  const LineQuerySet lines = make_line_query_set(fx.params, base, classes);
  std::vector<std::vector<EvalTuple>> answers(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (const Point& r : lines.query_points[i]) answers[i].push_back(fx.cw.tuple(point_index(fx.params, r)));
  EXPECT_EQ(recover_symbol(fx.params, lines, answers).status, RecoverStatus::singular_system);
  const std::uint64_t repeated[] = {0, 0, 1, 2};
  EXPECT_THROW(make_line_query_set(fx.params, base, repeated), PlanningError);
}

TEST(LocalDecode, SampledDirectionsAreDistinctAndSolvable) {
  const CodeParams params = make_params(make_field(2, 2), 3, 2, 5);
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    for (const bool transversal : {true, false}) {
      const auto classes = sample_direction_classes(params, rng, transversal);
      ASSERT_EQ(classes.size(), params.sigma);
      std::vector<Point> dirs;
      for (std::uint64_t c : classes) {
        if (transversal) {
          ASSERT_LT(c, transversal_direction_count(params));
        }
        dirs.push_back(direction_class(params, c));
      }
      std::vector<std::uint64_t> sorted = classes;
      std::sort(sorted.begin(), sorted.end());
      ASSERT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
      ASSERT_TRUE(directions_solvable(params, dirs));
    }
  }
}

TEST(LocalDecode, InconsistentLinesAreNotAccepted) {
  // Two lines decode cleanly to the wrong polynomial's restriction: the
  // order-0 equations then disagree.
  const Fixture fx = make_fixture(2, 4, 2, 2, 29, 45);
  Rng rng(5);
  const Point base = index_point(fx.params, 17);
  const LineQuerySet lines = plan_lines(fx.params, base, rng, true);
  std::vector<std::vector<EvalTuple>> answers(lines.directions.size());
  for (std::size_t i = 0; i < lines.directions.size(); ++i)
    for (const Point& r : lines.query_points[i]) {
      EvalTuple t = fx.cw.tuple(point_index(fx.params, r));
      if (i == 0) t[0] = fx.params.field->add(t[0], Elem{1});  // shifts the line by a constant
      answers[i].push_back(t);
    }
  const RecoverResult r = recover_symbol(fx.params, lines, answers);
  EXPECT_NE(r.status, RecoverStatus::ok);
}
