#include <gtest/gtest.h>

#include <random>

#include "cuplen/cohomology.hpp"
#include "cuplen/cup.hpp"
#include "oracle.hpp"

using namespace cuplen;

namespace {

Filtration full(int n, const std::vector<oracle::Verts>& simplices) {
  return Filtration::from_simplices(n, oracle::dimension_order(n, simplices).order);
}

Cochain random_cochain(const Filtration& f, int dim, std::mt19937_64& rng) {
  std::vector<index_t> t;
  for (const auto& e : f.simplices())
    if (e.dim == dim && rng() % 3 == 0) t.push_back(e.index);
  return Cochain::from_terms(dim, t);
}

std::vector<oracle::Verts> as_vertex_lists(const Filtration& f, const Cochain& c) {
  std::vector<oracle::Verts> out;
  for (index_t t : c.terms) out.push_back(f.vertices(Simplex{c.dim, t}));
  return out;
}

}  // namespace

TEST(CupProduct, Examples) {
  const auto f = full(4, oracle::closure({{0, 1, 2}, {2, 3}}));
  const Cochain a{1, {simplex_index({0, 1})}}, b{1, {simplex_index({1, 2})}}, c{1, {simplex_index({2, 3})}};
  EXPECT_EQ(cup_product(a, b, f), (Cochain{2, {simplex_index({0, 1, 2})}}));
  EXPECT_TRUE(cup_product(a, c, f).is_zero());
  // product simplex absent from the complex
  EXPECT_TRUE(cup_product(b, c, f).is_zero());
  // vertex-degree factors
  EXPECT_EQ(cup_product(Cochain{0, {0}}, a, f), a);
}

TEST(CupProduct, DimensionGuard) {
  const auto f = full(3, oracle::closure({{0, 1, 2}}));
  const Cochain t{2, {0}};
  EXPECT_TRUE(cup_product(t, Cochain{1, {0}}, f).is_zero());
  EXPECT_THROW(cup_product(Cochain{1, {999}}, Cochain{1, {0}}, f), std::invalid_argument);
}

TEST(CupProduct, Bilinear) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 5);
    const auto f = full(n, oracle::random_flag_complex(n, 0.7, 3, rng));
    for (int p = 1; p <= 2; ++p) {
      const auto a = random_cochain(f, p, rng), b = random_cochain(f, p, rng), c = random_cochain(f, 1, rng);
      EXPECT_EQ(cup_product(cochain_add(a, b), c, f), cochain_add(cup_product(a, c, f), cup_product(b, c, f)));
      EXPECT_EQ(cup_product(c, cochain_add(a, b), f), cochain_add(cup_product(c, a, f), cup_product(c, b, f)));
    }
  }
}

TEST(CupProduct, ParityCancels) {
  // [0,1]*[1,3] and [0,2]*[2,3] land on different triangles; [0,1,3] gets two
  // contributions from a 2-term cochain pairing.
  const auto f = full(4, oracle::closure({{0, 1, 2, 3}}));
  const Cochain a{1, {simplex_index({0, 1})}};
  const Cochain b{1, {simplex_index({1, 3}), simplex_index({1, 2})}};
  const auto p = cup_product(a, b, f);
  EXPECT_EQ(p, (Cochain{2, {simplex_index({0, 1, 2}), simplex_index({0, 1, 3})}}));
  const auto twice = cup_product(cochain_add(a, Cochain{1, {simplex_index({0, 1})}}), b, f);
  EXPECT_TRUE(twice.is_zero());
}

TEST(CupProduct, LeibnizOnCocycles) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 4);
    const auto c = oracle::random_order(n, oracle::random_flag_complex(n, 0.6, 3, rng), rng);
    const auto f = Filtration::from_simplices(n, c.order);
    const auto bc = persistent_cohomology(f);
    for (const auto& x : bc.bars)
      for (const auto& y : bc.bars) {
        if (x.dim < 1 || y.dim < 1 || x.dim + y.dim > f.maxdim()) continue;
        const auto cut = x.death_key < y.death_key ? x.death_key : y.death_key;
        const auto prod = cup_product(x.cocycle, y.cocycle, f);
        EXPECT_TRUE(coboundary_before(f, prod, cut).is_zero());
      }
  }
}

TEST(CupProduct, MinimalTorusGeneratorsMultiplyNontrivially) {
  const auto c = oracle::dimension_order(7, oracle::minimal_torus());
  const auto f = Filtration::from_simplices(7, c.order);
  const auto bc = persistent_cohomology(f);
  std::vector<const AnnotatedBar*> h1;
  for (const auto& b : bc.bars)
    if (b.dim == 1 && b.essential()) h1.push_back(&b);
  ASSERT_EQ(h1.size(), 2u);
  const auto prod = cup_product(h1[0]->cocycle, h1[1]->cocycle, f);
  ASSERT_FALSE(prod.is_zero());
  EXPECT_FALSE(oracle::is_coboundary(c, c.order.size(), 2, as_vertex_lists(f, prod)));
}
