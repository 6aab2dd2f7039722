#include "lostchance/tables.hpp"

#include <random>

#include "gtest/gtest.h"

namespace lostchance {
namespace {

TEST(Table2, AllRowsPassAtPublishedParameters) {
  const auto t = table2();
  EXPECT_EQ(t.rows.size(), 4u);
  EXPECT_TRUE(t.passed()) << t.render();
  EXPECT_EQ(t.count(CellStatus::pass), 4u);
}

TEST(Table2, RandomAdmissibleParameters) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    TableParams p;
    p.p0 = 0.01 + 0.99 * u(rng);
    p.p1 = p.p0 * u(rng);
    p.delta_v = std::exp(12.0 * u(rng));
    EXPECT_TRUE(table2(p).passed()) << table2(p).render();
  }
}

TEST(Table4, TenRowsWithOneFlag) {
  const auto t = table4();
  EXPECT_EQ(t.rows.size(), 10u);
  EXPECT_TRUE(t.passed()) << t.render();
  EXPECT_EQ(t.count(CellStatus::pass), 9u);
  EXPECT_EQ(t.count(CellStatus::flag), 1u);
  EXPECT_EQ(t.rows[5].row_status(), CellStatus::flag);
  const auto text = t.render();
  EXPECT_NE(text.find("1125"), std::string::npos);
  EXPECT_NE(text.find("565"), std::string::npos);
  EXPECT_NE(text.find("comonotone H-FI LD-C CC-I: a1=0 a2=0 a3=17.5 a4=40"), std::string::npos) << text;
}

TEST(Table4, DetectsAWrongPrintedValue) {
  auto t = table4();
  auto& row = t.rows[3];
  row.printed[0] = 64.0;
  row.computed.clear();
  row.status.clear();
  detail::fill_row(row, prize_case(), t.outcomes, [](double) { return 0.1; });
  EXPECT_EQ(row.row_status(), CellStatus::fail);
}

TEST(Tables56, PassAndDifferWhereExpected) {
  TableParams p{0.8, 0.35, 40.0, 10.0};
  const auto t5 = table5(p);
  const auto t6 = table6(p);
  EXPECT_TRUE(t5.passed()) << t5.render();
  EXPECT_TRUE(t6.passed()) << t6.render();
}

TEST(ReproduceTable, UnknownId) {
  EXPECT_THROW(reproduce_table(3), std::invalid_argument);
  EXPECT_NO_THROW(reproduce_table(6));
}

}  // namespace
}  // namespace lostchance
