#include "hirota/scan_io.hpp"

#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "hirota/mps.hpp"

using namespace hirota;

TEST(Format, G17RoundTripsDoublesExactly) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = unif(rng) * std::pow(10.0, rep % 17 - 8);
    const double back = std::strtod(format_g17(x).c_str(), nullptr);
    EXPECT_EQ(back, x);
  }
  EXPECT_EQ(format_g17(0.0), "0");
}

TEST(DataTable, DeterministicSerialization) {
  DataTable t;
  t.schema = "hirota.test.v1";
  t.config = {{"m", "3"}, {"note", "a\"b"}};
  t.columns = {"x", "flag"};
  t.add_row({cell(1.0 / 3.0), cell(true)});
  t.add_row({cell(-2.5e-13), cell(false)});
  std::ostringstream a, b;
  t.write_csv(a);
  t.write_csv(b);
  EXPECT_EQ(a.str(), b.str());
  std::ostringstream ja, jb;
  t.write_json(ja);
  t.write_json(jb);
  EXPECT_EQ(ja.str(), jb.str());
  EXPECT_NE(ja.str().find("\"schema_version\": \"hirota.test.v1\""), std::string::npos);
  EXPECT_NE(ja.str().find("a\\\"b"), std::string::npos);
  EXPECT_THROW(t.add_row({cell(1.0)}), ValidationError);
  EXPECT_THROW(parse_output_format("xml"), ValidationError);
}

// the exported coefficient text reproduces assemble_truncated bit-exactly
TEST(MpsRoundTrip, TextualCoefficientsRebuildTheSameOperator) {
  const auto root = make_root(2, 3);
  const cx lambda(0.5, 0.0);
  const auto table = build_mps_table(lambda, 1.0, root, 2);
  MpsTable reparsed = table;
  for (auto& s : reparsed.strings) {
    const double re = std::strtod(format_g17(s.coefficient.real()).c_str(), nullptr);
    const double im = std::strtod(format_g17(s.coefficient.imag()).c_str(), nullptr);
    s.coefficient = cx(re, im);
  }
  const auto geom = make_geometry(2, 3);
  const Mat a = assemble_truncated(table, geom);
  const Mat b = assemble_truncated(reparsed, geom);
  EXPECT_TRUE(a == b);  // bit-exact
}
