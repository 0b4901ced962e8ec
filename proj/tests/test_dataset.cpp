#include <doctest.h>

#include <cmath>

#include "tarmos/dataset.hpp"
#include "tarmos/errors.hpp"
#include "test_support.hpp"

using namespace tarmos;
using namespace tarmos::test;

namespace {

Schema case_schema() {
  Schema s;
  s.columns = {
      {"ks4pct", ColumnKind::Continuous, {}},
      {"smoke14b", ColumnKind::Binary, {}},
      {"parity", ColumnKind::Categorical, {"0", "1", "2", "3+"}},
      {"ks2pct", ColumnKind::Continuous, {}},
  };
  s.derived = {{"ks2pct_sq", "ks2pct", 2.0}};
  return s;
}

}  // namespace

TEST_CASE("missing tokens become MISSING cells") {
  const char* csv =
      "ks4pct,smoke14b,parity,ks2pct\n"
      "50,0,1,40\n"
      "61.5,,2,44\n"
      "70,1,3+,NA\n";
  Dataset d = load_csv_text(csv, case_schema(), "test");
  REQUIRE(d.n_rows() == 3);
  CHECK(d.column("smoke14b").n_missing() == 1);
  CHECK_FALSE(d.is_observed(d.column_index("smoke14b"), 1));
  CHECK(d.column("ks2pct").n_missing() == 1);
  // Categorical levels decode to indices.
  CHECK(d.cell(d.column_index("parity"), 2) == 3.0);
}

TEST_CASE("binary domain violation names row and column") {
  const char* csv =
      "ks4pct,smoke14b,parity,ks2pct\n"
      "50,0,1,40\n"
      "61,2,1,44\n";
  CHECK_THROWS_WITH_AS(load_csv_text(csv, case_schema(), "test"),
                       doctest::Contains("row 2, column 'smoke14b'"), DataError);
}

TEST_CASE("derived column computed at load") {
  const char* csv =
      "ks4pct,smoke14b,parity,ks2pct\n"
      "50,0,1,4\n";
  Dataset d = load_csv_text(csv, case_schema(), "test");
  CHECK(d.cell(d.column_index("ks2pct_sq"), 0) == 16.0);
}

TEST_CASE("unknown categorical level is rejected") {
  const char* csv =
      "ks4pct,smoke14b,parity,ks2pct\n"
      "50,0,7,4\n";
  CHECK_THROWS_WITH_AS(load_csv_text(csv, case_schema(), "test"),
                       doctest::Contains("unknown categorical level"), DataError);
}

TEST_CASE("header is order-insensitive and required") {
  const char* shuffled =
      "parity,ks2pct,ks4pct,smoke14b\n"
      "1,4,50,0\n";
  Dataset d = load_csv_text(shuffled, case_schema(), "test");
  CHECK(d.cell(d.column_index("ks4pct"), 0) == 50.0);

  const char* missing_col =
      "parity,ks2pct,ks4pct\n"
      "1,4,50\n";
  CHECK_THROWS_WITH_AS(load_csv_text(missing_col, case_schema(), "test"),
                       doctest::Contains("missing header for column 'smoke14b'"), DataError);

  const char* unknown_col =
      "parity,ks2pct,ks4pct,smoke14b,extra\n"
      "1,4,50,0,9\n";
  CHECK_THROWS_WITH_AS(load_csv_text(unknown_col, case_schema(), "test"),
                       doctest::Contains("'extra' not in schema"), DataError);
}

TEST_CASE("quoted fields and embedded separators") {
  Schema s;
  s.columns = {{"name", ColumnKind::Categorical, {"a,b", "c\"d"}},
               {"v", ColumnKind::Continuous, {}}};
  const char* csv =
      "name,v\n"
      "\"a,b\",1\n"
      "\"c\"\"d\",2\n";
  Dataset d = load_csv_text(csv, s, "test");
  CHECK(d.cell(0, 0) == 0.0);
  CHECK(d.cell(0, 1) == 1.0);
  std::string out = to_csv_text(d);
  Dataset d2 = load_csv_text(out, s, "round");
  CHECK(d.identical_to(d2));
}

TEST_CASE("complete_record_mask") {
  Dataset d = make_dataset({
      col("a", ColumnKind::Continuous, {1.0, kNA, 3.0}),
      col("b", ColumnKind::Binary, {0.0, 1.0, kNA}),
  });
  SUBCASE("conjunction over listed vars") {
    auto mask = complete_record_mask(d, {"a", "b"});
    CHECK(mask == std::vector<std::uint8_t>{1, 0, 0});
  }
  SUBCASE("empty list is vacuously true") {
    auto mask = complete_record_mask(d, {});
    CHECK(mask == std::vector<std::uint8_t>{1, 1, 1});
  }
  SUBCASE("unknown variable") {
    CHECK_THROWS_AS(complete_record_mask(d, {"zzz"}), DataError);
  }
}

TEST_CASE("cohort-scale completeness arithmetic") {
  // 14,684 rows of which exactly 3,313 are complete.
  const std::size_t n = 14684, complete = 3313;
  std::vector<double> a(n, 1.0);
  for (std::size_t i = complete; i < n; ++i) a[i] = kNA;
  Dataset d = make_dataset({col("smoke14b", ColumnKind::Continuous, a)});
  auto mask = complete_record_mask(d, {"smoke14b"});
  std::size_t sum = 0;
  for (auto m : mask) sum += m;
  CHECK(sum == complete);
  CHECK(static_cast<double>(sum) / static_cast<double>(n) ==
        doctest::Approx(0.2256).epsilon(1e-3));
}

TEST_CASE("refresh_derived tracks its source") {
  Schema s;
  s.columns = {{"iq8", ColumnKind::Continuous, {}}};
  s.derived = {{"iq8_cbrt", "iq8", 1.0 / 3.0}};
  Dataset d = load_csv_text("iq8\n\n27\n", s, "test");
  const std::size_t src = d.column_index("iq8");
  const std::size_t der = d.column_index("iq8_cbrt");

  CHECK_FALSE(d.is_observed(der, 0));
  CHECK(d.cell(der, 1) == doctest::Approx(3.0).epsilon(1e-12));

  d.set_cell(src, 0, 8.0);
  d.refresh_derived();
  CHECK(d.cell(der, 0) == doctest::Approx(2.0).epsilon(1e-12));

  SUBCASE("idempotent") {
    Dataset before = d;
    d.refresh_derived();
    CHECK(d.identical_to(before));
  }
  SUBCASE("missing source keeps derived missing") {
    d.set_missing(src, 1);
    d.refresh_derived();
    CHECK_FALSE(d.is_observed(der, 1));
  }
  SUBCASE("fractional power of a negative source") {
    d.set_cell(src, 0, -5.0);
    CHECK_THROWS_WITH_AS(d.refresh_derived(),
                         doctest::Contains("fractional power of a negative value"), DataError);
  }
  SUBCASE("non-derived columns never change") {
    Dataset before = d;
    d.refresh_derived();
    CHECK(d.column("iq8").cells == before.column("iq8").cells);
    CHECK(d.column("iq8").observed == before.column("iq8").observed);
  }
}

TEST_CASE("csv round trip reproduces cells and masks") {
  const char* csv =
      "ks4pct,smoke14b,parity,ks2pct\n"
      "50.1234567890123,0,1,4\n"
      ",1,3+,0.1\n"
      "70,,0,\n";
  Schema s = case_schema();
  Dataset d = load_csv_text(csv, s, "test");
  std::string out = to_csv_text(d);
  Dataset d2 = load_csv_text(out, s, "round");
  CHECK(d.identical_to(d2));
}

TEST_CASE("schema validation") {
  Schema s;
  s.columns = {{"a", ColumnKind::Continuous, {}}, {"a", ColumnKind::Binary, {}}};
  CHECK_THROWS_AS(s.validate(), PlanError);

  Schema s2;
  s2.columns = {{"a", ColumnKind::Continuous, {}}};
  s2.derived = {{"d", "missing_src", 2.0}};
  CHECK_THROWS_AS(s2.validate(), PlanError);

  Schema s3;
  s3.columns = {{"a", ColumnKind::Binary, {}}};
  s3.derived = {{"d", "a", 2.0}};  // derived must reference a continuous column
  CHECK_THROWS_AS(s3.validate(), PlanError);
}
