#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "rkindex/error.hpp"
#include "rkindex/table.hpp"

using namespace rkindex;

TEST_CASE("CSV quoting and metadata comments") {
  Table t;
  t.columns = {"label", "n", "x"};
  t.add_row({std::string("plain"), std::int64_t{3}, 0.5});
  t.add_row({std::string("a,b \"q\""), std::monostate{}, 1e-20});
  t.meta["seed"] = 7;
  CHECK(t.to_csv() == "label,n,x\nplain,3,0.5\n\"a,b \"\"q\"\"\",,1e-20\n");
  CHECK(t.to_csv(true).rfind("# seed=7\nlabel,n,x\n", 0) == 0);
  CHECK_THROWS_AS(t.add_row({std::string("short")}), Error);
  CHECK(t.column_index("x") == 2);
  CHECK_THROWS_AS(t.column_index("nope"), Error);
}

TEST_CASE("JSON export maps empty and non-finite cells to null") {
  Table t;
  t.name = "demo";
  t.columns = {"a", "b"};
  t.add_row({std::monostate{}, std::nan("")});
  const auto doc = Json::parse(t.to_json());
  CHECK(doc["rows"][0]["a"].is_null());
  CHECK(doc["rows"][0]["b"].is_null());
  CHECK(doc["columns"].size() == 2);
  const auto side = Json::parse(t.sidecar_json());
  CHECK(side["name"] == "demo");
  CHECK(side["row_count"] == 1);
}

TEST_CASE("double formatting round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(39.47) == "39.47");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(format_double(M_PI)) == M_PI);
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hex64(0xabcull) == "0000000000000abc");
}

TEST_CASE("SOURCE_DATE_EPOCH pins the provenance timestamp") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  CHECK(provenance_timestamp() == "2023-11-14T22:13:20Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  CHECK(provenance_timestamp().size() == 20);
}
