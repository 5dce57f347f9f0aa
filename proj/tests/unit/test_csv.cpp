#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "xstab/csv.hpp"
#include "xstab/errors.hpp"

using namespace xstab;

TEST_CASE("parse plain rows") {
  auto rows = csv::parse("a,b\nc,d\n", "mem");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b"});
  CHECK(rows[1] == std::vector<std::string>{"c", "d"});
}

TEST_CASE("parse quoted fields with escapes, commas, newlines") {
  auto rows = csv::parse("\"a,1\",\"say \"\"hi\"\"\"\n\"two\nlines\",x\n", "mem");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "a,1");
  CHECK(rows[0][1] == "say \"hi\"");
  CHECK(rows[1][0] == "two\nlines");
}

TEST_CASE("parse handles CRLF and a missing final newline") {
  auto rows = csv::parse("a,b\r\nc,d", "mem");
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == std::vector<std::string>{"c", "d"});
}

TEST_CASE("unterminated quote raises with line number") {
  CHECK_THROWS_AS(csv::parse("a,\"oops\n", "mem"), IngestionError);
  try {
    csv::parse("x\na,\"oops", "mem");
  } catch (const IngestionError& e) {
    CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
  }
}

TEST_CASE("escape_field round trips through parse") {
  std::vector<std::string> nasty = {"plain", "with,comma", "with \"quote\"",
                                    "multi\nline", ""};
  std::string row = csv::join_row(nasty);
  auto rows = csv::parse(row + "\n", "mem");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] == nasty);
}
