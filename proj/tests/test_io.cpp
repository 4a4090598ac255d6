// Tests for text output and config primitives: round-trip number
// formatting, RFC-4180 quoting, and config-file parsing.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "medianbm/io.hpp"

using namespace medianbm;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("format_double round-trips exactly", "[io]") {
    const double vals[] = {0.0,
                           1.0,
                           -1.0,
                           0.1,
                           1.0 / 3.0,
                           3.7929344971030989e-21,
                           1.1107207345395915618,
                           std::numeric_limits<double>::min(),
                           std::numeric_limits<double>::max(),
                           std::numeric_limits<double>::denorm_min(),
                           -4.9406564584124654e-324};
    for (double v : vals) {
        const std::string s = format_double(v);
        REQUIRE(parse_double(s) == v);
    }

    // shortest form: no trailing digits beyond what round-trip needs
    REQUIRE(format_double(0.1) == "0.1");
    REQUIRE(format_double(1.0) == "1");
    REQUIRE(format_double(-2.5) == "-2.5");
}

TEST_CASE("format_double handles non-finite values", "[io]") {
    const std::string pinf = format_double(std::numeric_limits<double>::infinity());
    const std::string ninf = format_double(-std::numeric_limits<double>::infinity());
    const std::string nan = format_double(std::numeric_limits<double>::quiet_NaN());
    REQUIRE(pinf == "inf");
    REQUIRE(ninf == "-inf");
    REQUIRE(nan == "nan");
}

TEST_CASE("integer formatting and parsing round-trips", "[io]") {
    REQUIRE(format_int(0) == "0");
    REQUIRE(format_int(-17) == "-17");
    REQUIRE(format_int(std::numeric_limits<std::int64_t>::max()) ==
            "9223372036854775807");
    REQUIRE(format_int(std::numeric_limits<std::int64_t>::min()) ==
            "-9223372036854775808");
    REQUIRE(parse_int("9223372036854775807") ==
            std::numeric_limits<std::int64_t>::max());
    REQUIRE(format_uint(std::numeric_limits<std::uint64_t>::max()) ==
            "18446744073709551615");
    REQUIRE(parse_uint("18446744073709551615") ==
            std::numeric_limits<std::uint64_t>::max());
}

TEST_CASE("parsers reject garbage and trailing text", "[io]") {
    REQUIRE_THROWS_AS(parse_double("abc"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_double("1.5x"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_double(""), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_int("1.5"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_int("12 "), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_uint("-3"), std::invalid_argument);
    REQUIRE(parse_double("1e-6") == 1e-6);
    REQUIRE(parse_int("-42") == -42);
}

TEST_CASE("csv_field quotes per RFC 4180", "[io]") {
    REQUIRE(csv_field("plain") == "plain");
    REQUIRE(csv_field("") == "");
    REQUIRE(csv_field("has,comma") == "\"has,comma\"");
    REQUIRE(csv_field("has\"quote") == "\"has\"\"quote\"");
    REQUIRE(csv_field("line\nbreak") == "\"line\nbreak\"");
    REQUIRE(csv_field("cr\rhere") == "\"cr\rhere\"");
    REQUIRE(csv_field("a=b;c=d") == "a=b;c=d");
}

TEST_CASE("write_csv_row joins and terminates", "[io]") {
    std::ostringstream os;
    write_csv_row(os, {"a", "b,c", "d\"e"});
    REQUIRE(os.str() == "a,\"b,c\",\"d\"\"e\"\n");

    std::ostringstream empty;
    write_csv_row(empty, {});
    REQUIRE(empty.str() == "\n");
}

TEST_CASE("parse_csv inverts write_csv_row", "[io]") {
    const std::vector<std::vector<std::string>> rows = {
        {"id", "value", "note"},
        {"a", "1.5", "plain"},
        {"b,c", "-2", "comma, inside"},
        {"d\"e", "", "quote \"inside\""},
        {"multi\nline", "3", "\r\n mix"},
    };
    std::ostringstream os;
    for (const auto& row : rows) write_csv_row(os, row);

    std::istringstream in(os.str());
    REQUIRE(parse_csv(in) == rows);
}

TEST_CASE("parse_csv handles quoting, CRLF, and a missing final newline",
          "[io]") {
    {
        std::istringstream in("a,\"b,c\",\"d\"\"e\"\r\nx,,z");
        const auto rows = parse_csv(in);
        REQUIRE(rows ==
                std::vector<std::vector<std::string>>{{"a", "b,c", "d\"e"},
                                                      {"x", "", "z"}});
    }
    {
        // trailing comma means a trailing empty field; blank lines skip
        std::istringstream in("a,\n\n\"\"\n");
        const auto rows = parse_csv(in);
        REQUIRE(rows ==
                std::vector<std::vector<std::string>>{{"a", ""}, {""}});
    }
    {
        std::istringstream empty("");
        REQUIRE(parse_csv(empty).empty());
    }
}

TEST_CASE("parse_csv rejects malformed quoting", "[io]") {
    {
        std::istringstream in("a\"b\n");
        REQUIRE_THROWS_WITH(parse_csv(in), ContainsSubstring("quote"));
    }
    {
        std::istringstream in("\"unterminated\n");
        REQUIRE_THROWS_AS(parse_csv(in), std::invalid_argument);
    }
}
