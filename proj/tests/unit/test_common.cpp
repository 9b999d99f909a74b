#include <gtest/gtest.h>

#include <sstream>

#include "common/csv.hpp"
#include "common/date.hpp"
#include "common/error.hpp"
#include "common/text.hpp"

namespace pulse {
namespace {

TEST(Date, ParsesIsoCompactAndUsForms) {
  const auto d = Date::from_ymd(2020, 3, 18);
  EXPECT_EQ(Date::parse_iso("2020-03-18"), d);
  EXPECT_EQ(Date::parse_compact("20200318"), d);
  EXPECT_EQ(Date::parse_any("3/18/20"), d);
  EXPECT_EQ(Date::parse_any("3/18/2020"), d);
  EXPECT_EQ(d.iso(), "2020-03-18");
}

TEST(Date, RejectsInvalidCalendarDays) {
  EXPECT_FALSE(Date::parse_iso("2020-02-30"));
  EXPECT_FALSE(Date::parse_compact("20190229"));
  EXPECT_TRUE(Date::parse_compact("20200229"));
  EXPECT_FALSE(Date::parse_compact("2020031"));
  EXPECT_FALSE(Date::parse_iso("2020-3-18"));
  EXPECT_FALSE(Date::parse_any("13/1/20"));
}

TEST(Date, IsoWeekStartsOnMonday) {
  const auto wed = Date::from_ymd(2020, 3, 18);
  EXPECT_EQ(wed.iso_weekday(), 3u);
  EXPECT_EQ(wed.week_start(), Date::from_ymd(2020, 3, 16));
  const auto sun = Date::from_ymd(2020, 3, 22);
  EXPECT_EQ(sun.iso_weekday(), 7u);
  EXPECT_EQ(sun.week_start(), Date::from_ymd(2020, 3, 16));
  EXPECT_EQ(Date::from_ymd(1969, 12, 31).week_start(), Date::from_ymd(1969, 12, 29));
}

TEST(Date, RangeIsInclusive) {
  const DateRange r{Date::from_ymd(2020, 1, 1), Date::from_ymd(2020, 5, 31)};
  EXPECT_EQ(r.length(), 152);
  EXPECT_TRUE(r.contains(Date::from_ymd(2020, 5, 31)));
  EXPECT_FALSE(r.contains(Date::from_ymd(2020, 6, 1)));
  EXPECT_TRUE((DateRange{r.last, r.first}).empty());
}

TEST(Text, ParseDoubleIsStrict) {
  EXPECT_EQ(text::parse_double(" -3.5 "), -3.5);
  EXPECT_EQ(text::parse_double("+2"), 2.0);
  EXPECT_FALSE(text::parse_double("3.5x"));
  EXPECT_FALSE(text::parse_double(""));
  EXPECT_FALSE(text::parse_double("inf"));
  EXPECT_FALSE(text::parse_double("nan"));
}

TEST(Text, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 36163.0, -0.72, 1e-300}) {
    EXPECT_EQ(text::parse_double(text::format_double(v)), v);
  }
  EXPECT_EQ(text::format_double(5.0), "5");
}

TEST(Csv, SplitsQuotedFields) {
  EXPECT_EQ(csv::split_line(R"(a,"b,c","d ""e""",)"), (std::vector<std::string>{"a", "b,c", R"(d "e")", ""}));
  EXPECT_EQ(csv::escape("plain"), "plain");
  EXPECT_EQ(csv::escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, ReaderSkipsBomBlankLinesAndCarriageReturns) {
  std::istringstream in("\xEF\xBB\xBFpublisher,label\r\n\r\ncnn.com,Left\r\n");
  csv::Reader r(in);
  std::vector<std::string> row;
  ASSERT_TRUE(r.next(row));
  EXPECT_EQ(row, (std::vector<std::string>{"publisher", "label"}));
  ASSERT_TRUE(r.next(row));
  EXPECT_EQ(row, (std::vector<std::string>{"cnn.com", "Left"}));
  EXPECT_EQ(r.line_number(), 3u);
  EXPECT_FALSE(r.next(row));
}

TEST(Csv, HeaderLookupIgnoresCase) {
  csv::Header h({"State", "Date", "Reduction"});
  EXPECT_EQ(h.find("state"), 0u);
  EXPECT_EQ(h.find("REDUCTION"), 2u);
  EXPECT_FALSE(h.find("grade"));
}

TEST(Error, CarriesCodeName) {
  const Error e(Errc::duplicate_key_in_batch, "boom");
  EXPECT_EQ(e.code(), Errc::duplicate_key_in_batch);
  EXPECT_EQ(to_string(e.code()), "duplicate_key_in_batch");
  EXPECT_STREQ(e.what(), "boom");
}

}  // namespace
}  // namespace pulse
