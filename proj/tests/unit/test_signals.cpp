#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "common/error.hpp"
#include "signals/signals.hpp"
#include "support/fixtures.hpp"

namespace pulse::signals {
namespace {

std::ifstream open_data(const char* name) {
  std::ifstream in(testing::data_dir() / name);
  EXPECT_TRUE(in.good()) << name;
  return in;
}

const SignalSeries& by_region(const std::vector<SignalSeries>& all, const std::string& region,
                              const std::string& category = "") {
  for (const auto& s : all) {
    if (s.region == region && s.category == category) return s;
  }
  throw std::runtime_error("no series " + region + "/" + category);
}

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return Errc::invalid_argument;
}

Date d(int m, int day) { return Date::from_ymd(2020, m, day); }

// ---- distancing grades ----------------------------------------------------

TEST(GradeDistancing, BandEdgesAreLowerInclusive) {
  EXPECT_EQ(grade_distancing(-0.72), Grade::A);
  EXPECT_EQ(grade_distancing(-0.70), Grade::A);
  EXPECT_EQ(grade_distancing(-0.6999), Grade::B);
  EXPECT_EQ(grade_distancing(-0.55), Grade::B);
  EXPECT_EQ(grade_distancing(-0.5499), Grade::C);
  EXPECT_EQ(grade_distancing(-0.40), Grade::C);
  EXPECT_EQ(grade_distancing(-0.3999), Grade::D);
  EXPECT_EQ(grade_distancing(-0.25), Grade::D);
  EXPECT_EQ(grade_distancing(-0.2499), Grade::F);
  EXPECT_EQ(grade_distancing(0.0), Grade::F);
  EXPECT_EQ(grade_distancing(0.35), Grade::F);
}

TEST(GradeDistancing, NonFiniteIsRejected) {
  EXPECT_EQ(error_of([] { grade_distancing(NAN); }), Errc::non_finite);
  EXPECT_EQ(error_of([] { grade_distancing(-INFINITY); }), Errc::non_finite);
}

TEST(GradeDistancing, MonotoneInDecrease) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.0);
  for (int i = 0; i < 20000; ++i) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    // a is the larger decrease, so its grade is at least as good.
    EXPECT_LE(static_cast<int>(grade_distancing(a)), static_cast<int>(grade_distancing(b)));
  }
}

TEST(Distancing, LoadsAndGradesFixture) {
  auto in = open_data("distancing.csv");
  const auto all = load_distancing(in);
  ASSERT_EQ(all.size(), 2u);
  const auto grades = grade_series(by_region(all, "Indiana"));
  std::string letters;
  for (const auto& g : grades) letters += to_char(g.grade);
  EXPECT_EQ(letters, "FDCBAAF");
  EXPECT_EQ(grades[5].date, d(3, 21));
  EXPECT_DOUBLE_EQ(grades[5].reduction, -0.72);
}

TEST(Distancing, RegionFilterAndErrors) {
  auto in = open_data("distancing.csv");
  const auto ohio = load_distancing(in, std::string("ohio"));
  ASSERT_EQ(ohio.size(), 1u);
  EXPECT_EQ(ohio[0].points.size(), 3u);

  EXPECT_EQ(error_of([] {
              std::istringstream s("state,date,reduction\nX,2020-03-01,-0.1\nX,2020-03-01,-0.2\n");
              load_distancing(s);
            }),
            Errc::duplicate_date);
  EXPECT_EQ(error_of([] {
              std::istringstream s("state,date,reduction\nX,2020-03-01,abc\n");
              load_distancing(s);
            }),
            Errc::non_finite);
  EXPECT_EQ(error_of([] {
              SignalSeries s{SignalKind::cases_new, "X", {}, {}};
              grade_series(s);
            }),
            Errc::wrong_kind);
}

// ---- case series ----------------------------------------------------------

TEST(CaseSeries, SumsJhuRowsPerStateAndAddsUs) {
  auto in = open_data("cases_wide.csv");
  const auto load = load_case_series(in, SignalKind::cases_cumulative);
  ASSERT_EQ(load.series.size(), 4u);  // Indiana, Ohio, US, Utah
  const auto& indiana = by_region(load.series, "Indiana");
  ASSERT_EQ(indiana.points.size(), 14u);
  EXPECT_EQ(indiana.points.front().date, d(3, 9));
  EXPECT_EQ(indiana.points.back().value, 301.0);
  const auto& us = by_region(load.series, "US");
  EXPECT_EQ(us.points.back().value, 201.0 + 100 + 247 + 78);
}

TEST(CaseSeries, DecreaseWarnsAndNewDailyClamps) {
  auto in = open_data("cases_wide.csv");
  const auto load = load_case_series(in, SignalKind::cases_cumulative);
  ASSERT_EQ(load.warnings.size(), 1u);
  EXPECT_EQ(load.warnings[0].region, "Utah");
  EXPECT_EQ(load.warnings[0].date, d(3, 16));
  EXPECT_EQ(load.warnings[0].previous, 12.0);
  EXPECT_EQ(load.warnings[0].value, 10.0);

  const auto nd = new_daily(by_region(load.series, "Utah"));
  EXPECT_EQ(nd.clamps, 1u);
  EXPECT_EQ(nd.series.kind, SignalKind::cases_new);
  EXPECT_EQ(nd.series.points[7].value, 0.0);
  EXPECT_EQ(nd.series.points[8].value, 4.0);
}

TEST(CaseSeries, RegionFilterSkipsUsAggregate) {
  auto in = open_data("deaths_wide.csv");
  const auto load = load_case_series(in, SignalKind::deaths_cumulative, std::string("Ohio"));
  ASSERT_EQ(load.series.size(), 1u);
  EXPECT_EQ(load.series[0].kind, SignalKind::deaths_cumulative);
  EXPECT_EQ(load.series[0].points.back().value, 6.0);
}

TEST(CaseSeries, SimpleLayoutUsesFirstColumn) {
  std::istringstream s("region,2020-04-22,2020-04-23,2020-04-24\nUS,800000,830000,866163\n");
  const auto load = load_case_series(s, SignalKind::cases_cumulative);
  ASSERT_EQ(load.series.size(), 1u);
  const auto nd = new_daily(load.series[0]);
  EXPECT_EQ(nd.series.points[2].value, 36163.0);
  EXPECT_EQ(nd.series.points[2].date, d(4, 24));
}

TEST(CaseSeries, Errors) {
  EXPECT_EQ(error_of([] {
              std::istringstream s("region,1/1/20\n");
              load_case_series(s, SignalKind::cases_new);
            }),
            Errc::wrong_kind);
  EXPECT_EQ(error_of([] {
              std::istringstream s("");
              load_case_series(s, SignalKind::cases_cumulative);
            }),
            Errc::empty_input);
  EXPECT_EQ(error_of([] {
              std::istringstream s("region,name\nUS,x\n");
              load_case_series(s, SignalKind::cases_cumulative);
            }),
            Errc::empty_input);
  EXPECT_EQ(error_of([] {
              std::istringstream s("region,1/1/20,2020-01-01\nUS,1,2\n");
              load_case_series(s, SignalKind::cases_cumulative);
            }),
            Errc::duplicate_date);
  EXPECT_EQ(error_of([] {
              std::istringstream s("region,1/1/20\nUS,-3\n");
              load_case_series(s, SignalKind::cases_cumulative);
            }),
            Errc::invalid_argument);
  EXPECT_EQ(error_of([] {
              SignalSeries s{SignalKind::mobility_change, "X", {}, {}};
              new_daily(s);
            }),
            Errc::wrong_kind);
}

class NewDailyProperty : public ::testing::TestWithParam<unsigned> {};

TEST_P(NewDailyProperty, NonNegativeAndTelescoping) {
  std::mt19937 rng(GetParam());
  SignalSeries cum{SignalKind::cases_cumulative, "R", {}, {}};
  double level = 0;
  for (int i = 0; i < 120; ++i) {
    level += static_cast<double>(rng() % 500);
    cum.points.push_back({d(1, 1) + (i), level});
  }
  const auto nd = new_daily(cum);
  double sum = 0;
  for (const auto& p : nd.series.points) {
    EXPECT_GE(p.value, 0.0);
    sum += p.value;
  }
  EXPECT_EQ(nd.clamps, 0u);
  // Without decreases the new-daily values sum back to the final cumulative.
  EXPECT_EQ(sum, cum.points.back().value);
  EXPECT_NO_THROW(validate(nd.series));
}

INSTANTIATE_TEST_SUITE_P(Seeds, NewDailyProperty, ::testing::Range(1u, 6u));

TEST(Validate, RejectsBadSeries) {
  SignalSeries s{SignalKind::cases_cumulative, "R", {}, {{d(3, 2), 1}, {d(3, 1), 2}}};
  EXPECT_EQ(error_of([&] { validate(s); }), Errc::duplicate_date);
  s.points = {{d(3, 1), -1}};
  EXPECT_EQ(error_of([&] { validate(s); }), Errc::invalid_argument);
  s.points = {{d(3, 1), NAN}};
  EXPECT_EQ(error_of([&] { validate(s); }), Errc::non_finite);
  s = {SignalKind::trends_interest, "R", "k", {{d(3, 1), 101}}};
  EXPECT_EQ(error_of([&] { validate(s); }), Errc::invalid_argument);
  s = {SignalKind::mobility_change, "R", "parks", {{d(3, 1), -40}}};
  EXPECT_NO_THROW(validate(s));
}

// ---- mobility -------------------------------------------------------------

TEST(Mobility, LoadsCategoriesWithGoogleSuffix) {
  auto in = open_data("mobility.csv");
  const auto all = load_mobility(in);
  EXPECT_EQ(all.size(), 12u);
  const auto& retail = by_region(all, "Indiana", "retail_and_recreation");
  ASSERT_EQ(retail.points.size(), 3u);
  EXPECT_EQ(retail.points[2].value, -24.0);
  EXPECT_EQ(by_region(all, "Indiana", "parks").points.size(), 2u);
  EXPECT_EQ(by_region(all, "Ohio", "residential").points.back().value, 12.0);
}

TEST(Mobility, RejectsUnknownCategoryAndDuplicateDate) {
  EXPECT_EQ(error_of([] {
              std::istringstream s("region,date,beaches\nX,2020-03-01,3\n");
              load_mobility(s);
            }),
            Errc::unknown_category);
  EXPECT_EQ(error_of([] {
              std::istringstream s("region,date,parks\nX,2020-03-01,3\nX,2020-03-01,4\n");
              load_mobility(s);
            }),
            Errc::duplicate_date);
}

TEST(Mobility, WeekdayBaselineIsPerWeekdayMedian) {
  SignalSeries raw{SignalKind::mobility_change, "X", "parks", {}};
  // 2020-01-06 is a Monday; five weeks with value = weekday*10 + week.
  for (int w = 0; w < 5; ++w) {
    for (int wd = 0; wd < 7; ++wd) raw.points.push_back({d(1, 6) + (w * 7 + wd), wd * 10.0 + w});
  }
  const auto b = compute_weekday_baseline(raw, {d(1, 6), d(2, 9)});
  for (int wd = 0; wd < 7; ++wd) EXPECT_EQ(b[wd], wd * 10.0 + 2) << wd;

  const auto even = compute_weekday_baseline(raw, {d(1, 6), d(2, 2)});
  EXPECT_EQ(even[0], 1.5);

  EXPECT_EQ(error_of([&] { compute_weekday_baseline(raw, {d(1, 6), d(1, 10)}); }), Errc::missing_weekday);
}

// ---- demographics ---------------------------------------------------------

TEST(Demographics, CountsBecomePercentOfPopulation) {
  auto in = open_data("demographics.csv");
  const auto t = load_demographics(in);
  EXPECT_DOUBLE_EQ(*t.get("Indiana", "smokers"), 20.0);
  EXPECT_DOUBLE_EQ(*t.get("Indiana", "obesity"), 34.1);
  EXPECT_DOUBLE_EQ(*t.get("Indiana", "ethnicity:white"), 84.8);
  EXPECT_DOUBLE_EQ(*t.get("Ohio", "obesity"), 34.8);
  EXPECT_FALSE(t.get("Ohio", "smokers"));
  EXPECT_EQ(t.population.at("Indiana"), 6750000.0);
}

TEST(Demographics, Errors) {
  EXPECT_EQ(error_of([] {
              std::istringstream s("state,indicator,value,unit\nX,smokers,100,count\n");
              load_demographics(s);
            }),
            Errc::missing_population);
  EXPECT_EQ(error_of([] {
              std::istringstream s("state,indicator,value,unit\nX,obesity,104,percent\n");
              load_demographics(s);
            }),
            Errc::percent_out_of_range);
  EXPECT_EQ(error_of([] {
              std::istringstream s("state,indicator,value,unit\nX,population,10,count\nX,smokers,11,count\n");
              load_demographics(s);
            }),
            Errc::percent_out_of_range);
  EXPECT_EQ(error_of([] {
              std::istringstream s("state,indicator,value,unit\nX,age:young,40,percent\nX,age:old,59,percent\n");
              load_demographics(s);
            }),
            Errc::share_group_mismatch);
  std::istringstream ok("state,indicator,value,unit\nX,age:young,40.3,percent\nX,age:old,59.3,percent\n");
  EXPECT_NO_THROW(load_demographics(ok));
}

// ---- trends ---------------------------------------------------------------

TEST(Trends, NormalizesToPeakHundred) {
  auto in = open_data("trends.csv");
  const auto all = load_trends(in);
  ASSERT_EQ(all.size(), 3u);
  const auto& ind = by_region(all, "Indiana", "coronavirus");
  EXPECT_EQ(ind.points[0].value, 50.0);
  EXPECT_EQ(ind.points[1].value, 100.0);
  EXPECT_EQ(ind.points[2].value, 25.0);
  const auto& us = by_region(all, "US", "coronavirus");
  EXPECT_EQ(us.points[0].value, 50.0);
  EXPECT_EQ(us.points[2].value, 76.0);  // 75.8 rounds up
  for (const auto& p : by_region(all, "Indiana", "hand sanitizer").points) EXPECT_EQ(p.value, 0.0);
}

TEST(Trends, RoundsHalfUp) {
  const std::vector<Point> shares = {{d(1, 1), 1}, {d(1, 2), 200}, {d(1, 3), 3}};
  const auto out = normalize_interest(shares);
  EXPECT_EQ(out[0].value, 1.0);  // 0.5 -> 1
  EXPECT_EQ(out[2].value, 2.0);  // 1.5 -> 2
}

TEST(Trends, NegativeShareRejected) {
  const std::vector<Point> shares = {{d(1, 1), -0.1}};
  EXPECT_EQ(error_of([&] { normalize_interest(shares); }), Errc::negative_share);
}

TEST(Trends, NormalizedRangeProperty) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point> shares;
    for (int i = 0; i < 60; ++i) shares.push_back({d(1, 1) + (i), u(rng) * u(rng)});
    const auto out = normalize_interest(shares);
    double peak = 0;
    for (const auto& p : out) {
      EXPECT_GE(p.value, 0.0);
      EXPECT_LE(p.value, 100.0);
      EXPECT_EQ(p.value, std::floor(p.value));
      peak = std::max(peak, p.value);
    }
    EXPECT_EQ(peak, 100.0);
  }
}

}  // namespace
}  // namespace pulse::signals
