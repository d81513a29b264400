#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "campus/survey.hpp"
#include "oracles.hpp"

using namespace campus;
using namespace campus::survey;
using nlohmann::json;

namespace {

const Instrument& inst() { return Instrument::bundled(); }

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(CAMPUS_SOURCE_DIR) + "/tests/fixtures/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<Response> table1() { return responses_from_csv(inst(), read_fixture("table1_responses.csv")); }

json valid_answers() {
  json a = {{"gender", "female"}, {"age", "18-25"}, {"relationship", "classmate"}};
  for (const auto& q : inst().questions) {
    if (q.kind == AnswerKind::Likert) a[q.id] = 4;
  }
  return a;
}

std::string format_hundredths(int h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d.%02d", h / 100, h % 100);
  return buf;
}

std::vector<Response> random_responses(std::mt19937_64& gen, int n) {
  std::vector<Response> out;
  for (int i = 0; i < n; ++i) {
    json a;
    for (const auto& q : inst().questions) {
      if (q.kind == AnswerKind::Likert) {
        a[q.id] = static_cast<int>(gen() % 5) + 1;
      } else {
        a[q.id] = q.options[gen() % q.options.size()].id;
      }
    }
    out.push_back(validate_response(inst(), a));
  }
  return out;
}

}  // namespace

TEST(Instrument, BundledComposition) {
  const auto& i = inst();
  EXPECT_EQ(i.questions.size(), 15u);
  std::map<Category, int> per;
  for (const auto& q : i.questions) {
    ++per[q.category];
    EXPECT_EQ(q.kind == AnswerKind::Categorical, q.category == Category::SocioDemographic) << q.id;
  }
  EXPECT_EQ(per[Category::SocioDemographic], 3);
  EXPECT_EQ(per[Category::VrQuality], 4);
  EXPECT_EQ(per[Category::BarrierSimulation], 3);
  EXPECT_EQ(per[Category::DyslexiaAwareness], 4);
  EXPECT_EQ(per[Category::Overall], 1);
  const auto* rel = i.find("relationship");
  ASSERT_NE(rel, nullptr);
  EXPECT_EQ(rel->value_ids(), (std::vector<std::string>{"classmate", "teacher", "relative", "other", "none"}));
}

TEST(Instrument, RejectsWrongComposition) {
  auto doc = inst().to_json();
  doc["questions"].erase(doc["questions"].begin() + 5);
  try {
    Instrument::parse(doc.dump());
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_TRUE(e.violates("category-composition"));
  }
}

TEST(Instrument, RoundTripsThroughJson) {
  const auto again = Instrument::parse(inst().to_json().dump());
  EXPECT_EQ(again.questions.size(), inst().questions.size());
  EXPECT_EQ(again.to_json(), inst().to_json());
}

TEST(ValidateResponse, AcceptsCompleteAnswers) {
  const auto r = validate_response(inst(), valid_answers(), "s-1");
  EXPECT_EQ(r.answers.size(), 15u);
  EXPECT_EQ(std::get<int>(r.answers.at("overall")), 4);
  EXPECT_EQ(std::get<std::string>(r.answers.at("gender")), "female");
}

TEST(ValidateResponse, LikertSixNamesQuestion) {
  auto a = valid_answers();
  a["motion-sickness"] = 6;
  try {
    validate_response(inst(), a);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.names("motion-sickness"));
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].code, "out-of-range");
  }
}

TEST(ValidateResponse, MissingOverallRejected) {
  auto a = valid_answers();
  a.erase("overall");
  try {
    validate_response(inst(), a);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(e.names("overall"));
    EXPECT_EQ(e.issues()[0].code, "missing");
  }
}

TEST(ValidateResponse, ReportsEveryIssue) {
  auto a = valid_answers();
  a["gender"] = "robot";
  a["age"] = 3;
  a["shoe-size"] = 42;
  a["interaction"] = 0;
  try {
    validate_response(inst(), a);
    FAIL();
  } catch (const ValidationError& e) {
    std::map<std::string, std::string> codes;
    for (const auto& i : e.issues()) codes[i.question] = i.code;
    EXPECT_EQ(codes["gender"], "unknown-option");
    EXPECT_EQ(codes["age"], "wrong-type");
    EXPECT_EQ(codes["shoe-size"], "unknown-question");
    EXPECT_EQ(codes["interaction"], "out-of-range");
  }
}

TEST(Aggregate, TableOneFixture) {
  const auto responses = table1();
  ASSERT_EQ(responses.size(), 32u);
  const auto r = aggregate(inst(), responses);
  EXPECT_EQ(r.respondents, 32);
  const auto* gender = r.question("gender");
  EXPECT_EQ(gender->option("male")->count, 19);
  EXPECT_EQ(gender->option("male")->hundredths, 5938);
  EXPECT_EQ(gender->option("female")->hundredths, 4063);
  EXPECT_EQ(gender->option("other")->hundredths, 0);
  EXPECT_EQ(r.question("relationship")->option("teacher")->hundredths, 2188);
  EXPECT_EQ(r.question("relationship")->option("relative")->hundredths, 1875);
  EXPECT_EQ(r.question("age")->option("over-50")->hundredths, 625);
  EXPECT_EQ(r.question("age")->option("18-25")->hundredths, 6250);
  EXPECT_EQ(r.question("age")->option("26-50")->hundredths, 3125);
  EXPECT_EQ(r.overall_mean_hundredths, 500);
  EXPECT_DOUBLE_EQ(r.overall_mean(), 5.0);
}

TEST(Aggregate, PercentagesMatchDecimalOracle) {
  const auto r = aggregate(inst(), table1());
  for (const auto& q : r.questions) {
    for (const auto& o : q.options) {
      EXPECT_EQ(format_hundredths(o.hundredths), oracle::percent_string(o.count, q.respondents)) << q.question;
    }
  }
  for (long long total = 1; total <= 200; ++total) {
    for (long long count = 0; count <= total; ++count) {
      ASSERT_EQ(format_hundredths(percent_hundredths(count, total)), oracle::percent_string(count, total));
    }
  }
}

TEST(Aggregate, PercentagesSumToHundred) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = aggregate(inst(), random_responses(gen, 1 + static_cast<int>(gen() % 97)));
    for (const auto& q : r.questions) EXPECT_NEAR(q.percentage_sum(), 100.0, 0.02 + 1e-9) << q.question;
  }
  for (const auto& q : aggregate(inst(), table1()).questions) EXPECT_NEAR(q.percentage_sum(), 100.0, 0.02 + 1e-9);
}

TEST(Aggregate, OrderInvariantAndMeanInRange) {
  std::mt19937_64 gen(9);
  auto responses = random_responses(gen, 40);
  const auto a = aggregate(inst(), responses);
  std::shuffle(responses.begin(), responses.end(), gen);
  EXPECT_EQ(aggregate(inst(), responses), a);
  for (const auto& q : a.questions) {
    if (q.kind != AnswerKind::Likert) {
      EXPECT_FALSE(q.mean_hundredths.has_value());
      continue;
    }
    ASSERT_TRUE(q.mean_hundredths.has_value());
    EXPECT_GE(*q.mean_hundredths, 100);
    EXPECT_LE(*q.mean_hundredths, 500);
  }
}

TEST(Aggregate, MeanRoundsHalfUp) {
  std::vector<Response> rs;
  for (int v : {1, 2, 2}) {
    auto a = valid_answers();
    a["overall"] = v;
    rs.push_back(validate_response(inst(), a));
  }
  EXPECT_EQ(aggregate(inst(), rs).overall_mean_hundredths, 167);  // 5/3 = 1.666...
}

TEST(Aggregate, EmptySetRejected) { EXPECT_THROW(aggregate(inst(), {}), std::invalid_argument); }

TEST(Export, JsonRoundTrip) {
  const auto r = aggregate(inst(), table1());
  EXPECT_EQ(parse_report(inst(), export_report(r, ExportFormat::Json), ExportFormat::Json), r);
}

TEST(Export, CsvRoundTripAndShape) {
  const auto r = aggregate(inst(), table1());
  const auto csv = export_report(r, ExportFormat::Csv);
  EXPECT_EQ(parse_report(inst(), csv, ExportFormat::Csv), r);

  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "question_id,category,option,count,percentage");
  std::size_t rows = 0;
  std::map<std::string, int> counts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    ASSERT_EQ(f.size(), 5u) << line;
    counts[f[0]] += std::stoi(f[3]);
  }
  std::size_t expected_rows = 0;
  for (const auto& q : inst().questions) expected_rows += q.value_ids().size();
  EXPECT_EQ(rows, expected_rows);
  for (const auto& q : inst().questions) EXPECT_EQ(counts[q.id], 32) << q.id;
}

TEST(Export, TamperedPercentageRejected) {
  auto csv = export_report(aggregate(inst(), table1()), ExportFormat::Csv);
  const auto pos = csv.find("59.38");
  ASSERT_NE(pos, std::string::npos);
  csv.replace(pos, 5, "60.00");
  EXPECT_ANY_THROW(parse_report(inst(), csv, ExportFormat::Csv));
}

TEST(ResponsesCsv, RoundTrip) {
  const auto rs = table1();
  EXPECT_EQ(responses_from_csv(inst(), responses_to_csv(inst(), rs)), rs);
  EXPECT_EQ(rs.front().session_id, "p01");
}

TEST(ResponsesCsv, BadRowNamesRow) {
  auto text = responses_to_csv(inst(), table1());
  const auto pos = text.find(",5,p03");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 3, ",9,");
  try {
    responses_from_csv(inst(), text);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(e.issues()[0].message.find("row 3"), std::string::npos) << e.issues()[0].message;
  }
}
