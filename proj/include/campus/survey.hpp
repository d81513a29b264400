#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "campus/errors.hpp"

namespace campus::survey {

enum class Category { SocioDemographic, VrQuality, BarrierSimulation, DyslexiaAwareness, Overall };
enum class AnswerKind { Likert, Categorical };

std::string_view to_string(Category c);
std::optional<Category> category_from_string(std::string_view s);
std::string_view to_string(AnswerKind k);

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

struct Option {
  std::string id;
  std::string label;
  friend bool operator==(const Option&, const Option&) = default;
};

struct Question {
  std::string id;
  Category category = Category::Overall;
  AnswerKind kind = AnswerKind::Likert;
  std::string prompt;
  std::vector<Option> options;  // categorical only

  // Answer values in report order: option ids, or "1".."5".
  std::vector<std::string> value_ids() const;
};

struct Instrument {
  std::string id;
  std::vector<Question> questions;

  const Question* find(std::string_view question_id) const;

  // Throws SchemaError for malformed documents and InvariantError when the
  // category composition is not 3/4/3/4/1 or the overall item is missing.
  static Instrument parse(std::string_view document);
  static const Instrument& bundled();
  nlohmann::ordered_json to_json() const;
};

using Answer = std::variant<int, std::string>;  // Likert value or option id

struct Response {
  std::optional<std::string> session_id;
  std::map<std::string, Answer> answers;
  friend bool operator==(const Response&, const Response&) = default;
};

struct Issue {
  std::string question;
  std::string code;  // "missing" | "out-of-range" | "unknown-option" | "unknown-question" | "wrong-type"
  std::string message;
  friend bool operator==(const Issue&, const Issue&) = default;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Issue> issues);
  const std::vector<Issue>& issues() const noexcept { return issues_; }
  bool names(std::string_view question) const;

 private:
  std::vector<Issue> issues_;
};

// `answers` maps question id to an integer (Likert) or option id string.
// Returns every problem at once via ValidationError.
Response validate_response(const Instrument& instrument, const nlohmann::json& answers,
                           std::optional<std::string> session_id = std::nullopt);

// --- aggregation -------------------------------------------------------------

// Percentages and means are held as exact integer hundredths.
struct OptionStat {
  std::string option;
  std::string label;
  int count = 0;
  int hundredths = 0;
  double percentage() const { return hundredths / 100.0; }
  friend bool operator==(const OptionStat&, const OptionStat&) = default;
};

struct QuestionStat {
  std::string question;
  Category category = Category::Overall;
  AnswerKind kind = AnswerKind::Likert;
  std::vector<OptionStat> options;
  int respondents = 0;
  std::optional<int> mean_hundredths;  // Likert only

  const OptionStat* option(std::string_view id) const;
  double percentage_sum() const;
  friend bool operator==(const QuestionStat&, const QuestionStat&) = default;
};

struct AggregateReport {
  std::string instrument;
  int respondents = 0;
  std::vector<QuestionStat> questions;
  int overall_mean_hundredths = 0;

  const QuestionStat* question(std::string_view id) const;
  double overall_mean() const { return overall_mean_hundredths / 100.0; }
  friend bool operator==(const AggregateReport&, const AggregateReport&) = default;
};

// count / total * 100 rounded half-up to 2 decimals, in hundredths.
int percent_hundredths(long long count, long long total);

// Throws std::invalid_argument for an empty set.
AggregateReport aggregate(const Instrument& instrument, const std::vector<Response>& responses);

enum class ExportFormat { Json, Csv };
std::string export_report(const AggregateReport& report, ExportFormat format);
AggregateReport parse_report(const Instrument& instrument, std::string_view document, ExportFormat format);

// --- response storage ----------------------------------------------------------

// One respondent per row, question columns in instrument order, then session_id.
std::string responses_csv_header(const Instrument& instrument);
std::string response_csv_row(const Instrument& instrument, const Response& response);
std::string responses_to_csv(const Instrument& instrument, const std::vector<Response>& responses);
// Validates every row; ValidationError issues carry "row N: " prefixes.
std::vector<Response> responses_from_csv(const Instrument& instrument, std::string_view text);

nlohmann::ordered_json report_to_json(const AggregateReport& report);

}  // namespace campus::survey
