#include "campus/survey.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "campus/bundled_data.hpp"

namespace campus::survey {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 5> kCategoryNames{{
    {Category::SocioDemographic, "socio-demographic"},
    {Category::VrQuality, "vr-quality"},
    {Category::BarrierSimulation, "barrier-simulation"},
    {Category::DyslexiaAwareness, "dyslexia-awareness"},
    {Category::Overall, "overall"},
}};

constexpr std::array<std::pair<Category, int>, 5> kComposition{{
    {Category::SocioDemographic, 3},
    {Category::VrQuality, 4},
    {Category::BarrierSimulation, 3},
    {Category::DyslexiaAwareness, 4},
    {Category::Overall, 1},
}};

constexpr std::string_view kOverallQuestion = "overall";

std::string format_hundredths(int h) {
  const char* sign = h < 0 ? "-" : "";
  const int a = std::abs(h);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%d.%02d", sign, a / 100, a % 100);
  return buf;
}

int parse_hundredths(std::string_view s) {
  const auto dot = s.find('.');
  const std::string whole(s.substr(0, dot));
  std::string frac = dot == std::string_view::npos ? "" : std::string(s.substr(dot + 1));
  if (frac.size() > 2 || whole.empty()) throw std::invalid_argument("bad percentage '" + std::string(s) + "'");
  frac.resize(2, '0');
  return std::stoi(whole) * 100 + std::stoi(frac);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

std::string answer_text(const Answer& a) {
  if (const auto* i = std::get_if<int>(&a)) return std::to_string(*i);
  return std::get<std::string>(a);
}

}  // namespace

std::string_view to_string(Category c) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (cat == c) return name;
  }
  return "overall";
}

std::optional<Category> category_from_string(std::string_view s) {
  for (const auto& [cat, name] : kCategoryNames) {
    if (name == s) return cat;
  }
  return std::nullopt;
}

std::string_view to_string(AnswerKind k) { return k == AnswerKind::Likert ? "likert" : "categorical"; }

std::vector<std::string> Question::value_ids() const {
  std::vector<std::string> ids;
  if (kind == AnswerKind::Likert) {
    for (int v = kLikertMin; v <= kLikertMax; ++v) ids.push_back(std::to_string(v));
  } else {
    for (const auto& o : options) ids.push_back(o.id);
  }
  return ids;
}

const Question* Instrument::find(std::string_view question_id) const {
  for (const auto& q : questions) {
    if (q.id == question_id) return &q;
  }
  return nullptr;
}

Instrument Instrument::parse(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", e.what());
  }
  Instrument inst;
  try {
    inst.id = doc.at("id").get<std::string>();
    const auto& qs = doc.at("questions");
    if (!qs.is_array()) throw SchemaError("questions", "must be an array");
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const std::string path = "questions[" + std::to_string(i) + "]";
      const auto& qj = qs[i];
      Question q;
      q.id = qj.at("id").get<std::string>();
      q.prompt = qj.at("prompt").get<std::string>();
      const auto cat = category_from_string(qj.at("category").get<std::string>());
      if (!cat) throw SchemaError(path + ".category", "unknown category");
      q.category = *cat;
      const auto kind = qj.at("kind").get<std::string>();
      if (kind == "likert") {
        q.kind = AnswerKind::Likert;
      } else if (kind == "categorical") {
        q.kind = AnswerKind::Categorical;
        for (const auto& o : qj.at("options")) {
          q.options.push_back({o.at("id").get<std::string>(), o.at("label").get<std::string>()});
        }
        if (q.options.empty()) throw SchemaError(path + ".options", "categorical question without options");
      } else {
        throw SchemaError(path + ".kind", "must be likert or categorical");
      }
      inst.questions.push_back(std::move(q));
    }
  } catch (const json::exception& e) {
    throw SchemaError("$", e.what());
  }

  std::vector<RuleViolation> violations;
  for (const auto& [cat, expected] : kComposition) {
    const auto n = std::count_if(inst.questions.begin(), inst.questions.end(),
                                 [cat = cat](const Question& q) { return q.category == cat; });
    if (n != expected) {
      violations.push_back({"category-composition", std::string(to_string(cat)),
                            "expected " + std::to_string(expected) + " questions, found " + std::to_string(n)});
    }
  }
  for (const auto& q : inst.questions) {
    const bool demographic = q.category == Category::SocioDemographic;
    if (demographic != (q.kind == AnswerKind::Categorical)) {
      violations.push_back({"answer-kind", q.id, "only socio-demographic questions are categorical"});
    }
  }
  std::vector<std::string> ids;
  for (const auto& q : inst.questions) ids.push_back(q.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    violations.push_back({"question-id-unique", "questions", "duplicate question id"});
  }
  const auto* overall = inst.find(kOverallQuestion);
  if (overall == nullptr || overall->category != Category::Overall) {
    violations.push_back({"overall-question", "questions", "the overall question must have id 'overall'"});
  }
  if (!violations.empty()) throw InvariantError(std::move(violations));
  return inst;
}

const Instrument& Instrument::bundled() {
  static const Instrument inst = parse(campus::bundled::survey_instrument());
  return inst;
}

ordered_json Instrument::to_json() const {
  ordered_json qs = ordered_json::array();
  for (const auto& q : questions) {
    ordered_json j{{"id", q.id}, {"category", to_string(q.category)}, {"kind", to_string(q.kind)}, {"prompt", q.prompt}};
    if (q.kind == AnswerKind::Categorical) {
      ordered_json opts = ordered_json::array();
      for (const auto& o : q.options) opts.push_back({{"id", o.id}, {"label", o.label}});
      j["options"] = std::move(opts);
    }
    qs.push_back(std::move(j));
  }
  return {{"id", id}, {"likert_scale", {{"min", kLikertMin}, {"max", kLikertMax}}}, {"questions", std::move(qs)}};
}

ValidationError::ValidationError(std::vector<Issue> issues)
    : Error([&] {
        std::string msg = "invalid survey response";
        for (const auto& i : issues) msg += "; " + i.question + ": " + i.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

bool ValidationError::names(std::string_view question) const {
  return std::any_of(issues_.begin(), issues_.end(), [&](const Issue& i) { return i.question == question; });
}

Response validate_response(const Instrument& instrument, const json& answers,
                           std::optional<std::string> session_id) {
  std::vector<Issue> issues;
  if (!answers.is_object()) throw ValidationError({{"", "wrong-type", "answers must be an object"}});
  Response r;
  r.session_id = std::move(session_id);
  for (const auto& [key, _] : answers.items()) {
    if (instrument.find(key) == nullptr) issues.push_back({key, "unknown-question", "not part of the instrument"});
  }
  for (const auto& q : instrument.questions) {
    const auto it = answers.find(q.id);
    if (it == answers.end() || it->is_null()) {
      issues.push_back({q.id, "missing", "no answer"});
      continue;
    }
    if (q.kind == AnswerKind::Likert) {
      if (!it->is_number_integer()) {
        issues.push_back({q.id, "wrong-type", "expected an integer from 1 to 5"});
        continue;
      }
      const auto v = it->get<long long>();
      if (v < kLikertMin || v > kLikertMax) {
        issues.push_back({q.id, "out-of-range", "answer " + std::to_string(v) + " is outside 1..5"});
        continue;
      }
      r.answers[q.id] = static_cast<int>(v);
    } else {
      if (!it->is_string()) {
        issues.push_back({q.id, "wrong-type", "expected an option id"});
        continue;
      }
      const auto v = it->get<std::string>();
      const bool known =
          std::any_of(q.options.begin(), q.options.end(), [&](const Option& o) { return o.id == v; });
      if (!known) {
        issues.push_back({q.id, "unknown-option", "'" + v + "' is not an option"});
        continue;
      }
      r.answers[q.id] = v;
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return r;
}

// ---------------------------------------------------------------------------

int percent_hundredths(long long count, long long total) {
  if (total <= 0) throw std::invalid_argument("total must be positive");
  // round(count * 10000 / total) with halves rounded up, in integers.
  return static_cast<int>((2 * count * 10000 + total) / (2 * total));
}

const OptionStat* QuestionStat::option(std::string_view id) const {
  for (const auto& o : options) {
    if (o.option == id) return &o;
  }
  return nullptr;
}

double QuestionStat::percentage_sum() const {
  int sum = 0;
  for (const auto& o : options) sum += o.hundredths;
  return sum / 100.0;
}

const QuestionStat* AggregateReport::question(std::string_view id) const {
  for (const auto& q : questions) {
    if (q.question == id) return &q;
  }
  return nullptr;
}

namespace {

QuestionStat stat_from_counts(const Question& q, const std::map<std::string, int>& counts) {
  QuestionStat s;
  s.question = q.id;
  s.category = q.category;
  s.kind = q.kind;
  for (const auto& id : q.value_ids()) {
    const auto it = counts.find(id);
    s.respondents += it == counts.end() ? 0 : it->second;
  }
  long long weighted = 0;
  for (const auto& id : q.value_ids()) {
    OptionStat o;
    o.option = id;
    o.label = id;
    for (const auto& opt : q.options) {
      if (opt.id == id) o.label = opt.label;
    }
    const auto it = counts.find(id);
    o.count = it == counts.end() ? 0 : it->second;
    o.hundredths = s.respondents > 0 ? percent_hundredths(o.count, s.respondents) : 0;
    if (q.kind == AnswerKind::Likert) weighted += static_cast<long long>(std::stoi(id)) * o.count;
    s.options.push_back(std::move(o));
  }
  if (q.kind == AnswerKind::Likert && s.respondents > 0) {
    s.mean_hundredths = static_cast<int>((2 * weighted * 100 + s.respondents) / (2LL * s.respondents));
  }
  return s;
}

AggregateReport finish(const Instrument& instrument, std::vector<QuestionStat> stats) {
  AggregateReport r;
  r.instrument = instrument.id;
  r.questions = std::move(stats);
  r.respondents = r.questions.empty() ? 0 : r.questions.front().respondents;
  for (const auto& q : r.questions) {
    if (q.respondents != r.respondents) throw std::invalid_argument("question " + q.question + " has a different respondent count");
  }
  if (const auto* overall = r.question(kOverallQuestion); overall && overall->mean_hundredths) {
    r.overall_mean_hundredths = *overall->mean_hundredths;
  }
  return r;
}

}  // namespace

AggregateReport aggregate(const Instrument& instrument, const std::vector<Response>& responses) {
  if (responses.empty()) throw std::invalid_argument("cannot aggregate an empty response set");
  std::vector<QuestionStat> stats;
  for (const auto& q : instrument.questions) {
    std::map<std::string, int> counts;
    for (const auto& r : responses) {
      const auto it = r.answers.find(q.id);
      if (it == r.answers.end()) throw std::invalid_argument("response is missing question " + q.id);
      ++counts[answer_text(it->second)];
    }
    stats.push_back(stat_from_counts(q, counts));
  }
  return finish(instrument, std::move(stats));
}

ordered_json report_to_json(const AggregateReport& report) {
  ordered_json qs = ordered_json::array();
  for (const auto& q : report.questions) {
    ordered_json opts = ordered_json::array();
    for (const auto& o : q.options) {
      opts.push_back({{"option", o.option}, {"label", o.label}, {"count", o.count}, {"percentage", o.percentage()}});
    }
    ordered_json j{{"question_id", q.question},
                   {"category", to_string(q.category)},
                   {"kind", to_string(q.kind)},
                   {"respondents", q.respondents},
                   {"distribution", std::move(opts)}};
    if (q.mean_hundredths) j["mean"] = *q.mean_hundredths / 100.0;
    qs.push_back(std::move(j));
  }
  return {{"instrument", report.instrument},
          {"respondents", report.respondents},
          {"overall_mean", report.overall_mean()},
          {"questions", std::move(qs)}};
}

std::string export_report(const AggregateReport& report, ExportFormat format) {
  if (format == ExportFormat::Json) return report_to_json(report).dump(2) + "\n";
  std::string out = "question_id,category,option,count,percentage\n";
  for (const auto& q : report.questions) {
    for (const auto& o : q.options) {
      out += csv_field(q.question) + ',' + std::string(to_string(q.category)) + ',' + csv_field(o.option) + ',' +
             std::to_string(o.count) + ',' + format_hundredths(o.hundredths) + '\n';
    }
  }
  return out;
}

AggregateReport parse_report(const Instrument& instrument, std::string_view document, ExportFormat format) {
  std::map<std::string, std::map<std::string, int>> counts;
  std::map<std::string, std::map<std::string, int>> stated;
  if (format == ExportFormat::Json) {
    const auto doc = json::parse(document);
    if (doc.at("instrument").get<std::string>() != instrument.id) {
      throw std::invalid_argument("report belongs to a different instrument");
    }
    for (const auto& q : doc.at("questions")) {
      const auto qid = q.at("question_id").get<std::string>();
      for (const auto& o : q.at("distribution")) {
        const auto oid = o.at("option").get<std::string>();
        counts[qid][oid] = o.at("count").get<int>();
        stated[qid][oid] = static_cast<int>(std::llround(o.at("percentage").get<double>() * 100.0));
      }
    }
  } else {
    const auto lines = lines_of(document);
    if (lines.empty() || lines.front() != "question_id,category,option,count,percentage") {
      throw std::invalid_argument("missing report header");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split_csv_line(lines[i]);
      if (f.size() != 5) throw std::invalid_argument("line " + std::to_string(i + 1) + ": expected 5 fields");
      counts[f[0]][f[2]] = std::stoi(f[3]);
      stated[f[0]][f[2]] = parse_hundredths(f[4]);
    }
  }
  std::vector<QuestionStat> stats;
  for (const auto& q : instrument.questions) {
    const auto it = counts.find(q.id);
    if (it == counts.end()) throw std::invalid_argument("report is missing question " + q.id);
    for (const auto& [oid, _] : it->second) {
      const auto ids = q.value_ids();
      if (std::find(ids.begin(), ids.end(), oid) == ids.end()) {
        throw std::invalid_argument("unknown option '" + oid + "' for " + q.id);
      }
    }
    auto s = stat_from_counts(q, it->second);
    for (const auto& o : s.options) {
      if (stated[q.id][o.option] != o.hundredths) {
        throw std::invalid_argument("percentage for " + q.id + "/" + o.option + " does not match its count");
      }
    }
    stats.push_back(std::move(s));
  }
  if (counts.size() != instrument.questions.size()) throw std::invalid_argument("report has unknown questions");
  return finish(instrument, std::move(stats));
}

// ---------------------------------------------------------------------------

std::string responses_csv_header(const Instrument& instrument) {
  std::string out;
  for (const auto& q : instrument.questions) out += q.id + ',';
  return out + "session_id\n";
}

std::string response_csv_row(const Instrument& instrument, const Response& response) {
  std::string out;
  for (const auto& q : instrument.questions) {
    const auto it = response.answers.find(q.id);
    out += csv_field(it == response.answers.end() ? "" : answer_text(it->second)) + ',';
  }
  return out + csv_field(response.session_id.value_or("")) + '\n';
}

std::string responses_to_csv(const Instrument& instrument, const std::vector<Response>& responses) {
  std::string out = responses_csv_header(instrument);
  for (const auto& r : responses) out += response_csv_row(instrument, r);
  return out;
}

std::vector<Response> responses_from_csv(const Instrument& instrument, std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw std::invalid_argument("empty responses file");
  auto header = split_csv_line(lines.front());
  const bool has_session = !header.empty() && header.back() == "session_id";
  if (has_session) header.pop_back();
  std::vector<std::string> expected;
  for (const auto& q : instrument.questions) expected.push_back(q.id);
  if (header != expected) throw std::invalid_argument("responses header does not match the instrument");

  std::vector<Response> out;
  std::vector<Issue> issues;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = split_csv_line(lines[row]);
    const std::size_t width = expected.size() + (has_session ? 1 : 0);
    const std::string prefix = "row " + std::to_string(row) + ": ";
    if (fields.size() != width) {
      issues.push_back({"", "wrong-type", prefix + "expected " + std::to_string(width) + " fields"});
      continue;
    }
    json answers = json::object();
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto* q = instrument.find(expected[i]);
      const auto& v = fields[i];
      if (v.empty()) continue;
      if (q->kind == AnswerKind::Likert) {
        try {
          std::size_t used = 0;
          const long long n = std::stoll(v, &used);
          answers[q->id] = used == v.size() ? json(n) : json(v);
        } catch (const std::exception&) {
          answers[q->id] = v;
        }
      } else {
        answers[q->id] = v;
      }
    }
    std::optional<std::string> sid;
    if (has_session && !fields.back().empty()) sid = fields.back();
    try {
      out.push_back(validate_response(instrument, answers, sid));
    } catch (const ValidationError& e) {
      for (auto issue : e.issues()) {
        issue.message = prefix + issue.message;
        issues.push_back(std::move(issue));
      }
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return out;
}

}  // namespace campus::survey
