#include "campus/text_barriers.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "campus/bundled_data.hpp"

namespace campus::text {

namespace {

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string apply_case_pattern(std::string_view source, std::string replacement) {
  if (!source.empty() && !replacement.empty() &&
      std::isupper(static_cast<unsigned char>(source.front()))) {
    replacement.front() =
        static_cast<char>(std::toupper(static_cast<unsigned char>(replacement.front())));
  }
  return replacement;
}

bool has_two_distinct(std::string_view s) {
  return std::adjacent_find(s.begin(), s.end(), std::not_equal_to<>()) != s.end();
}

}  // namespace

std::string_view to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::None: return "none";
    case BarrierKind::LetterMovement: return "letter-movement";
    case BarrierKind::WordSwapping: return "word-swapping";
  }
  return "none";
}

BarrierKind barrier_kind_from_string(std::string_view name) {
  if (name == "none") return BarrierKind::None;
  if (name == "letter-movement") return BarrierKind::LetterMovement;
  if (name == "word-swapping") return BarrierKind::WordSwapping;
  throw std::invalid_argument("unknown barrier kind '" + std::string(name) + "'");
}

void BarrierConfig::validate() const {
  if (!(swap_probability >= 0.0 && swap_probability <= 1.0)) {
    throw std::invalid_argument("swap_probability must lie in [0, 1]");
  }
  if (!(misdirection_rate >= 0.0 && misdirection_rate <= 1.0)) {
    throw std::invalid_argument("misdirection_rate must lie in [0, 1]");
  }
  if (scramble_cadence.count() <= 0) {
    throw std::invalid_argument("scramble_cadence must be positive");
  }
}

// ---------------------------------------------------------------------------
// Lexicon

HomophoneLexicon HomophoneLexicon::parse(std::string_view document) {
  HomophoneLexicon lexicon;
  std::size_t line_no = 0;
  while (!document.empty()) {
    ++line_no;
    const auto eol = document.find('\n');
    std::string_view line = document.substr(0, eol);
    document.remove_prefix(eol == std::string_view::npos ? document.size() : eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": missing ':'");
    }
    std::string key = to_lower(trim(line.substr(0, colon)));
    if (key.empty() || !std::all_of(key.begin(), key.end(), is_letter)) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": bad key");
    }

    std::vector<std::string> alternatives;
    std::string_view rest = line.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      auto alt = to_lower(trim(rest.substr(0, comma)));
      rest.remove_prefix(comma == std::string_view::npos ? rest.size() : comma + 1);
      if (alt.empty()) continue;
      if (!std::all_of(alt.begin(), alt.end(), is_letter)) {
        throw std::invalid_argument("lexicon line " + std::to_string(line_no) +
                                    ": alternative '" + alt + "' is not a word");
      }
      if (alt == key) {
        throw std::invalid_argument("lexicon line " + std::to_string(line_no) +
                                    ": alternative equals key '" + key + "'");
      }
      alternatives.push_back(std::move(alt));
    }
    if (alternatives.empty()) {
      throw std::invalid_argument("lexicon line " + std::to_string(line_no) + ": no alternatives");
    }
    lexicon.add(std::move(key), std::move(alternatives));
  }
  return lexicon;
}

const HomophoneLexicon& HomophoneLexicon::bundled() {
  static const HomophoneLexicon lexicon = parse(bundled::lexicon_text());
  return lexicon;
}

void HomophoneLexicon::add(std::string key, std::vector<std::string> alternatives) {
  key = to_lower(key);
  auto& slot = entries_[key];
  for (auto& alt : alternatives) {
    alt = to_lower(alt);
    if (alt == key) throw std::invalid_argument("alternative equals key '" + key + "'");
    if (std::find(slot.begin(), slot.end(), alt) == slot.end()) slot.push_back(std::move(alt));
  }
  if (slot.empty()) throw std::invalid_argument("no alternatives for '" + key + "'");
}

const std::vector<std::string>* HomophoneLexicon::alternatives(std::string_view word) const {
  const auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> bundled_word_list() {
  std::vector<std::string> words;
  std::string_view doc = bundled::word_list_text();
  while (!doc.empty()) {
    const auto eol = doc.find('\n');
    auto line = trim(doc.substr(0, eol));
    doc.remove_prefix(eol == std::string_view::npos ? doc.size() : eol + 1);
    if (!line.empty() && line.front() != '#') words.push_back(to_lower(line));
  }
  return words;
}

// ---------------------------------------------------------------------------
// Transforms

std::vector<std::pair<std::size_t, std::size_t>> letter_runs(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_letter(text[i])) {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && is_letter(text[i])) ++i;
    runs.emplace_back(begin, i);
  }
  return runs;
}

std::string scramble_word(std::string_view word, Rng& rng) {
  std::string out(word);
  if (out.size() < 3) return out;

  const std::string_view tail = word.substr(1);
  std::string sorted_tail(tail);
  std::sort(sorted_tail.begin(), sorted_tail.end());
  const bool can_differ = has_two_distinct(sorted_tail);

  do {
    // Fisher-Yates over the tail.
    for (std::size_t i = out.size() - 1; i > 1; --i) {
      const std::size_t j = 1 + rng.uniform_index(i);
      std::swap(out[i], out[j]);
    }
  } while (can_differ && std::string_view(out).substr(1) == tail);
  return out;
}

RenderedText scramble_text(std::string_view text, Rng& rng) {
  RenderedText result{std::string(text), std::string(text), 0};
  for (const auto& [begin, end] : letter_runs(text)) {
    const auto scrambled = scramble_word(text.substr(begin, end - begin), rng);
    result.rendered.replace(begin, end - begin, scrambled);
  }
  return result;
}

RenderedText swap_words(std::string_view text, const HomophoneLexicon& lexicon,
                        double swap_probability, Rng& rng) {
  RenderedText result{std::string(text), {}, 0};
  std::size_t cursor = 0;
  for (const auto& [begin, end] : letter_runs(text)) {
    result.rendered.append(text.substr(cursor, begin - cursor));
    const auto token = text.substr(begin, end - begin);
    const auto* alternatives = lexicon.alternatives(token);
    if (alternatives != nullptr && rng.bernoulli(swap_probability)) {
      const auto& pick = (*alternatives)[rng.uniform_index(alternatives->size())];
      result.rendered.append(apply_case_pattern(token, pick));
    } else {
      result.rendered.append(token);
    }
    cursor = end;
  }
  result.rendered.append(text.substr(cursor));
  return result;
}

std::int64_t cadence_window(std::int64_t tick, std::chrono::milliseconds cadence) {
  const auto elapsed_ms = tick * static_cast<std::int64_t>(kTickDuration.count());
  return elapsed_ms / static_cast<std::int64_t>(cadence.count());
}

std::uint64_t window_seed(std::uint64_t seed, std::string_view text, std::int64_t window) {
  return derive_seed(derive_seed(seed, fnv1a64(text)), static_cast<std::uint64_t>(window));
}

RenderedText render_at_tick(std::string_view text, const BarrierConfig& config,
                            BarrierKind kind, std::int64_t tick,
                            const HomophoneLexicon& lexicon) {
  if (tick < 0) throw std::invalid_argument("tick must be non-negative");
  const auto window = cadence_window(tick, config.scramble_cadence);
  Rng rng(window_seed(config.seed, text, window));

  RenderedText result;
  switch (kind) {
    case BarrierKind::None:
      result = RenderedText{std::string(text), std::string(text), 0};
      break;
    case BarrierKind::LetterMovement:
      result = scramble_text(text, rng);
      break;
    case BarrierKind::WordSwapping: {
      result = swap_words(text, lexicon, config.swap_probability, rng);
      if (result.rendered == result.original && config.swap_probability > 0.0) {
        std::vector<std::pair<std::size_t, std::size_t>> eligible;
        for (const auto& run : letter_runs(text)) {
          if (lexicon.contains(text.substr(run.first, run.second - run.first))) {
            eligible.push_back(run);
          }
        }
        if (!eligible.empty()) {
          const auto [begin, end] = eligible[rng.uniform_index(eligible.size())];
          const auto token = text.substr(begin, end - begin);
          const auto& alternatives = *lexicon.alternatives(token);
          const auto& pick = alternatives[rng.uniform_index(alternatives.size())];
          result.rendered.replace(begin, end - begin, apply_case_pattern(token, pick));
        }
      }
      break;
    }
  }
  result.tick = tick;
  return result;
}

}  // namespace campus::text
