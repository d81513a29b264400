#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "campus/rng.hpp"

namespace campus::text {

// Simulated time advances in fixed steps of this length; cadence windows and
// stage timers are both measured in it.
inline constexpr std::chrono::milliseconds kTickDuration{100};

enum class BarrierKind { None, LetterMovement, WordSwapping };

std::string_view to_string(BarrierKind kind);
BarrierKind barrier_kind_from_string(std::string_view name);

// All barrier parameters in one record. misdirection_rate is consumed by the
// help-arrow mechanism, not by the text transforms.
struct BarrierConfig {
  std::uint64_t seed = 0;
  std::chrono::milliseconds scramble_cadence{2000};
  double swap_probability = 0.5;
  double misdirection_rate = 0.25;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const BarrierConfig&, const BarrierConfig&) = default;
};

struct RenderedText {
  std::string original;
  std::string rendered;
  std::int64_t tick = 0;

  friend bool operator==(const RenderedText&, const RenderedText&) = default;
};

// Lowercase word -> similar-sounding real words.
class HomophoneLexicon {
 public:
  HomophoneLexicon() = default;

  // Parses `key: alt1, alt2, ...` lines; `#` starts a comment. Throws
  // std::invalid_argument with the line number on malformed input or when an
  // alternative equals its key.
  static HomophoneLexicon parse(std::string_view document);

  // The curated lexicon compiled into the library.
  static const HomophoneLexicon& bundled();

  void add(std::string key, std::vector<std::string> alternatives);

  // `word` is matched case-insensitively. Returns nullptr when absent.
  const std::vector<std::string>* alternatives(std::string_view word) const;
  bool contains(std::string_view word) const { return alternatives(word) != nullptr; }

  const std::map<std::string, std::vector<std::string>, std::less<>>& entries() const {
    return entries_;
  }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

// Newline-separated lowercase word list shipped alongside the lexicon.
std::vector<std::string> bundled_word_list();

// Permutes every letter after the first. When the tail has at least two
// distinct letters the identity arrangement is rejected and redrawn, so the
// output always differs from the input. `word` must consist of letters only.
std::string scramble_word(std::string_view word, Rng& rng);

// Applies scramble_word to each maximal run of ASCII letters; every other
// byte stays in place.
RenderedText scramble_text(std::string_view text, Rng& rng);

// Each lexicon token is replaced with probability `swap_probability` by a
// uniformly drawn alternative. A leading capital is carried over.
RenderedText swap_words(std::string_view text, const HomophoneLexicon& lexicon,
                        double swap_probability, Rng& rng);

// Index of the cadence window containing `tick`.
std::int64_t cadence_window(std::int64_t tick, std::chrono::milliseconds cadence);

// Seed of the stream used for one (seed, text, window) triple.
std::uint64_t window_seed(std::uint64_t seed, std::string_view text, std::int64_t window);

// Barrier rendering as seen at `tick`. Output is constant within a cadence
// window. For word swapping, a window that would draw no swap at all forces one
// eligible token to swap (when swap_probability > 0) so the barrier never
// shows the plain text.
RenderedText render_at_tick(std::string_view text, const BarrierConfig& config,
                            BarrierKind kind, std::int64_t tick,
                            const HomophoneLexicon& lexicon = HomophoneLexicon::bundled());

// Maximal runs of ASCII letters, as [begin, end) byte offsets.
std::vector<std::pair<std::size_t, std::size_t>> letter_runs(std::string_view text);

}  // namespace campus::text
