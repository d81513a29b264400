#pragma once

#include <string_view>

// Data files compiled into the library at configure time (see cmake/embed.cmake).
namespace campus::bundled {

std::string_view lexicon_text();      // data/lexicon/homophones.txt
std::string_view word_list_text();    // data/lexicon/words.txt
std::string_view default_world();     // worlds/default/world.json
std::string_view survey_instrument(); // surveys/post-experience/instrument.json

}  // namespace campus::bundled
