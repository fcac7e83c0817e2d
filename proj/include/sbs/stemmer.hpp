#pragma once

#include <string>
#include <string_view>

namespace sbs {

// English Snowball (Porter2) suffix-stripping stemmer.
// Input is expected to be a lowercase token; ASCII letters drive the rules,
// other bytes are treated as consonants and pass through untouched.
std::string stem_english(std::string_view token);

}  // namespace sbs
