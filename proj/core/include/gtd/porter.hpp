#pragma once

#include <string>
#include <string_view>

namespace gtd {

// Classic Porter stemming algorithm (1980, steps 1a-5b, original rule
// lists). Operates on lowercase ASCII words; tokens containing anything
// other than a-z are returned unchanged, as are words of length <= 2.
std::string porter_stem(std::string_view word);

} // namespace gtd
