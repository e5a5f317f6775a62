#pragma once

#include <string>
#include <string_view>

namespace evminer {

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
/// Words containing characters other than a-z are returned unchanged, as are
/// words of two letters or fewer.
std::string porter_stem(std::string_view word);

}  // namespace evminer
