#pragma once

#include <string_view>
#include <vector>

#include "codefit/token.hpp"

namespace codefit::lang {

/// Full-fidelity lexing: every comment becomes a token, spans index into
/// `source`, and concatenating lexemes with the inter-token gaps reproduces
/// the input byte-for-byte. Throws LexError on an unrecognizable character.
std::vector<Token> tokenize(std::string_view source);

/// Same scanner, but unknown characters become single-byte Punct tokens
/// instead of throwing. Used where lexing must be total (featurization of
/// arbitrary corpus text).
std::vector<Token> tokenize_lenient(std::string_view source);

bool is_keyword(std::string_view word);

}  // namespace codefit::lang
