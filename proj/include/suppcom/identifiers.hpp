#pragma once

#include <string_view>

#include "suppcom/corpus.hpp"
#include "suppcom/text.hpp"

namespace suppcom {

// Code elements of a method: its name, parameters, locals (including
// catch/for/lambda variables), `this.field` accesses and invoked call names.
// A body that does not lex falls back to every non-keyword identifier-shaped
// token and is flagged `degraded`.
IdentifierSet extract_identifiers(std::string_view method_source);

inline IdentifierSet extract_identifiers(const MethodRecord& method) {
    return extract_identifiers(std::string_view(method.body));
}

}  // namespace suppcom
