#pragma once

#include <string_view>
#include <vector>

#include "prs/ast.hpp"

namespace prs {

// Parses a model file: class blocks with literal property defaults.
std::vector<ModelClass> parse_model(std::string_view text);

// Parses a specification against loaded models. `hash_seed` lets the caller
// fold the model file into the recorded content hash.
SpecAST parse_spec(std::string_view text, std::vector<ModelClass> models,
                   uint64_t hash_seed = 0xcbf29ce484222325ull);

}  // namespace prs
