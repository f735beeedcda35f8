#pragma once

#include <string>

#include "prs/scenegen.hpp"

namespace prs {

// Canonical JSON form of a scene: fixed field order, two-space indentation,
// every number printed with 17 significant digits so parsing recovers the
// exact double. Two equal scenes always produce identical bytes.
std::string scene_to_json(const Scene& scene);

// Inverse of scene_to_json; also accepts any JSON with the same schema.
// Raises Io on malformed documents, wrong version, or non-unit quaternions.
Scene scene_from_json(const std::string& text);

std::string stats_to_json(const SampleStats& stats);

// Escapes and double-quotes a string for embedding in JSON output.
std::string json_quote(const std::string& s);

// Write-to-temporary-then-rename, so readers never observe a partial file.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

void write_scene_file(const Scene& scene, const std::string& path);
Scene read_scene_file(const std::string& path);

}  // namespace prs
