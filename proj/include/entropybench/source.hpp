#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace entropybench {

enum class SourceKind {
  os_entropy,
  crypto_below,
  seeded_deterministic,
  biased,
  file_transcript,
  llm_live,
};

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

/// Where a sample came from. `params` holds the kind-specific settings
/// (seed, bias profile, path, endpoint id).
struct SampleSource {
  SourceKind kind = SourceKind::os_entropy;
  nlohmann::json params = nlohmann::json::object();
  std::string label;

  /// Biased negative controls are synthetic fixtures and must say so in reports.
  bool synthetic() const { return kind == SourceKind::biased; }

  nlohmann::json to_json() const;
  static SampleSource from_json(const nlohmann::json& j);
};

}  // namespace entropybench
