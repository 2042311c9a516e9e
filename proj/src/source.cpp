#include "entropybench/source.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace entropybench {

namespace {

constexpr std::array<std::pair<SourceKind, std::string_view>, 6> kKindNames{{
    {SourceKind::os_entropy, "os_entropy"},
    {SourceKind::crypto_below, "crypto_below"},
    {SourceKind::seeded_deterministic, "seeded_deterministic"},
    {SourceKind::biased, "biased"},
    {SourceKind::file_transcript, "file_transcript"},
    {SourceKind::llm_live, "llm_live"},
}};

}  // namespace

std::string_view to_string(SourceKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

SourceKind source_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw std::invalid_argument("unknown source kind: " + std::string(name));
}

nlohmann::json SampleSource::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind));
  j["params"] = params;
  j["label"] = label;
  if (synthetic()) j["synthetic"] = true;
  return j;
}

SampleSource SampleSource::from_json(const nlohmann::json& j) {
  SampleSource source;
  source.kind = source_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("params")) source.params = j.at("params");
  source.label = j.value("label", std::string(to_string(source.kind)));
  return source;
}

}  // namespace entropybench
