#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "optsample/ddg.hpp"
#include "optsample/optimize.hpp"

namespace optsample {

// File and schema problems (missing file, bad JSON, bad magic).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// {"weights": ["3/10", "7/10"]}; weights are integer or "a/b" strings (JSON
// integers also accepted) and are normalized by their exact sum.
std::vector<Rational> parse_weights(const nlohmann::json& j);
std::vector<Rational> load_distribution(const std::string& path);
void save_weights(const std::string& path, const std::vector<std::string>& weights);

nlohmann::json approx_result_to_json(const ApproxResult& r);

struct ApproxArtifact {
  Assignment assignment;
  PrecisionSpec spec;
  std::string divergence;
  std::string error;
  std::string mode;
};
ApproxArtifact approx_result_from_json(const nlohmann::json& j);

nlohmann::json encoding_to_json(const LinearEncoding& e);
LinearEncoding encoding_from_json(const nlohmann::json& j);

// Compact form: magic "DDG1", little-endian u32 n, k, l, cell count, then
// little-endian i64 cells.
std::vector<unsigned char> encoding_to_binary(const LinearEncoding& e);
LinearEncoding encoding_from_binary(const std::vector<unsigned char>& bytes);

// Sniffs the magic: binary encodings start with "DDG1", anything else is
// parsed as JSON.
LinearEncoding load_encoding(const std::string& path);
void save_encoding_json(const std::string& path, const nlohmann::json& j);
void save_encoding_binary(const std::string& path, const LinearEncoding& e);

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);
void save_text(const std::string& path, const std::string& text);

}  // namespace optsample
