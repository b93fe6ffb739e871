#include "optsample/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace optsample {

namespace {

Rational parse_weight_entry(const nlohmann::json& w) {
  if (w.is_string()) return Rational::parse(w.get<std::string>());
  if (w.is_number_integer()) {
    return Rational(mpz_class(std::to_string(w.get<long long>())));
  }
  throw IoError("weights must be integer or \"a/b\" fraction strings");
}

mpz_class parse_mpz(const std::string& text) {
  try {
    const Rational r = Rational::parse(text);
    if (!r.is_integer()) throw IoError("expected an integer, got " + text);
    return r.num();
  } catch (const std::invalid_argument&) {
    throw IoError("malformed integer string: " + text);
  }
}

void append_u32_le(std::vector<unsigned char>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void append_i64_le(std::vector<unsigned char>& out, int64_t v) {
  const uint64_t u = static_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(u >> (8 * i)));
}

uint32_t read_u32_le(const unsigned char* p) {
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

int64_t read_i64_le(const unsigned char* p) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return static_cast<int64_t>(v);
}

}  // namespace

std::vector<Rational> parse_weights(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_array()) {
    throw IoError("distribution file must be {\"weights\": [...]}");
  }
  std::vector<Rational> raw;
  Rational sum(0);
  for (const auto& w : j["weights"]) {
    Rational r;
    try {
      r = parse_weight_entry(w);
    } catch (const std::invalid_argument& e) {
      throw IoError(std::string("malformed weight: ") + e.what());
    }
    if (r.sign() < 0) throw IoError("weights must be nonnegative");
    raw.push_back(r);
    sum += r;
  }
  if (raw.empty()) throw IoError("weights array is empty");
  if (sum.is_zero()) throw IoError("weights sum to zero");
  for (Rational& r : raw) r = r / sum;
  return raw;
}

std::vector<Rational> load_distribution(const std::string& path) {
  return parse_weights(load_json(path));
}

void save_weights(const std::string& path, const std::vector<std::string>& weights) {
  nlohmann::json j;
  j["weights"] = weights;
  save_json(path, j);
}

nlohmann::json approx_result_to_json(const ApproxResult& r) {
  nlohmann::json j;
  j["k"] = r.spec.k;
  j["l"] = r.spec.l;
  j["Z"] = r.assignment.z.get_str();
  nlohmann::json m = nlohmann::json::array();
  for (const mpz_class& v : r.assignment.m) m.push_back(v.get_str());
  j["M"] = std::move(m);
  j["divergence"] = r.kind.name();
  j["error"] = r.error.str();
  j["mode"] = r.ctx.mode == EvalMode::kExact ? "exact" : "float";
  return j;
}

ApproxArtifact approx_result_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("k") || !j.contains("l") || !j.contains("M")) {
    throw IoError("approximation file must carry k, l, and M");
  }
  ApproxArtifact a;
  a.spec.k = j["k"].get<uint32_t>();
  a.spec.l = j["l"].get<uint32_t>();
  a.assignment.z = z_kl(a.spec);
  if (j.contains("Z") && parse_mpz(j["Z"].get<std::string>()) != a.assignment.z) {
    throw IoError("Z does not match the (k, l) number system");
  }
  for (const auto& v : j["M"]) {
    a.assignment.m.push_back(
        v.is_string() ? parse_mpz(v.get<std::string>())
                      : mpz_class(std::to_string(v.get<long long>())));
  }
  a.divergence = j.value("divergence", "");
  a.error = j.value("error", "");
  a.mode = j.value("mode", "");
  return a;
}

nlohmann::json encoding_to_json(const LinearEncoding& e) {
  nlohmann::json j;
  j["n"] = e.n;
  j["k"] = e.k;
  j["l"] = e.l;
  j["enc"] = e.enc;
  return j;
}

LinearEncoding encoding_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("k") || !j.contains("l") ||
      !j.contains("enc") || !j["enc"].is_array()) {
    throw IoError("encoding file must carry n, k, l, enc");
  }
  LinearEncoding e;
  e.n = j["n"].get<size_t>();
  e.k = j["k"].get<uint32_t>();
  e.l = j["l"].get<uint32_t>();
  e.enc = j["enc"].get<std::vector<int64_t>>();
  validate_encoding(e);
  return e;
}

std::vector<unsigned char> encoding_to_binary(const LinearEncoding& e) {
  std::vector<unsigned char> out = {'D', 'D', 'G', '1'};
  append_u32_le(out, static_cast<uint32_t>(e.n));
  append_u32_le(out, e.k);
  append_u32_le(out, e.l);
  append_u32_le(out, static_cast<uint32_t>(e.enc.size()));
  for (int64_t cell : e.enc) append_i64_le(out, cell);
  return out;
}

LinearEncoding encoding_from_binary(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 20 || std::memcmp(bytes.data(), "DDG1", 4) != 0) {
    throw IoError("missing DDG1 magic");
  }
  LinearEncoding e;
  e.n = read_u32_le(bytes.data() + 4);
  e.k = read_u32_le(bytes.data() + 8);
  e.l = read_u32_le(bytes.data() + 12);
  const uint32_t count = read_u32_le(bytes.data() + 16);
  if (bytes.size() != 20 + size_t{count} * 8) {
    throw IoError("binary encoding is truncated");
  }
  e.enc.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    e.enc.push_back(read_i64_le(bytes.data() + 20 + size_t{i} * 8));
  }
  validate_encoding(e);
  return e;
}

LinearEncoding load_encoding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "DDG1", 4) == 0) {
    return encoding_from_binary(bytes);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse ") + path + ": " + e.what());
  }
  return encoding_from_json(j);
}

void save_encoding_json(const std::string& path, const nlohmann::json& j) {
  save_json(path, j);
}

void save_encoding_binary(const std::string& path, const LinearEncoding& e) {
  const std::vector<unsigned char> bytes = encoding_to_binary(e);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("cannot parse ") + path + ": " + e.what());
  }
}

void save_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << text;
}

}  // namespace optsample
