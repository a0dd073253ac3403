#include "dwrl/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dwrl/error.hpp"

namespace dwrl {

using nlohmann::json;

void Container::put(const std::string& name, const Tensor& t) {
  for (auto& [n, existing] : tensors_) {
    if (n == name) {
      existing = t;
      return;
    }
  }
  tensors_.emplace_back(name, t);
}

const Tensor& Container::get(const std::string& name) const {
  for (const auto& [n, t] : tensors_) {
    if (n == name) return t;
  }
  throw DomainError("checkpoint: missing tensor '" + name + "'");
}

bool Container::has(const std::string& name) const {
  for (const auto& [n, t] : tensors_) {
    if (n == name) return true;
  }
  return false;
}

std::vector<std::string> Container::tensor_names() const {
  std::vector<std::string> names;
  names.reserve(tensors_.size());
  for (const auto& [n, t] : tensors_) names.push_back(n);
  return names;
}

void Container::put_params(const std::string& prefix, const MlpParams& p) {
  meta[prefix + "/head"] = head_name(p.head);
  meta[prefix + "/layers"] = std::to_string(p.layers.size());
  for (const auto& [name, t] : p.named_tensors()) put(prefix + "/" + name, *t);
}

MlpParams Container::get_params(const std::string& prefix) const {
  auto head_it = meta.find(prefix + "/head");
  auto count_it = meta.find(prefix + "/layers");
  if (head_it == meta.end() || count_it == meta.end()) {
    throw ParseError("checkpoint: missing network metadata for '" + prefix + "'");
  }
  MlpParams p;
  p.head = head_from_name(head_it->second);
  const int layer_count = std::stoi(count_it->second);
  for (int k = 0; k < layer_count; ++k) {
    const std::string base = prefix + "/layer" + std::to_string(k) + "/";
    p.layers.push_back({get(base + "w"), get(base + "b")});
  }
  if (p.head == Head::kGaussian) p.log_std = get(prefix + "/log_std");
  return p;
}

void Container::put_adam(const std::string& prefix, const AdamState& s, const MlpParams& owner) {
  meta[prefix + "/step"] = std::to_string(s.step);
  for (std::size_t k = 0; k < s.m.size(); ++k) {
    const std::string base = prefix + "/layer" + std::to_string(k) + "/";
    put(base + "m_w", s.m[k].w);
    put(base + "m_b", s.m[k].b);
    put(base + "v_w", s.v[k].w);
    put(base + "v_b", s.v[k].b);
  }
  if (!owner.log_std.empty()) {
    put(prefix + "/m_log_std", s.m_log_std);
    put(prefix + "/v_log_std", s.v_log_std);
  }
}

AdamState Container::get_adam(const std::string& prefix, const MlpParams& owner) const {
  auto step_it = meta.find(prefix + "/step");
  if (step_it == meta.end()) throw ParseError("checkpoint: missing Adam state for '" + prefix + "'");
  AdamState s = AdamState::zeros_like(owner);
  s.step = std::stoll(step_it->second);
  for (std::size_t k = 0; k < owner.layers.size(); ++k) {
    const std::string base = prefix + "/layer" + std::to_string(k) + "/";
    s.m[k].w = get(base + "m_w");
    s.m[k].b = get(base + "m_b");
    s.v[k].w = get(base + "v_w");
    s.v[k].b = get(base + "v_b");
  }
  if (!owner.log_std.empty()) {
    s.m_log_std = get(prefix + "/m_log_std");
    s.v_log_std = get(prefix + "/v_log_std");
  }
  return s;
}

namespace {

inline void fnv_bytes(std::uint64_t& h, const void* ptr, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(ptr);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace

std::uint64_t Container::content_checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : meta) {
    fnv_bytes(h, k.data(), k.size());
    fnv_bytes(h, v.data(), v.size());
  }
  for (const auto& [name, t] : tensors_) {
    fnv_bytes(h, name.data(), name.size());
    for (auto d : t.shape) fnv_bytes(h, &d, sizeof(d));
    for (double x : t.data) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof(bits));
      fnv_bytes(h, &bits, sizeof(bits));
    }
  }
  return h;
}

void Container::save(const std::string& path) const {
  json doc;
  doc["magic"] = kMagic;
  doc["meta"] = meta;
  json tensors = json::array();
  for (const auto& [name, t] : tensors_) {
    json rec;
    rec["name"] = name;
    rec["shape"] = t.shape;
    rec["data"] = t.data;
    tensors.push_back(std::move(rec));
  }
  doc["tensors"] = std::move(tensors);
  doc["checksum"] = hex64(content_checksum());

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("checkpoint: cannot open '" + path + "' for writing");
  out << doc.dump();
  out << "\n";
}

Container Container::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("checkpoint: cannot open '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint: malformed file '" + path + "': " + e.what());
  }
  if (!doc.contains("magic") || doc["magic"] != kMagic) {
    throw ParseError("checkpoint: '" + path + "' is not a " + std::string(kMagic) +
                     " container (bad or missing magic header)");
  }
  Container c;
  c.meta = doc.value("meta", std::map<std::string, std::string>{});
  for (const auto& rec : doc.value("tensors", json::array())) {
    Tensor t;
    t.shape = rec.at("shape").get<std::vector<std::int64_t>>();
    t.data = rec.at("data").get<std::vector<double>>();
    if (Tensor::element_count(t.shape) != static_cast<std::int64_t>(t.data.size())) {
      throw ParseError("checkpoint: tensor '" + rec.at("name").get<std::string>() +
                       "' shape/data length mismatch");
    }
    c.tensors_.emplace_back(rec.at("name").get<std::string>(), std::move(t));
  }
  const std::string stored = doc.value("checksum", "");
  const std::string computed = hex64(c.content_checksum());
  if (stored != computed) {
    throw IntegrityError("checkpoint: checksum mismatch in '" + path + "' (stored " + stored +
                         ", computed " + computed + ")");
  }
  return c;
}

}  // namespace dwrl
