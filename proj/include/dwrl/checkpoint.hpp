#pragma once

#include <map>
#include <string>
#include <vector>

#include "dwrl/mlp.hpp"
#include "dwrl/tensor.hpp"

namespace dwrl {

// Self-describing checkpoint container: a flat list of named tensors plus
// string metadata, serialized as JSON with magic header "DWRL1" and an
// FNV-1a content checksum verified on load.
class Container {
 public:
  static constexpr const char* kMagic = "DWRL1";

  std::map<std::string, std::string> meta;

  void put(const std::string& name, const Tensor& t);
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const;
  std::vector<std::string> tensor_names() const;

  // Store every parameter tensor of a network under `prefix/...` together
  // with enough metadata to rebuild it.
  void put_params(const std::string& prefix, const MlpParams& p);
  MlpParams get_params(const std::string& prefix) const;

  void put_adam(const std::string& prefix, const AdamState& s, const MlpParams& owner);
  AdamState get_adam(const std::string& prefix, const MlpParams& owner) const;

  void save(const std::string& path) const;
  static Container load(const std::string& path);

  std::uint64_t content_checksum() const;

 private:
  std::vector<std::pair<std::string, Tensor>> tensors_;
};

}  // namespace dwrl
