#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hqvmc {

/// Named tensor slot inside a flat parameter vector.
struct ParamSlot {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

class ParamLayout {
 public:
  const ParamSlot& add(std::string name, std::vector<int> shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    slots_.push_back({std::move(name), std::move(shape), total_, n});
    total_ += n;
    return slots_.back();
  }
  const ParamSlot& operator[](std::size_t i) const { return slots_[i]; }
  const ParamSlot& find(const std::string& name) const {
    for (const auto& s : slots_)
      if (s.name == name) return s;
    throw std::out_of_range("no parameter slot named " + name);
  }
  const std::vector<ParamSlot>& slots() const { return slots_; }
  std::size_t total() const { return total_; }

  /// FNV-1a over slot names, shapes and offsets.
  std::uint64_t checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint64_t v) {
      for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
      }
    };
    for (const auto& s : slots_) {
      for (char c : s.name) mix(static_cast<unsigned char>(c));
      for (int d : s.shape) mix(static_cast<std::uint64_t>(d));
      mix(s.offset);
    }
    return h;
  }

 private:
  std::vector<ParamSlot> slots_;
  std::size_t total_ = 0;
};

}  // namespace hqvmc
