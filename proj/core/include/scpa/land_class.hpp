#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scpa {

/// Dense land-class identifier; IDs run 0..L-1.
using ClassId = std::uint16_t;

/// The ordered set of L land classes with human-readable names.
/// Names default to "class_0".."class_{L-1}" and must be distinct.
class LandClassSet {
 public:
  explicit LandClassSet(std::uint32_t count);
  LandClassSet(std::uint32_t count, std::vector<std::string> names);

  std::uint32_t count() const { return count_; }
  const std::string& name(ClassId id) const;
  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const LandClassSet&, const LandClassSet&) = default;

 private:
  std::uint32_t count_ = 0;
  std::vector<std::string> names_;
};

}  // namespace scpa
