#include "scpa/land_class.hpp"

#include <unordered_set>

#include "scpa/error.hpp"

namespace scpa {

namespace {

std::vector<std::string> default_names(std::uint32_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    names.push_back("class_" + std::to_string(i));
  }
  return names;
}

}  // namespace

LandClassSet::LandClassSet(std::uint32_t count)
    : LandClassSet(count, default_names(count)) {}

LandClassSet::LandClassSet(std::uint32_t count, std::vector<std::string> names)
    : count_(count), names_(std::move(names)) {
  if (count_ == 0) {
    throw DataError("land class set needs at least one class");
  }
  if (count_ > 0xFFFF) {
    throw DataError("class count " + std::to_string(count_) +
                    " exceeds the 16-bit class ID range");
  }
  if (names_.size() != count_) {
    throw DataError("expected " + std::to_string(count_) + " class names, got " +
                    std::to_string(names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate class name: " + name);
    }
  }
}

const std::string& LandClassSet::name(ClassId id) const {
  if (id >= count_) {
    throw DataError("class ID " + std::to_string(id) + " out of range for " +
                    std::to_string(count_) + " classes");
  }
  return names_[id];
}

}  // namespace scpa
