#include "scpa/palette.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scpa/error.hpp"

namespace scpa {

namespace {

std::uint32_t pack(Rgb c) {
  return (static_cast<std::uint32_t>(c.r) << 16) |
         (static_cast<std::uint32_t>(c.g) << 8) | c.b;
}

}  // namespace

Palette::Palette(std::vector<PaletteEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw DataError("palette needs at least one entry");
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const PaletteEntry& a, const PaletteEntry& b) { return a.id < b.id; });
  std::unordered_set<std::uint32_t> colors;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id != i) {
      throw DataError("palette IDs must be dense 0..L-1; missing or duplicate ID " +
                      std::to_string(i));
    }
    if (!colors.insert(pack(entries_[i].color)).second) {
      throw DataError("palette colors must be distinct; duplicate (" +
                      std::to_string(entries_[i].color.r) + ", " +
                      std::to_string(entries_[i].color.g) + ", " +
                      std::to_string(entries_[i].color.b) + ")");
    }
  }
}

const Rgb& Palette::color(ClassId id) const {
  if (id >= entries_.size()) {
    throw DataError("class ID " + std::to_string(id) + " not in palette of " +
                    std::to_string(entries_.size()) + " entries");
  }
  return entries_[id].color;
}

std::optional<ClassId> Palette::id_for(Rgb color) const {
  for (const auto& entry : entries_) {
    if (entry.color == color) return entry.id;
  }
  return std::nullopt;
}

LandClassSet Palette::classes() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& entry : entries_) names.push_back(entry.name);
  return LandClassSet(static_cast<std::uint32_t>(entries_.size()), std::move(names));
}

Palette default_palette() {
  return Palette({
      {0, {0, 0, 0}, "background"},
      {1, {255, 0, 0}, "farmland"},
      {2, {0, 255, 0}, "bare_land"},
      {3, {255, 255, 0}, "industrial"},
      {4, {0, 0, 255}, "parking"},
      {5, {128, 0, 128}, "residential"},
      {6, {0, 255, 255}, "water"},
  });
}

Palette load_palette(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open palette file " + path.string());
  }
  std::vector<PaletteEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long id = -1, r = -1, g = -1, b = -1;
    std::string name;
    fields >> id >> r >> g >> b >> name;
    if (fields.fail() || name.empty()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected `id r g b name`");
    }
    if (id < 0 || id > 0xFFFF || r < 0 || r > 255 || g < 0 || g > 255 || b < 0 ||
        b > 255) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": value out of range");
    }
    entries.push_back({static_cast<ClassId>(id),
                       {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                        static_cast<std::uint8_t>(b)},
                       name});
  }
  if (entries.empty()) {
    throw DataError("palette file " + path.string() + " has no entries");
  }
  return Palette(std::move(entries));
}

void save_palette(const Palette& palette, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write palette file " + path.string());
  }
  out << "# id r g b name\n";
  for (const auto& entry : palette.entries()) {
    out << entry.id << ' ' << static_cast<int>(entry.color.r) << ' '
        << static_cast<int>(entry.color.g) << ' ' << static_cast<int>(entry.color.b)
        << ' ' << entry.name << '\n';
  }
  if (!out.flush()) {
    throw IoError("failed writing palette file " + path.string());
  }
}

}  // namespace scpa
