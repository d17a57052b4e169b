#include "ictal/layout.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ictal/error.hpp"
#include "json.hpp"

namespace ictal {

namespace {

[[noreturn]] void invalid(const std::string& why) {
  throw Error(ErrorCode::invalid_layout, "electrode layout: " + why);
}

std::uint8_t small_index(const nlohmann::json& value, int max, const char* what) {
  const int v = value.get<int>();
  if (v < 0 || v > max) {
    invalid(std::string(what) + " must lie in 0.." + std::to_string(max));
  }
  return static_cast<std::uint8_t>(v);
}

}  // namespace

ElectrodeLayout::ElectrodeLayout(std::array<ElectrodePosition, kChannels> positions)
    : positions_(positions) {
  std::set<std::pair<int, int>> cells;
  std::size_t with_hemisphere = 0;
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto& p = positions_[c];
    if (p.strip > 3 || p.contact > 3) {
      invalid("channel " + std::to_string(c) + " has strip/contact outside 0..3");
    }
    if (!cells.insert({p.strip, p.contact}).second) {
      invalid("channels share strip " + std::to_string(p.strip) + " contact " +
              std::to_string(p.contact));
    }
    if (p.hemisphere) {
      if (*p.hemisphere > 1) invalid("hemisphere must be 0 or 1");
      ++with_hemisphere;
    }
  }
  if (with_hemisphere != 0 && with_hemisphere != kChannels) {
    invalid("hemisphere given for some channels but not all");
  }
  has_hemispheres_ = with_hemisphere == kChannels;
  if (!has_hemispheres_) return;

  std::map<int, int> strip_side;
  for (const auto& p : positions_) {
    auto [it, inserted] = strip_side.emplace(p.strip, *p.hemisphere);
    if (!inserted && it->second != *p.hemisphere) {
      invalid("strip " + std::to_string(p.strip) + " spans both hemispheres");
    }
  }
  std::array<std::vector<int>, 2> strips_of;
  for (auto [strip, side] : strip_side) strips_of[side].push_back(strip);
  if (strips_of[0].size() != 2 || strips_of[1].size() != 2) {
    invalid("each hemisphere must hold exactly two strips");
  }
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto& side = strips_of[*positions_[c].hemisphere];
    strip_rank_[c] = positions_[c].strip == side[0] ? 0 : 1;
  }
}

ElectrodeLayout ElectrodeLayout::identity(bool with_hemispheres) {
  std::array<ElectrodePosition, kChannels> positions;
  for (std::size_t c = 0; c < kChannels; ++c) {
    positions[c].strip = static_cast<std::uint8_t>(c / 4);
    positions[c].contact = static_cast<std::uint8_t>(c % 4);
    if (with_hemispheres) positions[c].hemisphere = static_cast<std::uint8_t>(c / 8);
  }
  return ElectrodeLayout(positions);
}

std::uint8_t ElectrodeLayout::strip_within_hemisphere(std::size_t c) const {
  if (!has_hemispheres_) {
    throw Error(ErrorCode::invalid_layout, "electrode layout has no hemisphere assignment");
  }
  return strip_rank_.at(c);
}

std::size_t ElectrodeLayout::grid_index_4x4(std::size_t c) const {
  const auto& p = positions_.at(c);
  return p.strip * 4u + p.contact;
}

std::size_t ElectrodeLayout::grid_index_2x2x4(std::size_t c) const {
  const auto& p = positions_.at(c);
  return *p.hemisphere * 8u + strip_within_hemisphere(c) * 4u + p.contact;
}

std::string ElectrodeLayout::to_json_text() const {
  nlohmann::json channels = nlohmann::json::array();
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto& p = positions_[c];
    nlohmann::json entry{{"channel", c}, {"strip", p.strip}, {"contact", p.contact}};
    if (p.hemisphere) entry["hemisphere"] = *p.hemisphere;
    channels.push_back(std::move(entry));
  }
  return nlohmann::json{{"channels", channels}}.dump(2) + "\n";
}

ElectrodeLayout ElectrodeLayout::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("channels") || !doc["channels"].is_array()) {
    invalid("expected an object with a \"channels\" array");
  }
  for (const auto& [key, _] : doc.items()) {
    if (key != "channels") invalid("unknown key \"" + key + "\"");
  }
  const auto& channels = doc["channels"];
  if (channels.size() != kChannels) {
    invalid("expected 16 channel entries, found " + std::to_string(channels.size()));
  }
  std::array<ElectrodePosition, kChannels> positions;
  std::array<bool, kChannels> seen{};
  try {
    for (const auto& entry : channels) {
      for (const auto& [key, _] : entry.items()) {
        if (key != "channel" && key != "strip" && key != "contact" && key != "hemisphere") {
          invalid("unknown key \"" + key + "\"");
        }
      }
      const auto c = entry.at("channel").get<std::size_t>();
      if (c >= kChannels || seen[c]) invalid("channel indices must be 0..15, each once");
      seen[c] = true;
      positions[c].strip = small_index(entry.at("strip"), 3, "strip");
      positions[c].contact = small_index(entry.at("contact"), 3, "contact");
      if (entry.contains("hemisphere") && !entry["hemisphere"].is_null()) {
        positions[c].hemisphere = small_index(entry["hemisphere"], 1, "hemisphere");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed channel entry: ") + e.what());
  }
  return ElectrodeLayout(positions);
}

ElectrodeLayout ElectrodeLayout::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open layout file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_json_text(text.str());
}

void ElectrodeLayout::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write layout file " + path.string());
  out << to_json_text();
}

}  // namespace ictal
