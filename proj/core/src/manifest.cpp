#include "ictal/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ictal {

namespace {

[[noreturn]] void invalid(const std::string& why) {
  throw Error(ErrorCode::invalid_manifest, "manifest: " + why);
}

}  // namespace

std::filesystem::path Manifest::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

bool Manifest::has_subject(const std::string& subject) const {
  if (layouts.contains(subject)) return true;
  for (const auto& c : clips) {
    if (c.subject == subject) return true;
  }
  return false;
}

std::vector<std::string> Manifest::subjects() const {
  std::set<std::string> ids;
  for (const auto& [id, _] : layouts) ids.insert(id);
  for (const auto& c : clips) ids.insert(c.subject);
  return {ids.begin(), ids.end()};
}

std::vector<ClipRecord> Manifest::select(const std::string& subject, Split split) const {
  std::vector<ClipRecord> out;
  for (const auto& c : clips) {
    if (c.subject == subject && c.split == split) out.push_back(c);
  }
  return out;
}

ElectrodeLayout Manifest::layout_for(const std::string& subject) const {
  const auto it = layouts.find(subject);
  if (it == layouts.end()) {
    if (!has_subject(subject)) {
      throw Error(ErrorCode::unknown_subject, "unknown subject '" + subject + "'");
    }
    throw Error(ErrorCode::invalid_layout, "subject '" + subject + "' has no layout file");
  }
  return ElectrodeLayout::load(resolve(it->second));
}

void Manifest::validate() const {
  std::set<std::string> seen;
  for (const auto& c : clips) {
    if (c.subject.empty()) invalid("clip " + c.path.string() + " has no subject");
    if (!seen.insert(resolve(c.path).lexically_normal().string()).second) {
      invalid("duplicate clip path " + c.path.string());
    }
    if (c.split == Split::train && c.label == Label::unknown) {
      invalid("training clip " + c.path.string() + " has no label");
    }
  }
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open manifest " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    invalid(path.string() + " is not valid JSON: " + e.what());
  }

  Manifest m;
  m.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  try {
    if (doc.value("format", std::string{}) != "ictal-manifest") {
      invalid(path.string() + " lacks \"format\": \"ictal-manifest\"");
    }
    if (doc.value("version", 0) != 1) invalid("unsupported manifest version");
    m.preprocessed = doc.value("preprocessed", false);
    if (doc.contains("subjects")) {
      for (const auto& [id, entry] : doc["subjects"].items()) {
        if (entry.contains("layout")) m.layouts[id] = entry["layout"].get<std::string>();
      }
    }
    for (const auto& c : doc.at("clips")) {
      ClipRecord r;
      r.path = c.at("path").get<std::string>();
      r.subject = c.at("subject").get<std::string>();
      r.label = parse_label(c.value("label", std::string("unknown")));
      r.split = parse_split(c.at("split").get<std::string>());
      if (c.contains("group") && !c["group"].is_null()) r.group = c["group"].get<std::string>();
      m.clips.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("malformed entry: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::invalid_manifest) throw;
    invalid(e.what());
  }
  m.validate();
  return m;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "ictal-manifest";
  doc["version"] = 1;
  doc["preprocessed"] = manifest.preprocessed;
  nlohmann::json subjects = nlohmann::json::object();
  for (const auto& [id, layout] : manifest.layouts) {
    subjects[id] = {{"layout", layout.generic_string()}};
  }
  doc["subjects"] = subjects;
  nlohmann::json clips = nlohmann::json::array();
  for (const auto& c : manifest.clips) {
    nlohmann::json entry{{"path", c.path.generic_string()},
                         {"subject", c.subject},
                         {"label", to_string(c.label)},
                         {"split", to_string(c.split)}};
    if (c.group) entry["group"] = *c.group;
    clips.push_back(std::move(entry));
  }
  doc["clips"] = clips;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::io_error, "cannot write manifest " + path.string());
  out << doc.dump(2) << "\n";
}

Clip load_record(const Manifest& manifest, const ClipRecord& record) {
  Clip clip = load_clip(manifest.resolve(record.path));
  if (clip.label != Label::unknown && record.label != Label::unknown &&
      clip.label != record.label) {
    throw Error(ErrorCode::invalid_manifest,
                "label of " + record.path.string() + " disagrees with its clip header");
  }
  if (record.label != Label::unknown) clip.label = record.label;
  clip.subject_id = record.subject;
  clip.split = record.split;
  return clip;
}

}  // namespace ictal
