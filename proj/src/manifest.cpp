// Copyright (C) 2026 attr-forge contributors
// SPDX-License-Identifier: Apache-2.0

#include "attrforge/manifest.hpp"

#include <initializer_list>
#include <set>

#include "attrforge/error.hpp"
#include "attrforge/image_io.hpp"

namespace attrforge {
namespace {

using nlohmann::json;

void RejectUnknown(const json& j, std::initializer_list<const char*> keys, const char* where) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, std::string(where) + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error(ErrorCode::kValidation,
                  "unknown key '" + it.key() + "' in " + std::string(where));
    }
  }
}

}  // namespace

json ManifestToJson(const Manifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    json variants = json::array();
    for (const auto& v : e.variants) {
      json jv = {{"name", v.name}, {"spec", v.spec}};
      if (v.skip.empty()) {
        jv["output"] = v.output;
        jv["hash"] = v.hash;
      } else {
        jv["skip"] = v.skip;
      }
      variants.push_back(std::move(jv));
    }
    json je = {{"source", e.source}, {"mask", e.mask},         {"label", e.label},
               {"seed", e.seed},     {"variants", variants}};
    if (!e.skip.empty()) je["skip"] = e.skip;
    entries.push_back(std::move(je));
  }
  return {{"version", m.version},
          {"seed", m.seed},
          {"class_names", m.class_names},
          {"entries", entries}};
}

Manifest ManifestFromJson(const json& j) {
  Manifest m;
  try {
    RejectUnknown(j, {"version", "seed", "class_names", "entries"}, "manifest");
    m.version = j.at("version").get<int>();
    if (m.version != 1) throw Error(ErrorCode::kValidation, "unsupported manifest version");
    m.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("class_names")) m.class_names = j["class_names"].get<std::vector<std::string>>();
    for (const auto& je : j.at("entries")) {
      RejectUnknown(je, {"source", "mask", "label", "seed", "variants", "skip"}, "manifest entry");
      ManifestEntry e;
      e.source = je.at("source").get<std::string>();
      e.mask = je.at("mask").get<std::string>();
      e.label = je.at("label").get<int>();
      e.seed = je.at("seed").get<std::uint64_t>();
      if (je.contains("skip")) e.skip = je["skip"].get<std::string>();
      for (const auto& jv : je.at("variants")) {
        RejectUnknown(jv, {"name", "spec", "output", "hash", "skip"}, "manifest variant");
        ManifestVariant v;
        v.name = jv.at("name").get<std::string>();
        v.spec = jv.at("spec");
        if (jv.contains("skip")) {
          v.skip = jv["skip"].get<std::string>();
        } else {
          v.output = jv.at("output").get<std::string>();
          v.hash = jv.at("hash").get<std::string>();
        }
        e.variants.push_back(std::move(v));
      }
      m.entries.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kValidation, std::string("manifest: ") + ex.what());
  }
  return m;
}

std::string DumpJson(const json& j) { return j.dump(2) + "\n"; }

void SaveManifest(const std::filesystem::path& path, const Manifest& manifest) {
  WriteFileBytes(path, DumpJson(ManifestToJson(manifest)));
}

Manifest LoadManifest(const std::filesystem::path& path) {
  const std::string text = ReadFileBytes(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kValidation, "manifest is not valid JSON: " + std::string(ex.what()));
  }
  return ManifestFromJson(j);
}

std::vector<ImageListEntry> ReadImageList(const std::filesystem::path& path) {
  const std::string text = ReadFileBytes(path);
  const std::filesystem::path base = path.parent_path();
  std::vector<ImageListEntry> rows;
  std::size_t start = 0;
  int line_no = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("image,", 0) == 0) continue;
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(ErrorCode::kValidation,
                  path.string() + ":" + std::to_string(line_no) + ": expected image,mask,label");
    }
    ImageListEntry row;
    row.image = base / line.substr(0, c1);
    row.mask = base / line.substr(c1 + 1, c2 - c1 - 1);
    try {
      std::size_t pos = 0;
      const std::string label = line.substr(c2 + 1);
      row.label = std::stoi(label, &pos);
      if (pos != label.size() || row.label < 0) throw std::invalid_argument("label");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kValidation,
                  path.string() + ":" + std::to_string(line_no) + ": bad label");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void WriteImageList(const std::filesystem::path& path, const std::vector<ImageListEntry>& rows) {
  const std::filesystem::path base = path.parent_path();
  auto rel = [&](const std::filesystem::path& p) {
    return (base.empty() ? p : p.lexically_relative(base)).generic_string();
  };
  std::string out = "image,mask,label\n";
  for (const auto& r : rows) {
    out += rel(r.image) + "," + rel(r.mask) + "," + std::to_string(r.label) + "\n";
  }
  WriteFileBytes(path, out);
}

const json& EditSpecSchema() {
  static const json kSchema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "attrforge/edit-spec",
  "title": "attr-forge edit spec",
  "type": "object",
  "additionalProperties": false,
  "required": ["kind"],
  "properties": {
    "kind": {"enum": ["background", "size", "position", "direction"]},
    "background": {"enum": ["guided", "adversarial", "random", "template"]},
    "lambda": {"type": "number"},
    "template": {"type": "string"},
    "period": {"type": "integer", "minimum": 1},
    "size_mode": {"enum": ["scale", "rate", "full"]},
    "scale": {"type": "number", "exclusiveMinimum": 0},
    "rate": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    "base_rate": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
    "offset_x": {"type": "integer", "minimum": 0},
    "offset_y": {"type": "integer", "minimum": 0},
    "random_position": {"type": "boolean"},
    "angle": {"type": "number"},
    "random_angle": {"type": "boolean"},
    "t0": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer", "minimum": 0}
  }
})");
  return kSchema;
}

const json& ManifestSchema() {
  static const json kSchema = [] {
    json s = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "attrforge/manifest",
  "title": "attr-forge suite manifest",
  "type": "object",
  "additionalProperties": false,
  "required": ["version", "seed", "entries"],
  "properties": {
    "version": {"const": 1},
    "seed": {"type": "integer", "minimum": 0},
    "class_names": {"type": "array", "items": {"type": "string"}},
    "entries": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["source", "mask", "label", "seed", "variants"],
        "properties": {
          "source": {"type": "string"},
          "mask": {"type": "string"},
          "label": {"type": "integer", "minimum": 0},
          "seed": {"type": "integer", "minimum": 0},
          "skip": {"type": "string"},
          "variants": {
            "type": "array",
            "items": {
              "type": "object",
              "additionalProperties": false,
              "required": ["name", "spec"],
              "properties": {
                "name": {"type": "string"},
                "spec": {},
                "output": {"type": "string"},
                "hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
                "skip": {"type": "string"}
              },
              "oneOf": [{"required": ["output", "hash"]}, {"required": ["skip"]}]
            }
          }
        }
      }
    }
  }
})");
    s["properties"]["entries"]["items"]["properties"]["variants"]["items"]["properties"]["spec"] =
        EditSpecSchema();
    s["properties"]["entries"]["items"]["properties"]["variants"]["items"]["properties"]["spec"]
        .erase("$schema");
    return s;
  }();
  return kSchema;
}

const json& ReportSchema() {
  static const json kSchema = json::parse(R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "$id": "attrforge/report",
  "title": "attr-forge attribute report",
  "type": "object",
  "additionalProperties": false,
  "required": ["classes", "tencrop", "variants", "mean_da", "skips"],
  "properties": {
    "classes": {"type": "array", "items": {"type": "string"}},
    "tencrop": {"type": "boolean"},
    "mean_da": {"type": "number"},
    "variants": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["name", "n", "top1", "top1_se", "da", "da_se", "per_class"],
        "properties": {
          "name": {"type": "string"},
          "n": {"type": "integer", "minimum": 0},
          "top1": {"type": "number", "minimum": 0, "maximum": 1},
          "top1_se": {"type": "number", "minimum": 0},
          "da": {"type": "number"},
          "da_se": {"type": "number", "minimum": 0},
          "per_class": {
            "type": "array",
            "items": {
              "type": "object",
              "additionalProperties": false,
              "required": ["class", "n", "top1", "da"],
              "properties": {
                "class": {"type": "string"},
                "n": {"type": "integer", "minimum": 0},
                "top1": {"type": "number", "minimum": 0, "maximum": 1},
                "da": {"type": "number"}
              }
            }
          }
        }
      }
    },
    "skips": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["source", "reason"],
        "properties": {"source": {"type": "string"}, "reason": {"type": "string"}}
      }
    }
  }
})");
  return kSchema;
}

}  // namespace attrforge
