#pragma once

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace kgwalk::cli {

/// Reads a JSON object as CLI11 configuration. Top-level scalars and arrays
/// apply to every subcommand; an object keyed by a subcommand name holds
/// settings for that subcommand only and wins over top-level keys.
class JsonConfig : public CLI::ConfigBase {
 public:
  explicit JsonConfig(std::vector<std::string> subcommands) : subcommands_(std::move(subcommands)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");

    std::map<std::string, std::vector<std::string>> shared;
    std::map<std::string, std::map<std::string, std::vector<std::string>>> sections;
    for (const auto& [key, value] : doc.items()) {
      if (value.is_object()) {
        for (const auto& [name, inner] : value.items()) sections[key][name] = inputs(key + "." + name, inner);
      } else {
        shared[key] = inputs(key, value);
      }
    }

    std::vector<CLI::ConfigItem> items;
    for (const auto& sub : subcommands_) {
      auto merged = shared;
      if (auto it = sections.find(sub); it != sections.end()) {
        for (const auto& [name, values] : it->second) merged[name] = values;
      }
      for (auto& [name, values] : merged) {
        CLI::ConfigItem item;
        item.parents = {sub};
        item.name = name;
        item.inputs = std::move(values);
        items.push_back(std::move(item));
      }
    }
    return items;
  }

 private:
  static std::vector<std::string> inputs(const std::string& key, const nlohmann::json& value) {
    std::vector<std::string> out;
    const auto scalar = [&](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      if (v.is_number() || v.is_null()) return v.dump();
      throw CLI::ConversionError("config key " + key + " must be a scalar or an array of scalars");
    };
    if (value.is_array()) {
      for (const auto& v : value) out.push_back(scalar(v));
    } else {
      out.push_back(scalar(value));
    }
    return out;
  }

  std::vector<std::string> subcommands_;
};

}  // namespace kgwalk::cli
