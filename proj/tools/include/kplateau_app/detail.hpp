#pragma once

// Config access helpers shared by the scenario runners.

#include <initializer_list>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "kplateau/io.hpp"

namespace kplateau::app {

// "name key=value key=value" strings such as "disk r=1".
struct Spec {
  std::string name;
  std::string context;
  std::map<std::string, std::string> args;

  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  void allow(std::initializer_list<const char*> keys) const;
};
Spec parse_spec(const std::string& text, const std::string& context);

void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& context);
double get_number(const nlohmann::json& j, const char* key, const std::string& context);
double get_number(const nlohmann::json& j, const char* key, const std::string& context, double fallback);
long long get_int(const nlohmann::json& j, const char* key, const std::string& context);
long long get_int(const nlohmann::json& j, const char* key, const std::string& context, long long fallback);
std::string get_string(const nlohmann::json& j, const char* key, const std::string& context, const std::string& fallback);
bool get_bool(const nlohmann::json& j, const char* key, const std::string& context, bool fallback);

}  // namespace kplateau::app
