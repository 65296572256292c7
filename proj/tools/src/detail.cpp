#include "kplateau_app/detail.hpp"

#include <charconv>
#include <set>
#include <sstream>

namespace kplateau::app {

using nlohmann::json;

namespace {

double to_number(const std::string& s, const std::string& what) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ParseError(what + ": '" + s + "' is not a number");
  return v;
}

}  // namespace

double Spec::number(const std::string& key) const {
  const auto it = args.find(key);
  if (it == args.end()) throw ParseError(context + ": missing '" + key + "='");
  return to_number(it->second, context + "." + key);
}

double Spec::number(const std::string& key, double fallback) const {
  return args.count(key) ? number(key) : fallback;
}

void Spec::allow(std::initializer_list<const char*> keys) const {
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : args)
    if (!ok.count(k)) throw ParseError(context + ": unknown parameter '" + k + "' for '" + name + "'");
}

Spec parse_spec(const std::string& text, const std::string& context) {
  Spec s;
  s.context = context;
  std::istringstream in(text);
  if (!(in >> s.name)) throw ParseError(context + ": empty specification");
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError(context + ": expected key=value, got '" + tok + "'");
    s.args[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return s;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& context) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ParseError(context + ": unknown key '" + it.key() + "'");
}

double get_number(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ParseError(context + "." + key + " is required");
  if (!j[key].is_number()) throw ParseError(context + "." + key + " must be a number");
  return j[key].get<double>();
}

double get_number(const json& j, const char* key, const std::string& context, double fallback) {
  return j.contains(key) ? get_number(j, key, context) : fallback;
}

long long get_int(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw ParseError(context + "." + key + " is required");
  if (!j[key].is_number_integer()) throw ParseError(context + "." + key + " must be an integer");
  return j[key].get<long long>();
}

long long get_int(const json& j, const char* key, const std::string& context, long long fallback) {
  return j.contains(key) ? get_int(j, key, context) : fallback;
}

std::string get_string(const json& j, const char* key, const std::string& context, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_string()) throw ParseError(context + "." + key + " must be a string");
  return j[key].get<std::string>();
}

bool get_bool(const json& j, const char* key, const std::string& context, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_boolean()) throw ParseError(context + "." + key + " must be true or false");
  return j[key].get<bool>();
}

}  // namespace kplateau::app
