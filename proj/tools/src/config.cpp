#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>
#include <toml.hpp>

#include "kplateau_app/app.hpp"

#ifndef KPLATEAU_VERSION_STRING
#define KPLATEAU_VERSION_STRING "v0.0.0"
#endif

namespace kplateau::app {

std::string version_string() { return KPLATEAU_VERSION_STRING; }

nlohmann::json parse_config_text(const std::string& text, bool json, const std::string& origin) {
  if (json) {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(origin + ": " + e.what());
    }
  }
  try {
    const toml::table t = toml::parse(text, origin);
    std::ostringstream s;
    s << toml::json_formatter{t};
    return nlohmann::json::parse(s.str());
  } catch (const toml::parse_error& e) {
    std::ostringstream s;
    s << origin << ':' << e.source().begin.line << ':' << e.source().begin.column << ": " << e.description();
    throw ParseError(s.str());
  }
}

nlohmann::json load_config(const std::filesystem::path& path, bool json) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  nlohmann::json j = parse_config_text(s.str(), json, path.string());
  if (!j.is_object()) throw ParseError(path.string() + ": top level must be a table");
  return j;
}

std::string scenario_hash(const nlohmann::json& config) {
  nlohmann::json c = config;
  if (c.is_object()) c.erase("seed");
  const std::string text = json_text(c, -1);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream s;
  for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return s.str();
}

void EventLog::emit(const std::string& event, nlohmann::json fields) const {
  if (!os_) return;
  nlohmann::json j = nlohmann::json::object();
  j["event"] = event;
  for (auto it = fields.begin(); it != fields.end(); ++it) j[it.key()] = it.value();
  *os_ << json_text(j, -1) << '\n' << std::flush;
}

}  // namespace kplateau::app
