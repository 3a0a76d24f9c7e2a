#pragma once

#include <fstream>
#include <sstream>
#include <string>

#ifndef EAGI_DATA_DIR
#error "EAGI_DATA_DIR must be defined by the build"
#endif

namespace testpaths {

inline std::string data(const std::string& name) { return std::string(EAGI_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string bank_text() { return slurp(data("evtol_bank.json")); }

}  // namespace testpaths
