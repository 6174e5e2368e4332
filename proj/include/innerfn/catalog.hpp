#pragma once

// The built-in catalog is a directory of spec files; entries are the
// top-level *.json files, ordered by file name.

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "innerfn/error.hpp"
#include "innerfn/spec_io.hpp"

namespace innerfn {

struct CatalogEntry {
  std::string name;  // file stem
  std::string path;
  FunctionSpec spec;
};

/// Loads every entry whose name starts with `selector` ("" or "all" selects
/// everything). Any malformed entry aborts the load with a ParseError.
inline std::vector<CatalogEntry> load_catalog(const std::string& dir,
                                              const std::string& selector = "") {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ParseError("catalog directory '" + dir + "' not found");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<CatalogEntry> out;
  for (const auto& p : files) {
    const std::string name = p.stem().string();
    if (!selector.empty() && selector != "all" && name.rfind(selector, 0) != 0) continue;
    out.push_back({name, p.string(), load_function_spec(p.string())});
  }
  return out;
}

}  // namespace innerfn
