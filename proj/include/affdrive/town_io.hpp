#pragma once

// Town files: YAML documents describing lanes, sidewalks, lights, signs and
// actors. The schema is documented in README.md ("Town file format").

#include <filesystem>
#include <stdexcept>
#include <string>

#include "affdrive/town.hpp"

namespace affdrive {

/// Load failure carrying the 1-based line of the offending node (0 if unknown).
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

Town parse_town(const std::string& text, const std::string& source = "<town>");
Town load_town_file(const std::filesystem::path& path);
std::string dump_town(const Town& town);

/// Built-in town name ("town-a", "town-b") or a path to a town file.
Town resolve_town(const std::string& name_or_path);

}  // namespace affdrive
