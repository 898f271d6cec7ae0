#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <string>

#include "dsgrn.hpp"

namespace fixtures {

inline std::string network_file(const std::string& name) { return std::string(DSGRN_NETWORK_DIR) + "/" + name + ".txt"; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline dsgrn::RegulatoryNetwork network(const std::string& name) {
  return dsgrn::parse_network(read_text(network_file(name)));
}

inline dsgrn::FactorGraphLibrary& library() {
  static dsgrn::FactorGraphLibrary lib{std::filesystem::path(DSGRN_TEST_CACHE)};
  return lib;
}

inline const dsgrn::ParameterGraph& parameter_graph(const std::string& name) {
  static std::map<std::string, std::unique_ptr<dsgrn::ParameterGraph>> graphs;
  auto& slot = graphs[name];
  if (!slot) slot = std::make_unique<dsgrn::ParameterGraph>(dsgrn::build_parameter_graph(network(name), library()));
  return *slot;
}

inline const dsgrn::SignatureDatabase& database(const std::string& name) {
  static std::map<std::string, std::unique_ptr<dsgrn::SignatureDatabase>> dbs;
  auto& slot = dbs[name];
  if (!slot)
    slot = std::make_unique<dsgrn::SignatureDatabase>(
        dsgrn::build_database(read_text(network_file(name)), parameter_graph(name), 1));
  return *slot;
}

}  // namespace fixtures
