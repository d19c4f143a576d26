#pragma once

#include <cstdint>
#include <string>

namespace cfv::equivalence {

// Names of input symbols shared by the encoder, the miter and the
// interpreter. The function under check owns its nondet sites as "<self>" so
// that old and new versions pair positionally.

inline std::string param_symbol(std::size_t i) { return "arg" + std::to_string(i); }
inline std::string global_symbol(const std::string& name) { return "g." + name; }
inline std::string element_symbol(const std::string& name, std::size_t i) {
  return "g." + name + "[" + std::to_string(i) + "]";
}
inline std::string nondet_symbol(const std::string& owner, std::uint32_t site) {
  return "nondet:" + owner + "#" + std::to_string(site);
}

} // namespace cfv::equivalence
