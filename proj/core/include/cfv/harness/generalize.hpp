#pragma once

#include <cfv/harness/test_suite.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace cfv::harness {

struct Substitution {
  frontend::Span call_site;
  std::string callee;
  unsigned argument = 0; // 0-based position
  std::int64_t original = 0;
  bool is_bool = false;
  std::string symbol; // nondet symbol of the fresh site
};

enum class Generalization : std::uint8_t {
  Automatic, // literal arguments were replaced
  Manual,    // the suite supplied nondet inputs itself
  None,      // nothing to generalize; the body is the original
};

const char* to_string(Generalization g);

struct GeneralizedTest {
  std::string origin;
  std::string section;
  FunctionPtr body;
  std::vector<Substitution> substitutions; // in pre-order of the call sites
  Generalization kind = Generalization::None;
};

/// Replaces every integer or boolean literal passed directly to a function in
/// `targets` with a fresh nondet value. Assert and assume statements are left
/// verbatim. A test that already reads nondet values is marked Manual; one
/// with no literal target argument comes back unchanged as None.
GeneralizedTest generalize(const TestCase& t, const std::set<std::string>& targets);

/// The test itself, as a trivially generalized test.
GeneralizedTest as_generalized(const TestCase& t);

} // namespace cfv::harness
