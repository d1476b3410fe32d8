#ifndef TAXALIGN_TESTS_SUPPORT_HPP_
#define TAXALIGN_TESTS_SUPPORT_HPP_

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "taxalign/parser.hpp"

namespace taxalign::testing {

inline std::string data_path(const std::string& name) { return std::string(TAXALIGN_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline Alignment parse_or_throw(const std::string& text, ConstraintFlags flags = {}) {
  auto r = parse_alignment(text, flags);
  if (!r.ok()) {
    std::string msg;
    for (const auto& e : r.errors) msg += format_error(e) + "\n";
    throw std::runtime_error(msg);
  }
  return std::move(*r.alignment);
}

inline Alignment load_data(const std::string& name, ConstraintFlags flags = {}) {
  return parse_or_throw(slurp(data_path(name)), flags);
}

// T1 = A(B,C), T2 = D(E,F) with the given articulation lines.
inline Alignment two_leaf(const std::string& articulations) {
  return parse_or_throw("taxonomy 1 t1\n(A B C)\ntaxonomy 2 t2\n(D E F)\narticulations\n" + articulations);
}

// Single-concept taxonomies A and B.
inline Alignment singletons(const std::string& articulations) {
  return parse_or_throw("taxonomy 1 t1\n(A)\ntaxonomy 2 t2\n(B)\narticulations\n" + articulations);
}

}  // namespace taxalign::testing

#endif  // TAXALIGN_TESTS_SUPPORT_HPP_
