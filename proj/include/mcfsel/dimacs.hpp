#ifndef MCFSEL_DIMACS_HPP
#define MCFSEL_DIMACS_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "mcfsel/instance.hpp"

namespace mcfsel {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// DIMACS min-cost-flow format:
//   c <comment>
//   p min <num_vertices> <num_arcs>        exactly once, first non-comment line
//   n <vertex_id> <supply>                 omitted vertices have supply 0
//   a <tail> <head> <lower> <capacity> <cost>   lower must be 0
// Vertex ids are 1-based in files, 0-based in Instance.
Instance parse_dimacs(std::istream& in);
Instance parse_dimacs(const std::string& text);
Instance read_dimacs_file(const std::string& path);

// Node lines are emitted only for nonzero supplies; arcs keep file order, so
// parse(write(x)) == x.
std::string write_dimacs(const Instance& instance);
void write_dimacs_file(const Instance& instance, const std::string& path);

}  // namespace mcfsel

#endif
