#include "mcfsel/dimacs.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace mcfsel {

namespace {

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::int64_t parse_int(std::string_view token, int line_no) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.begin(), token.end(), value);
  if (ec != std::errc() || ptr != token.end()) {
    throw ParseError(line_no, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Instance parse_dimacs(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_problem = false;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<Arc> arcs;
  std::vector<std::int64_t> supplies;
  std::vector<bool> supply_seen;

  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (tokens[0] == "c") continue;
    if (tokens[0] == "p") {
      if (have_problem) throw ParseError(line_no, "duplicate problem line");
      if (tokens.size() != 4 || tokens[1] != "min") {
        throw ParseError(line_no, "expected 'p min <vertices> <arcs>'");
      }
      n = parse_int(tokens[2], line_no);
      m = parse_int(tokens[3], line_no);
      if (n <= 0) throw ParseError(line_no, "vertex count must be positive");
      if (m < 0) throw ParseError(line_no, "arc count must be non-negative");
      supplies.assign(static_cast<std::size_t>(n), 0);
      supply_seen.assign(static_cast<std::size_t>(n), false);
      arcs.reserve(static_cast<std::size_t>(m));
      have_problem = true;
      continue;
    }
    if (!have_problem) {
      throw ParseError(line_no, "problem line must precede '" + std::string(tokens[0]) + "' line");
    }
    if (tokens[0] == "n") {
      if (tokens.size() != 3) throw ParseError(line_no, "expected 'n <vertex> <supply>'");
      const std::int64_t v = parse_int(tokens[1], line_no);
      if (v < 1 || v > n) throw ParseError(line_no, "vertex id out of range 1..n");
      const std::size_t idx = static_cast<std::size_t>(v - 1);
      if (supply_seen[idx]) throw ParseError(line_no, "duplicate node line for vertex " + std::to_string(v));
      supply_seen[idx] = true;
      supplies[idx] = parse_int(tokens[2], line_no);
      continue;
    }
    if (tokens[0] == "a") {
      if (tokens.size() != 6) {
        throw ParseError(line_no, "expected 'a <tail> <head> <lower> <capacity> <cost>'");
      }
      const std::int64_t tail = parse_int(tokens[1], line_no);
      const std::int64_t head = parse_int(tokens[2], line_no);
      const std::int64_t lower = parse_int(tokens[3], line_no);
      const std::int64_t capacity = parse_int(tokens[4], line_no);
      const std::int64_t cost = parse_int(tokens[5], line_no);
      if (tail < 1 || tail > n || head < 1 || head > n) {
        throw ParseError(line_no, "arc endpoint out of range 1..n");
      }
      if (lower != 0) throw ParseError(line_no, "nonzero lower bound is not supported");
      if (capacity < 0) throw ParseError(line_no, "negative capacity");
      if (cost < 0) throw ParseError(line_no, "negative cost");
      if (static_cast<std::int64_t>(arcs.size()) == m) {
        throw ParseError(line_no, "more arcs than declared on the problem line");
      }
      arcs.push_back({static_cast<Vertex>(tail - 1), static_cast<Vertex>(head - 1), cost, capacity});
      continue;
    }
    throw ParseError(line_no, "unknown line type '" + std::string(tokens[0]) + "'");
  }

  if (!have_problem) throw ParseError(line_no, "missing problem line");
  if (static_cast<std::int64_t>(arcs.size()) != m) {
    throw ParseError(line_no, "declared " + std::to_string(m) + " arcs but found " +
                                  std::to_string(arcs.size()));
  }
  return Instance(static_cast<Vertex>(n), std::move(arcs), std::move(supplies));
}

Instance parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

Instance read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in);
}

std::string write_dimacs(const Instance& instance) {
  std::string out;
  out += "p min " + std::to_string(instance.num_vertices()) + " " +
         std::to_string(instance.num_arcs()) + "\n";
  for (Vertex v = 0; v < instance.num_vertices(); ++v) {
    const std::int64_t b = instance.supply(v);
    if (b != 0) {
      out += "n " + std::to_string(v + 1) + " " + std::to_string(b) + "\n";
    }
  }
  for (const Arc& arc : instance.arcs()) {
    out += "a " + std::to_string(arc.tail + 1) + " " + std::to_string(arc.head + 1) + " 0 " +
           std::to_string(arc.capacity) + " " + std::to_string(arc.cost) + "\n";
  }
  return out;
}

void write_dimacs_file(const Instance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << write_dimacs(instance);
}

}  // namespace mcfsel
