#include "vinedep/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vinedep/errors.hpp"

namespace vinedep {

namespace {

void fmt_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw NumericError("canonical_dump: non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
  // Keep a numeric token ("1" stays "1"; json integers handled separately).
}

void dump_rec(const json& j, std::string& out, int indent, int depth) {
  auto pad = [&](int d) { out.append(static_cast<size_t>(d) * indent, ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        pad(depth + 1);
        out += json(it.key()).dump();
        out += ": ";
        dump_rec(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      pad(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        pad(depth + 1);
        dump_rec(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      pad(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      fmt_double(out, j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string canonical_dump(const json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += '\n';
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << content;
  if (!f) throw DataError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw DataError("invalid JSON: " + path);
  return j;
}

}  // namespace vinedep
