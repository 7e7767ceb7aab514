#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qcforge/frame_algebra.hpp"

#ifndef QCFORGE_DATA_DIR
#define QCFORGE_DATA_DIR "data"
#endif

namespace qcforge {

std::string data_dir() {
  if (const char* env = std::getenv("QCFORGE_DATA_DIR"); env && *env) return env;
  return QCFORGE_DATA_DIR;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UnknownName("cannot open algebra file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string algebra_path(const std::string& stem) { return data_dir() + "/algebras/" + stem + ".alg"; }

}  // namespace

std::string heisenberg_source(int n) {
  if (n < 1) throw UnknownName("heis(n) needs n >= 1");
  const int dim = 4 * n + 3;
  std::vector<int> h;
  for (int a = 0; a < 4 * n; ++a) h.push_back(a);
  auto w = standard_omegas(dim, h);
  std::ostringstream os;
  os << "algebra heis(" << n << ") dim " << dim << "\n";
  for (int a = 0; a < 4 * n; ++a) os << "d e" << a + 1 << " = 0\n";
  for (int s = 0; s < 3; ++s) os << "d e" << 4 * n + s + 1 << " = " << (w[s] * Rational(2)).str() << "\n";
  os << "qc horizontal = e1..e" << 4 * n << " ; vertical = e" << 4 * n + 1 << ",e" << 4 * n + 2 << ",e" << 4 * n + 3
     << "\n";
  return os.str();
}

QcFrameSpec catalog(std::string_view name) {
  std::string s(name);
  auto open = s.find('(');
  std::string stem = s.substr(0, open);
  std::string arg;
  if (open != std::string::npos) {
    if (s.back() != ')') throw UnknownName("malformed catalog name '" + s + "'");
    arg = s.substr(open + 1, s.size() - open - 2);
  }
  if (stem == "heis") {
    int n = 1;
    if (!arg.empty()) {
      Rational r = Rational::parse(arg);
      if (!r.is_integer() || r.sign() <= 0) throw UnknownName("heis(n) needs a positive integer n");
      n = static_cast<int>(r.numerator().get_si());
    }
    if (n <= 2) return parse_qc_spec(read_file(algebra_path("heis" + std::to_string(n))));
    return parse_qc_spec(heisenberg_source(n));
  }
  if (stem == "l0") {
    std::map<std::string, Rational> params;
    if (!arg.empty()) {
      if (arg.rfind("c=", 0) == 0) arg = arg.substr(2);
      params["c"] = Rational::parse(arg);
    }
    return parse_qc_spec(read_file(algebra_path("l0")), params);
  }
  if ((stem == "l1" || stem == "l2" || stem == "l3") && arg.empty()) return parse_qc_spec(read_file(algebra_path(stem)));
  throw UnknownName("unknown catalog entry '" + s + "'");
}

std::vector<std::string> catalog_names() { return {"heis(1)", "heis(2)", "l0(1)", "l1", "l2", "l3"}; }

}  // namespace qcforge
