#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "volsos/cli.hpp"
#include "volsos/errors.hpp"

namespace volsos::cli {

namespace {

using nlohmann::json;

struct Location {
  int line = 0;
  int column = 0;
};

Location location_of_offset(const std::string& text, std::size_t offset) {
  Location loc{1, 1};
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

// Schema errors carry the position of the first occurrence of the key in the text.
class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const auto pos = key.empty() ? std::string::npos : text_.find("\"" + key + "\"");
    const auto loc = pos == std::string::npos ? Location{} : location_of_offset(text_, pos);
    throw ParseError(message, loc.line, loc.column);
  }

  void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(where, "'" + where + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items())
      if (!ok.count(key)) fail(key, "unknown key '" + key + "' in " + where);
  }

  const json& required(const json& obj, const std::string& key, const std::string& where) const {
    if (!obj.contains(key)) fail(where, "missing key '" + key + "' in " + where);
    return obj.at(key);
  }

  double number(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "'" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "'" + key + "' must be finite");
    return d;
  }

  long long integer(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) fail(key, "'" + key + "' must be an integer");
    return v.get<long long>();
  }

  long long positive(const json& v, const std::string& key) const {
    const auto i = integer(v, key);
    if (i <= 0) fail(key, "'" + key + "' must be positive");
    return i;
  }

  std::string string(const json& v, const std::string& key) const {
    if (!v.is_string()) fail(key, "'" + key + "' must be a string");
    return v.get<std::string>();
  }

  Basis basis(const json& v, const std::string& key) const {
    const auto s = string(v, key);
    if (s == "monomial") return Basis::Monomial;
    if (s == "chebyshev") return Basis::ChebyshevTensor;
    fail(key, "'" + key + "' must be \"monomial\" or \"chebyshev\"");
  }

  Polynomial polynomial(const json& v, int n) const {
    only_keys(v, "inequalities", {"basis", "terms"});
    const Basis b = v.contains("basis") ? basis(v.at("basis"), "basis") : Basis::Monomial;
    const auto& terms = required(v, "terms", "polynomial");
    if (!terms.is_array()) fail("terms", "'terms' must be a list");
    std::vector<Polynomial::Term> out;
    for (const auto& t : terms) {
      only_keys(t, "terms", {"coefficient", "exponents"});
      const double c = number(required(t, "coefficient", "term"), "coefficient");
      const auto& e = required(t, "exponents", "term");
      if (!e.is_array() || static_cast<int>(e.size()) != n)
        fail("exponents", "'exponents' must list " + std::to_string(n) + " integers");
      std::vector<int> alpha;
      for (const auto& x : e) {
        const auto a = integer(x, "exponents");
        if (a < 0) fail("exponents", "exponents must be non-negative");
        alpha.push_back(static_cast<int>(a));
      }
      out.push_back({MultiIndex(alpha), c});
    }
    return to_basis(Polynomial::from_terms(n, b, out), Basis::Monomial);
  }

 private:
  const std::string& text_;
};

}  // namespace

ProblemFile parse_problem(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto loc = location_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(std::string("malformed problem file: ") + e.what(), loc.line, loc.column);
  }
  Reader r(text);
  r.only_keys(root, "problem file", {"dimension", "X", "K", "options"});

  ProblemFile pf;
  pf.dimension = static_cast<int>(r.positive(r.required(root, "dimension", "problem file"), "dimension"));
  const int n = pf.dimension;

  const auto& xj = r.required(root, "X", "problem file");
  r.only_keys(xj, "X", {"shape", "half_widths", "radius"});
  const auto shape = r.string(r.required(xj, "shape", "X"), "shape");
  try {
    if (shape == "box") {
      if (xj.contains("radius")) r.fail("radius", "'radius' applies to a ball, not a box");
      const auto& hw = r.required(xj, "half_widths", "X");
      if (!hw.is_array() || static_cast<int>(hw.size()) != n)
        r.fail("half_widths", "'half_widths' must list " + std::to_string(n) + " numbers");
      std::vector<double> widths;
      for (const auto& v : hw) widths.push_back(r.number(v, "half_widths"));
      pf.x = OuterDomain::box(widths);
    } else if (shape == "ball") {
      if (xj.contains("half_widths")) r.fail("half_widths", "'half_widths' applies to a box, not a ball");
      const double radius = xj.contains("radius") ? r.number(xj.at("radius"), "radius") : 1.0;
      pf.x = OuterDomain::ball(n, radius);
    } else {
      r.fail("shape", "'shape' must be \"box\" or \"ball\"");
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    r.fail("X", std::string("invalid X: ") + e.what());
  }

  const auto& kj = r.required(root, "K", "problem file");
  r.only_keys(kj, "K", {"inequalities"});
  const auto& ineq = r.required(kj, "inequalities", "K");
  if (!ineq.is_array() || ineq.empty()) r.fail("inequalities", "'inequalities' must be a non-empty list");
  std::vector<Polynomial> g;
  for (const auto& p : ineq) g.push_back(r.polynomial(p, n));
  pf.k = SemialgebraicSet(n, std::move(g), SemialgebraicSet::Role::InnerK);

  if (root.contains("options")) {
    const auto& o = root.at("options");
    r.only_keys(o, "options",
                {"basis", "dmin", "dmax", "step", "tol", "seed", "samples", "inclusion_samples", "reference_volume",
                 "approx_degrees", "grid_points", "t_values", "modulus_samples", "inner_samples",
                 "boundary_points"});
    auto& po = pf.options;
    if (o.contains("basis")) po.basis = r.basis(o.at("basis"), "basis");
    if (o.contains("dmin")) po.dmin = static_cast<int>(r.integer(o.at("dmin"), "dmin"));
    if (o.contains("dmax")) po.dmax = static_cast<int>(r.integer(o.at("dmax"), "dmax"));
    if (o.contains("step")) po.step = static_cast<int>(r.positive(o.at("step"), "step"));
    if (o.contains("tol")) po.tol = r.number(o.at("tol"), "tol");
    if (o.contains("seed")) {
      const auto s = r.integer(o.at("seed"), "seed");
      if (s < 0) r.fail("seed", "'seed' must be non-negative");
      po.seed = static_cast<std::uint64_t>(s);
    }
    if (o.contains("samples")) po.samples = r.positive(o.at("samples"), "samples");
    if (o.contains("inclusion_samples"))
      po.inclusion_samples = static_cast<int>(r.positive(o.at("inclusion_samples"), "inclusion_samples"));
    if (o.contains("reference_volume")) po.reference_volume = r.number(o.at("reference_volume"), "reference_volume");
    if (o.contains("approx_degrees")) {
      const auto& a = o.at("approx_degrees");
      if (!a.is_array()) r.fail("approx_degrees", "'approx_degrees' must be a list");
      std::vector<int> ds;
      for (const auto& v : a) ds.push_back(static_cast<int>(r.integer(v, "approx_degrees")));
      po.approx_degrees = ds;
    }
    if (o.contains("grid_points")) po.grid_points = static_cast<int>(r.positive(o.at("grid_points"), "grid_points"));
    if (o.contains("t_values")) {
      const auto& a = o.at("t_values");
      if (!a.is_array()) r.fail("t_values", "'t_values' must be a list");
      std::vector<double> ts;
      for (const auto& v : a) ts.push_back(r.number(v, "t_values"));
      po.t_values = ts;
    }
    if (o.contains("modulus_samples")) po.modulus_samples = r.positive(o.at("modulus_samples"), "modulus_samples");
    if (o.contains("inner_samples"))
      po.inner_samples = static_cast<int>(r.positive(o.at("inner_samples"), "inner_samples"));
    if (o.contains("boundary_points"))
      po.boundary_points = static_cast<int>(r.positive(o.at("boundary_points"), "boundary_points"));
  }
  return pf;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::vector<approx::RatePoint> parse_rate_csv(const std::string& text, const std::string& column) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) {
      cell.erase(0, cell.find_first_not_of(" \t\r"));
      cell.erase(cell.find_last_not_of(" \t\r") + 1);
      out.push_back(cell);
    }
    return out;
  };
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) header = split(line);
  }
  if (header.size() < 2) throw ParseError("CSV needs a header with at least two columns", line_no, 1);
  std::size_t vcol = 1;
  if (!column.empty()) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) throw ParseError("CSV has no column '" + column + "'", line_no, 1);
    vcol = static_cast<std::size_t>(it - header.begin());
  } else {
    for (const char* name : {"v_d", "e_d", "value"}) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it != header.end()) {
        vcol = static_cast<std::size_t>(it - header.begin());
        break;
      }
    }
  }

  std::vector<approx::RatePoint> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() <= vcol) throw ParseError("row has " + std::to_string(cells.size()) + " cells", line_no, 1);
    auto column_of = [&](std::size_t c) {
      int col = 1;
      for (std::size_t i = 0; i < c; ++i) col += static_cast<int>(cells[i].size()) + 1;
      return col;
    };
    double d = 0.0;
    try {
      std::size_t used = 0;
      d = std::stod(cells[0], &used);
      if (used != cells[0].size()) throw std::invalid_argument("trailing text");
    } catch (const std::exception&) {
      throw ParseError("degree '" + cells[0] + "' is not a number", line_no, 1);
    }
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
      std::size_t used = 0;
      v = std::stod(cells[vcol], &used);
      if (used != cells[vcol].size()) throw ParseError("value '" + cells[vcol] + "' is not a number", line_no, column_of(vcol));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      if (cells[vcol] != "NA") throw ParseError("value '" + cells[vcol] + "' is not a number", line_no, column_of(vcol));
    }
    if (std::isfinite(v)) out.push_back({d, v});
  }
  return out;
}

}  // namespace volsos::cli
